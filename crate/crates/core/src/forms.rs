//! Cochain storage and arithmetic: homogeneous r-forms and inhomogeneous
//! forms with sixteen component planes per site.
//!
//! Storage is dense per degree: a degree-r form holds `C(4,r)` component
//! planes over the stored sites (padded box in zero-padded mode, the torus in
//! periodic mode). Coefficients read as zero outside storage, which is
//! exactly the vanishing-outside-the-domain convention the operators assume.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryMode, DirectionSet, Domain, MultiIndex};
use crate::scalar::Scalar;
use crate::Complex64;

/// Coefficient distribution for [`Form::random`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueSet {
    /// Integers in `-3..=3`; identities stay bit-exact.
    SmallIntegers,
    /// Uniform draws from `[-1, 1)` per real component.
    UniformReals,
}

/// Scalars that the seeded random-form generator knows how to draw.
pub trait SampleCoeff: Scalar {
    fn sample<R: Rng>(rng: &mut R, set: ValueSet) -> Self;
}

impl SampleCoeff for i64 {
    fn sample<R: Rng>(rng: &mut R, _set: ValueSet) -> Self {
        // Integer scalars always draw small integers.
        Uniform::new_inclusive(-3i64, 3).sample(rng)
    }
}

impl SampleCoeff for f64 {
    fn sample<R: Rng>(rng: &mut R, set: ValueSet) -> Self {
        match set {
            ValueSet::SmallIntegers => Uniform::new_inclusive(-3i64, 3).sample(rng) as f64,
            ValueSet::UniformReals => rng.gen_range(-1.0..1.0),
        }
    }
}

impl SampleCoeff for Complex64 {
    fn sample<R: Rng>(rng: &mut R, set: ValueSet) -> Self {
        let re = f64::sample(rng, set);
        let im = f64::sample(rng, set);
        Complex64::new(re, im)
    }
}

impl SampleCoeff for crate::ExactComplex {
    fn sample<R: Rng>(rng: &mut R, _set: ValueSet) -> Self {
        // Small dyadic rationals keep exact arithmetic cheap.
        let num = Uniform::new_inclusive(-3i64, 3).sample(rng);
        let den = 1i64 << rng.gen_range(0..2u32);
        let q = num_rational::BigRational::new(num.into(), den.into());
        crate::ExactComplex::new(q, num_rational::BigRational::from_integer(0.into()))
    }
}

/// Homogeneous degree-r cochain over a finite domain.
#[derive(Clone, PartialEq)]
pub struct Form<S> {
    degree: u8,
    domain: Domain,
    /// One plane per direction set of the degree, lexicographic order.
    planes: Vec<Vec<S>>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(degree: u8, domain: Domain) -> Self {
        assert!(degree <= 4, "form degree must be 0..=4");
        let sites = domain.storage_site_count();
        let planes = DirectionSet::by_degree(degree as usize)
            .iter()
            .map(|_| vec![S::zero(); sites])
            .collect();
        Form {
            degree,
            domain,
            planes,
        }
    }

    /// The cochain with coefficient 1 at `(dirs, site)` and zero elsewhere.
    pub fn basis(degree: u8, dirs: DirectionSet, site: MultiIndex, domain: Domain) -> Result<Self> {
        if dirs.len() != degree as usize {
            return Err(Error::DirectionSize {
                got: dirs.len(),
                expected: degree as usize,
            });
        }
        if !domain.is_interior(domain.canonical(site)) {
            return Err(Error::NotInterior(site));
        }
        let mut f = Form::zero(degree, domain);
        f.set_coeff(dirs, site, S::one());
        Ok(f)
    }

    /// Deterministic pseudo-random form supported on interior sites.
    pub fn random(degree: u8, domain: Domain, seed: u64, set: ValueSet) -> Self
    where
        S: SampleCoeff,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(degree, domain, &mut rng, set)
    }

    /// Same as [`Form::random`] but driven by a caller-owned stream.
    pub fn random_with<R: Rng>(degree: u8, domain: Domain, rng: &mut R, set: ValueSet) -> Self
    where
        S: SampleCoeff,
    {
        let mut f = Form::zero(degree, domain);
        for plane in 0..f.planes.len() {
            for site in domain.interior_sites() {
                let idx = domain.storage_index(site).expect("interior site stored");
                f.planes[plane][idx] = S::sample(rng, set);
            }
        }
        f
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn sets(&self) -> &'static [DirectionSet] {
        DirectionSet::by_degree(self.degree as usize)
    }

    /// Coefficient at `(dirs, site)`; zero outside storage, wrapped in
    /// periodic mode. Panics if `dirs` has the wrong size.
    pub fn coeff(&self, dirs: DirectionSet, site: MultiIndex) -> S {
        debug_assert_eq!(dirs.len(), self.degree as usize);
        match self.domain.storage_index(site) {
            Some(idx) => self.planes[dirs.lex_rank()][idx].clone(),
            None => S::zero(),
        }
    }

    /// Overwrite a coefficient; writes outside the stored box are dropped.
    pub fn set_coeff(&mut self, dirs: DirectionSet, site: MultiIndex, value: S) {
        debug_assert_eq!(dirs.len(), self.degree as usize);
        if let Some(idx) = self.domain.storage_index(site) {
            self.planes[dirs.lex_rank()][idx] = value;
        }
    }

    /// Accumulate into a coefficient; returns false when the write fell
    /// outside the stored box.
    pub fn add_coeff(&mut self, dirs: DirectionSet, site: MultiIndex, value: S) -> bool {
        debug_assert_eq!(dirs.len(), self.degree as usize);
        match self.domain.storage_index(site) {
            Some(idx) => {
                self.planes[dirs.lex_rank()][idx] += value;
                true
            }
            None => false,
        }
    }

    /// Pointwise `a*f + b*g`.
    pub fn linear_combine(a: S, f: &Form<S>, b: S, g: &Form<S>) -> Result<Form<S>> {
        if f.degree != g.degree {
            return Err(Error::DegreeMismatch(f.degree, g.degree));
        }
        if f.domain != g.domain {
            return Err(Error::DomainMismatch);
        }
        let mut out = Form::zero(f.degree, f.domain);
        for p in 0..out.planes.len() {
            for i in 0..out.planes[p].len() {
                out.planes[p][i] =
                    a.clone() * f.planes[p][i].clone() + b.clone() * g.planes[p][i].clone();
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: &S) -> Form<S> {
        let mut out = self.clone();
        for plane in &mut out.planes {
            for v in plane.iter_mut() {
                *v *= s.clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.planes.iter().all(|p| p.iter().all(|v| v.is_zero()))
    }

    /// Squared Euclidean norm of all stored coefficients (as `f64`).
    pub fn norm_sq(&self) -> f64 {
        self.planes
            .iter()
            .map(|p| p.iter().map(|v| v.abs_sq()).sum::<f64>())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest coefficient magnitude over stored sites.
    pub fn max_abs(&self) -> f64 {
        self.planes
            .iter()
            .flat_map(|p| p.iter().map(|v| v.abs_sq().sqrt()))
            .fold(0.0, f64::max)
    }

    /// True when every coefficient outside the interior is zero. Always true
    /// in periodic mode (there is no outside).
    pub fn is_interior_supported(&self) -> bool {
        match self.domain.mode() {
            BoundaryMode::Periodic => true,
            BoundaryMode::ZeroPadded => {
                for site in self.domain.storage_sites() {
                    if self.domain.is_interior(site) {
                        continue;
                    }
                    let idx = self.domain.storage_index(site).unwrap();
                    if self.planes.iter().any(|p| !p[idx].is_zero()) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Zero every coefficient outside the interior.
    pub fn clamp_to_interior(&mut self) {
        if self.domain.mode() == BoundaryMode::Periodic {
            return;
        }
        for site in self.domain.storage_sites() {
            if self.domain.is_interior(site) {
                continue;
            }
            let idx = self.domain.storage_index(site).unwrap();
            for p in &mut self.planes {
                p[idx] = S::zero();
            }
        }
    }

    /// Nonzero coefficients in canonical order `(dirs lex, site row-major)`.
    pub fn iter_nonzero(&self) -> Vec<(DirectionSet, MultiIndex, S)> {
        let mut out = Vec::new();
        for (rank, &dirs) in self.sets().iter().enumerate() {
            for site in self.domain.storage_sites() {
                let idx = self.domain.storage_index(site).unwrap();
                let v = &self.planes[rank][idx];
                if !v.is_zero() {
                    out.push((dirs, site, v.clone()));
                }
            }
        }
        out
    }

    /// Map coefficients into another scalar type, e.g. lifting `f64` data
    /// into exact rationals.
    pub fn map_scalars<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Form<T> {
        Form {
            degree: self.degree,
            domain: self.domain,
            planes: self
                .planes
                .iter()
                .map(|p| p.iter().map(&mut f).collect())
                .collect(),
        }
    }
}

impl<S: Scalar> std::fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}-form on {:?} {:?}, {} nonzero",
            self.degree,
            self.domain.extents(),
            self.domain.mode(),
            self.iter_nonzero().len()
        )
    }
}

impl<S: Scalar> std::ops::Add for &Form<S> {
    type Output = Form<S>;
    fn add(self, rhs: &Form<S>) -> Form<S> {
        Form::linear_combine(S::one(), self, S::one(), rhs).expect("add: shape mismatch")
    }
}

impl<S: Scalar> std::ops::Sub for &Form<S> {
    type Output = Form<S>;
    fn sub(self, rhs: &Form<S>) -> Form<S> {
        Form::linear_combine(S::one(), self, -S::one(), rhs).expect("sub: shape mismatch")
    }
}

impl<S: Scalar> std::ops::Neg for &Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        self.scaled(&-S::one())
    }
}

/// Formal sum of forms of degrees 0..=4 over one domain: sixteen component
/// planes per site.
#[derive(Clone, PartialEq)]
pub struct InhomogeneousForm<S> {
    parts: [Form<S>; 5],
}

impl<S: Scalar> InhomogeneousForm<S> {
    pub fn zero(domain: Domain) -> Self {
        InhomogeneousForm {
            parts: std::array::from_fn(|r| Form::zero(r as u8, domain)),
        }
    }

    pub fn from_parts(parts: [Form<S>; 5]) -> Result<Self> {
        let domain = parts[0].domain();
        for (r, p) in parts.iter().enumerate() {
            if p.degree() != r as u8 {
                return Err(Error::DegreeMismatch(p.degree(), r as u8));
            }
            if p.domain() != domain {
                return Err(Error::DomainMismatch);
            }
        }
        Ok(InhomogeneousForm { parts })
    }

    /// Embed a homogeneous form as the only nonzero part.
    pub fn from_form(form: Form<S>) -> Self {
        let mut w = InhomogeneousForm::zero(form.domain());
        let slot = form.degree() as usize;
        w.parts[slot] = form;
        w
    }

    pub fn random(domain: Domain, seed: u64, set: ValueSet) -> Self
    where
        S: SampleCoeff,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        InhomogeneousForm {
            parts: std::array::from_fn(|r| Form::random_with(r as u8, domain, &mut rng, set)),
        }
    }

    pub fn domain(&self) -> Domain {
        self.parts[0].domain()
    }

    pub fn part(&self, degree: usize) -> &Form<S> {
        &self.parts[degree]
    }

    pub fn part_mut(&mut self, degree: usize) -> &mut Form<S> {
        &mut self.parts[degree]
    }

    pub fn parts(&self) -> &[Form<S>; 5] {
        &self.parts
    }

    pub fn set_part(&mut self, form: Form<S>) -> Result<()> {
        if form.domain() != self.domain() {
            return Err(Error::DomainMismatch);
        }
        let slot = form.degree() as usize;
        self.parts[slot] = form;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Form::is_zero)
    }

    pub fn norm_sq(&self) -> f64 {
        self.parts.iter().map(Form::norm_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.parts.iter().map(Form::max_abs).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: &S) -> Self {
        InhomogeneousForm {
            parts: std::array::from_fn(|r| self.parts[r].scaled(s)),
        }
    }

    pub fn map_scalars<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> InhomogeneousForm<T> {
        InhomogeneousForm {
            parts: std::array::from_fn(|r| self.parts[r].map_scalars(&mut f)),
        }
    }

    /// Coefficient addressed by any direction set (the set size picks the part).
    pub fn coeff(&self, dirs: DirectionSet, site: MultiIndex) -> S {
        self.parts[dirs.len()].coeff(dirs, site)
    }

    pub fn set_coeff(&mut self, dirs: DirectionSet, site: MultiIndex, value: S) {
        self.parts[dirs.len()].set_coeff(dirs, site, value);
    }
}

impl<S: Scalar> std::fmt::Debug for InhomogeneousForm<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "inhomogeneous form on {:?} {:?}",
            self.domain().extents(),
            self.domain().mode()
        )
    }
}

impl<S: Scalar> std::ops::Add for &InhomogeneousForm<S> {
    type Output = InhomogeneousForm<S>;
    fn add(self, rhs: &InhomogeneousForm<S>) -> InhomogeneousForm<S> {
        InhomogeneousForm {
            parts: std::array::from_fn(|r| &self.parts[r] + &rhs.parts[r]),
        }
    }
}

impl<S: Scalar> std::ops::Sub for &InhomogeneousForm<S> {
    type Output = InhomogeneousForm<S>;
    fn sub(self, rhs: &InhomogeneousForm<S>) -> InhomogeneousForm<S> {
        InhomogeneousForm {
            parts: std::array::from_fn(|r| &self.parts[r] - &rhs.parts[r]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundaryMode;

    fn dom() -> Domain {
        Domain::new([3, 3, 3, 3], BoundaryMode::ZeroPadded).unwrap()
    }

    #[test]
    fn basis_form_places_a_single_unit() {
        let k = MultiIndex::new(1, 1, 1, 1);
        let f: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        assert_eq!(f.coeff(DirectionSet::EMPTY, k), 1);
        assert_eq!(f.iter_nonzero().len(), 1);

        let s01 = DirectionSet::from_dirs(&[0, 1]).unwrap();
        let g: Form<i64> = Form::basis(2, s01, k, dom()).unwrap();
        assert_eq!(g.coeff(s01, k), 1);
    }

    #[test]
    fn basis_form_rejects_mismatches() {
        let k = MultiIndex::new(1, 1, 1, 1);
        let s01 = DirectionSet::from_dirs(&[0, 1]).unwrap();
        assert!(Form::<i64>::basis(1, s01, k, dom()).is_err());
        assert!(
            Form::<i64>::basis(0, DirectionSet::EMPTY, MultiIndex::new(0, 1, 1, 1), dom()).is_err()
        );
    }

    #[test]
    fn random_forms_are_seed_deterministic_and_interior() {
        let a: Form<i64> = Form::random(2, dom(), 7, ValueSet::SmallIntegers);
        let b: Form<i64> = Form::random(2, dom(), 7, ValueSet::SmallIntegers);
        assert_eq!(a, b);
        assert!(a.is_interior_supported());
        let c: Form<i64> = Form::random(2, dom(), 8, ValueSet::SmallIntegers);
        assert_ne!(a, c);
        for (_, _, v) in a.iter_nonzero() {
            assert!((-3..=3).contains(&v));
        }
    }

    #[test]
    fn linear_combine_cancels_exactly() {
        let f: Form<i64> = Form::random(1, dom(), 3, ValueSet::SmallIntegers);
        let z = Form::linear_combine(1, &f, -1, &f).unwrap();
        assert!(z.is_zero());

        let k = MultiIndex::new(2, 2, 2, 2);
        let e0 = Form::<i64>::basis(1, DirectionSet::from_dirs(&[0]).unwrap(), k, dom()).unwrap();
        let e1 = Form::<i64>::basis(1, DirectionSet::from_dirs(&[1]).unwrap(), k, dom()).unwrap();
        let sum = Form::linear_combine(1, &e0, 1, &e1).unwrap();
        assert_eq!(sum.iter_nonzero().len(), 2);

        let doubled = Form::linear_combine(2, &e0, 0, &e1).unwrap();
        assert_eq!(doubled.coeff(DirectionSet::from_dirs(&[0]).unwrap(), k), 2);
    }

    #[test]
    fn linear_combine_rejects_shape_mismatch() {
        let f: Form<i64> = Form::zero(1, dom());
        let g: Form<i64> = Form::zero(2, dom());
        assert!(Form::linear_combine(1, &f, 1, &g).is_err());
        let other = Domain::new([2, 2, 2, 2], BoundaryMode::ZeroPadded).unwrap();
        let h: Form<i64> = Form::zero(1, other);
        assert!(Form::linear_combine(1, &f, 1, &h).is_err());
    }

    #[test]
    fn inhomogeneous_parts_share_the_domain() {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(dom(), 5, ValueSet::SmallIntegers);
        for r in 0..5 {
            assert_eq!(w.part(r).degree(), r as u8);
            assert_eq!(w.part(r).domain(), dom());
        }
        let sum = &w + &w;
        let diff = &sum - &w;
        assert_eq!(diff, w);
    }
}
