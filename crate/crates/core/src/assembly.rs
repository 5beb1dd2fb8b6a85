//! Sparse matrix realizations of every linear operator over an enumerated
//! cochain basis, plus dense kernel/eigen computations and Matrix Market
//! export.
//!
//! Columns are ordered by degree, then direction set (lexicographic), then
//! site (row-major, time slowest) — the same enumeration everywhere, so
//! matrix indices are reproducible. Zero-padded matrices run over interior
//! sites only; the ghost-zero semantics is folded into the stencils.

use std::io::{BufRead, Write as IoWrite};

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{self, DiracSign};
use crate::dirac_kahler::{dk_residual, duffin_residual, DuffinPair};
use crate::error::{Error, Result};
use crate::forms::{Form, InhomogeneousForm};
use crate::lattice::{DirectionSet, Domain, MultiIndex};
use crate::massless;
use crate::scalar::Scalar;
use crate::Complex64;

/// Hard cap for the dense kernel/eigen fallback.
pub const DENSE_SIZE_GUARD: usize = 5000;

/// Which coefficient space a matrix axis enumerates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisSpace {
    /// All classes of one degree.
    Homogeneous(u8),
    /// All sixteen classes.
    Inhomogeneous,
    /// Two consecutive degrees `r`, `r+1` stacked (low block first).
    Pair(u8),
}

impl BasisSpace {
    fn degrees(&self) -> Vec<u8> {
        match self {
            BasisSpace::Homogeneous(r) => vec![*r],
            BasisSpace::Inhomogeneous => vec![0, 1, 2, 3, 4],
            BasisSpace::Pair(r) => vec![*r, *r + 1],
        }
    }

    pub fn len(&self, domain: &Domain) -> usize {
        let sites = domain.interior_site_count();
        self.degrees()
            .iter()
            .map(|&r| DirectionSet::by_degree(r as usize).len() * sites)
            .sum()
    }

    pub fn is_empty(&self, domain: &Domain) -> bool {
        self.len(domain) == 0
    }

    /// Label of one coordinate: `(degree, direction set, site)`.
    pub fn label(&self, domain: &Domain, mut index: usize) -> (u8, DirectionSet, MultiIndex) {
        let sites = domain.interior_site_count();
        for r in self.degrees() {
            let classes = DirectionSet::by_degree(r as usize);
            let block = classes.len() * sites;
            if index < block {
                let dirs = classes[index / sites];
                let site = site_at(domain, index % sites);
                return (r, dirs, site);
            }
            index -= block;
        }
        panic!("basis index out of range");
    }

    /// Coordinate of a label; `None` when the degree is not in this space.
    pub fn index(
        &self,
        domain: &Domain,
        degree: u8,
        dirs: DirectionSet,
        site: MultiIndex,
    ) -> Option<usize> {
        let sites = domain.interior_site_count();
        let mut offset = 0usize;
        for r in self.degrees() {
            let classes = DirectionSet::by_degree(r as usize);
            if r == degree {
                let s = site_rank(domain, site)?;
                return Some(offset + dirs.lex_rank() * sites + s);
            }
            offset += classes.len() * sites;
        }
        None
    }
}

fn site_rank(domain: &Domain, site: MultiIndex) -> Option<usize> {
    if !domain.is_interior(site) {
        return None;
    }
    let n = domain.extents();
    let mut rank = 0usize;
    for a in 0..4 {
        rank = rank * n[a] + (site.get(a) - 1) as usize;
    }
    Some(rank)
}

fn site_at(domain: &Domain, mut rank: usize) -> MultiIndex {
    let n = domain.extents();
    let mut k = [0i64; 4];
    for a in (0..4).rev() {
        k[a] = (rank % n[a]) as i64 + 1;
        rank /= n[a];
    }
    MultiIndex(k)
}

/// Operator tags the assembler understands. Mass-dependent tags carry their
/// parameters in the matrix scalar type.
#[derive(Clone, PartialEq, Debug)]
pub enum OperatorKind<S = f64> {
    Coboundary(u8),
    Codifferential(u8),
    Star(u8),
    Laplacian(u8),
    DiracPlus,
    DiracMinus,
    /// Dirac-Kähler residual operator `(d - δ) - m`.
    Dk(S),
    /// Residual operator of the two-mass system.
    TwoMass(S, S),
    /// Residual operator of the rank-r Duffin system (pair space).
    Duffin(u8, S),
}

impl<S: Scalar> OperatorKind<S> {
    pub fn col_space(&self) -> BasisSpace {
        match self {
            OperatorKind::Coboundary(r)
            | OperatorKind::Codifferential(r)
            | OperatorKind::Star(r)
            | OperatorKind::Laplacian(r) => BasisSpace::Homogeneous(*r),
            OperatorKind::DiracPlus
            | OperatorKind::DiracMinus
            | OperatorKind::Dk(_)
            | OperatorKind::TwoMass(_, _) => BasisSpace::Inhomogeneous,
            OperatorKind::Duffin(r, _) => BasisSpace::Pair(*r),
        }
    }

    pub fn row_space(&self) -> BasisSpace {
        match self {
            OperatorKind::Coboundary(r) => BasisSpace::Homogeneous((*r + 1).min(4)),
            OperatorKind::Codifferential(r) => BasisSpace::Homogeneous(r.saturating_sub(1)),
            OperatorKind::Star(r) => BasisSpace::Homogeneous(4 - *r),
            OperatorKind::Laplacian(r) => BasisSpace::Homogeneous(*r),
            OperatorKind::DiracPlus
            | OperatorKind::DiracMinus
            | OperatorKind::Dk(_)
            | OperatorKind::TwoMass(_, _) => BasisSpace::Inhomogeneous,
            OperatorKind::Duffin(r, _) => BasisSpace::Pair(*r),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            OperatorKind::Coboundary(r) => format!("coboundary_{r}"),
            OperatorKind::Codifferential(r) => format!("codifferential_{r}"),
            OperatorKind::Star(r) => format!("star_{r}"),
            OperatorKind::Laplacian(r) => format!("laplacian_{r}"),
            OperatorKind::DiracPlus => "dirac_plus".into(),
            OperatorKind::DiracMinus => "dirac_minus".into(),
            OperatorKind::Dk(_) => "dk".into(),
            OperatorKind::TwoMass(_, _) => "two_mass".into(),
            OperatorKind::Duffin(r, _) => format!("duffin_{r}"),
        }
    }
}

/// Sparse operator matrix with its basis bookkeeping.
#[derive(Clone, Debug)]
pub struct OperatorMatrix<S> {
    rows: usize,
    cols: usize,
    /// Nonzero entries sorted by column, then row.
    entries: Vec<(u32, u32, S)>,
    row_space: Option<BasisSpace>,
    col_space: Option<BasisSpace>,
    domain: Domain,
    tag: String,
}

impl<S: Scalar> OperatorMatrix<S> {
    pub fn from_entries(
        rows: usize,
        cols: usize,
        mut entries: Vec<(u32, u32, S)>,
        row_space: Option<BasisSpace>,
        col_space: Option<BasisSpace>,
        domain: Domain,
        tag: impl Into<String>,
    ) -> Self {
        entries.retain(|(_, _, v)| !v.is_zero());
        entries.sort_by_key(|&(r, c, _)| (c, r));
        OperatorMatrix {
            rows,
            cols,
            entries,
            row_space,
            col_space,
            domain,
            tag: tag.into(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, S)] {
        &self.entries
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn row_space(&self) -> Option<BasisSpace> {
        self.row_space
    }

    pub fn col_space(&self) -> Option<BasisSpace> {
        self.col_space
    }

    pub fn identity(space: BasisSpace, domain: Domain) -> Self {
        let n = space.len(&domain);
        let entries = (0..n as u32).map(|i| (i, i, S::one())).collect();
        OperatorMatrix::from_entries(n, n, entries, Some(space), Some(space), domain, "identity")
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![S::zero(); self.rows];
        for &(r, c, ref val) in &self.entries {
            out[r as usize] += val.clone() * v[c as usize].clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, ref v)| (c, r, v.clone()))
            .collect();
        OperatorMatrix::from_entries(
            self.cols,
            self.rows,
            entries,
            self.col_space,
            self.row_space,
            self.domain,
            format!("{}^T", self.tag),
        )
    }

    /// Sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &OperatorMatrix<S>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::NotSquare {
                rows: self.cols,
                cols: rhs.rows,
            });
        }
        // rows of self indexed by column for the accumulation
        let mut by_col: Vec<Vec<(u32, S)>> = vec![Vec::new(); self.cols];
        for &(r, c, ref v) in &self.entries {
            by_col[c as usize].push((r, v.clone()));
        }
        let mut acc: std::collections::BTreeMap<(u32, u32), S> = std::collections::BTreeMap::new();
        for &(mid, c, ref v) in &rhs.entries {
            for (r, left) in &by_col[mid as usize] {
                let slot = acc.entry((*r, c)).or_insert_with(S::zero);
                *slot += left.clone() * v.clone();
            }
        }
        let entries = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Ok(OperatorMatrix::from_entries(
            self.rows,
            rhs.cols,
            entries,
            self.row_space,
            rhs.col_space,
            self.domain,
            format!("{}*{}", self.tag, rhs.tag),
        ))
    }

    pub fn sub(&self, rhs: &OperatorMatrix<S>) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::NotSquare {
                rows: rhs.rows,
                cols: rhs.cols,
            });
        }
        let mut entries = self.entries.clone();
        entries.extend(rhs.entries.iter().map(|&(r, c, ref v)| (r, c, -v.clone())));
        let mut acc: std::collections::BTreeMap<(u32, u32), S> = std::collections::BTreeMap::new();
        for (r, c, v) in entries {
            let slot = acc.entry((r, c)).or_insert_with(S::zero);
            *slot += v;
        }
        let entries = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Ok(OperatorMatrix::from_entries(
            self.rows,
            self.cols,
            entries,
            self.row_space,
            self.col_space,
            self.domain,
            format!("{}-{}", self.tag, rhs.tag),
        ))
    }

    pub fn scaled(&self, s: &S) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, ref v)| (r, c, v.clone() * s.clone()))
            .collect();
        OperatorMatrix::from_entries(
            self.rows,
            self.cols,
            entries,
            self.row_space,
            self.col_space,
            self.domain,
            self.tag.clone(),
        )
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry-wise equality after normalization (zero entries dropped, sorted).
    pub fn same_entries(&self, other: &OperatorMatrix<S>) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, _, v)| v.abs_sq().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Coefficient vector of a homogeneous form over the interior basis.
pub fn form_to_vec<S: Scalar>(form: &Form<S>) -> Vec<S> {
    let domain = form.domain();
    let space = BasisSpace::Homogeneous(form.degree());
    let mut out = vec![S::zero(); space.len(&domain)];
    for (i, slot) in out.iter_mut().enumerate() {
        let (_, dirs, site) = space.label(&domain, i);
        *slot = form.coeff(dirs, site);
    }
    out
}

pub fn vec_to_form<S: Scalar>(degree: u8, domain: Domain, v: &[S]) -> Form<S> {
    let space = BasisSpace::Homogeneous(degree);
    assert_eq!(v.len(), space.len(&domain));
    let mut form = Form::zero(degree, domain);
    for (i, value) in v.iter().enumerate() {
        let (_, dirs, site) = space.label(&domain, i);
        form.set_coeff(dirs, site, value.clone());
    }
    form
}

pub fn inhom_to_vec<S: Scalar>(w: &InhomogeneousForm<S>) -> Vec<S> {
    let domain = w.domain();
    let space = BasisSpace::Inhomogeneous;
    let mut out = vec![S::zero(); space.len(&domain)];
    for (i, slot) in out.iter_mut().enumerate() {
        let (_, dirs, site) = space.label(&domain, i);
        *slot = w.coeff(dirs, site);
    }
    out
}

pub fn vec_to_inhom<S: Scalar>(domain: Domain, v: &[S]) -> InhomogeneousForm<S> {
    let space = BasisSpace::Inhomogeneous;
    assert_eq!(v.len(), space.len(&domain));
    let mut w = InhomogeneousForm::zero(domain);
    for (i, value) in v.iter().enumerate() {
        let (_, dirs, site) = space.label(&domain, i);
        w.set_coeff(dirs, site, value.clone());
    }
    w
}

pub fn pair_to_vec<S: Scalar>(p: &DuffinPair<S>) -> Vec<S> {
    let mut out = form_to_vec(p.low());
    out.extend(form_to_vec(p.high()));
    out
}

pub fn vec_to_pair<S: Scalar>(rank: u8, domain: Domain, v: &[S]) -> DuffinPair<S> {
    let low_len = BasisSpace::Homogeneous(rank).len(&domain);
    let low = vec_to_form(rank, domain, &v[..low_len]);
    let high = vec_to_form(rank + 1, domain, &v[low_len..]);
    DuffinPair::new(low, high).expect("consecutive degrees by construction")
}

fn apply_kind<S: Scalar>(kind: &OperatorKind<S>, domain: Domain, column: &[S]) -> Vec<S> {
    match kind {
        OperatorKind::Coboundary(r) => {
            let f = vec_to_form(*r, domain, column);
            form_to_vec(&calculus::coboundary(&f))
        }
        OperatorKind::Codifferential(r) => {
            let f = vec_to_form(*r, domain, column);
            form_to_vec(&calculus::codifferential(&f))
        }
        OperatorKind::Star(r) => {
            let f = vec_to_form(*r, domain, column);
            form_to_vec(&calculus::star(&f))
        }
        OperatorKind::Laplacian(r) => {
            let f = vec_to_form(*r, domain, column);
            form_to_vec(&calculus::laplacian(&f))
        }
        OperatorKind::DiracPlus => {
            let w = vec_to_inhom(domain, column);
            inhom_to_vec(&calculus::dirac(&w, DiracSign::Plus))
        }
        OperatorKind::DiracMinus => {
            let w = vec_to_inhom(domain, column);
            inhom_to_vec(&calculus::dirac(&w, DiracSign::Minus))
        }
        OperatorKind::Dk(m) => {
            let w = vec_to_inhom(domain, column);
            inhom_to_vec(&dk_residual(&w, m))
        }
        OperatorKind::TwoMass(m1, m2) => {
            let w = vec_to_inhom(domain, column);
            inhom_to_vec(&massless::two_mass_residual(&w, m1, m2))
        }
        OperatorKind::Duffin(r, m) => {
            let p = vec_to_pair(*r, domain, column);
            pair_to_vec(&duffin_residual(&p, m))
        }
    }
}

/// Assemble the sparse matrix of an operator: column `j` is the coefficient
/// vector of the operator applied to basis element `j`.
pub fn assemble<S: Scalar>(kind: &OperatorKind<S>, domain: Domain) -> OperatorMatrix<S> {
    let col_space = kind.col_space();
    let row_space = kind.row_space();
    let cols = col_space.len(&domain);
    let rows = row_space.len(&domain);
    let mut entries = Vec::new();
    let mut column = vec![S::zero(); cols];
    for j in 0..cols {
        column[j] = S::one();
        let image = apply_kind(kind, domain, &column);
        column[j] = S::zero();
        for (i, v) in image.into_iter().enumerate() {
            if !v.is_zero() {
                entries.push((i as u32, j as u32, v));
            }
        }
    }
    OperatorMatrix::from_entries(
        rows,
        cols,
        entries,
        Some(row_space),
        Some(col_space),
        domain,
        kind.tag(),
    )
}

/// Diagonal metric matrix realizing the inner product on coefficient
/// vectors: `+1` on classes without the time axis, `-1` with it.
pub fn gram_matrix<S: Scalar>(space: BasisSpace, domain: Domain) -> OperatorMatrix<S> {
    let n = space.len(&domain);
    let entries = (0..n)
        .map(|i| {
            let (_, dirs, _) = space.label(&domain, i);
            (i as u32, i as u32, S::from_i64(calculus::gram_sign(dirs)))
        })
        .collect();
    OperatorMatrix::from_entries(n, n, entries, Some(space), Some(space), domain, "gram")
}

// ---------------------------------------------------------------------------
// dense linear algebra (kernels, spectra, norms)
// ---------------------------------------------------------------------------

fn guard_size(cols: usize) -> Result<()> {
    if cols > DENSE_SIZE_GUARD {
        return Err(Error::SizeGuard {
            cols,
            limit: DENSE_SIZE_GUARD,
        });
    }
    Ok(())
}

pub fn to_dense(mx: &OperatorMatrix<f64>) -> DMatrix<f64> {
    let mut dense = DMatrix::zeros(mx.rows, mx.cols);
    for &(r, c, v) in mx.entries() {
        dense[(r as usize, c as usize)] = v;
    }
    dense
}

/// Largest singular value.
pub fn operator_norm(mx: &OperatorMatrix<f64>) -> Result<f64> {
    guard_size(mx.cols.max(mx.rows))?;
    if mx.is_zero_matrix() {
        return Ok(0.0);
    }
    let svd = to_dense(mx).svd(false, false);
    Ok(svd.singular_values.max())
}

/// Orthonormal basis of the numerical null space: right singular vectors
/// whose singular value is at most `tol` times the largest one. An empty
/// kernel returns an empty list.
pub fn kernel(mx: &OperatorMatrix<f64>, tol: f64) -> Result<Vec<Vec<f64>>> {
    guard_size(mx.cols)?;
    guard_size(mx.rows)?;
    if mx.is_zero_matrix() {
        // everything is in the kernel; return the standard basis
        return Ok((0..mx.cols)
            .map(|i| {
                let mut v = vec![0.0; mx.cols];
                v[i] = 1.0;
                v
            })
            .collect());
    }
    let mut dense = to_dense(mx);
    if dense.nrows() < dense.ncols() {
        // pad with zero rows so the thin SVD carries a full right basis
        let missing = dense.ncols() - dense.nrows();
        let at = dense.nrows();
        dense = dense.insert_rows(at, missing, 0.0);
    }
    let svd = dense.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sigma_max = svd.singular_values.max();
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * sigma_max {
            out.push(v_t.row(i).iter().copied().collect());
        }
    }
    // rows of V^T beyond the singular-value count are also null directions
    for i in svd.singular_values.len()..v_t.nrows() {
        out.push(v_t.row(i).iter().copied().collect());
    }
    Ok(out)
}

/// Defect check: smallest and largest singular values of a real matrix.
pub fn singular_extremes(mx: &OperatorMatrix<f64>) -> Result<(f64, f64)> {
    guard_size(mx.cols.max(mx.rows))?;
    let svd = to_dense(mx).svd(false, false);
    Ok((svd.singular_values.min(), svd.singular_values.max()))
}

/// Eigenvalues and eigenvectors of a real square matrix, largest magnitude
/// first. Eigenvalues come from the real Schur form; each eigenvector is
/// produced by shifted inverse iteration over the complexified matrix and is
/// validated against `residual_tol * ||A|| * ||v||`.
pub fn eigenpairs(
    mx: &OperatorMatrix<f64>,
    count: usize,
    residual_tol: f64,
) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    if mx.rows != mx.cols {
        return Err(Error::NotSquare {
            rows: mx.rows,
            cols: mx.cols,
        });
    }
    guard_size(mx.cols)?;
    let dense = to_dense(mx);
    let norm = operator_norm(mx)?;
    if norm == 0.0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<Complex64> = dense
        .clone()
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(a.re.partial_cmp(&b.re).unwrap())
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    // one representative per numerically distinct eigenvalue
    let mut distinct: Vec<Complex64> = Vec::new();
    for v in values {
        if distinct.iter().all(|d| (d - v).norm() > 1e-8 * norm) {
            distinct.push(v);
        }
    }
    let complexified = dense.map(|x| Complex64::new(x, 0.0));
    let mut out = Vec::new();
    for lambda in distinct.into_iter().take(count) {
        let vector = inverse_iteration(&complexified, lambda, norm, residual_tol)?;
        let refined = rayleigh(&complexified, &vector);
        out.push((refined, vector.iter().copied().collect()));
    }
    Ok(out)
}

fn rayleigh(a: &DMatrix<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    let av = a * v;
    let num: Complex64 = v.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum();
    let den: Complex64 = v.iter().map(|x| x.conj() * x).sum();
    num / den
}

fn inverse_iteration(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    norm: f64,
    residual_tol: f64,
) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    for attempt in 0..4 {
        // nudge the shift off an exactly singular matrix
        let eps = 1e-12 * norm * (attempt as f64 + 1.0);
        let shift = lambda + Complex64::new(eps, eps);
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.lu();
        let mut v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        v /= Complex64::new(v.norm(), 0.0);
        for _ in 0..50 {
            let solved = match lu.solve(&v) {
                Some(s) => s,
                None => break,
            };
            let len = solved.norm();
            if !len.is_finite() || len == 0.0 {
                break;
            }
            v = solved / Complex64::new(len, 0.0);
            let mu = rayleigh(a, &v);
            let residual = (a * &v - &v * mu).norm();
            if residual <= residual_tol * norm {
                return Ok(v);
            }
        }
    }
    Err(Error::EigenResidual {
        residual: f64::NAN,
        target: residual_tol * norm,
    })
}

// ---------------------------------------------------------------------------
// Matrix Market + sidecar index
// ---------------------------------------------------------------------------

fn is_complex_tag<S: Scalar>() -> bool {
    matches!(S::scalar_tag(), "complex" | "exact")
}

/// Write the matrix in coordinate Matrix Market format: 1-based indices,
/// entries sorted by column then row.
pub fn write_matrix_market<S: Scalar>(
    mx: &OperatorMatrix<S>,
    out: &mut impl IoWrite,
) -> Result<()> {
    let field = if is_complex_tag::<S>() {
        "complex"
    } else {
        "real"
    };
    writeln!(out, "%%MatrixMarket matrix coordinate {field} general")?;
    writeln!(out, "% operator: {}", mx.tag())?;
    writeln!(out, "{} {} {}", mx.rows, mx.cols, mx.nnz())?;
    let mut sorted: Vec<&(u32, u32, S)> = mx.entries.iter().collect();
    sorted.sort_by_key(|&&(r, c, _)| (c, r));
    for &&(r, c, ref v) in &sorted {
        let (re, im) = v.to_re_im();
        if is_complex_tag::<S>() {
            writeln!(out, "{} {} {:e} {:e}", r + 1, c + 1, re, im)?;
        } else {
            writeln!(out, "{} {} {:e}", r + 1, c + 1, re)?;
        }
    }
    Ok(())
}

/// Read a coordinate Matrix Market file produced by [`write_matrix_market`]
/// (round-trip support for tests and tooling).
pub fn read_matrix_market<S: Scalar>(
    input: &mut impl BufRead,
    domain: Domain,
) -> Result<OperatorMatrix<S>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::FormFile("empty matrix file".into()))??;
    if !header.starts_with("%%MatrixMarket matrix coordinate") {
        return Err(Error::FormFile(format!("unexpected header `{header}`")));
    }
    let complex = header.contains(" complex ");
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if dims.is_none() {
            if fields.len() != 3 {
                return Err(Error::FormFile("bad dimension line".into()));
            }
            dims = Some((
                fields[0]
                    .parse()
                    .map_err(|_| Error::FormFile("bad rows".into()))?,
                fields[1]
                    .parse()
                    .map_err(|_| Error::FormFile("bad cols".into()))?,
                fields[2]
                    .parse()
                    .map_err(|_| Error::FormFile("bad nnz".into()))?,
            ));
            continue;
        }
        let want = if complex { 4 } else { 3 };
        if fields.len() != want {
            return Err(Error::FormFile(format!("bad entry line `{line}`")));
        }
        let r: u32 = fields[0]
            .parse()
            .map_err(|_| Error::FormFile("bad row".into()))?;
        let c: u32 = fields[1]
            .parse()
            .map_err(|_| Error::FormFile("bad col".into()))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|_| Error::FormFile("bad value".into()))?;
        let im: f64 = if complex {
            fields[3]
                .parse()
                .map_err(|_| Error::FormFile("bad value".into()))?
        } else {
            0.0
        };
        let v = S::from_re_im(re, im)
            .ok_or_else(|| Error::FormFile("entry not representable in this scalar mode".into()))?;
        entries.push((r - 1, c - 1, v));
    }
    let (rows, cols, _) = dims.ok_or_else(|| Error::FormFile("missing dimensions".into()))?;
    Ok(OperatorMatrix::from_entries(
        rows, cols, entries, None, None, domain, "imported",
    ))
}

/// Sidecar JSON mapping matrix coordinates to `(degree, dirs, k)` labels.
pub fn index_json<S: Scalar>(mx: &OperatorMatrix<S>) -> Result<String> {
    #[derive(serde::Serialize)]
    struct Label {
        degree: u8,
        dirs: Vec<usize>,
        k: [i64; 4],
    }
    fn labels(space: Option<BasisSpace>, domain: &Domain, n: usize) -> Vec<Label> {
        match space {
            None => Vec::new(),
            Some(space) => (0..n)
                .map(|i| {
                    let (degree, dirs, site) = space.label(domain, i);
                    Label {
                        degree,
                        dirs: dirs.dirs_vec(),
                        k: site.0,
                    }
                })
                .collect(),
        }
    }
    let doc = serde_json::json!({
        "operator": mx.tag(),
        "rows": labels(mx.row_space, &mx.domain, mx.rows),
        "cols": labels(mx.col_space, &mx.domain, mx.cols),
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Real embedding of a complex matrix (for singular-value checks on
/// complex-valued operators): `[[Re, -Im], [Im, Re]]`.
pub fn complex_real_embedding(mx: &OperatorMatrix<Complex64>) -> DMatrix<f64> {
    let (m, n) = (mx.rows, mx.cols);
    let mut dense = DMatrix::zeros(2 * m, 2 * n);
    for &(r, c, v) in mx.entries() {
        let (r, c) = (r as usize, c as usize);
        dense[(r, c)] = v.re;
        dense[(r, c + n)] = -v.im;
        dense[(r + m, c)] = v.im;
        dense[(r + m, c + n)] = v.re;
    }
    dense
}

/// Apply a complex-entried sparse matrix to a complex vector.
pub fn mul_vec_complex(mx: &OperatorMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); mx.rows];
    for &(r, c, val) in mx.entries() {
        out[r as usize] += val * v[c as usize];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ValueSet;
    use crate::lattice::BoundaryMode;

    fn dom2() -> Domain {
        Domain::new([2, 2, 2, 2], BoundaryMode::Periodic).unwrap()
    }

    #[test]
    fn basis_index_round_trips() {
        let domain = dom2();
        for space in [
            BasisSpace::Homogeneous(2),
            BasisSpace::Inhomogeneous,
            BasisSpace::Pair(1),
        ] {
            let n = space.len(&domain);
            for i in 0..n {
                let (degree, dirs, site) = space.label(&domain, i);
                assert_eq!(space.index(&domain, degree, dirs, site), Some(i));
            }
        }
        assert_eq!(BasisSpace::Inhomogeneous.len(&dom2()), 16 * 16);
        assert_eq!(BasisSpace::Homogeneous(2).len(&dom2()), 6 * 16);
    }

    #[test]
    fn coboundary_0_matrix_shape_and_stencil() {
        let domain = dom2();
        let mx = assemble::<i64>(&OperatorKind::Coboundary(0), domain);
        assert_eq!(mx.cols(), 16);
        assert_eq!(mx.rows(), 64);
        // each column holds four differences, two entries each
        for j in 0..16u32 {
            let count = mx.entries().iter().filter(|&&(_, c, _)| c == j).count();
            assert_eq!(count, 8);
        }
    }

    #[test]
    fn matrix_composition_vanishes_for_d_squared() {
        let domain = dom2();
        let d0 = assemble::<i64>(&OperatorKind::Coboundary(0), domain);
        let d1 = assemble::<i64>(&OperatorKind::Coboundary(1), domain);
        assert!(d1.matmul(&d0).unwrap().is_zero_matrix());
    }

    #[test]
    fn matrix_agrees_with_direct_operator_on_random_forms() {
        let domain = dom2();
        for (kind, degree) in [
            (OperatorKind::Coboundary(1), 1u8),
            (OperatorKind::Codifferential(2), 2),
            (OperatorKind::Star(2), 2),
            (OperatorKind::Laplacian(2), 2),
        ] {
            let mx = assemble::<i64>(&kind, domain);
            for seed in 0..50u64 {
                let f: Form<i64> =
                    Form::random(degree, domain, 3000 + seed, ValueSet::SmallIntegers);
                let direct = apply_kind(&kind, domain, &form_to_vec(&f));
                assert_eq!(mx.mul_vec(&form_to_vec(&f)), direct, "{kind:?}");
            }
        }
        // the inhomogeneous operators as well
        let dk = assemble::<i64>(&OperatorKind::Dk(2), domain);
        for seed in 0..5u64 {
            let w: InhomogeneousForm<i64> =
                InhomogeneousForm::random(domain, 3100 + seed, ValueSet::SmallIntegers);
            let v = inhom_to_vec(&w);
            assert_eq!(dk.mul_vec(&v), inhom_to_vec(&dk_residual(&w, &2)));
        }
    }

    #[test]
    fn dirac_squared_matches_laplacian_blockwise() {
        let domain = dom2();
        let dm = assemble::<i64>(&OperatorKind::DiracMinus, domain);
        let squared = dm.matmul(&dm).unwrap();
        // block-diagonal with the per-degree laplacians
        let space = BasisSpace::Inhomogeneous;
        for degree in 0..=4u8 {
            let lap = assemble::<i64>(&OperatorKind::Laplacian(degree), domain);
            let sub = BasisSpace::Homogeneous(degree);
            for j in 0..sub.len(&domain) {
                let (_, dirs, site) = sub.label(&domain, j);
                let big_j = space.index(&domain, degree, dirs, site).unwrap();
                for i in 0..sub.len(&domain) {
                    let (_, dirs_i, site_i) = sub.label(&domain, i);
                    let big_i = space.index(&domain, degree, dirs_i, site_i).unwrap();
                    let a = squared
                        .entries()
                        .iter()
                        .find(|&&(r, c, _)| r as usize == big_i && c as usize == big_j)
                        .map(|&(_, _, v)| v)
                        .unwrap_or(0);
                    let b = lap
                        .entries()
                        .iter()
                        .find(|&&(r, c, _)| r as usize == i && c as usize == j)
                        .map(|&(_, _, v)| v)
                        .unwrap_or(0);
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn gram_twisted_adjointness_of_assembled_operators() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::ZeroPadded] {
            let domain = Domain::new([2, 2, 2, 2], mode).unwrap();
            for r in 0..=3u8 {
                let d = assemble::<i64>(&OperatorKind::Coboundary(r), domain);
                let delta = assemble::<i64>(&OperatorKind::Codifferential(r + 1), domain);
                let g_hi = gram_matrix::<i64>(BasisSpace::Homogeneous(r + 1), domain);
                let g_lo = gram_matrix::<i64>(BasisSpace::Homogeneous(r), domain);
                let lhs = d.transpose().matmul(&g_hi).unwrap();
                let rhs = g_lo.matmul(&delta).unwrap();
                assert!(
                    lhs.sub(&rhs).unwrap().is_zero_matrix(),
                    "degree {r} {mode:?}"
                );
            }
            let g = gram_matrix::<i64>(BasisSpace::Inhomogeneous, domain);
            let dp = assemble::<i64>(&OperatorKind::DiracPlus, domain);
            let dm = assemble::<i64>(&OperatorKind::DiracMinus, domain);
            let sym = dp
                .transpose()
                .matmul(&g)
                .unwrap()
                .sub(&g.matmul(&dp).unwrap())
                .unwrap();
            assert!(sym.is_zero_matrix());
            let anti = dm
                .transpose()
                .matmul(&g)
                .unwrap()
                .sub(&g.matmul(&dm).unwrap().scaled(&-1))
                .unwrap();
            assert!(anti.is_zero_matrix());
        }
    }

    #[test]
    fn gram_quadratic_form_equals_the_inner_product() {
        let domain = dom2();
        for degree in 0..=4u8 {
            let g = gram_matrix::<i64>(BasisSpace::Homogeneous(degree), domain);
            for seed in 0..5u64 {
                let f: Form<i64> =
                    Form::random(degree, domain, 3200 + seed, ValueSet::SmallIntegers);
                let w: Form<i64> =
                    Form::random(degree, domain, 3300 + seed, ValueSet::SmallIntegers);
                let gv = g.mul_vec(&form_to_vec(&w));
                let quad: i64 = form_to_vec(&f).iter().zip(&gv).map(|(a, b)| a * b).sum();
                assert_eq!(
                    quad,
                    crate::calculus::inner_product(&f, &w).unwrap(),
                    "degree {degree}"
                );
            }
        }
    }

    #[test]
    fn gram_matrix_signature_per_degree() {
        let domain = dom2();
        let g1 = gram_matrix::<i64>(BasisSpace::Homogeneous(1), domain);
        let sites = domain.interior_site_count();
        for &(r, c, v) in g1.entries() {
            assert_eq!(r, c);
            let expected = if (r as usize) < sites { -1 } else { 1 };
            assert_eq!(v, expected);
        }
        let g4 = gram_matrix::<i64>(BasisSpace::Homogeneous(4), domain);
        assert!(g4.entries().iter().all(|&(_, _, v)| v == -1));
        let g0 = gram_matrix::<i64>(BasisSpace::Homogeneous(0), domain);
        assert!(g0.entries().iter().all(|&(_, _, v)| v == 1));
    }

    #[test]
    fn kernel_of_laplacian_contains_constants() {
        let domain = dom2();
        let lap = assemble::<f64>(&OperatorKind::Laplacian(0), domain);
        let null = kernel(&lap, 1e-10).unwrap();
        assert!(!null.is_empty());
        // the constant vector must lie in the span: project it
        let n = domain.interior_site_count() as f64;
        let c = 1.0 / n.sqrt();
        let constant: Vec<f64> = vec![c; domain.interior_site_count()];
        let mut projected = vec![0.0; constant.len()];
        for basis in &null {
            let dot: f64 = basis.iter().zip(&constant).map(|(a, b)| a * b).sum();
            for (p, b) in projected.iter_mut().zip(basis) {
                *p += dot * b;
            }
        }
        let defect: f64 = projected
            .iter()
            .zip(&constant)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(defect < 1e-8, "constant not in kernel span: {defect}");
        // and every returned vector is annihilated
        for v in &null {
            let image = lap.mul_vec(v);
            let norm: f64 = image.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= 1e-8);
        }
    }

    #[test]
    fn kernel_of_coboundary_0_is_constants_on_the_torus() {
        let domain = dom2();
        let d0 = assemble::<f64>(&OperatorKind::Coboundary(0), domain);
        let null = kernel(&d0, 1e-10).unwrap();
        assert_eq!(null.len(), 1);
    }

    #[test]
    fn eigenpairs_satisfy_their_residual_bound() {
        let domain = dom2();
        let dm = assemble::<f64>(&OperatorKind::DiracMinus, domain);
        let norm = operator_norm(&dm).unwrap();
        let pairs = eigenpairs(&dm, 5, 1e-10).unwrap();
        assert_eq!(pairs.len(), 5);
        for (lambda, v) in &pairs {
            let vec = DVector::from_vec(v.clone());
            let dense = to_dense(&dm).map(|x| Complex64::new(x, 0.0));
            let residual = (&dense * &vec - &vec * *lambda).norm();
            assert!(residual <= 1e-8 * norm * vec.norm());
        }
    }

    #[test]
    fn dirac_eigenvalues_square_into_the_laplacian_spectrum() {
        let domain = dom2();
        let dm = assemble::<f64>(&OperatorKind::DiracMinus, domain);
        let pairs = eigenpairs(&dm, 4, 1e-10).unwrap();
        // collect the complete laplacian spectrum over all degrees
        let mut lap_eigs: Vec<Complex64> = Vec::new();
        for degree in 0..=4u8 {
            let lap = assemble::<f64>(&OperatorKind::Laplacian(degree), domain);
            lap_eigs.extend(to_dense(&lap).complex_eigenvalues().iter().copied());
        }
        for (lambda, _) in &pairs {
            let sq = lambda * lambda;
            let hit = lap_eigs.iter().any(|mu| (mu - sq).norm() <= 1e-8);
            assert!(hit, "{lambda} squared missing from laplacian spectrum");
        }
    }

    #[test]
    fn size_guard_rejects_big_matrices() {
        let domain = Domain::new([6, 6, 6, 6], BoundaryMode::Periodic).unwrap();
        let mx = OperatorMatrix::<f64>::from_entries(
            BasisSpace::Inhomogeneous.len(&domain),
            BasisSpace::Inhomogeneous.len(&domain),
            Vec::new(),
            None,
            None,
            domain,
            "big",
        );
        assert!(matches!(
            eigenpairs(&mx, 1, 1e-8),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn matrix_market_round_trip() {
        let domain = dom2();
        let mx = assemble::<f64>(&OperatorKind::DiracMinus, domain);
        assert_eq!(mx.cols(), 256);
        let mut buf = Vec::new();
        write_matrix_market(&mx, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
        let back: OperatorMatrix<f64> =
            read_matrix_market(&mut std::io::BufReader::new(&buf[..]), domain).unwrap();
        assert!(back.same_entries(&mx));
    }

    #[test]
    fn matrix_market_identity_body() {
        let domain = Domain::new([1, 1, 1, 1], BoundaryMode::Periodic).unwrap();
        let id = OperatorMatrix::<f64>::identity(BasisSpace::Homogeneous(0), domain);
        let mut buf = Vec::new();
        write_matrix_market(&id, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // header + comment + dims + one entry
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn index_json_labels_columns() {
        let domain = dom2();
        let mx = assemble::<f64>(&OperatorKind::Coboundary(0), domain);
        let json = index_json(&mx).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["cols"].as_array().unwrap().len(), 16);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 64);
        assert_eq!(doc["cols"][0]["degree"], 0);
    }
}
