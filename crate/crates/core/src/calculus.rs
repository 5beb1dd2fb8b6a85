//! The core operators: coboundary, cup product, Hodge star, indefinite inner
//! product, codifferential, the Laplacian (discrete d'Alembertian) and the
//! Dirac operators.
//!
//! Sign conventions are pinned by three anchors that the test suite checks
//! against hard-coded reference tables:
//!
//! * the coboundary is dual to the chain boundary through the pairing,
//! * the cup product carries the graded tensor (Koszul) sign and the shifted
//!   base case `e ∪ x(τ) = e`,
//! * the star of a basis class is the complementary class at the forward
//!   `τ_J`-shifted site, with the sign fixed by `s ∪ *s = Q(k0) e`.
//!
//! The codifferential is the formal adjoint of the coboundary with respect
//! to the Lorentz-signature inner product; `codifferential_via_star` computes
//! it through the star operator as an independent route and the two must
//! agree exactly.

use crate::error::{Error, Result};
use crate::forms::{Form, InhomogeneousForm};
use crate::lattice::{DirectionSet, AXES};
use crate::scalar::Scalar;
use crate::{chains, lattice::Domain};

/// Sign of the cup recursion: the product over tensor slots of the factor
/// parity rule (`-1` when an edge factor of the left element passes an odd
/// left-partial degree of the right one). Equivalently, the number of pairs
/// `(i, j)` with `i` an edge axis of the left element, `j` of the right one,
/// and `i > j`.
pub fn cup_sign(left: DirectionSet, right: DirectionSet) -> i64 {
    let mut crossings = 0usize;
    for i in left.iter() {
        crossings += right.iter().filter(|&j| j < i).count();
    }
    if crossings % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Metric sign of a basis class: `-1` when the class carries the time axis.
/// This is the diagonal of the inner product in the cochain basis.
pub fn gram_sign(dirs: DirectionSet) -> i64 {
    if dirs.is_timelike() {
        -1
    } else {
        1
    }
}

/// Star sign of a basis class, fixed by `s ∪ *s = Q(k0) e`: the time-factor
/// sign divided by the cup crossing sign of the class against its complement.
pub fn star_sign(dirs: DirectionSet) -> i64 {
    gram_sign(dirs) * cup_sign(dirs, dirs.complement())
}

/// Coboundary: degree `r -> r+1`. Each output class gains one axis; the
/// contribution is the forward difference along the new axis, signed by the
/// number of smaller axes already present. The coboundary of a 4-form is the
/// zero 4-form (there is nothing above top degree).
pub fn coboundary<S: Scalar>(w: &Form<S>) -> Form<S> {
    let domain = w.domain();
    if w.degree() == 4 {
        return Form::zero(4, domain);
    }
    let out_degree = w.degree() + 1;
    let mut out = Form::zero(out_degree, domain);
    for &target in DirectionSet::by_degree(out_degree as usize) {
        for site in domain.storage_sites() {
            let mut acc = S::zero();
            for axis in target.iter() {
                let source = target.without(axis);
                let fwd = w.coeff(source, domain.shift(site, axis, true));
                let here = w.coeff(source, site);
                let diff = fwd - here;
                if target.pos(axis) % 2 == 0 {
                    acc += diff;
                } else {
                    acc -= diff;
                }
            }
            out.set_coeff(target, site, acc);
        }
    }
    out
}

/// Term sign of the codifferential: the adjoint of the coboundary under the
/// metric signs flips the time-axis term relative to the naive transpose.
fn codiff_sign(axis: usize, target: DirectionSet) -> i64 {
    if axis == 0 {
        1
    } else if target.pos(axis) % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Codifferential: degree `r -> r-1` by backward differences; the formal
/// adjoint of [`coboundary`] with respect to the inner product. Degree-0
/// input gives the zero 0-form.
pub fn codifferential<S: Scalar>(w: &Form<S>) -> Form<S> {
    let domain = w.domain();
    if w.degree() == 0 {
        return Form::zero(0, domain);
    }
    let out_degree = w.degree() - 1;
    let mut out = Form::zero(out_degree, domain);
    for &target in DirectionSet::by_degree(out_degree as usize) {
        for site in domain.storage_sites() {
            let mut acc = S::zero();
            for axis in 0..AXES {
                if target.contains(axis) {
                    continue;
                }
                let source = target.with(axis);
                let here = w.coeff(source, site);
                let back = w.coeff(source, domain.shift(site, axis, false));
                let diff = here - back;
                if codiff_sign(axis, target) > 0 {
                    acc += diff;
                } else {
                    acc -= diff;
                }
            }
            out.set_coeff(target, site, acc);
        }
    }
    out
}

/// Cup product, extended bilinearly from the basis rule: classes multiply
/// only when their axis sets are disjoint, the right factor is read at the
/// site shifted forward along the left factor's axes, and the sign is the
/// Koszul crossing sign. Degrees add; when they exceed 4 the product is the
/// zero form (reported at top degree).
pub fn cup<S: Scalar>(f: &Form<S>, g: &Form<S>) -> Result<Form<S>> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    let domain = f.domain();
    let total = f.degree() as usize + g.degree() as usize;
    if total > 4 {
        return Ok(Form::zero(4, domain));
    }
    let mut out = Form::zero(total as u8, domain);
    for &target in DirectionSet::by_degree(total) {
        for &left in f.sets() {
            // left ⊆ target, right = target \ left
            if left.iter().any(|a| !target.contains(a)) {
                continue;
            }
            let right = DirectionSet::from_dirs(
                &target
                    .iter()
                    .filter(|&a| !left.contains(a))
                    .collect::<Vec<_>>(),
            )
            .expect("set difference is sorted");
            if right.len() != g.degree() as usize {
                continue;
            }
            let sign = cup_sign(left, right);
            for site in domain.storage_sites() {
                let lv = f.coeff(left, site);
                if lv.is_zero() {
                    continue;
                }
                let shifted = site.shifted_by_set(left, 1);
                let rv = g.coeff(right, domain.canonical(shifted));
                if rv.is_zero() {
                    continue;
                }
                let term = lv * rv;
                out.add_coeff(target, site, if sign > 0 { term } else { -term });
            }
        }
    }
    Ok(out)
}

/// Hodge star: a basis class maps to its complementary class at the site
/// shifted forward along every axis of the class, with the sign of
/// [`star_sign`]. Carries the Lorentz signature into the inner product.
pub fn star<S: Scalar>(w: &Form<S>) -> Form<S> {
    let domain = w.domain();
    let mut out = Form::zero(4 - w.degree(), domain);
    for &dirs in w.sets() {
        let sign = star_sign(dirs);
        let target = dirs.complement();
        for site in domain.storage_sites() {
            let v = w.coeff(dirs, site);
            if v.is_zero() {
                continue;
            }
            let moved = domain.canonical(site.shifted_by_set(dirs, 1));
            out.add_coeff(target, moved, if sign > 0 { v } else { -v });
        }
    }
    out
}

/// Inverse of [`star`]. In zero-padded mode the backward shift can push
/// support out of the stored box; the boolean reports whether any nonzero
/// coefficient was truncated that way.
pub fn star_inverse<S: Scalar>(w: &Form<S>) -> (Form<S>, bool) {
    let domain = w.domain();
    let mut out = Form::zero(4 - w.degree(), domain);
    let mut truncated = false;
    for &dirs in w.sets() {
        let target = dirs.complement();
        let sign = star_sign(target);
        for site in domain.storage_sites() {
            let v = w.coeff(dirs, site);
            if v.is_zero() {
                continue;
            }
            let moved = domain.canonical(site.shifted_by_set(target, -1));
            let value = if sign > 0 { v } else { -v };
            if !out.add_coeff(target, moved, value) {
                truncated = true;
            }
        }
    }
    (out, truncated)
}

/// Codifferential through the star operator: for input degree `p`,
/// `(-1)^p * star_inverse(coboundary(star(w)))`. Serves as an independent
/// oracle for [`codifferential`]; the truncation flag is forwarded from
/// [`star_inverse`].
pub fn codifferential_via_star<S: Scalar>(w: &Form<S>) -> (Form<S>, bool) {
    let domain = w.domain();
    if w.degree() == 0 {
        return (Form::zero(0, domain), false);
    }
    let (undone, truncated) = star_inverse(&coboundary(&star(w)));
    let signed = if w.degree() % 2 == 0 {
        undone
    } else {
        undone.scaled(&-S::one())
    };
    (signed, truncated)
}

/// Inner product `(f, g) = <V, f ∪ *g>`. Forms of different degrees pair to
/// zero; the result is the signature-weighted coefficient sum over interior
/// sites (see [`inner_product_signature`], the fast cross-check route).
pub fn inner_product<S: Scalar>(f: &Form<S>, g: &Form<S>) -> Result<S> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    if f.degree() != g.degree() {
        return Ok(S::zero());
    }
    let volume = cup(f, &star(g))?;
    Ok(chains::pair(&chains::domain_chain(&f.domain()), &volume))
}

/// The explicit signature sums: same-class coefficients multiply over
/// interior sites with the metric sign of the class.
pub fn inner_product_signature<S: Scalar>(f: &Form<S>, g: &Form<S>) -> Result<S> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    if f.degree() != g.degree() {
        return Ok(S::zero());
    }
    let domain = f.domain();
    let mut acc = S::zero();
    for &dirs in f.sets() {
        let sign = gram_sign(dirs);
        for site in domain.interior_sites() {
            let term = f.coeff(dirs, site) * g.coeff(dirs, site);
            if sign > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    Ok(acc)
}

/// Laplacian `-(d δ + δ d)`, the discrete d'Alembertian of the Lorentz
/// lattice. At the extreme degrees the missing composition is zero.
pub fn laplacian<S: Scalar>(w: &Form<S>) -> Form<S> {
    let mut acc = Form::zero(w.degree(), w.domain());
    if w.degree() > 0 {
        acc = &acc + &coboundary(&codifferential(w));
    }
    if w.degree() < 4 {
        acc = &acc + &codifferential(&coboundary(w));
    }
    acc.scaled(&-S::one())
}

/// Laplacian applied to every part of an inhomogeneous form.
pub fn laplacian_inhomogeneous<S: Scalar>(w: &InhomogeneousForm<S>) -> InhomogeneousForm<S> {
    let parts = std::array::from_fn(|r| laplacian(w.part(r)));
    InhomogeneousForm::from_parts(parts).expect("partwise laplacian keeps shape")
}

/// Which Dirac operator to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiracSign {
    Plus,
    Minus,
}

/// Dirac operator `d ± δ` on inhomogeneous forms: the degree-r output part
/// is the coboundary of part `r-1` plus/minus the codifferential of part
/// `r+1` (missing neighbors are zero).
pub fn dirac<S: Scalar>(w: &InhomogeneousForm<S>, sign: DiracSign) -> InhomogeneousForm<S> {
    let domain = w.domain();
    let mut out = InhomogeneousForm::zero(domain);
    for r in 0..5usize {
        let mut part = Form::zero(r as u8, domain);
        if r > 0 {
            part = &part + &coboundary(w.part(r - 1));
        }
        if r < 4 {
            let delta = codifferential(w.part(r + 1));
            part = match sign {
                DiracSign::Plus => &part + &delta,
                DiracSign::Minus => &part - &delta,
            };
        }
        out.set_part(part).expect("same domain");
    }
    out
}

/// Inner product of inhomogeneous forms: the sum of the five degreewise
/// inner products.
pub fn inner_product_inhomogeneous<S: Scalar>(
    a: &InhomogeneousForm<S>,
    b: &InhomogeneousForm<S>,
) -> Result<S> {
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut acc = S::zero();
    for r in 0..5 {
        acc += inner_product_signature(a.part(r), b.part(r))?;
    }
    Ok(acc)
}

/// Shared helper for residual systems: `coboundary` of the part below, if any.
pub(crate) fn d_part<S: Scalar>(w: &InhomogeneousForm<S>, r: usize) -> Form<S> {
    if r == 0 {
        Form::zero(0, w.domain())
    } else {
        coboundary(w.part(r - 1))
    }
}

/// Shared helper for residual systems: `codifferential` of the part above, if any.
pub(crate) fn delta_part<S: Scalar>(w: &InhomogeneousForm<S>, r: usize) -> Form<S> {
    if r == 4 {
        Form::zero(4, w.domain())
    } else {
        codifferential(w.part(r + 1))
    }
}

/// Convenience: the `V`-volume pairing of a 4-form (its interior top-class sum).
pub fn volume_pairing<S: Scalar>(w: &Form<S>, domain: &Domain) -> S {
    chains::pair(&chains::domain_chain(domain), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ValueSet;
    use crate::lattice::{BoundaryMode, MultiIndex};

    fn dom() -> Domain {
        Domain::new([3, 3, 3, 3], BoundaryMode::ZeroPadded).unwrap()
    }

    fn d(axes: &[usize]) -> DirectionSet {
        DirectionSet::from_dirs(axes).unwrap()
    }

    #[test]
    fn coboundary_of_indicator_matches_hand_difference() {
        // d of the 0-form indicator at K: -1 at (e_i, K), +1 at (e_i, σ_i K).
        let k = MultiIndex::new(2, 2, 2, 2);
        let w: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        let dw = coboundary(&w);
        for axis in 0..4 {
            let e = d(&[axis]);
            assert_eq!(dw.coeff(e, k), -1);
            assert_eq!(dw.coeff(e, k.shifted(axis, -1)), 1);
        }
        assert_eq!(dw.iter_nonzero().len(), 8);
    }

    #[test]
    fn coboundary_of_time_edge_matches_hand_difference() {
        // d of e_0 at K: for each spatial j, +1 at (e_{0j}, K), -1 at (e_{0j}, σ_j K).
        let k = MultiIndex::new(2, 2, 2, 2);
        let w: Form<i64> = Form::basis(1, d(&[0]), k, dom()).unwrap();
        let dw = coboundary(&w);
        for j in 1..4 {
            let e0j = d(&[0, j]);
            assert_eq!(dw.coeff(e0j, k), 1);
            assert_eq!(dw.coeff(e0j, k.shifted(j, -1)), -1);
        }
    }

    #[test]
    fn coboundary_of_top_form_is_zero() {
        let w: Form<i64> = Form::random(4, dom(), 11, ValueSet::SmallIntegers);
        let dw = coboundary(&w);
        assert_eq!(dw.degree(), 4);
        assert!(dw.is_zero());
    }

    #[test]
    fn coboundary_squares_to_zero() {
        for degree in 0..=2u8 {
            let w: Form<i64> =
                Form::random(degree, dom(), 100 + degree as u64, ValueSet::SmallIntegers);
            assert!(coboundary(&coboundary(&w)).is_zero());
        }
    }

    #[test]
    fn codifferential_squares_to_zero() {
        for degree in 2..=4u8 {
            let w: Form<i64> =
                Form::random(degree, dom(), 200 + degree as u64, ValueSet::SmallIntegers);
            assert!(codifferential(&codifferential(&w)).is_zero());
        }
    }

    #[test]
    fn codifferential_of_zero_form_is_zero() {
        let w: Form<i64> = Form::random(0, dom(), 3, ValueSet::SmallIntegers);
        assert!(codifferential(&w).is_zero());
    }

    #[test]
    fn cup_of_point_and_volume_classes() {
        let k = MultiIndex::new(2, 2, 2, 2);
        let x: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        let e: Form<i64> = Form::basis(4, DirectionSet::FULL, k, dom()).unwrap();
        let xe = cup(&x, &e).unwrap();
        assert_eq!(xe.coeff(DirectionSet::FULL, k), 1);
        assert_eq!(xe.iter_nonzero().len(), 1);
        // e ∪ e = 0: no axis-disjoint splitting of a 4-set into two 4-sets.
        let ee = cup(&e, &e).unwrap();
        assert_eq!(ee.degree(), 4);
        assert!(ee.is_zero());
    }

    #[test]
    fn star_defining_relation_on_every_class() {
        // s ∪ *s = Q(k0) e at the site of s, exhaustively over basis classes.
        for mode in [BoundaryMode::ZeroPadded, BoundaryMode::Periodic] {
            let domain = Domain::new([3, 3, 3, 3], mode).unwrap();
            let k = MultiIndex::new(2, 2, 2, 2);
            for degree in 0..=4u8 {
                for &dirs in DirectionSet::by_degree(degree as usize) {
                    let s: Form<i64> = Form::basis(degree, dirs, k, domain).unwrap();
                    let product = cup(&s, &star(&s)).unwrap();
                    let expected = if dirs.is_timelike() { -1 } else { 1 };
                    assert_eq!(product.coeff(DirectionSet::FULL, k), expected, "{dirs:?}");
                    assert_eq!(product.iter_nonzero().len(), 1, "{dirs:?}");
                }
            }
        }
    }

    #[test]
    fn double_star_is_signed_translation() {
        let domain = Domain::new([3, 3, 3, 3], BoundaryMode::Periodic).unwrap();
        for degree in 0..=4u8 {
            let w: Form<i64> =
                Form::random(degree, domain, 300 + degree as u64, ValueSet::SmallIntegers);
            let ss = star(&star(&w));
            let sign = if (degree + 1) % 2 == 0 { 1 } else { -1 };
            for &dirs in w.sets() {
                for site in domain.interior_sites() {
                    let translated = domain.canonical(MultiIndex::new(
                        site.get(0) + 1,
                        site.get(1) + 1,
                        site.get(2) + 1,
                        site.get(3) + 1,
                    ));
                    assert_eq!(ss.coeff(dirs, translated), sign * w.coeff(dirs, site));
                }
            }
        }
    }

    #[test]
    fn star_inverse_undoes_star() {
        let k = MultiIndex::new(2, 2, 2, 2);
        let e01: Form<i64> = Form::basis(2, d(&[0, 1]), k, dom()).unwrap();
        let (back, truncated) = star_inverse(&star(&e01));
        assert!(!truncated);
        assert_eq!(back, e01);
        // *⁻¹ e = x at the same site
        let e: Form<i64> = Form::basis(4, DirectionSet::FULL, k, dom()).unwrap();
        let (inv, _) = star_inverse(&e);
        assert_eq!(inv.coeff(DirectionSet::EMPTY, k), 1);
    }

    #[test]
    fn star_inverse_reports_truncation_at_the_padded_edge() {
        // A 0-form at the lower interior corner: *⁻¹ shifts backward along
        // all four axes, landing outside the padded box.
        let k = MultiIndex::new(1, 1, 1, 1);
        let mut w: Form<i64> = Form::zero(0, dom());
        w.set_coeff(DirectionSet::EMPTY, MultiIndex::new(0, 0, 0, 0), 1);
        let (_, truncated) = star_inverse(&w);
        assert!(truncated);
        let interior: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        let (_, ok) = star_inverse(&interior);
        assert!(!ok);
    }

    #[test]
    fn inner_product_reproduces_the_signature() {
        let k = MultiIndex::new(2, 2, 2, 2);
        // 0-form indicator with itself -> +1
        let x: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        assert_eq!(inner_product(&x, &x).unwrap(), 1);
        // single time-component 1-form with coefficient c -> -c²
        let mut e0: Form<i64> = Form::basis(1, d(&[0]), k, dom()).unwrap();
        e0 = e0.scaled(&3);
        assert_eq!(inner_product(&e0, &e0).unwrap(), -9);
        // degree mismatch -> 0
        let two: Form<i64> = Form::basis(2, d(&[0, 1]), k, dom()).unwrap();
        assert_eq!(inner_product(&x, &two).unwrap(), 0);
    }

    #[test]
    fn cup_star_route_equals_signature_route() {
        for mode in [BoundaryMode::ZeroPadded, BoundaryMode::Periodic] {
            let domain = Domain::new([2, 3, 2, 3], mode).unwrap();
            for degree in 0..=4u8 {
                let f: Form<i64> =
                    Form::random(degree, domain, 400 + degree as u64, ValueSet::SmallIntegers);
                let g: Form<i64> =
                    Form::random(degree, domain, 500 + degree as u64, ValueSet::SmallIntegers);
                assert_eq!(
                    inner_product(&f, &g).unwrap(),
                    inner_product_signature(&f, &g).unwrap(),
                    "degree {degree} {mode:?}"
                );
            }
        }
    }

    #[test]
    fn leibniz_rule_holds_for_all_low_degree_pairs() {
        for (p, q) in [
            (0u8, 0u8),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, 0),
            (2, 1),
            (3, 0),
        ] {
            for seed in 0..4u64 {
                let f: Form<i64> = Form::random(
                    p,
                    dom(),
                    600 + seed + p as u64 * 17,
                    ValueSet::SmallIntegers,
                );
                let g: Form<i64> = Form::random(
                    q,
                    dom(),
                    700 + seed + q as u64 * 31,
                    ValueSet::SmallIntegers,
                );
                let lhs = coboundary(&cup(&f, &g).unwrap());
                let df_g = cup(&coboundary(&f), &g).unwrap();
                let f_dg = cup(&f, &coboundary(&g)).unwrap();
                let rhs = if p % 2 == 0 {
                    &df_g + &f_dg
                } else {
                    &df_g - &f_dg
                };
                assert_eq!(lhs, rhs, "Leibniz failed for degrees ({p},{q})");
            }
        }
    }

    #[test]
    fn adjointness_of_coboundary_and_codifferential() {
        for mode in [BoundaryMode::ZeroPadded, BoundaryMode::Periodic] {
            let domain = Domain::new([3, 3, 3, 3], mode).unwrap();
            for degree in 0..=3u8 {
                let f: Form<i64> =
                    Form::random(degree, domain, 800 + degree as u64, ValueSet::SmallIntegers);
                let g: Form<i64> = Form::random(
                    degree + 1,
                    domain,
                    900 + degree as u64,
                    ValueSet::SmallIntegers,
                );
                let lhs = inner_product(&coboundary(&f), &g).unwrap();
                let rhs = inner_product(&f, &codifferential(&g)).unwrap();
                assert_eq!(lhs, rhs, "adjointness failed at degree {degree} {mode:?}");
            }
        }
    }

    #[test]
    fn codifferential_explicit_equals_star_route() {
        for mode in [BoundaryMode::ZeroPadded, BoundaryMode::Periodic] {
            let domain = Domain::new([3, 3, 3, 3], mode).unwrap();
            for degree in 1..=4u8 {
                let w: Form<i64> = Form::random(
                    degree,
                    domain,
                    1000 + degree as u64,
                    ValueSet::SmallIntegers,
                );
                let direct = codifferential(&w);
                let (via_star, truncated) = codifferential_via_star(&w);
                assert!(!truncated, "interior support must not truncate");
                assert_eq!(direct, via_star, "degree {degree} {mode:?}");
            }
        }
    }

    #[test]
    fn laplacian_on_zero_form_matches_nine_point_stencil() {
        // Composition of the explicit first-order formulas: second differences
        // with opposite signs on the time and space axes.
        let k = MultiIndex::new(2, 2, 2, 2);
        let w: Form<i64> = Form::basis(0, DirectionSet::EMPTY, k, dom()).unwrap();
        let lap = laplacian(&w);
        assert_eq!(lap.coeff(DirectionSet::EMPTY, k), -4);
        assert_eq!(lap.coeff(DirectionSet::EMPTY, k.shifted(0, 1)), -1);
        assert_eq!(lap.coeff(DirectionSet::EMPTY, k.shifted(0, -1)), -1);
        for axis in 1..4 {
            assert_eq!(lap.coeff(DirectionSet::EMPTY, k.shifted(axis, 1)), 1);
            assert_eq!(lap.coeff(DirectionSet::EMPTY, k.shifted(axis, -1)), 1);
        }
        assert_eq!(lap.iter_nonzero().len(), 9);
    }

    #[test]
    fn laplacian_equals_squared_dirac() {
        let domain = Domain::new([3, 3, 3, 3], BoundaryMode::ZeroPadded).unwrap();
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1100, ValueSet::SmallIntegers);
        let squared = dirac(&dirac(&w, DiracSign::Minus), DiracSign::Minus);
        let lap = laplacian_inhomogeneous(&w);
        assert_eq!(squared, lap);
    }

    #[test]
    fn laplacian_commutes_with_coboundary() {
        let w: Form<i64> = Form::random(0, dom(), 1200, ValueSet::SmallIntegers);
        assert_eq!(laplacian(&coboundary(&w)), coboundary(&laplacian(&w)));
        let v: Form<i64> = Form::random(2, dom(), 1300, ValueSet::SmallIntegers);
        assert_eq!(
            laplacian(&codifferential(&v)),
            codifferential(&laplacian(&v))
        );
    }

    #[test]
    fn dirac_operators_agree_when_upper_parts_vanish() {
        let domain = dom();
        let mut w: InhomogeneousForm<i64> = InhomogeneousForm::zero(domain);
        w.set_part(Form::random(0, domain, 1400, ValueSet::SmallIntegers))
            .unwrap();
        let plus = dirac(&w, DiracSign::Plus);
        let minus = dirac(&w, DiracSign::Minus);
        assert_eq!(plus, minus);
        assert!(plus.part(0).is_zero());
        assert_eq!(*plus.part(1), coboundary(w.part(0)));
    }

    #[test]
    fn dirac_adjointness_signs() {
        // (D_+ a, b) = (a, D_+ b) and (D_- a, b) = -(a, D_- b).
        let domain = dom();
        let a: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1500, ValueSet::SmallIntegers);
        let b: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1600, ValueSet::SmallIntegers);
        let plus_l = inner_product_inhomogeneous(&dirac(&a, DiracSign::Plus), &b).unwrap();
        let plus_r = inner_product_inhomogeneous(&a, &dirac(&b, DiracSign::Plus)).unwrap();
        assert_eq!(plus_l, plus_r);
        let minus_l = inner_product_inhomogeneous(&dirac(&a, DiracSign::Minus), &b).unwrap();
        let minus_r = inner_product_inhomogeneous(&a, &dirac(&b, DiracSign::Minus)).unwrap();
        assert_eq!(minus_l, -minus_r);
    }

    #[test]
    fn inhomogeneous_inner_product_examples() {
        let domain = dom();
        let k = MultiIndex::new(2, 2, 2, 2);
        let mut w: InhomogeneousForm<i64> = InhomogeneousForm::zero(domain);
        w.set_part(Form::basis(0, DirectionSet::EMPTY, k, domain).unwrap())
            .unwrap();
        assert_eq!(inner_product_inhomogeneous(&w, &w).unwrap(), 1);
        let mut v: InhomogeneousForm<i64> = InhomogeneousForm::zero(domain);
        v.set_part(Form::basis(4, DirectionSet::FULL, k, domain).unwrap())
            .unwrap();
        assert_eq!(inner_product_inhomogeneous(&v, &v).unwrap(), -1);
    }

    #[test]
    fn inhomogeneous_inner_product_is_bilinear() {
        let domain = dom();
        let a: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1700, ValueSet::SmallIntegers);
        let b: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1800, ValueSet::SmallIntegers);
        let c: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, 1900, ValueSet::SmallIntegers);
        let combined = &a.scaled(&2) + &b.scaled(&-3);
        let lhs = inner_product_inhomogeneous(&combined, &c).unwrap();
        let rhs = 2 * inner_product_inhomogeneous(&a, &c).unwrap()
            - 3 * inner_product_inhomogeneous(&b, &c).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn codifferential_star_route_of_zero_form_is_zero() {
        let w: Form<i64> = Form::random(0, dom(), 1750, ValueSet::SmallIntegers);
        let (out, truncated) = codifferential_via_star(&w);
        assert!(!truncated);
        assert_eq!(out.degree(), 0);
        assert!(out.is_zero());
    }
}
