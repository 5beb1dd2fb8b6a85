//! Property tests over arbitrary (not just seeded) coefficient data.

use proptest::prelude::*;

use dklattice::calculus::{coboundary, codifferential, cup, inner_product_signature};
use dklattice::chains::{boundary, pair, Chain};
use dklattice::forms::Form;
use dklattice::lattice::{BoundaryMode, DirectionSet, Domain, MultiIndex};

fn domain() -> Domain {
    Domain::new([2, 2, 2, 2], BoundaryMode::ZeroPadded).unwrap()
}

/// Strategy: an integer form of the given degree with arbitrary small
/// coefficients on interior sites.
fn arb_form(degree: u8) -> impl Strategy<Value = Form<i64>> {
    let d = domain();
    let classes = DirectionSet::by_degree(degree as usize).len();
    let sites = d.interior_site_count();
    proptest::collection::vec(-4i64..=4, classes * sites).prop_map(move |coeffs| {
        let mut form = Form::zero(degree, d);
        let mut it = coeffs.into_iter();
        for &dirs in DirectionSet::by_degree(degree as usize) {
            for site in d.interior_sites() {
                form.set_coeff(dirs, site, it.next().unwrap());
            }
        }
        form
    })
}

fn arb_site() -> impl Strategy<Value = MultiIndex> {
    (1i64..=2, 1i64..=2, 1i64..=2, 1i64..=2).prop_map(|(a, b, c, d)| MultiIndex::new(a, b, c, d))
}

proptest! {
    #[test]
    fn coboundary_squares_to_zero(w in (0u8..=2).prop_flat_map(arb_form)) {
        prop_assert!(coboundary(&coboundary(&w)).is_zero());
    }

    #[test]
    fn codifferential_squares_to_zero(w in (2u8..=4).prop_flat_map(arb_form)) {
        prop_assert!(codifferential(&codifferential(&w)).is_zero());
    }

    #[test]
    fn linear_combine_add_commutes(f in arb_form(1), g in arb_form(1)) {
        let a = Form::linear_combine(1, &f, 1, &g).unwrap();
        let b = Form::linear_combine(1, &g, 1, &f).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn linear_combine_is_associative(
        f in arb_form(2),
        g in arb_form(2),
        h in arb_form(2),
    ) {
        let left = Form::linear_combine(1, &Form::linear_combine(1, &f, 1, &g).unwrap(), 1, &h).unwrap();
        let right = Form::linear_combine(1, &f, 1, &Form::linear_combine(1, &g, 1, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn forms_stay_interior_supported_under_linear_combine(
        f in arb_form(3),
        g in arb_form(3),
        a in -3i64..=3,
        b in -3i64..=3,
    ) {
        let combined = Form::linear_combine(a, &f, b, &g).unwrap();
        prop_assert!(combined.is_interior_supported());
    }

    #[test]
    fn duality_holds_for_arbitrary_forms(
        w in (0u8..=3).prop_flat_map(arb_form),
        site in arb_site(),
    ) {
        let dw = coboundary(&w);
        for &dirs in DirectionSet::by_degree(w.degree() as usize + 1) {
            let a = Chain::basis(dirs, site);
            prop_assert_eq!(pair(&boundary(&a), &w), pair(&a, &dw));
        }
    }

    #[test]
    fn cup_is_bilinear_in_the_left_slot(
        f in arb_form(1),
        g in arb_form(1),
        h in arb_form(2),
        a in -3i64..=3,
        b in -3i64..=3,
    ) {
        let combined = Form::linear_combine(a, &f, b, &g).unwrap();
        let lhs = cup(&combined, &h).unwrap();
        let rhs = Form::linear_combine(
            a,
            &cup(&f, &h).unwrap(),
            b,
            &cup(&g, &h).unwrap(),
        ).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inner_product_is_symmetric(f in arb_form(2), g in arb_form(2)) {
        prop_assert_eq!(
            inner_product_signature(&f, &g).unwrap(),
            inner_product_signature(&g, &f).unwrap()
        );
    }
}
