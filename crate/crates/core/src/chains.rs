//! The chain complex: integer-coefficient chains, the boundary operator and
//! the chain-cochain pairing, plus the domain chain `V`.
//!
//! Chains mirror forms: a basis chain carries the same `(direction set, site)`
//! label as the basis cochain it pairs to one. Chains are plain formal sums
//! with no domain attached; chains produced by the boundary operator may
//! reference sites outside a form's interior, where the pairing simply finds
//! no nonzero coefficient.

use std::collections::BTreeMap;

use crate::forms::Form;
use crate::lattice::{DirectionSet, Domain, MultiIndex};
use crate::scalar::Scalar;

/// Integer-coefficient chain of one degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain {
    degree: u8,
    coeffs: BTreeMap<(DirectionSet, MultiIndex), i64>,
}

impl Chain {
    pub fn zero(degree: u8) -> Self {
        Chain {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(dirs: DirectionSet, site: MultiIndex) -> Self {
        let mut c = Chain::zero(dirs.len() as u8);
        c.coeffs.insert((dirs, site), 1);
        c
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn add_term(&mut self, dirs: DirectionSet, site: MultiIndex, value: i64) {
        debug_assert_eq!(dirs.len(), self.degree as usize);
        let slot = self.coeffs.entry((dirs, site)).or_insert(0);
        *slot += value;
        if *slot == 0 {
            self.coeffs.remove(&(dirs, site));
        }
    }

    pub fn coeff(&self, dirs: DirectionSet, site: MultiIndex) -> i64 {
        self.coeffs.get(&(dirs, site)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (DirectionSet, MultiIndex, i64)> + '_ {
        self.coeffs.iter().map(|(&(d, k), &v)| (d, k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, s: i64) -> Chain {
        let mut out = Chain::zero(self.degree);
        for (d, k, v) in self.terms() {
            out.add_term(d, k, v * s);
        }
        out
    }
}

/// Boundary operator. Degree drops by one; for a basis chain each tensor
/// factor carrying an edge contributes its endpoints with an alternating
/// sign, the parity being the number of earlier edge factors. Degree-0 input
/// gives the zero chain.
pub fn boundary(a: &Chain) -> Chain {
    if a.degree() == 0 {
        return Chain::zero(0);
    }
    let mut out = Chain::zero(a.degree() - 1);
    for (dirs, site, value) in a.terms() {
        for axis in dirs.iter() {
            let sign = if dirs.pos(axis) % 2 == 0 { 1 } else { -1 };
            let reduced = dirs.without(axis);
            out.add_term(reduced, site.shifted(axis, 1), value * sign);
            out.add_term(reduced, site, -value * sign);
        }
    }
    out
}

/// Chain-cochain pairing: matching labels multiply, degrees must agree or the
/// result is zero. Chain sites are canonicalized into the form's domain, so
/// periodic forms pair correctly with boundary chains that walked off the
/// fundamental box.
pub fn pair<S: Scalar>(a: &Chain, w: &Form<S>) -> S {
    if a.degree() != w.degree() {
        return S::zero();
    }
    let domain = w.domain();
    let mut acc = S::zero();
    for (dirs, site, value) in a.terms() {
        let c = w.coeff(dirs, domain.canonical(site));
        acc += S::from_i64(value) * c;
    }
    acc
}

/// The domain chain `V`: coefficient 1 on every interior 4-dimensional basis
/// chain.
pub fn domain_chain(domain: &Domain) -> Chain {
    let mut v = Chain::zero(4);
    for site in domain.interior_sites() {
        v.add_term(DirectionSet::FULL, site, 1);
    }
    v
}
