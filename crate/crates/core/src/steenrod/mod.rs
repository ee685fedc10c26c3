//! Steenrod squares on polynomial algebras, graded modules with their
//! Steenrod-square matrices, and A-linear maps between them.
//!
//! Every action here is multiplicative: it is fixed by the total square
//! `St(v) = v + s(v)^2` of each variable `v`, where `s(v)` depends on the
//! action (`s(x) = x` classically, `s(t_i) = t_{i-1}` for Miller's generators).

mod map;
mod module;
mod properties;

pub use map::{hom_space, tensor_map, GradedMap, Morphism};
pub use module::{close_under_action, GradedModule};
pub use properties::{property_suite, PropertyReport};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gf2::{Monomial, Poly, MAX_VARS};

/// How the Steenrod algebra acts on the variables of a polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Variables `0..classical` are degree-one classes with `St(x) = x + x^2`;
    /// the remaining variables are Miller's `t_0, t_1, ...` with
    /// `St(t_i) = t_i + t_{i-1}^2` and `t_{-1} = 0`.
    Standard { classical: usize },
    /// The twisted action on `t_0, ..., t_{n-1}`: `St(t_i) = t_i + t_{i-1}^2`
    /// with indices taken mod `n`.
    Twisted { n: usize },
}

impl Action {
    /// All variables classical.
    pub const CLASSICAL: Action = Action::Standard {
        classical: MAX_VARS,
    };
    /// All variables are Miller generators.
    pub const MILLER: Action = Action::Standard { classical: 0 };

    /// The variable whose square appears in `St(v)`, if any.
    #[inline]
    pub fn square_target(&self, v: usize) -> Option<usize> {
        match *self {
            Action::Standard { classical } if v < classical => Some(v),
            Action::Standard { classical } => (v > classical).then(|| v - 1),
            Action::Twisted { n } => Some(if v == 0 { n - 1 } else { v - 1 }),
        }
    }
}

/// Calls `emit(k, m')` for every term of the total square of `m`, where `m'`
/// lies in degree `deg m + k`. Terms may repeat; callers collect mod 2.
fn total_square_terms(action: Action, m: &Monomial, mut emit: impl FnMut(usize, Monomial)) {
    let vars: Vec<(usize, u32)> = (0..MAX_VARS)
        .filter(|&v| m.exp(v) > 0)
        .map(|v| (v, m.exp(v)))
        .collect();
    fn go(
        action: Action,
        vars: &[(usize, u32)],
        acc: Monomial,
        k: usize,
        emit: &mut impl FnMut(usize, Monomial),
    ) {
        let Some((&(v, a), rest)) = vars.split_first() else {
            emit(k, acc);
            return;
        };
        let target = action.square_target(v);
        // St(v)^a = sum over j with C(a, j) odd, i.e. the submasks of a
        let mut j = a;
        loop {
            let term = if j == 0 {
                Some(acc.mul(&Monomial::ONE.with_exp(v, a)))
            } else {
                target.map(|t| {
                    acc.mul(&Monomial::ONE.with_exp(v, a - j))
                        .mul(&Monomial::ONE.with_exp(t, 2 * j))
                })
            };
            if let Some(mono) = term {
                go(action, rest, mono, k + j as usize, emit);
            }
            if j == 0 {
                break;
            }
            j = (j - 1) & a;
        }
    }
    go(action, &vars, Monomial::ONE, 0, &mut emit);
}

/// The total square of `f`, split into its components: entry `k` is
/// `Sq^k(f)` (for homogeneous `f`). Zero components are omitted.
pub fn total_square(action: Action, f: &Poly) -> BTreeMap<usize, Poly> {
    let mut by_k: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
    for m in f.terms() {
        total_square_terms(action, m, |k, t| by_k.entry(k).or_default().push(t));
    }
    by_k.into_iter()
        .map(|(k, v)| (k, Poly::from_monomials(f.nvars(), v)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// Like [`total_square`], but keeps only components with `k <= max_k`.
pub fn total_square_upto(action: Action, f: &Poly, max_k: usize) -> BTreeMap<usize, Poly> {
    let mut by_k: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
    for m in f.terms() {
        total_square_terms(action, m, |k, t| {
            if k <= max_k {
                by_k.entry(k).or_default().push(t)
            }
        });
    }
    by_k.into_iter()
        .map(|(k, v)| (k, Poly::from_monomials(f.nvars(), v)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// `Sq^k(f)`, extended additively to inhomogeneous `f`.
pub fn sq_with(action: Action, k: usize, f: &Poly) -> Poly {
    let mut terms = Vec::new();
    for m in f.terms() {
        total_square_terms(action, m, |j, t| {
            if j == k {
                terms.push(t)
            }
        });
    }
    Poly::from_monomials(f.nvars(), terms)
}

/// The classical square: `Sq^k` on `F_2[x_1, ..., x_n]` with `Sq(x) = x + x^2`.
pub fn sq(k: usize, f: &Poly) -> Poly {
    sq_with(Action::CLASSICAL, k, f)
}

/// The twisted square on `F_2[t_0, ..., t_{n-1}]`, where `Sq^1(t_0) = t_{n-1}^2`.
pub fn twisted_sq(k: usize, f: &Poly, n: usize) -> Poly {
    assert!(f.nvars() <= n, "polynomial has more than {n} variables");
    sq_with(Action::Twisted { n }, k, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(e: &[&[u32]]) -> Poly {
        Poly::from_exponents(e[0].len(), e)
    }

    #[test]
    fn classical_examples() {
        let st = total_square(Action::CLASSICAL, &x(&[&[1]]));
        assert_eq!(st[&0], x(&[&[1]]));
        assert_eq!(st[&1], x(&[&[2]]));
        assert_eq!(sq(1, &x(&[&[1, 1]])), x(&[&[2, 1], &[1, 2]]));
        assert_eq!(sq(2, &x(&[&[2]])), x(&[&[4]]));
        assert!(sq(1, &x(&[&[2]])).is_zero());
        let omega2 = x(&[&[2, 1], &[1, 2]]);
        assert_eq!(sq(3, &omega2), x(&[&[4, 2], &[2, 4]]));
        assert!(sq(5, &x(&[&[3, 1]])).is_zero());
    }

    #[test]
    fn sq1_of_x1_cubed_x2() {
        // St(x)^3 St(y) read in degree 5, expanded by hand: 3x^4y + x^3y^2
        let expected = x(&[&[4, 1], &[3, 2]]);
        assert_eq!(sq(1, &x(&[&[3, 1]])), expected);
    }

    #[test]
    fn twisted_examples() {
        assert_eq!(twisted_sq(1, &Poly::var(2, 1), 2), x(&[&[2, 0]]));
        assert_eq!(twisted_sq(1, &Poly::var(3, 0), 3), x(&[&[0, 0, 2]]));
        assert_eq!(twisted_sq(2, &x(&[&[1, 1]]), 2), x(&[&[2, 2]]));
    }

    #[test]
    fn miller_bottom_generator_is_sq1_closed() {
        let t0 = Poly::var(2, 0);
        assert!(sq_with(Action::MILLER, 1, &t0).is_zero());
        assert_eq!(sq_with(Action::MILLER, 1, &Poly::var(2, 1)), x(&[&[2, 0]]));
    }

    #[test]
    fn mixed_ring_keeps_the_two_rules_apart() {
        let a = Action::Standard { classical: 1 };
        // x (x) t_0: Sq^1 = x^2 t_0 + 0
        let f = x(&[&[1, 1]]);
        assert_eq!(sq_with(a, 1, &f), x(&[&[2, 1]]));
    }
}
