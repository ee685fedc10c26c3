use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weight;
use crate::gf2::{Monomial, Poly};
use crate::steenrod::{sq_with, twisted_sq, Action};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampbellSelickReport {
    pub n: usize,
    pub cap: usize,
    /// Every weight class mod `2^n - 1` is closed under the twisted squares.
    pub classes_closed: bool,
    /// `(d, k)` where the projection to `J(2^n - 1)` fails to commute with
    /// `Sq^k` on some monomial of degree `d`.
    pub failures: Vec<(usize, usize)>,
    /// Whether renaming `t_i -> t_i` alone commutes with every square.
    pub rename_alone_linear: bool,
    pub passed: bool,
}

pub(crate) fn monomials_of_degree(n: usize, d: usize) -> Vec<Monomial> {
    fn go(n: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == n {
            cur.push(d as u32);
            out.push(Monomial::new(cur));
            cur.pop();
            return;
        }
        for a in 0..=d {
            cur.push(a as u32);
            go(n, d - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial::ONE);
        }
    } else {
        go(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Keeps the monomials of weight exactly `2^n - 1`: these have degree at
/// most `2^n - 1` and span `J(2^n - 1)`.
fn project(p: &Poly, n: usize) -> Poly {
    let top = (1u64 << n) - 1;
    Poly::from_monomials(
        n,
        p.terms().iter().copied().filter(|m| weight(m) == top),
    )
}

/// The twisted action on `F_2[t_0, ..., t_{n-1}]` splits by weight mod
/// `2^n - 1`, and the projection onto `J(2^n - 1)` is A-linear.
pub fn campbell_selick_check(n: usize, cap: usize) -> Result<CampbellSelickReport> {
    if !(1..=3).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: "1 <= n <= 3".into(),
        });
    }
    let modulus = (1u64 << n) - 1;
    let per_degree: Vec<(bool, Vec<(usize, usize)>, bool)> = (0..=cap)
        .into_par_iter()
        .map(|d| {
            let mut closed = true;
            let mut failures = Vec::new();
            let mut rename_ok = true;
            for m in monomials_of_degree(n, d) {
                let p = Poly::monomial(n, m);
                for k in 1..=cap - d {
                    let tw = twisted_sq(k, &p, n);
                    if tw.terms().iter().any(|t| weight(t) % modulus != weight(&m) % modulus) {
                        closed = false;
                    }
                    let untwisted = sq_with(Action::MILLER, k, &p);
                    if tw != untwisted {
                        rename_ok = false;
                    }
                    let lhs = project(&tw, n);
                    let rhs = sq_with(Action::MILLER, k, &project(&p, n));
                    if lhs != rhs && !failures.contains(&(d, k)) {
                        failures.push((d, k));
                    }
                }
            }
            (closed, failures, rename_ok)
        })
        .collect();
    let classes_closed = per_degree.iter().all(|r| r.0);
    let failures: Vec<(usize, usize)> = per_degree.iter().flat_map(|r| r.1.clone()).collect();
    let rename_alone_linear = per_degree.iter().all(|r| r.2);
    Ok(CampbellSelickReport {
        n,
        cap,
        classes_closed,
        passed: classes_closed && failures.is_empty(),
        failures,
        rename_alone_linear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let r = campbell_selick_check(1, 6).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(!r.rename_alone_linear);
        let t0 = Poly::var(1, 0);
        assert_eq!(project(&Poly::monomial(1, Monomial::new(&[3])), 1), Poly::zero(1));
        assert_eq!(project(&t0, 1), t0);
    }

    #[test]
    fn two_and_three_variables() {
        let r = campbell_selick_check(2, 6).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(!r.rename_alone_linear);
        // Sq^1 t_0 = t_1^2: weight 4 = 1 mod 3
        assert_eq!(twisted_sq(1, &Poly::var(2, 0), 2), Poly::monomial(2, Monomial::new(&[0, 2])));
        let r = campbell_selick_check(3, 10).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
        assert_eq!(monomials_of_degree(1, 5).len(), 1);
    }
}
