use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{j_basis, minc_sequences, GMap};
use crate::gf2::{binom_mod2, BitVec, GF2Matrix, Monomial, Poly};
use crate::matrix_algebra::MAX_N;
use crate::steinberg::{build_steinberg, mp_relations, positive_monomials, Flavor};
use crate::{Error, Result};

const MAX_STEPS: usize = 1 << 20;

/// `(a_1, ..., a_n)` is in `Ω_n`: `a_i <= 2a_{i+1}`, `a_n = 1`.
pub fn is_minc_admissible(a: &[u32]) -> bool {
    a.last() == Some(&1) && a.windows(2).all(|w| w[0] <= 2 * w[1]) && a.iter().all(|&x| x > 0)
}

/// The normal form of `x^a` modulo `MP(1) + ⋯ + MP(n)`, as a set of tuples
/// in `Ω_n` (a sum over GF(2)).
///
/// Rewrites at the leftmost `i` with `a_i > 2a_{i+1}` by
/// `x^a y^b ≡ Σ_{j=1}^{a-b-1} (C(b,j) + C(a-b,j)) x^{b+j} y^{a-j}`, and drops
/// tuples with last exponent at least 2, which lie in `L_1^{⊗n-1} ⊗ L'_1`.
pub fn rewrite_admissible(a: &[u32]) -> Result<BTreeSet<Vec<u32>>> {
    let n = a.len();
    if n == 0 || a.contains(&0) {
        return Err(Error::OutOfRange {
            what: "exponent",
            value: 0,
            bound: "every exponent >= 1".into(),
        });
    }
    let top = (1usize << n.min(63)) - 1;
    let mut done = BTreeSet::new();
    if a.iter().map(|&x| x as usize).sum::<usize>() > top {
        return Ok(done);
    }
    let mut pending: BTreeSet<Vec<u32>> = BTreeSet::from([a.to_vec()]);
    let toggle = |set: &mut BTreeSet<Vec<u32>>, t: Vec<u32>| {
        if !set.remove(&t) {
            set.insert(t);
        }
    };
    let mut steps = 0;
    while let Some(t) = pending.pop_first() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::NonTermination(MAX_STEPS));
        }
        if t[n - 1] >= 2 {
            continue;
        }
        let Some(i) = (0..n - 1).find(|&i| t[i] > 2 * t[i + 1]) else {
            toggle(&mut done, t);
            continue;
        };
        let (x, y) = (t[i], t[i + 1]);
        for j in 1..x - y {
            if binom_mod2(y as u64, j as u64) != binom_mod2((x - y) as u64, j as u64) {
                let mut u = t.clone();
                u[i] = y + j;
                u[i + 1] = x - j;
                toggle(&mut pending, u);
            }
        }
    }
    Ok(done)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationRow {
    pub degree: usize,
    /// Monomials of `L_1^{⊗n}` in this degree.
    pub monomials: usize,
    /// Rank of the `MP(1) + ⋯ + MP(n)` relations.
    pub relation_rank: usize,
    pub quotient_dim: usize,
    pub j_dim: usize,
    pub g_rank: usize,
    /// `g_n` kills every relation.
    pub relations_killed: bool,
    /// Number of `Ω_n` tuples, and the rank of their images under `g_n`.
    pub minc_count: usize,
    pub minc_rank: usize,
}

impl PresentationRow {
    pub fn holds(&self) -> bool {
        self.quotient_dim == self.j_dim
            && self.g_rank == self.j_dim
            && self.relations_killed
            && self.minc_count == self.j_dim
            && self.minc_rank == self.j_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub n: usize,
    pub rows: Vec<PresentationRow>,
    pub passed: bool,
}

/// `L_1^{⊗n} / (MP(1) + ⋯ + MP(n)) ≅ J(2^n - 1)` via `g_n`, degree by degree
/// through `2^n - 1`. Since `g_n` kills the relations and the two ranks
/// agree, its kernel is exactly their span.
pub fn presentation_check(n: usize) -> Result<PresentationReport> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("1 <= n <= {MAX_N}"),
        });
    }
    let top = (1usize << n) - 1;
    let g = GMap::new(n)?;
    let j = j_basis(top, top)?;
    let l2 = build_steinberg(Flavor::L, 2, top)?;
    let omega = minc_sequences(n, top);
    let rows = (0..=top)
        .into_par_iter()
        .map(|d| {
            let monos: Vec<Monomial> = positive_monomials(n, d, 0, n)
                .into_iter()
                .map(|p| p.terms()[0])
                .collect();
            let index: HashMap<Monomial, usize> =
                monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
            let as_vec = |p: &Poly| BitVec::from_indices(monos.len(), p.terms().iter().map(|m| index[m]));
            let mut relations: Vec<Poly> = (0..n.saturating_sub(1))
                .flat_map(|i| mp_relations(n, i, d, &l2.module))
                .collect();
            relations.extend(
                monos
                    .iter()
                    .filter(|m| m.exp(n - 1) >= 2)
                    .map(|&m| Poly::monomial(n, m)),
            );
            let rel = GF2Matrix::from_rows(&relations.iter().map(as_vec).collect::<Vec<_>>(), monos.len());
            let relation_rank = rel.rank();
            let relations_killed = relations.iter().all(|r| g.apply(r).is_zero());
            let image = |p: &Poly| -> Result<BitVec> {
                j.coordinates(d, &g.apply(p))
                    .ok_or_else(|| Error::Falsified(format!("g_{n}({p}) is not in J({top})")))
            };
            let gcols = monos
                .iter()
                .map(|&m| image(&Poly::monomial(n, m)))
                .collect::<Result<Vec<_>>>()?;
            let g_rank = GF2Matrix::from_columns(&gcols, j.dim(d)).rank();
            let mcols = omega[d]
                .iter()
                .map(|a| image(&Poly::monomial(n, Monomial::new(a))))
                .collect::<Result<Vec<_>>>()?;
            let minc_rank = GF2Matrix::from_columns(&mcols, j.dim(d)).rank();
            Ok(PresentationRow {
                degree: d,
                monomials: monos.len(),
                relation_rank,
                quotient_dim: monos.len() - relation_rank,
                j_dim: j.dim(d),
                g_rank,
                relations_killed,
                minc_count: omega[d].len(),
                minc_rank,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(PresentationRow::holds);
    Ok(PresentationReport { n, rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[&[u32]]) -> BTreeSet<Vec<u32>> {
        v.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn rewrite_examples() {
        assert_eq!(rewrite_admissible(&[2, 1]).unwrap(), set(&[&[2, 1]]));
        assert_eq!(rewrite_admissible(&[3, 1, 1]).unwrap(), set(&[&[2, 2, 1]]));
        assert!(rewrite_admissible(&[5, 2, 1]).unwrap().is_empty());
        assert!(rewrite_admissible(&[1, 2]).unwrap().is_empty());
        assert!(rewrite_admissible(&[1, 0]).is_err());
    }

    #[test]
    fn congruence_holds_modulo_l2() {
        // x^a y^b + (right-hand side) is a basis element of L_2
        let l2 = build_steinberg(Flavor::L, 2, 16).unwrap();
        for a in 1u32..16 {
            for b in 1..a {
                if a <= 2 * b || (a + b) as usize > 16 {
                    continue;
                }
                let mut terms = vec![Monomial::new(&[a, b])];
                for j in 1..a - b {
                    if binom_mod2(b as u64, j as u64) != binom_mod2((a - b) as u64, j as u64) {
                        terms.push(Monomial::new(&[b + j, a - j]));
                    }
                }
                let diff = Poly::from_monomials(2, terms);
                assert!(
                    l2.module.coordinates((a + b) as usize, &diff).is_some(),
                    "a = {a}, b = {b}"
                );
            }
        }
    }

    #[test]
    fn presentation_small() {
        let r = presentation_check(2).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows[2].quotient_dim, 1);
        assert_eq!(r.rows[3].quotient_dim, 1);
        let r = presentation_check(3).unwrap();
        assert!(r.passed, "{r:?}");
        let q: Vec<usize> = r.rows[3..].iter().map(|x| x.quotient_dim).collect();
        assert_eq!(q, vec![1, 2, 1, 1, 1]);
    }

    #[test]
    fn presentation_four() {
        let r = presentation_check(4).unwrap();
        assert!(r.passed, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rewriting_agrees_with_g(a in proptest::collection::vec(1u32..6, 3)) {
            let g = GMap::new(3).unwrap();
            let lhs = g.value(&a);
            let forms = rewrite_admissible(&a).unwrap();
            let mut rhs = Poly::zero(3);
            for t in &forms {
                prop_assert!(is_minc_admissible(t));
                rhs += &g.value(t);
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
