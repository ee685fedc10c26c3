use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::matrix::{BitVec, GF2Matrix};
use super::monomial::Monomial;
use super::poly::Poly;
use crate::{Error, Result};

/// Outcome of adding a polynomial to a [`PolySpan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// The polynomial was new; it is basis element `idx`.
    Independent(usize),
    /// The polynomial is the sum of these basis elements.
    Dependent(BitVec),
}

#[derive(Clone, Debug)]
struct Row {
    poly: Poly,
    // basis elements summing to `poly`, as a growable bit set
    combo: Vec<u64>,
}

fn xor_into(dst: &mut Vec<u64>, src: &[u64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn to_bitvec(words: &[u64], len: usize) -> BitVec {
    BitVec::from_indices(
        len,
        words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| (w >> b) & 1 == 1).map(move |b| k * 64 + b)
        }),
    )
}

/// An incrementally built span of polynomials, kept in echelon form keyed by
/// leading monomial so that membership tests never touch a dense matrix.
#[derive(Clone, Debug)]
pub struct PolySpan {
    nvars: usize,
    basis: Vec<Poly>,
    rows: Vec<Row>,
    pivot: HashMap<Monomial, usize>,
}

impl PolySpan {
    pub fn new(nvars: usize) -> PolySpan {
        PolySpan {
            nvars,
            basis: Vec::new(),
            rows: Vec::new(),
            pivot: HashMap::new(),
        }
    }

    pub fn from_polys<'a>(nvars: usize, polys: impl IntoIterator<Item = &'a Poly>) -> PolySpan {
        let mut s = PolySpan::new(nvars);
        for p in polys {
            s.insert(p);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The independent polynomials in insertion order.
    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    /// Reduces `p` against the span. Returns the remainder (no term of which is
    /// a pivot) and the basis combination that was subtracted.
    fn reduce_words(&self, p: &Poly) -> (Poly, Vec<u64>) {
        assert_eq!(p.nvars(), self.nvars, "variable count mismatch");
        let mut work = p.clone();
        let mut remainder: Vec<Monomial> = Vec::new();
        let mut combo = Vec::new();
        while let Some(&m) = work.leading() {
            match self.pivot.get(&m) {
                Some(&r) => {
                    work += &self.rows[r].poly;
                    xor_into(&mut combo, &self.rows[r].combo);
                }
                None => {
                    remainder.push(m);
                    work = Poly::from_sorted(self.nvars, work.terms()[..work.len() - 1].to_vec());
                }
            }
        }
        remainder.reverse();
        (Poly::from_sorted(self.nvars, remainder), combo)
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        self.reduce_words(p).0
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.reduce(p).is_zero()
    }

    /// Coordinates of `p` in the basis, if `p` lies in the span.
    pub fn coordinates(&self, p: &Poly) -> Option<BitVec> {
        let (rem, combo) = self.reduce_words(p);
        rem.is_zero().then(|| to_bitvec(&combo, self.dim()))
    }

    pub fn insert(&mut self, p: &Poly) -> Insert {
        let (rem, mut combo) = self.reduce_words(p);
        if rem.is_zero() {
            return Insert::Dependent(to_bitvec(&combo, self.dim()));
        }
        let idx = self.basis.len();
        self.basis.push(p.clone());
        // rem = p + (combo), so rem corresponds to combo + e_idx
        if combo.len() <= idx / 64 {
            combo.resize(idx / 64 + 1, 0);
        }
        combo[idx / 64] ^= 1 << (idx % 64);
        let lead = *rem.leading().expect("nonzero remainder");
        self.pivot.insert(lead, self.rows.len());
        self.rows.push(Row { poly: rem, combo });
        Insert::Independent(idx)
    }

    /// A basis of the span in which every element has a distinct leading
    /// monomial.
    pub fn echelon_basis(&self) -> Vec<Poly> {
        self.rows.iter().map(|r| r.poly.clone()).collect()
    }

    /// The fully reduced echelon basis: each element has a distinct leading
    /// monomial that occurs in no other element. Ordered by leading monomial,
    /// largest first. Depends only on the span, not on insertion order.
    pub fn reduced_basis(&self) -> Vec<Poly> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| *self.rows[r].poly.leading().expect("nonzero row"));
        let mut done: HashMap<Monomial, Poly> = HashMap::new();
        let mut out = Vec::with_capacity(order.len());
        for r in order {
            let p = &self.rows[r].poly;
            let lead = *p.leading().expect("nonzero row");
            let mut kept = vec![lead];
            let mut work = Poly::from_sorted(self.nvars, p.terms()[..p.len() - 1].to_vec());
            while let Some(&m) = work.leading() {
                match done.get(&m) {
                    Some(q) => work += q,
                    None => {
                        kept.push(m);
                        work = Poly::from_sorted(self.nvars, work.terms()[..work.len() - 1].to_vec());
                    }
                }
            }
            kept.reverse();
            let reduced = Poly::from_sorted(self.nvars, kept);
            done.insert(lead, reduced.clone());
            out.push(reduced);
        }
        out.reverse();
        out
    }

    /// Basis of the intersection with `other`, found from the linear
    /// relations among the union of both bases.
    pub fn intersection(&self, other: &PolySpan) -> PolySpan {
        let mut joint = self.clone();
        let mut out = PolySpan::new(self.nvars);
        for q in &other.basis {
            if let Insert::Dependent(c) = joint.insert(q) {
                // q = sum of joint basis elements; the part from `self` lies in
                // both spans
                let mut from_self = Poly::zero(self.nvars);
                for i in c.ones().filter(|&i| i < self.dim()) {
                    from_self += &joint.basis[i];
                }
                if !from_self.is_zero() {
                    out.insert(&from_self);
                }
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &PolySpan) -> bool {
        self.basis.iter().all(|p| other.contains(p))
    }
}

/// Coordinates of `target` with respect to `spanning`, if it lies in the span.
///
/// All inputs must be homogeneous of one common degree. When `spanning` is
/// dependent, some valid coordinate vector is returned.
pub fn solve_in_span(spanning: &[Poly], target: &Poly) -> Result<Option<BitVec>> {
    let nvars = target.nvars();
    let degree = spanning
        .iter()
        .chain(std::iter::once(target))
        .find_map(|p| p.degree());
    let Some(d) = degree else {
        // everything is zero
        return Ok(Some(BitVec::zeros(spanning.len())));
    };
    for p in spanning.iter().chain(std::iter::once(target)) {
        if p.nvars() != nvars {
            return Err(Error::VariableMismatch {
                left: nvars,
                right: p.nvars(),
            });
        }
        p.check_homogeneous(d)?;
    }
    let monomials: BTreeSet<Monomial> = spanning
        .iter()
        .chain(std::iter::once(target))
        .flat_map(|p| p.terms().iter().copied())
        .collect();
    let index: HashMap<Monomial, usize> =
        monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let column = |p: &Poly| BitVec::from_indices(index.len(), p.terms().iter().map(|m| index[m]));
    let cols: Vec<BitVec> = spanning.iter().map(column).collect();
    let a = GF2Matrix::from_columns(&cols, index.len());
    Ok(a.solve(&column(target)))
}

/// A graded subspace of a polynomial ring, with an independent basis in each
/// degree up to `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSubspace {
    pub nvars: usize,
    pub cap: usize,
    /// `basis[d]` is the basis in degree `d`.
    pub basis: Vec<Vec<Poly>>,
}

impl GradedSubspace {
    /// Sorts the given polynomials by degree, dropping dependent ones and
    /// anything above `cap`.
    pub fn spanned_by<'a>(
        nvars: usize,
        cap: usize,
        polys: impl IntoIterator<Item = &'a Poly>,
    ) -> Result<GradedSubspace> {
        let mut spans: Vec<PolySpan> = (0..=cap).map(|_| PolySpan::new(nvars)).collect();
        for p in polys {
            let Some(d) = p.degree() else { continue };
            p.check_homogeneous(d)?;
            if d <= cap {
                spans[d].insert(p);
            }
        }
        Ok(GradedSubspace {
            nvars,
            cap,
            basis: spans.into_iter().map(|s| s.basis).collect(),
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn span(&self, d: usize) -> PolySpan {
        PolySpan::from_polys(self.nvars, &self.basis[d])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(exps: &[&[u32]]) -> Poly {
        Poly::from_exponents(2, exps)
    }

    #[test]
    fn spec_examples() {
        let x2 = p(&[&[2, 0]]);
        let y2 = p(&[&[0, 2]]);
        assert_eq!(
            solve_in_span(&[x2.clone(), y2.clone()], &p(&[&[2, 0], &[0, 2]])).unwrap(),
            Some(BitVec::from_bools(&[true, true]))
        );
        assert_eq!(solve_in_span(&[x2], &p(&[&[1, 1]])).unwrap(), None);
        let g = p(&[&[3, 1], &[2, 2]]);
        assert_eq!(
            solve_in_span(std::slice::from_ref(&g), &g).unwrap(),
            Some(BitVec::from_bools(&[true]))
        );
    }

    #[test]
    fn inhomogeneous_input_is_rejected() {
        let r = solve_in_span(&[p(&[&[1, 0]])], &p(&[&[2, 0]]));
        assert!(matches!(r, Err(Error::Inhomogeneous { .. })));
    }

    #[test]
    fn insert_tracks_combinations() {
        let mut s = PolySpan::new(2);
        let a = p(&[&[2, 0], &[1, 1]]);
        let b = p(&[&[1, 1], &[0, 2]]);
        assert_eq!(s.insert(&a), Insert::Independent(0));
        assert_eq!(s.insert(&b), Insert::Independent(1));
        let c = &a + &b;
        assert_eq!(s.insert(&c), Insert::Dependent(BitVec::from_bools(&[true, true])));
        assert_eq!(s.coordinates(&b), Some(BitVec::from_bools(&[false, true])));
        assert!(!s.contains(&p(&[&[2, 0]])));
    }

    #[test]
    fn intersection_of_planes() {
        let u = PolySpan::from_polys(2, &[p(&[&[2, 0]]), p(&[&[1, 1]])]);
        let v = PolySpan::from_polys(2, &[p(&[&[2, 0], &[1, 1]]), p(&[&[0, 2]])]);
        let w = u.intersection(&v);
        assert_eq!(w.dim(), 1);
        assert!(w.contains(&p(&[&[2, 0], &[1, 1]])));
    }

    #[test]
    fn reduced_basis_ignores_insertion_order() {
        let a = p(&[&[2, 0], &[1, 1]]);
        let b = p(&[&[1, 1], &[0, 2]]);
        let c = p(&[&[2, 0], &[0, 2]]);
        let one = PolySpan::from_polys(2, &[a.clone(), b.clone()]).reduced_basis();
        let two = PolySpan::from_polys(2, &[c.clone(), b.clone()]).reduced_basis();
        assert_eq!(one, two);
        assert_eq!(one, vec![c, b]);
    }
}
