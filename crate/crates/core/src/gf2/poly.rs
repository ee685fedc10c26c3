use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::monomial::{Monomial, MAX_VARS};
use crate::{Error, Result};

/// A polynomial over GF(2) in `nvars` variables, stored as the sorted set of
/// its monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    // strictly increasing in the global monomial order
    terms: Vec<Monomial>,
}

/// Sorts and keeps the monomials that occur an odd number of times.
pub(crate) fn collect_parity(mut v: Vec<Monomial>) -> Vec<Monomial> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        assert!(nvars <= MAX_VARS);
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::monomial(nvars, Monomial::ONE)
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        Poly::monomial(nvars, Monomial::var(i))
    }

    pub fn monomial(nvars: usize, m: Monomial) -> Poly {
        assert!(nvars <= MAX_VARS && m.support_len() <= nvars);
        Poly {
            nvars,
            terms: vec![m],
        }
    }

    /// Sum of the given monomials, with repeated monomials cancelling in pairs.
    pub fn from_monomials(nvars: usize, monomials: impl IntoIterator<Item = Monomial>) -> Poly {
        let terms = collect_parity(monomials.into_iter().collect());
        debug_assert!(terms.iter().all(|m| m.support_len() <= nvars));
        Poly { nvars, terms }
    }

    pub fn from_exponents(nvars: usize, exps: &[&[u32]]) -> Poly {
        Poly::from_monomials(nvars, exps.iter().map(|e| Monomial::new(e)))
    }

    /// Wraps monomials already known to be sorted and distinct.
    pub(crate) fn from_sorted(nvars: usize, terms: Vec<Monomial>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        Poly { nvars, terms }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.binary_search(m).is_ok()
    }

    /// Largest monomial in the global (graded, then lex) order.
    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.last()
    }

    /// Largest monomial in pure lexicographic order.
    pub fn lex_leading(&self) -> Option<Monomial> {
        self.terms.iter().copied().max_by(|a, b| a.lex_cmp(b))
    }

    /// Total degree of the highest-degree term; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.last().map(|m| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        match (self.terms.first(), self.terms.last()) {
            (Some(a), Some(b)) => a.degree() == b.degree(),
            _ => true,
        }
    }

    /// Fails unless every term has degree `d` (zero passes).
    pub fn check_homogeneous(&self, d: usize) -> Result<()> {
        if self.terms.iter().all(|m| m.degree() == d) {
            Ok(())
        } else {
            Err(Error::Inhomogeneous { expected: d })
        }
    }

    pub fn homogeneous_part(&self, d: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().copied().filter(|m| m.degree() == d).collect(),
        }
    }

    pub fn homogeneous_parts(&self) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for m in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Poly::zero(self.nvars))
                .terms
                .push(*m);
        }
        out
    }

    pub fn add_poly(&self, other: &Poly) -> Result<Poly> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Poly {
            nvars: self.nvars,
            terms: out,
        })
    }

    pub fn multiply(&self, other: &Poly) -> Result<Poly> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                prods.push(a.mul(b));
            }
        }
        Ok(Poly {
            nvars: self.nvars,
            terms: collect_parity(prods),
        })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        // multiplication by a monomial is injective and order preserving
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|t| t.mul(m)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Frobenius: squares every monomial.
    pub fn square(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|m| m.mul(m)).collect(),
        }
    }

    /// Re-indexes variable `i` as `map(i)` in a ring with `nvars` variables.
    /// The map must be injective on the variables that occur.
    pub fn rename(&self, nvars: usize, map: impl Fn(usize) -> usize) -> Poly {
        Poly::from_monomials(nvars, self.terms.iter().map(|m| m.remap(&map)))
    }

    /// Places this polynomial's variables at positions `offset..` of a ring
    /// with `nvars` variables.
    pub fn shift(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= nvars);
        let terms = self.terms.iter().map(|m| m.remap(|i| i + offset)).collect();
        // prepending zero exponents preserves the order
        Poly { nvars, terms }
    }

    /// Splits by the exponent of variable `var`: returns `coefficient(e)` with
    /// `var` set to zero, for every exponent `e` that occurs.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Vec<Monomial>> = BTreeMap::new();
        for m in &self.terms {
            out.entry(m.exp(var)).or_default().push(m.with_exp(var, 0));
        }
        out.into_iter()
            .map(|(e, v)| (e, Poly::from_monomials(self.nvars, v)))
            .collect()
    }

    /// Evaluates the exponent vectors of all terms, for serialization.
    pub fn exponent_lists(&self) -> Vec<Vec<u32>> {
        self.terms.iter().map(|m| m.exps(self.nvars)).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.add_poly(rhs).expect("adding polynomials in different rings")
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        *self = &*self + rhs;
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.multiply(rhs).expect("multiplying polynomials in different rings")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // largest first reads naturally
        for (k, m) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<Vec<u32>>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars,
            terms: self.exponent_lists(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Poly, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        if repr.nvars > MAX_VARS || repr.terms.iter().any(|t| t.len() != repr.nvars) {
            return Err(serde::de::Error::custom("malformed polynomial"));
        }
        let mut terms: Vec<Monomial> = repr.terms.iter().map(|e| Monomial::new(e)).collect();
        let n = terms.len();
        terms.sort_unstable();
        terms.dedup();
        if terms.len() != n {
            return Err(serde::de::Error::custom("duplicate monomials"));
        }
        Ok(Poly {
            nvars: repr.nvars,
            terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nvars: usize, exps: &[&[u32]]) -> Poly {
        Poly::from_exponents(nvars, exps)
    }

    #[test]
    fn frobenius() {
        let s = p(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(&s * &s, p(2, &[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn expansion() {
        let a = p(2, &[&[1, 1]]);
        let b = p(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(&a * &b, p(2, &[&[2, 1], &[1, 2]]));
        let c = p(2, &[&[1, 2], &[2, 1]]);
        assert_eq!(&p(2, &[&[1, 0]]) * &c, p(2, &[&[2, 2], &[3, 1]]));
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(matches!(
            Poly::one(2).multiply(&Poly::one(3)),
            Err(Error::VariableMismatch { .. })
        ));
    }

    #[test]
    fn parity_collection() {
        let f = Poly::from_monomials(1, vec![Monomial::var(0); 3]);
        assert_eq!(f, Poly::var(1, 0));
        let g = Poly::from_monomials(1, vec![Monomial::var(0); 2]);
        assert!(g.is_zero());
    }

    #[test]
    fn homogeneous_parts_partition() {
        let f = p(3, &[&[1, 0, 0], &[2, 1, 0], &[0, 0, 3], &[0, 1, 1]]);
        let parts = f.homogeneous_parts();
        let mut sum = Poly::zero(3);
        for (d, part) in &parts {
            assert!(part.check_homogeneous(*d).is_ok());
            sum += part;
        }
        assert_eq!(sum, f);
        assert!(f.check_homogeneous(3).is_err());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let f = p(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let mut acc = Poly::one(3);
        for e in 0..9 {
            assert_eq!(f.pow(e), acc);
            acc = &acc * &f;
        }
    }

    #[test]
    fn serde_round_trip() {
        let f = p(3, &[&[1, 0, 2], &[2, 1, 0]]);
        let json = serde_json::to_string(&f).unwrap();
        let back: Poly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
