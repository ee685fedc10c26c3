//! The semigroup `M_n(F_2)` acting on `F_2[x_1, ..., x_n]`, its semigroup
//! algebra, and the Steinberg idempotent.
//!
//! A matrix `σ` acts by the substitution `x_i -> Σ_j σ_{j,i} x_j`, that is
//! `(σ·f)(x) = f(σ^T x)`. With this convention `(στ)·f = σ·(τ·f)` for the
//! ordinary matrix product.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gf2::{Monomial, Poly};
use crate::{Error, Result};

/// Largest matrix size supported.
pub const MAX_N: usize = 4;

/// An `n x n` matrix over GF(2), possibly singular. Row `i` is a bitmask
/// whose bit `j` is the entry `σ_{i,j}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixN {
    n: u8,
    rows: [u8; MAX_N],
}

impl MatrixN {
    pub fn zero(n: usize) -> MatrixN {
        assert!((1..=MAX_N).contains(&n), "matrix size {n} is not supported");
        MatrixN {
            n: n as u8,
            rows: [0; MAX_N],
        }
    }

    pub fn identity(n: usize) -> MatrixN {
        let mut m = MatrixN::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(n: usize, rows: &[u8]) -> MatrixN {
        assert_eq!(rows.len(), n);
        let mut m = MatrixN::zero(n);
        for (i, &r) in rows.iter().enumerate() {
            assert!(r >> n == 0, "row {i} has bits beyond column {n}");
            m.rows[i] = r;
        }
        m
    }

    /// The permutation matrix with `σ_{π(j), j} = 1`, so `x_j -> x_{π(j)}`.
    pub fn permutation(perm: &[usize]) -> MatrixN {
        let mut m = MatrixN::zero(perm.len());
        for (j, &p) in perm.iter().enumerate() {
            m.set(p, j, true);
        }
        m
    }

    /// Identity plus the single off-diagonal entry `(i, j)`.
    pub fn transvection(n: usize, i: usize, j: usize) -> MatrixN {
        assert_ne!(i, j);
        let mut m = MatrixN::identity(n);
        m.set(i, j, true);
        m
    }

    pub fn diagonal(bits: &[bool]) -> MatrixN {
        let mut m = MatrixN::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            m.set(i, i, b);
        }
        m
    }

    /// Every matrix in `M_n(F_2)`.
    pub fn all(n: usize) -> impl Iterator<Item = MatrixN> {
        let bits = n * n;
        (0u32..1 << bits).map(move |code| {
            let mut m = MatrixN::zero(n);
            for i in 0..n {
                m.rows[i] = ((code >> (i * n)) & ((1 << n) - 1)) as u8;
            }
            m
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        if b {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn rows(&self) -> &[u8] {
        &self.rows[..self.n()]
    }

    pub fn mul(&self, other: &MatrixN) -> MatrixN {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let mut out = MatrixN::zero(self.n());
        for i in 0..self.n() {
            let mut r = 0;
            let mut s = self.rows[i];
            while s != 0 {
                let k = s.trailing_zeros() as usize;
                s &= s - 1;
                r ^= other.rows[k];
            }
            out.rows[i] = r;
        }
        out
    }

    pub fn transpose(&self) -> MatrixN {
        let mut t = MatrixN::zero(self.n());
        for i in 0..self.n() {
            for j in 0..self.n() {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_invertible(&self) -> bool {
        let mut rows = self.rows;
        let n = self.n();
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..n).find(|&i| (rows[i] >> c) & 1 == 1) else {
                return false;
            };
            rows.swap(p, rank);
            for i in 0..n {
                if i != rank && (rows[i] >> c) & 1 == 1 {
                    rows[i] ^= rows[rank];
                }
            }
            rank += 1;
        }
        true
    }

    /// Embeds `self` into an `n x n` matrix on coordinates `at..at + self.n`,
    /// with the identity elsewhere.
    pub fn embed(&self, n: usize, at: usize) -> MatrixN {
        assert!(at + self.n() <= n);
        let mut m = MatrixN::identity(n);
        for i in 0..self.n() {
            m.rows[at + i] = self.rows[i] << at;
        }
        m
    }

    /// The set of variables `x_i` is sent to, as a bitmask: column `i`.
    #[inline]
    fn column_mask(&self, i: usize) -> u8 {
        (0..self.n()).fold(0, |acc, j| acc | (((self.rows[j] >> i) & 1) << j))
    }
}

impl fmt::Debug for MatrixN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n() {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
        }
        write!(f, "]")
    }
}

/// `L^a` for the linear form `L = Σ_{j ∈ mask} x_j`. Since
/// `L^a = Π_{2^b ∈ a} Σ_j x_j^{2^b}`, each choice of one variable per bit of
/// `a` gives a different monomial, so nothing cancels.
fn linear_form_power(nvars: usize, mask: u8, a: u32) -> Vec<Monomial> {
    let vars: Vec<usize> = (0..8).filter(|&j| (mask >> j) & 1 == 1).collect();
    let mut out = vec![Monomial::ONE];
    if a == 0 {
        return out;
    }
    if vars.is_empty() {
        return Vec::new();
    }
    let mut bits = a;
    while bits != 0 {
        let b = bits.trailing_zeros();
        bits &= bits - 1;
        let mut next = Vec::with_capacity(out.len() * vars.len());
        for m in &out {
            for &j in &vars {
                next.push(m.mul(&Monomial::ONE.with_exp(j, 1 << b)));
            }
        }
        out = next;
    }
    debug_assert!(out.iter().all(|m| m.support_len() <= nvars));
    out
}

/// `σ·f`: substitutes `x_i -> Σ_j σ_{j,i} x_j`.
pub fn act(sigma: &MatrixN, f: &Poly) -> Result<Poly> {
    let n = sigma.n();
    if f.nvars() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} matrix acting on {} variables",
            f.nvars()
        )));
    }
    let masks: Vec<u8> = (0..n).map(|i| sigma.column_mask(i)).collect();
    let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
    let mut out: Vec<Monomial> = Vec::new();
    for m in f.terms() {
        let mut acc = Poly::one(n);
        for i in 0..n {
            let a = m.exp(i);
            if a == 0 {
                continue;
            }
            let power = cache
                .entry((i, a))
                .or_insert_with(|| Poly::from_monomials(n, linear_form_power(n, masks[i], a)));
            acc = &acc * power;
            if acc.is_zero() {
                break;
            }
        }
        out.extend_from_slice(acc.terms());
    }
    Ok(Poly::from_monomials(n, out))
}

/// An element of `F_2[M_n(F_2)]`: a set of matrices, sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgebraElement {
    n: usize,
    support: Vec<MatrixN>,
}

fn collect_mod2(mut v: Vec<MatrixN>) -> Vec<MatrixN> {
    v.par_sort_unstable();
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

impl AlgebraElement {
    pub fn zero(n: usize) -> AlgebraElement {
        AlgebraElement {
            n,
            support: Vec::new(),
        }
    }

    pub fn one(n: usize) -> AlgebraElement {
        AlgebraElement::single(MatrixN::identity(n))
    }

    pub fn single(m: MatrixN) -> AlgebraElement {
        AlgebraElement {
            n: m.n(),
            support: vec![m],
        }
    }

    /// The sum of the given matrices, collected mod 2.
    pub fn from_matrices(n: usize, ms: Vec<MatrixN>) -> AlgebraElement {
        assert!(ms.iter().all(|m| m.n() == n), "matrix size mismatch");
        AlgebraElement {
            n,
            support: collect_mod2(ms),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[MatrixN] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.n, other.n);
        let mut v = self.support.clone();
        v.extend_from_slice(&other.support);
        AlgebraElement::from_matrices(self.n, v)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraElementRepr {
    n: usize,
    support: Vec<Vec<u8>>,
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraElementRepr {
            n: self.n,
            support: self.support.iter().map(|m| m.rows().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = AlgebraElementRepr::deserialize(d)?;
        if !(1..=MAX_N).contains(&repr.n) {
            return Err(D::Error::custom("unsupported matrix size"));
        }
        let mut ms = Vec::with_capacity(repr.support.len());
        for rows in &repr.support {
            if rows.len() != repr.n || rows.iter().any(|r| r >> repr.n != 0) {
                return Err(D::Error::custom("malformed matrix"));
            }
            ms.push(MatrixN::from_rows(repr.n, rows));
        }
        let sorted = ms.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            return Err(D::Error::custom("support must be sorted and distinct"));
        }
        Ok(AlgebraElement {
            n: repr.n,
            support: ms,
        })
    }
}

pub fn alg_multiply(u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.n, v.n)));
    }
    let products: Vec<MatrixN> = u
        .support
        .par_iter()
        .flat_map_iter(|a| v.support.iter().map(move |b| a.mul(b)))
        .collect();
    Ok(AlgebraElement::from_matrices(u.n, products))
}

/// `u·f = Σ_{σ ∈ u} σ·f`.
pub fn alg_act(u: &AlgebraElement, f: &Poly) -> Result<Poly> {
    if f.nvars() != u.n {
        return Err(Error::DimensionMismatch(format!(
            "element of dimension {} acting on {} variables",
            u.n,
            f.nvars()
        )));
    }
    let parts: Vec<Poly> = u
        .support
        .par_iter()
        .map(|s| act(s, f))
        .collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for p in &parts {
        terms.extend_from_slice(p.terms());
    }
    Ok(Poly::from_monomials(f.nvars(), terms))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// All permutation matrices of size `n`.
pub fn symmetric_group(n: usize) -> Vec<MatrixN> {
    let mut v: Vec<MatrixN> = permutations(n).iter().map(|p| MatrixN::permutation(p)).collect();
    v.sort();
    v
}

/// The upper triangular matrices with unit diagonal.
pub fn borel_group(n: usize) -> Vec<MatrixN> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut v: Vec<MatrixN> = (0u32..1 << slots.len())
        .map(|code| {
            let mut m = MatrixN::identity(n);
            for (b, &(i, j)) in slots.iter().enumerate() {
                m.set(i, j, (code >> b) & 1 == 1);
            }
            m
        })
        .collect();
    v.sort();
    v
}

/// `e_n = B̄_n Σ̄_n`.
pub fn steinberg_idempotent(n: usize) -> AlgebraElement {
    let b = AlgebraElement::from_matrices(n, borel_group(n));
    let s = AlgebraElement::from_matrices(n, symmetric_group(n));
    alg_multiply(&b, &s).expect("same dimension")
}

/// `e_n·f`, computed as `B̄_n·(Σ̄_n·f)`; permutations only rename variables,
/// so this is much cheaper than summing over all of `e_n`.
pub fn apply_steinberg(n: usize, f: &Poly) -> Result<Poly> {
    if f.nvars() != n {
        return Err(Error::DimensionMismatch(format!(
            "e_{n} acting on {} variables",
            f.nvars()
        )));
    }
    let mut terms = Vec::new();
    for p in permutations(n) {
        // x_j -> x_{p(j)}
        terms.extend(f.terms().iter().map(|m| m.remap(|j| p[j])));
    }
    let g = Poly::from_monomials(n, terms);
    alg_act(&AlgebraElement::from_matrices(n, borel_group(n)), &g)
}

/// Relatives of the Steinberg idempotent inside `F_2[M_n(F_2)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedded {
    /// `e_k` on the first `k` coordinates.
    Leading(usize),
    /// `e_2` on coordinates `i, i + 1` (1-based, `1 <= i < n`).
    Pair(usize),
    /// `I_{n-1} = diag(1, ..., 1, 0)`.
    Projection,
}

pub fn embedded_idempotent(kind: Embedded, n: usize) -> Result<AlgebraElement> {
    let out_of_range = |what, value, bound: String| Error::OutOfRange { what, value, bound };
    if !(1..=MAX_N).contains(&n) {
        return Err(out_of_range("n", n, format!("1 <= n <= {MAX_N}")));
    }
    match kind {
        Embedded::Leading(k) => {
            if !(1..=n).contains(&k) {
                return Err(out_of_range("k", k, format!("1 <= k <= {n}")));
            }
            let e = steinberg_idempotent(k);
            Ok(AlgebraElement::from_matrices(
                n,
                e.support.iter().map(|m| m.embed(n, 0)).collect(),
            ))
        }
        Embedded::Pair(i) => {
            if !(1..n).contains(&i) {
                return Err(out_of_range("i", i, format!("1 <= i <= {}", n - 1)));
            }
            let e = steinberg_idempotent(2);
            Ok(AlgebraElement::from_matrices(
                n,
                e.support.iter().map(|m| m.embed(n, i - 1)).collect(),
            ))
        }
        Embedded::Projection => {
            let mut bits = vec![true; n];
            bits[n - 1] = false;
            Ok(AlgebraElement::single(MatrixN::diagonal(&bits)))
        }
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Checks, for `2 <= n <= 4`: `e_n^2 = e_n`, `e_n e_{2,i} = e_{2,i} e_n = e_n`
/// for every `i`, and `e_n = e_{n-1} e_{2,n-1} e_{n-1}`.
pub fn verify_hecke(n: usize) -> Result<Vec<Check>> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("2 <= n <= {MAX_N}"),
        });
    }
    let e = steinberg_idempotent(n);
    let mut checks = vec![Check {
        name: format!("e_{n}^2 = e_{n}"),
        passed: alg_multiply(&e, &e)? == e,
    }];
    for i in 1..n {
        let p = embedded_idempotent(Embedded::Pair(i), n)?;
        checks.push(Check {
            name: format!("e_{n} e_(2,{i}) = e_{n}"),
            passed: alg_multiply(&e, &p)? == e,
        });
        checks.push(Check {
            name: format!("e_(2,{i}) e_{n} = e_{n}"),
            passed: alg_multiply(&p, &e)? == e,
        });
    }
    let lower = embedded_idempotent(Embedded::Leading(n - 1), n)?;
    let pair = embedded_idempotent(Embedded::Pair(n - 1), n)?;
    let triple = alg_multiply(&alg_multiply(&lower, &pair)?, &lower)?;
    checks.push(Check {
        name: format!("e_{n} = e_{} e_(2,{}) e_{}", n - 1, n - 1, n - 1),
        passed: triple == e,
    });
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(e: &[&[u32]]) -> Poly {
        Poly::from_exponents(e[0].len(), e)
    }

    #[test]
    fn act_examples() {
        let swap = MatrixN::permutation(&[1, 0]);
        assert_eq!(act(&swap, &p(&[&[2, 1]])).unwrap(), p(&[&[1, 2]]));
        let f = p(&[&[3, 0], &[1, 2]]);
        assert_eq!(act(&MatrixN::identity(2), &f).unwrap(), f);
        let proj = MatrixN::diagonal(&[true, false]);
        assert_eq!(act(&proj, &p(&[&[1, 0], &[0, 1]])).unwrap(), p(&[&[1, 0]]));
        assert!(act(&swap, &Poly::one(3)).is_err());
    }

    #[test]
    fn e2_has_four_matrices() {
        let e2 = steinberg_idempotent(2);
        let u = MatrixN::transvection(2, 0, 1);
        let s = MatrixN::permutation(&[1, 0]);
        let expected =
            AlgebraElement::from_matrices(2, vec![MatrixN::identity(2), u, s, u.mul(&s)]);
        assert_eq!(e2, expected);
        assert_eq!(alg_multiply(&e2, &e2).unwrap(), e2);
    }

    #[test]
    fn e1_is_identity() {
        assert_eq!(steinberg_idempotent(1), AlgebraElement::one(1));
    }

    #[test]
    fn e3_and_e4_support_sizes() {
        assert_eq!(steinberg_idempotent(3).len(), 48);
        assert_eq!(steinberg_idempotent(4).len(), 1536);
    }

    #[test]
    fn unit_and_square_of_singletons() {
        let s = MatrixN::from_rows(2, &[0b11, 0b01]);
        let u = AlgebraElement::single(s);
        assert_eq!(alg_multiply(&AlgebraElement::one(2), &u).unwrap(), u);
        assert_eq!(
            alg_multiply(&u, &u).unwrap(),
            AlgebraElement::single(s.mul(&s))
        );
    }

    #[test]
    fn sum_over_symmetric_group_cancels_symmetric_input() {
        let s2 = AlgebraElement::from_matrices(2, symmetric_group(2));
        assert!(alg_act(&s2, &p(&[&[1, 0], &[0, 1]])).unwrap().is_zero());
    }

    #[test]
    fn e2_on_omega1_omega2() {
        // ω_1ω_2 = x·xy(x+y)
        let f = p(&[&[3, 1], &[2, 2]]);
        let e2 = steinberg_idempotent(2);
        assert_eq!(alg_act(&e2, &f).unwrap(), p(&[&[3, 1], &[2, 2]]));
    }

    #[test]
    fn fast_and_direct_idempotent_agree() {
        let f = p(&[&[5, 1, 2], &[1, 1, 1], &[0, 3, 4]]);
        let direct = alg_act(&steinberg_idempotent(3), &f).unwrap();
        assert_eq!(apply_steinberg(3, &f).unwrap(), direct);
    }

    #[test]
    fn embeddings() {
        let pair = embedded_idempotent(Embedded::Pair(1), 3).unwrap();
        assert_eq!(pair.len(), 4);
        assert!(pair.support().iter().all(|m| m.rows()[2] == 0b100));
        let proj = embedded_idempotent(Embedded::Projection, 2).unwrap();
        assert_eq!(proj.support(), &[MatrixN::diagonal(&[true, false])]);
        let lead = embedded_idempotent(Embedded::Leading(2), 3).unwrap();
        assert_eq!(lead.len(), 4);
        assert!(embedded_idempotent(Embedded::Pair(3), 3).is_err());
    }

    #[test]
    fn hecke_small() {
        for n in 2..=3 {
            for c in verify_hecke(n).unwrap() {
                assert!(c.passed, "{}", c.name);
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = steinberg_idempotent(3);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<AlgebraElement>(&json).unwrap(), e);
    }
}
