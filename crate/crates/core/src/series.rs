//! Truncated integer power series and the Poincaré-series identities that
//! shadow the resolution: `ℓ_m`, Minc's `μ_m`, the Andrews identity, the
//! Dickson-module exact sequences and the `T̃`-functor series `P_{n,i}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::brown_gitler::{minc_sequences, weight_monomials};
use crate::steenrod::GradedModule;
use crate::steinberg::dickson_module;
use crate::Result;

/// `c_0 + c_1 q + ⋯ + c_cap q^cap`. Arithmetic panics on `i64` overflow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncSeries {
    coeffs: Vec<i64>,
}

impl TruncSeries {
    pub fn zero(cap: usize) -> TruncSeries {
        TruncSeries {
            coeffs: vec![0; cap + 1],
        }
    }

    pub fn one(cap: usize) -> TruncSeries {
        TruncSeries::monomial(cap, 0)
    }

    /// `q^a`, or zero if `a > cap`.
    pub fn monomial(cap: usize, a: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(cap);
        if a <= cap {
            s.coeffs[a] = 1;
        }
        s
    }

    pub fn from_coeffs(cap: usize, coeffs: impl IntoIterator<Item = i64>) -> TruncSeries {
        let mut s = TruncSeries::zero(cap);
        for (d, c) in coeffs.into_iter().take(cap + 1).enumerate() {
            s.coeffs[d] = c;
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> i64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn truncate(&self, cap: usize) -> TruncSeries {
        TruncSeries::from_coeffs(cap, self.coeffs.iter().copied())
    }

    /// Multiplication by `q^a`.
    pub fn shift(&self, a: usize) -> TruncSeries {
        let cap = self.cap();
        let mut s = TruncSeries::zero(cap);
        for d in a..=cap {
            s.coeffs[d] = self.coeffs[d - a];
        }
        s
    }

    /// `q -> q^2`, the Poincaré series of the doubled module `ΦM`.
    pub fn double(&self) -> TruncSeries {
        let cap = self.cap();
        let mut s = TruncSeries::zero(cap);
        for d in 0..=cap / 2 {
            s.coeffs[2 * d] = self.coeffs[d];
        }
        s
    }

    /// Division by `1 - q^b`, `b >= 1`.
    pub fn div_one_minus(&self, b: usize) -> TruncSeries {
        assert!(b >= 1);
        let mut s = self.clone();
        for d in b..=s.cap() {
            s.coeffs[d] = s.coeffs[d]
                .checked_add(s.coeffs[d - b])
                .expect("series coefficient overflow");
        }
        s
    }

    /// Multiplication by `1 - q^b`.
    pub fn mul_one_minus(&self, b: usize) -> TruncSeries {
        self - &self.shift(b)
    }

    fn zip(&self, other: &TruncSeries, f: impl Fn(i64, i64) -> Option<i64>) -> TruncSeries {
        let cap = self.cap().min(other.cap());
        TruncSeries {
            coeffs: (0..=cap)
                .map(|d| f(self.coeffs[d], other.coeffs[d]).expect("series coefficient overflow"))
                .collect(),
        }
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.zip(rhs, i64::checked_add)
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.zip(rhs, i64::checked_sub)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.checked_neg().expect("series coefficient overflow"))
                .collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let cap = self.cap().min(rhs.cap());
        let mut out = TruncSeries::zero(cap);
        for (i, &a) in self.coeffs.iter().enumerate().take(cap + 1) {
            if a == 0 {
                continue;
            }
            for j in 0..=cap - i {
                let prod = a.checked_mul(rhs.coeffs[j]).expect("series coefficient overflow");
                out.coeffs[i + j] = out.coeffs[i + j]
                    .checked_add(prod)
                    .expect("series coefficient overflow");
            }
        }
        out
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(d, &c)| match (d, c) {
                (0, c) => c.to_string(),
                (1, 1) => "q".into(),
                (1, c) => format!("{c}q"),
                (d, 1) => format!("q^{d}"),
                (d, c) => format!("{c}q^{d}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))?;
        }
        write!(f, " + O(q^{})", self.cap() + 1)
    }
}

/// `q^shift / ∏ (1 - q^b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalForm {
    pub shift: usize,
    pub factors: Vec<usize>,
}

impl RationalForm {
    pub fn expand(&self, cap: usize) -> TruncSeries {
        self.factors
            .iter()
            .fold(TruncSeries::monomial(cap, self.shift), |s, &b| s.div_one_minus(b))
    }
}

/// `ℓ_m = q^{Σ(2^i - 1)} / ∏_{i=1}^m (1 - q^{2^i - 1})`; `ℓ_0 = 1`.
pub fn ell_form(m: usize) -> RationalForm {
    let factors: Vec<usize> = (1..=m).map(|i| (1 << i) - 1).collect();
    RationalForm {
        shift: factors.iter().sum(),
        factors,
    }
}

pub fn ell(m: usize, cap: usize) -> TruncSeries {
    ell_form(m).expand(cap)
}

/// `ν(m, d)`: tuples `(c_1, ..., c_m)` with `c_1 = 1`, `c_{j+1} <= 2c_j`,
/// `c_m >= 1` and sum `d`.
pub fn nu(m: usize, d: usize) -> i64 {
    fn go(left: usize, prev: usize, budget: usize) -> i64 {
        if left == 0 {
            return i64::from(budget == 0);
        }
        (1..=(2 * prev).min(budget))
            .map(|c| go(left - 1, c, budget - c))
            .sum()
    }
    match m {
        0 => i64::from(d == 0),
        _ if d == 0 => 0,
        _ => go(m - 1, 1, d - 1),
    }
}

/// `μ_m = Σ_d ν(m, d) q^d`; `μ_0 = 1`.
pub fn mu(m: usize, cap: usize) -> TruncSeries {
    TruncSeries::from_coeffs(cap, (0..=cap).map(|d| nu(m, d)))
}

/// `μ_m` three ways: partitions, `Ω_m` sequences, and monomials of
/// `J(2^m - 1)`.
pub fn mu_oracles(m: usize, cap: usize) -> [TruncSeries; 3] {
    let count = |v: Vec<usize>| TruncSeries::from_coeffs(cap, v.into_iter().map(|x| x as i64));
    let top = (1usize << m) - 1;
    [
        mu(m, cap),
        count(minc_sequences(m, cap).iter().map(Vec::len).collect()),
        count(weight_monomials(top, cap).iter().map(Vec::len).collect()),
    ]
}

pub fn poincare(m: &GradedModule) -> TruncSeries {
    let cap = m.cap();
    TruncSeries::from_coeffs(cap, (0..=cap).map(|d| m.dim(d) as i64))
}

/// Two series that should agree, and whether they do.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesIdentity {
    pub name: String,
    pub lhs: TruncSeries,
    pub rhs: TruncSeries,
    pub holds: bool,
}

impl SeriesIdentity {
    pub fn new(name: impl Into<String>, lhs: TruncSeries, rhs: TruncSeries) -> SeriesIdentity {
        let holds = lhs == rhs;
        SeriesIdentity {
            name: name.into(),
            lhs,
            rhs,
            holds,
        }
    }

    pub fn residual(&self) -> TruncSeries {
        &self.lhs - &self.rhs
    }
}

/// `q^{2^n-1} ℓ_n = Σ_{i=0}^n (-1)^i μ_i ℓ_{n-i}`, and the alternating sum
/// `-P(L'_n) + Σ_{s=0}^n (-1)^s P(L_{n-s} ⊗ J(2^s - 1)) = 0`.
pub fn andrews_check(n: usize, cap: usize) -> [SeriesIdentity; 2] {
    let lhs = ell(n, cap).shift((1 << n) - 1);
    let mut rhs = TruncSeries::zero(cap);
    for i in 0..=n {
        let term = &mu(i, cap) * &ell(n - i, cap);
        rhs = if i % 2 == 0 { &rhs + &term } else { &rhs - &term };
    }
    let alternating = &rhs - &lhs;
    [
        SeriesIdentity::new(format!("andrews n={n}"), lhs, rhs),
        SeriesIdentity::new(
            format!("alternating sum n={n}"),
            alternating,
            TruncSeries::zero(cap),
        ),
    ]
}

/// `P(D(n)) = 1 / ∏_{j<n} (1 - q^{2^n - 2^j})`.
pub fn dickson_series(n: usize, cap: usize) -> TruncSeries {
    RationalForm {
        shift: 0,
        factors: (0..n).map(|j| (1 << n) - (1 << j)).collect(),
    }
    .expand(cap)
}

/// `P(D(n) ω_n^i) = q^{i(2^n - 1)} P(D(n))`.
pub fn dickson_omega_series(n: usize, i: usize, cap: usize) -> TruncSeries {
    dickson_series(n, cap).shift(i * ((1 << n) - 1))
}

/// `P(D(n)ω^{i-1}) = P(D(n)ω^i) + q^{i-1} Φ P(D(n-1)ω^{i-1})`, and for
/// `n <= 2` the same identity with both sides counted from
/// [`dickson_module`].
pub fn dickson_ideal_series(n: usize, i: usize, cap: usize) -> Result<Vec<SeriesIdentity>> {
    assert!(n >= 1 && i >= 1);
    let quotient = dickson_omega_series(n - 1, i - 1, cap).double().shift(i - 1);
    let mut out = vec![SeriesIdentity::new(
        format!("dickson sequence n={n} i={i}"),
        dickson_omega_series(n, i - 1, cap),
        &dickson_omega_series(n, i, cap) + &quotient,
    )];
    if n <= 2 {
        let whole = poincare(&dickson_module(n, (i - 1) as u32, cap)?.module);
        let sub = poincare(&dickson_module(n, i as u32, cap)?.module);
        let lower = poincare(&dickson_module(n - 1, (i - 1) as u32, cap)?.module);
        out.push(SeriesIdentity::new(
            format!("dickson modules n={n} i={i}"),
            whole.clone(),
            &sub + &lower.double().shift(i - 1),
        ));
        out.push(SeriesIdentity::new(
            format!("dickson closed form n={n} i={i}"),
            whole,
            dickson_omega_series(n, i - 1, cap),
        ));
    }
    Ok(out)
}

/// `P_{n,0} = 1 / (∏_{j=0}^{n-2} (1 - t^{2^{n-1} - 2^j}) (1 - t^{2^{n-1}}))`;
/// `P_{0,i} = 0` since `T̃` kills finite modules.
pub fn p_n0(n: usize, cap: usize) -> TruncSeries {
    if n == 0 {
        return TruncSeries::zero(cap);
    }
    let half = 1usize << (n - 1);
    let mut factors: Vec<usize> = (0..n - 1).map(|j| half - (1 << j)).collect();
    factors.push(half);
    RationalForm { shift: 0, factors }.expand(cap)
}

/// The closed form `P_{n,i} = t^{(2^{n-1}-1) i} P_{n,0}`.
pub fn p_closed(n: usize, i: usize, cap: usize) -> TruncSeries {
    if n == 0 {
        return TruncSeries::zero(cap);
    }
    p_n0(n, cap).shift(((1 << (n - 1)) - 1) * i)
}

/// `P_{n,i}` by the recursion `P_{n,i} = P_{n,i-1} - t^{i-1} P_{n-1,i-1}(t^2)`,
/// seeded with `P_{m,0}` and `P_{0,i} = 0`.
pub fn p_recursive(n: usize, i: usize, cap: usize) -> TruncSeries {
    // table[m][j] for m <= n, j <= i
    let mut table: Vec<Vec<TruncSeries>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![p_n0(m, cap)];
        for j in 1..=i {
            let next = if m == 0 {
                TruncSeries::zero(cap)
            } else {
                &row[j - 1] - &table[m - 1][j - 1].double().shift(j - 1)
            };
            row.push(next);
        }
        table.push(row);
    }
    table[n][i].clone()
}

/// The closed form against the recursion, and `P_{n-1,0}(t^2) = (1 - t^{2^{n-1}-1}) P_{n,0}(t)`.
pub fn t_series(n: usize, i: usize, cap: usize) -> [SeriesIdentity; 2] {
    assert!(n >= 1);
    let half = 1usize << (n - 1);
    [
        SeriesIdentity::new(
            format!("P({n},{i}) closed vs recursive"),
            p_closed(n, i, cap),
            p_recursive(n, i, cap),
        ),
        SeriesIdentity::new(
            format!("P({},0)(t^2) vs (1-t^{})P({n},0)", n - 1, half - 1),
            p_n0(n - 1, cap).double(),
            p_n0(n, cap).mul_one_minus(half - 1),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brown_gitler::j_basis;
    use crate::steinberg::{build_steinberg, Flavor};
    use proptest::prelude::*;

    fn s(cap: usize, c: &[i64]) -> TruncSeries {
        TruncSeries::from_coeffs(cap, c.iter().copied())
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell(0, 5), TruncSeries::one(5));
        assert_eq!(ell(1, 5), s(5, &[0, 1, 1, 1, 1, 1]));
        assert_eq!(&ell(2, 7).coeffs()[4..], &[1, 1, 1, 2]);
    }

    #[test]
    fn minc_examples() {
        assert_eq!(nu(3, 7), 1);
        assert_eq!(mu(0, 4), TruncSeries::one(4));
        assert_eq!(mu(2, 5), s(5, &[0, 0, 1, 1]));
        assert_eq!(mu(3, 8), s(8, &[0, 0, 0, 1, 2, 1, 1, 1]));
        for m in 0..=5 {
            let top = (1 << m) - 1;
            let [a, b, c] = mu_oracles(m, top);
            assert_eq!(a, b, "m = {m}");
            assert_eq!(a, c, "m = {m}");
        }
    }

    #[test]
    fn andrews() {
        for (n, cap) in [(1, 32), (2, 64), (3, 64), (4, 128), (5, 128), (6, 128)] {
            for id in andrews_check(n, cap) {
                assert!(id.holds, "{}: residual {}", id.name, id.residual());
            }
        }
        // n = 1 by hand: q·ℓ_1 = ℓ_1 - μ_1
        let cap = 10;
        assert_eq!(ell(1, cap).shift(1), &ell(1, cap) - &mu(1, cap));
    }

    #[test]
    fn modules_match_their_series() {
        let cap = 20;
        for n in 0..=3 {
            let l = build_steinberg(Flavor::L, n, cap).unwrap();
            assert_eq!(poincare(&l.module), ell(n, cap));
            let lp = build_steinberg(Flavor::LPrime, n, cap).unwrap();
            assert_eq!(poincare(&lp.module), ell(n, cap).shift((1 << n) - 1));
        }
        assert_eq!(poincare(&j_basis(7, 10).unwrap()), mu(3, 10));
        assert!(poincare(&GradedModule::zero(4)).is_zero());
        let t = build_steinberg(Flavor::L, 1, cap)
            .unwrap()
            .module
            .tensor(&j_basis(1, cap).unwrap(), cap);
        assert_eq!(poincare(&t), &ell(1, cap) * &mu(1, cap));
    }

    #[test]
    fn t_series_examples() {
        let cap = 40;
        for i in 0..5 {
            assert_eq!(p_closed(1, i, cap), RationalForm { shift: 0, factors: vec![1] }.expand(cap));
        }
        assert_eq!(p_n0(2, cap), RationalForm { shift: 0, factors: vec![1, 2] }.expand(cap));
        assert_eq!(p_closed(2, 3, cap), p_n0(2, cap).shift(3));
        for n in 1..=4 {
            for i in 0..=5 {
                for id in t_series(n, i, cap) {
                    assert!(id.holds, "{}", id.name);
                }
            }
        }
    }

    #[test]
    fn dickson_sequences() {
        let cap = 24;
        let one = dickson_ideal_series(1, 1, cap).unwrap();
        assert!(one.iter().all(|x| x.holds));
        assert_eq!(
            dickson_omega_series(1, 1, cap),
            &dickson_series(1, cap) - &TruncSeries::one(cap)
        );
        for n in 1..=3 {
            for i in 1..=4 {
                for id in dickson_ideal_series(n, i, cap).unwrap() {
                    assert!(id.holds, "{}: residual {}", id.name, id.residual());
                }
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(s(3, &[1, -2, 0, 1]).to_string(), "1 - 2q + q^3 + O(q^4)");
    }

    proptest! {
        #[test]
        fn division_inverts_multiplication(c in proptest::collection::vec(-5i64..5, 12), b in 1usize..6) {
            let x = TruncSeries::from_coeffs(11, c);
            prop_assert_eq!(x.div_one_minus(b).mul_one_minus(b), x.clone());
            prop_assert_eq!(x.mul_one_minus(b).div_one_minus(b), x);
        }

        #[test]
        fn multiplication_commutes(a in proptest::collection::vec(-9i64..9, 10), b in proptest::collection::vec(-9i64..9, 10)) {
            let (x, y) = (TruncSeries::from_coeffs(9, a), TruncSeries::from_coeffs(9, b));
            prop_assert_eq!(&x * &y, &y * &x);
        }
    }
}
