//! Randomized checks of the axioms every action here must satisfy.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sq_with, Action};
use crate::brown_gitler::weight;
use crate::gf2::{binom_mod2, Monomial, Poly};
use crate::matrix_algebra::{act, MatrixN};
use crate::steinberg::verify_mui_total_square;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub seed: u64,
    /// Cases run per property.
    pub cases: BTreeMap<String, usize>,
    /// Failures per property, with the first counterexample.
    pub failures: BTreeMap<String, (usize, String)>,
    pub passed: bool,
}

impl PropertyReport {
    pub fn total_cases(&self) -> usize {
        self.cases.values().sum()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, degree: usize) -> Poly {
    let terms = rng.gen_range(1..=4);
    let monos = (0..terms).map(|_| {
        let mut exps = vec![0u32; nvars];
        for _ in 0..degree {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        Monomial::new(&exps)
    });
    Poly::from_monomials(nvars, monos.collect::<Vec<_>>())
}

fn random_action(rng: &mut ChaCha8Rng, nvars: usize) -> Action {
    match rng.gen_range(0..4) {
        0 => Action::CLASSICAL,
        1 => Action::MILLER,
        2 => Action::Standard {
            classical: rng.gen_range(0..=nvars),
        },
        _ => Action::Twisted { n: nvars },
    }
}

fn sum(parts: impl IntoIterator<Item = Poly>, nvars: usize) -> Poly {
    parts.into_iter().fold(Poly::zero(nvars), |a, b| &a + &b)
}

/// `Sq^a Sq^b = Σ_j C(b-1-j, a-2j) Sq^{a+b-j} Sq^j` for `0 < a < 2b`.
fn adem_rhs(action: Action, a: usize, b: usize, f: &Poly) -> Poly {
    let terms = (0..=a / 2)
        .filter(|&j| binom_mod2((b - 1 - j) as u64, (a - 2 * j) as u64))
        .map(|j| sq_with(action, a + b - j, &sq_with(action, j, f)));
    sum(terms, f.nvars())
}

struct Tally {
    cases: BTreeMap<String, usize>,
    failures: BTreeMap<String, (usize, String)>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        *self.cases.entry(name.to_string()).or_default() += 1;
        if !ok {
            let entry = self
                .failures
                .entry(name.to_string())
                .or_insert_with(|| (0, witness()));
            entry.0 += 1;
        }
    }
}

/// Runs `per_property` random cases of each of: Cartan formula, instability,
/// `Sq^0 = 1`, top square (classical action), Adem relations,
/// `GL_n`-equivariance, and weight preservation of the twisted action; then
/// the Mùi total-square identity for `n <= 3`.
pub fn property_suite(per_property: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally {
        cases: BTreeMap::new(),
        failures: BTreeMap::new(),
    };
    for _ in 0..per_property {
        let nvars = rng.gen_range(1..=4);
        let action = random_action(&mut rng, nvars);
        let (d1, d2) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
        let f = random_poly(&mut rng, nvars, d1);
        let g = random_poly(&mut rng, nvars, d2);

        let k = rng.gen_range(0..=d1 + d2 + 1);
        let lhs = sq_with(action, k, &(&f * &g));
        let rhs = sum(
            (0..=k).map(|i| &sq_with(action, i, &f) * &sq_with(action, k - i, &g)),
            nvars,
        );
        t.record("cartan", lhs == rhs, || format!("{action:?} Sq^{k}(({f})({g}))"));

        let k = rng.gen_range(d1 + 1..=d1 + 4);
        t.record("instability", sq_with(action, k, &f).is_zero(), || {
            format!("{action:?} Sq^{k}({f})")
        });
        t.record("sq0", sq_with(action, 0, &f) == f, || format!("{action:?} Sq^0({f})"));

        let top = sq_with(Action::CLASSICAL, d1, &f);
        t.record("top_square", top == f.square(), || format!("Sq^{d1}({f})"));

        let b = rng.gen_range(1..=5);
        let a = rng.gen_range(1..2 * b);
        let lhs = sq_with(action, a, &sq_with(action, b, &f));
        t.record("adem", lhs == adem_rhs(action, a, b, &f), || {
            format!("{action:?} Sq^{a}Sq^{b}({f})")
        });

        let rows: Vec<u8> = (0..nvars).map(|_| rng.gen_range(0..1u8 << nvars)).collect();
        let sigma = MatrixN::from_rows(nvars, &rows);
        let k = rng.gen_range(0..=d1);
        let lhs = act(&sigma, &sq_with(Action::CLASSICAL, k, &f))?;
        let rhs = sq_with(Action::CLASSICAL, k, &act(&sigma, &f)?);
        t.record("equivariance", lhs == rhs, || format!("{sigma:?} Sq^{k}({f})"));

        let modulus = (1u64 << nvars) - 1;
        let k = rng.gen_range(1..=d1.max(1));
        let ok = f.terms().iter().all(|m| {
            let w = weight(m) % modulus;
            let single = sq_with(Action::Twisted { n: nvars }, k, &Poly::monomial(nvars, *m));
            single.terms().iter().all(|u| weight(u) % modulus == w)
        });
        t.record("twisted_weight", ok, || {
            format!("Sq^{k}({f}) twisted in {nvars} variables")
        });
    }
    for n in 1..=3 {
        let ok = verify_mui_total_square(n)?;
        t.record("mui_total_square", ok, || format!("n = {n}"));
    }
    let passed = t.failures.is_empty();
    Ok(PropertyReport {
        seed,
        cases: t.cases,
        failures: t.failures,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = property_suite(300, 1).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.cases["cartan"], 300);
        assert_eq!(r.cases["mui_total_square"], 3);
    }

    #[test]
    fn adem_examples() {
        // Sq^1 Sq^2 = Sq^3, Sq^2 Sq^2 = Sq^3 Sq^1
        let f = Poly::from_exponents(2, &[&[2, 1], &[1, 1]]);
        let c = Action::CLASSICAL;
        assert_eq!(adem_rhs(c, 1, 2, &f), sq_with(c, 3, &f));
        assert_eq!(adem_rhs(c, 2, 2, &f), sq_with(c, 3, &sq_with(c, 1, &f)));
        let x3y = Poly::from_exponents(2, &[&[3, 1]]);
        assert!(!sq_with(c, 2, &sq_with(c, 2, &x3y)).is_zero());
    }

    #[test]
    fn tally_keeps_the_first_witness() {
        let mut t = Tally {
            cases: BTreeMap::new(),
            failures: BTreeMap::new(),
        };
        t.record("p", false, || "first".into());
        t.record("p", false, || "second".into());
        t.record("p", true, || unreachable!());
        assert_eq!(t.cases["p"], 3);
        assert_eq!(t.failures["p"], (2, "first".to_string()));
    }
}
