//! Machine-readable verification reports and the suites that fill them.
//!
//! Every check becomes a [`Claim`] with a stable, descriptive id, a
//! pass/fail status and the supporting data (rank tables, dimensions,
//! witnesses). Reports serialize deterministically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::brown_gitler::{
    campbell_selick_check, generator_witness, j_basis, presentation_check, target_monomial,
    witness_search,
};
use crate::gf2::{Monomial, Poly};
use crate::matrix_algebra::{act, verify_hecke};
use crate::resolution::{
    ext_u_table_of, takayasu_complex, verify_complex_of, verify_exactness_of, Resolution,
};
use crate::series::{
    andrews_check, dickson_omega_series, ell, dickson_ideal_series, mu, mu_oracles, poincare,
    t_series, SeriesIdentity, TruncSeries,
};
use crate::steenrod::property_suite;
use crate::steinberg::{
    build_steinberg, dickson_short_exact_dims, verify_coassociativity, verify_mui_total_square,
    verify_four_descriptions, verify_label_recursion, Flavor, OmegaLabel,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub status: Status,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Claim {
    pub fn new(id: impl Into<String>, passed: bool, summary: impl Into<String>) -> Claim {
        Claim {
            id: id.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            summary: summary.into(),
            witness: None,
            data: Value::Null,
        }
    }

    pub fn with_data(mut self, data: &impl Serialize) -> Claim {
        self.data = serde_json::to_value(data).expect("report data serializes");
        self
    }

    pub fn with_witness(mut self, witness: Option<String>) -> Claim {
        self.witness = witness;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub claims: Vec<Claim>,
    /// Remarks that are printed but never checked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            params: BTreeMap::new(),
            claims: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Report {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
        self
    }

    pub fn extend(&mut self, claims: impl IntoIterator<Item = Claim>) {
        for c in claims {
            self.passed &= c.passed();
            self.claims.push(c);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per claim.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.claims {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag}  {:width$}  {}", c.id, c.summary);
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "      witness: {w}");
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.claims.iter().filter(|c| c.passed()).count(),
            self.claims.len()
        );
        out
    }
}

fn series_claim(prefix: &str, id: &SeriesIdentity) -> Claim {
    let witness = (!id.holds).then(|| format!("residual {}", id.residual()));
    Claim::new(format!("{prefix}.{}", id.name.replace(' ', "_")), id.holds, id.name.clone())
        .with_witness(witness)
}

/// `e_n^2 = e_n` and the factorizations through `e_{2,i}` and `e_{n-1}`.
pub fn idempotent_claims(n: usize) -> Result<Vec<Claim>> {
    Ok(verify_hecke(n)?
        .into_iter()
        .map(|c| Claim::new(format!("idempotent.n{n}.{}", c.name.replace(' ', "")), c.passed, c.name))
        .collect())
}

/// Which module `basis` emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    Steinberg(Flavor),
    /// `J(2^n - 1)`.
    BrownGitler,
}

/// Builds the labelled basis (which checks linear independence), and
/// compares its Poincaré series with the closed form. The labels ride on the
/// first claim, one list per degree.
pub fn basis_claims(kind: BasisKind, n: usize, cap: usize) -> Result<Vec<Claim>> {
    let (name, module, labels, expected) = match kind {
        BasisKind::Steinberg(flavor) => {
            let m = build_steinberg(flavor, n, cap)?;
            let top = (1usize << n) - 1;
            let expected = match flavor {
                Flavor::M if n == 0 => TruncSeries::one(cap),
                Flavor::M => &ell(n, cap) + &ell(n - 1, cap),
                Flavor::L => ell(n, cap),
                Flavor::LPrime => ell(n, cap).shift(top),
                Flavor::OmegaL(j) => ell(n, cap).shift(j as usize * top),
                Flavor::Dickson(i) => dickson_omega_series(n, i as usize, cap),
            };
            let labels: Vec<Vec<String>> = (0..=cap).map(|d| m.module.labels(d).to_vec()).collect();
            (format!("{flavor}_{n}"), m.module, labels, expected)
        }
        BasisKind::BrownGitler => {
            let top = (1usize << n) - 1;
            let j = j_basis(top, cap)?;
            let labels = (0..=cap).map(|d| j.labels(d).to_vec()).collect();
            (format!("J({top})"), j, labels, mu(n, cap))
        }
    };
    let key = name.replace(' ', "");
    let got = poincare(&module);
    let series_ok = got == expected;
    let unstable = module.check_unstable().is_ok();
    let polys_ok = module.check_polys()?;
    let claims = vec![
        Claim::new(
            format!("basis.{key}.independent"),
            true,
            format!("{name}: {} labelled elements, linearly independent", module.total_dim()),
        )
        .with_data(&labels),
        Claim::new(
            format!("basis.{key}.poincare"),
            series_ok,
            format!("{name}: dimensions match the closed-form series through degree {cap}"),
        )
        .with_witness((!series_ok).then(|| format!("got {got}, expected {expected}")))
        .with_data(&module.dims()),
        Claim::new(
            format!("basis.{key}.unstable"),
            unstable && polys_ok,
            format!("{name}: squares are unstable and agree with the polynomials"),
        ),
    ];
    Ok(claims)
}

/// The four descriptions of `L_n` agree (`n = 2, 3`).
pub fn four_descriptions_claim(n: usize, cap: usize) -> Result<Claim> {
    let r = verify_four_descriptions(n, cap)?;
    let bad = r.rows.iter().find(|x| !x.agree).map(|x| format!("{x:?}"));
    Ok(Claim::new(
        format!("steinberg.n{n}.four_descriptions_of_L"),
        r.passed,
        format!("e_{n}·L_1^(x){n} = ω_{n}M_{n} = ∩MP = labelled span, degrees <= {cap}"),
    )
    .with_witness(bad)
    .with_data(&r.rows))
}

/// Coassociativity, the `ω`-label recursion, Mùi's identity and the Dickson
/// short exact sequences.
pub fn steinberg_structure_claims() -> Result<Vec<Claim>> {
    let mut out = vec![Claim::new(
        "steinberg.coproduct_coassociative",
        verify_coassociativity(14)?,
        "L_3 -> L_1 (x) L_1 (x) L_1 both ways agree, degrees <= 14",
    )];
    for seq in [vec![3, 1], vec![5, 1], vec![7, 3, 1], vec![9, 3, 1], vec![8, 3]] {
        let r = verify_label_recursion(&OmegaLabel::new(seq.clone())?)?;
        out.push(
            Claim::new(
                format!("steinberg.label_recursion.{}", OmegaLabel::new(seq)?),
                r.passed,
                "leading coefficient in x_n is the shorter label, tails lie in L_(n-1)",
            )
            .with_data(&r),
        );
    }
    for n in 1..=3 {
        out.push(Claim::new(
            format!("steinberg.mui_total_square.n{n}"),
            verify_mui_total_square(n)?,
            format!("Σ x^(2^{}-i) Sq^i V_{n} = V_{}", n - 1, n + 1),
        ));
    }
    for i in 1..=4 {
        let rows = dickson_short_exact_dims(2, i, 24)?;
        out.push(
            Claim::new(
                format!("dickson.short_exact_counts.n2.i{i}"),
                rows.iter().all(|r| r.holds()),
                format!("dim D(2)ω^{} = dim D(2)ω^{i} + dim Σ^{}ΦD(1)ω^{}", i - 1, i - 1, i - 1),
            )
            .with_data(&rows),
        );
    }
    Ok(out)
}

pub fn presentation_claims(n: usize) -> Result<Vec<Claim>> {
    let r = presentation_check(n)?;
    let bad = r.rows.iter().find(|x| !x.holds()).map(|x| format!("{x:?}"));
    Ok(vec![Claim::new(
        format!("presentation.n{n}"),
        r.passed,
        format!(
            "ker g_{n} = MP(1)+...+MP({n}) and the quotient is J({}) in every degree",
            (1 << n) - 1
        ),
    )
    .with_witness(bad)
    .with_data(&r.rows)])
}

fn random_top_form(rng: &mut ChaCha8Rng, n: usize) -> Poly {
    let top = (1u32 << n) - 1;
    loop {
        let mut terms = Vec::new();
        let count = rng.gen_range(1..=12);
        for _ in 0..count {
            let mut exps = vec![0u32; n];
            for _ in 0..top {
                exps[rng.gen_range(0..n)] += 1;
            }
            terms.push(Monomial::new(&exps));
        }
        let p = Poly::from_monomials(n, terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Every nonzero form of degree 3 in two variables (exhaustively), and
/// `samples` random forms of degree 7 in three, admit a matrix `σ` with
/// `x_1^{2^{n-1}} ⋯ x_n` in `σ·P`; the constructive witness is cross-checked
/// against brute force on the first `brute` samples.
pub fn witness_claims(samples: usize, brute: usize, seed: u64) -> Result<Vec<Claim>> {
    let monos: Vec<Monomial> = (0..=3u32).map(|a| Monomial::new(&[a, 3 - a])).collect();
    let mut failures2 = Vec::new();
    for code in 1u32..16 {
        let p = Poly::from_monomials(2, (0..4).filter(|b| code >> b & 1 == 1).map(|b| monos[b]));
        let constructed = generator_witness(&p, 2)
            .and_then(|s| act(&s, &p))
            .map(|q| q.contains(&target_monomial(2)))
            .unwrap_or(false);
        if !constructed || witness_search(&p, 2).is_none() {
            failures2.push(p.to_string());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures3 = Vec::new();
    let mut brute_failures = Vec::new();
    for k in 0..samples {
        let p = random_top_form(&mut rng, 3);
        if generator_witness(&p, 3).is_err() {
            failures3.push(p.to_string());
        }
        if k < brute && witness_search(&p, 3).is_none() {
            brute_failures.push(p.to_string());
        }
    }
    Ok(vec![
        Claim::new(
            "witness.n2.exhaustive",
            failures2.is_empty(),
            "all 15 nonzero cubics in x, y have a generator witness",
        )
        .with_witness(failures2.first().cloned()),
        Claim::new(
            "witness.n3.random",
            failures3.is_empty(),
            format!("{samples} random degree-7 forms in 3 variables: constructive witness found"),
        )
        .with_witness(failures3.first().cloned()),
        Claim::new(
            "witness.n3.brute_force",
            brute_failures.is_empty(),
            format!("first {brute} of them also found by search over all 512 matrices"),
        )
        .with_witness(brute_failures.first().cloned()),
    ])
}

/// Complex property, exactness with rank certificates, and the Ext table.
pub fn resolution_claims(n: usize, cap: usize) -> Result<Vec<Claim>> {
    let res = Resolution::build(n, cap)?;
    let c = verify_complex_of(&res)?;
    let e = verify_exactness_of(&res);
    let ext = ext_u_table_of(&res, cap)?;
    let composite_witness = c
        .composites
        .iter()
        .find_map(|x| x.witness.map(|(d, j)| format!("f_{} f_{} nonzero at degree {d}, column {j}", x.s + 1, x.s)));
    let linear_witness = c
        .linearity
        .iter()
        .find_map(|x| x.witness.map(|(k, d)| format!("f_{} vs Sq^{k} from degree {d}", x.s)));
    let bad_row = |pred: fn(&crate::resolution::ExactnessRow) -> bool| {
        e.rows.iter().find(|r| !pred(r)).map(|r| format!("{r:?}"))
    };
    let expected_ext: Vec<(usize, usize, usize)> = if cap >= (1 << n) - 1 {
        vec![(n, (1 << n) - 1, 1)]
    } else {
        Vec::new()
    };
    let claims = vec![
        Claim::new(
            format!("resolution.n{n}.composites_vanish"),
            c.composites.iter().all(|x| x.witness.is_none()),
            "f_(s+1) f_s = 0 at every position and degree",
        )
        .with_witness(composite_witness),
        Claim::new(
            format!("resolution.n{n}.maps_are_linear"),
            c.linearity.iter().all(|x| x.witness.is_none()),
            "every f_s commutes with every Steenrod square",
        )
        .with_witness(linear_witness),
        Claim::new(
            format!("resolution.n{n}.pi_products_vanish"),
            c.pi_products.iter().all(|x| x.witness.is_none()),
            "L_2 -> J(2^i) (x) J(2^(i-1)) -> J(3·2^(i-1)) is zero",
        )
        .with_data(&c.pi_products),
        Claim::new(
            format!("resolution.n{n}.monomial_absence"),
            c.monomial_absence.iter().all(|x| x.absent),
            "e_2 ω_1^(a-2b) ω_2^b has no term x_1^(2^i) x_2^(2^(i-1))",
        )
        .with_data(&c.monomial_absence),
        Claim::new(
            format!("resolution.n{n}.exact"),
            e.rows.iter().all(|r| r.exact) && e.composites_zero,
            format!("0 -> {} -> 0 is exact in degrees <= {cap}", e.terms.join(" -> ")),
        )
        .with_witness(bad_row(|r| r.exact))
        .with_data(&e.rows),
        Claim::new(
            format!("resolution.n{n}.rank_bound_sharp"),
            e.rows.iter().all(|r| r.lemma_bound_sharp && r.leading_terms),
            "rank f_s = |A(s-1, d)|, with leading terms on the A labels",
        )
        .with_witness(bad_row(|r| r.lemma_bound_sharp && r.leading_terms)),
        Claim::new(
            format!("resolution.n{n}.label_counts"),
            e.rows.iter().all(|r| r.ab_counts),
            "|A(s,d)| + |B(s,d)| = dim and |A(s,d)| = |B(s+1,d)|",
        )
        .with_witness(bad_row(|r| r.ab_counts)),
        Claim::new(
            format!("resolution.n{n}.euler_characteristic"),
            e.rows.iter().all(|r| r.euler == 0),
            "alternating sum of dimensions vanishes in every degree",
        )
        .with_witness(bad_row(|r| r.euler == 0)),
        Claim::new(
            format!("ext.n{n}.table"),
            ext.nonzero == expected_ext,
            format!("Ext_U^s(Σ^t F_2, L'_{n}) for t <= {cap}: nonzero only at {expected_ext:?}"),
        )
        .with_witness((ext.nonzero != expected_ext).then(|| format!("{:?}", ext.nonzero)))
        .with_data(&ext),
        Claim::new(
            format!("ext.n{n}.minimality_evidence"),
            ext.differentials_vanish && ext.primitives_bounded,
            "all differentials induced on primitives vanish (evidence, not proof)",
        ),
    ];
    Ok(claims)
}

pub fn takayasu_claims(n: usize, cap: usize) -> Result<Vec<Claim>> {
    let (_, r) = takayasu_complex(n, cap)?;
    let bad = r.rows.iter().find(|x| !x.exact || x.euler != 0).map(|x| format!("{x:?}"));
    Ok(vec![
        Claim::new(
            format!("takayasu.n{n}.complex"),
            r.composites_zero && r.nonlinear.is_empty(),
            "δ_(k+1) δ_k = 0 and every δ_k is A-linear",
        )
        .with_witness((!r.nonlinear.is_empty()).then(|| format!("{:?}", r.nonlinear))),
        Claim::new(
            format!("takayasu.n{n}.exact"),
            bad.is_none(),
            format!("T' is exact in degrees <= {cap}"),
        )
        .with_witness(bad)
        .with_data(&r.rows),
        Claim::new(
            format!("takayasu.n{n}.squares_commute"),
            r.square_failures.is_empty(),
            "f_k v = v δ_k for the inclusions ι -> t_0^(2^k-1)",
        )
        .with_witness((!r.square_failures.is_empty()).then(|| format!("{:?}", r.square_failures))),
    ])
}

/// Which series identities `series` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesWhich {
    Andrews,
    Mu,
    TSeries,
    Dickson,
    All,
}

pub fn series_claims(which: SeriesWhich, n: usize, cap: usize) -> Result<Vec<Claim>> {
    let mut out = Vec::new();
    let all = which == SeriesWhich::All;
    if all || which == SeriesWhich::Andrews {
        for id in andrews_check(n, cap) {
            out.push(series_claim("series.andrews", &id));
        }
    }
    if all || which == SeriesWhich::Mu {
        let [a, b, c] = mu_oracles(n, cap);
        out.push(
            Claim::new(
                format!("series.minc.n{n}"),
                a == b && a == c,
                format!("μ_{n}: partitions, Ω_{n} sequences and J({}) agree", (1 << n) - 1),
            )
            .with_data(&a.coeffs()),
        );
    }
    if all || which == SeriesWhich::TSeries {
        for i in 0..=8 {
            for id in t_series(n, i, cap) {
                out.push(series_claim("series.t_functor", &id));
            }
        }
    }
    if all || which == SeriesWhich::Dickson {
        for i in 1..=4 {
            for id in dickson_ideal_series(n, i, cap)? {
                out.push(series_claim("series.dickson", &id));
            }
        }
    }
    Ok(out)
}

/// Printed alongside the Dickson identities; not verified.
pub const DICKSON_REMARK: &str =
    "conjectured, not checked: T~(D(n) w_n^i) is isomorphic to T~(D(n)) w_(n-1)^i";

pub fn property_claims(per_property: usize, seed: u64) -> Result<Vec<Claim>> {
    let r = property_suite(per_property, seed)?;
    let mut out: Vec<Claim> = r
        .cases
        .iter()
        .map(|(name, &count)| {
            let failure = r.failures.get(name);
            Claim::new(
                format!("steenrod.{name}"),
                failure.is_none(),
                format!("{count} cases"),
            )
            .with_witness(failure.map(|(k, w)| format!("{k} failures, first: {w}")))
        })
        .collect();
    let cs = campbell_selick_check(3, 10)?;
    out.push(
        Claim::new(
            "steenrod.twisted_projection_linear",
            cs.passed,
            "projection of the twisted algebra onto J(7) commutes with squares, degrees <= 10",
        )
        .with_data(&cs),
    );
    Ok(out)
}

/// Default degree cap for `n`.
pub fn default_cap(n: usize) -> usize {
    match n {
        0..=2 => 16,
        3 => 24,
        _ => 15,
    }
}

pub fn check_range(what: &'static str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            bound: format!("{lo} <= {what} <= {hi}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_versioned_and_deterministic() {
        let mut r = Report::new("series").param("n", 2).param("cap", 32);
        r.extend(series_claims(SeriesWhich::Andrews, 2, 32).unwrap());
        assert!(r.passed);
        let a = r.to_json();
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["claims"][0]["status"], "pass");
        let back: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert!(r.to_text().contains("PASS"));
    }

    #[test]
    fn a_failing_claim_fails_the_report() {
        let mut r = Report::new("x");
        r.extend([Claim::new("a", true, ""), Claim::new("b", false, "").with_witness(Some("w".into()))]);
        assert!(!r.passed);
        assert!(r.to_text().contains("FAIL  b"));
        assert!(r.to_text().contains("witness: w"));
    }

    #[test]
    fn small_suites() {
        let claims = basis_claims(BasisKind::Steinberg(Flavor::M), 2, 12).unwrap();
        assert!(claims.iter().all(Claim::passed));
        assert_eq!(claims[0].data[4][0], "w(3,1)");
        let claims = basis_claims(BasisKind::BrownGitler, 3, 8).unwrap();
        assert!(claims.iter().all(Claim::passed));
        for (flavor, n) in [(Flavor::LPrime, 2), (Flavor::OmegaL(2), 1), (Flavor::Dickson(1), 2)] {
            let claims = basis_claims(BasisKind::Steinberg(flavor), n, 16).unwrap();
            assert!(claims.iter().all(Claim::passed), "{flavor}");
        }
        assert!(resolution_claims(2, 16).unwrap().iter().all(Claim::passed));
        assert!(takayasu_claims(2, 16).unwrap().iter().all(Claim::passed));
        assert!(idempotent_claims(2).unwrap().iter().all(Claim::passed));
        assert!(witness_claims(20, 5, 3).unwrap().iter().all(Claim::passed));
    }

    #[test]
    fn ranges() {
        assert!(check_range("n", 5, 1, 4).unwrap_err().to_string().contains("n <= 4"));
        assert_eq!(default_cap(2), 16);
        assert_eq!(default_cap(3), 24);
    }
}
