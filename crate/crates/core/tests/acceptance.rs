//! The acceptance criteria, run exactly as stated. Prints one PASS/FAIL line
//! per criterion and exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use unstable_core::report::{self, BasisKind, Claim};
use unstable_core::resolution::{ext_u_table_of, Resolution};
use unstable_core::series::{andrews_check, dickson_ideal_series, mu_oracles, t_series};
use unstable_core::steenrod::property_suite;
use unstable_core::steinberg::Flavor;
use unstable_core::Result;

const SEED: u64 = 0x5eed;

/// `Ok(None)` on success, `Ok(Some(reason))` on failure.
type Outcome = Result<Option<String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn all_pass(claims: &[Claim]) -> Option<String> {
    claims
        .iter()
        .find(|c| !c.passed())
        .map(|c| format!("{}: {}", c.id, c.witness.clone().unwrap_or_default()))
}

fn andrews() -> Outcome {
    for n in 1..=5 {
        for id in andrews_check(n, 128) {
            if !id.holds {
                return Ok(Some(format!("{} residual {}", id.name, id.residual())));
            }
        }
    }
    Ok(None)
}

fn minc_counts() -> Outcome {
    for k in 0..=5 {
        // J(2^k - 1) vanishes above degree 2^k - 1
        let cap = 64;
        let [a, b, c] = mu_oracles(k, cap);
        if a != b || a != c {
            return Ok(Some(format!("k = {k}: {a} / {b} / {c}")));
        }
    }
    Ok(None)
}

fn idempotents() -> Outcome {
    let mut claims = Vec::new();
    for n in 2..=4 {
        claims.extend(report::idempotent_claims(n)?);
    }
    Ok(all_pass(&claims))
}

fn basis_theorem() -> Outcome {
    let mut claims = report::basis_claims(BasisKind::Steinberg(Flavor::M), 2, 16)?;
    claims.extend(report::basis_claims(BasisKind::Steinberg(Flavor::M), 3, 24)?);
    Ok(all_pass(&claims))
}

fn four_descriptions() -> Outcome {
    Ok(all_pass(&[report::four_descriptions_claim(2, 16)?, report::four_descriptions_claim(3, 24)?]))
}

fn resolution_exact() -> Outcome {
    let mut claims = Vec::new();
    for (n, cap) in [(1, 16), (2, 16), (3, 24)] {
        claims.extend(report::resolution_claims(n, cap)?);
    }
    Ok(all_pass(&claims))
}

fn presentation() -> Outcome {
    let mut claims = Vec::new();
    for n in 2..=4 {
        claims.extend(report::presentation_claims(n)?);
    }
    Ok(all_pass(&claims))
}

fn witnesses() -> Outcome {
    Ok(all_pass(&report::witness_claims(1000, 100, SEED)?))
}

fn takayasu() -> Outcome {
    let mut claims = report::takayasu_claims(2, 16)?;
    claims.extend(report::takayasu_claims(3, 24)?);
    Ok(all_pass(&claims))
}

fn ext_tables() -> Outcome {
    for (n, cap) in [(2usize, 16usize), (3, 24)] {
        let table = ext_u_table_of(&Resolution::build(n, cap)?, cap)?;
        if table.ext.len() < n + 2 {
            return Ok(Some(format!("n = {n}: only {} rows", table.ext.len())));
        }
        for (s, row) in table.ext.iter().enumerate().take(n + 2) {
            for (t, &dim) in row.iter().enumerate().take(cap + 1) {
                let expected = usize::from((s, t) == (n, (1 << n) - 1));
                if dim != expected {
                    return Ok(Some(format!("n = {n}: Ext^({s},{t}) = {dim}")));
                }
            }
        }
        if !table.differentials_vanish {
            return Ok(Some(format!("n = {n}: a differential on primitives is nonzero")));
        }
    }
    Ok(None)
}

fn dickson_series() -> Outcome {
    for n in 1..=4 {
        for i in 0..=8 {
            for id in t_series(n, i, 64) {
                if !id.holds {
                    return Ok(Some(format!("{}: {}", id.name, id.residual())));
                }
            }
        }
    }
    for n in 1..=4 {
        for i in 1..=8 {
            for id in dickson_ideal_series(n, i, 64)? {
                if !id.holds {
                    return Ok(Some(format!("{}: {}", id.name, id.residual())));
                }
            }
        }
    }
    Ok(None)
}

fn steenrod_properties() -> Outcome {
    let r = property_suite(1500, SEED)?;
    if r.total_cases() < 10_000 {
        return Ok(Some(format!("only {} cases", r.total_cases())));
    }
    Ok(r.failures.iter().next().map(|(name, (k, w))| format!("{name}: {k} failures, {w}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 Andrews identity, n <= 5, degree <= 128", andrews),
        ("2 three counts of J(2^k - 1), k <= 5", minc_counts),
        ("3 idempotent and Hecke identities, n = 2, 3, 4", idempotents),
        ("4 basis of M_n and its dimensions, n = 2, 3", basis_theorem),
        ("5 four descriptions of L_n agree, n = 2, 3", four_descriptions),
        ("6 resolution is an exact complex, n = 1, 2, 3", resolution_exact),
        ("7 presentation of J(2^n - 1), n = 2, 3, 4", presentation),
        ("8 generator witnesses, n = 2 exhaustive, n = 3 random", witnesses),
        ("9 Takayasu complex, n = 2, 3", takayasu),
        ("10 Ext_U tables, n = 2, 3", ext_tables),
        ("11 Dickson series identities, n <= 4, i <= 8", dickson_series),
        ("12 Steenrod action properties, >= 10^4 cases", steenrod_properties),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        let reason = match outcome {
            Ok(Ok(None)) => None,
            Ok(Ok(Some(r))) => Some(r),
            Ok(Err(e)) => Some(format!("error: {e}")),
            Err(_) => Some("panicked".to_string()),
        };
        match reason {
            None => println!("PASS  criterion {name}  ({secs:.2}s)"),
            Some(r) => {
                failed += 1;
                println!("FAIL  criterion {name}  ({secs:.2}s): {r}");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
