//! The `unstable` command line: argument parsing, suite dispatch and the
//! workspace cache.

pub mod cache;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use unstable_core::report::{self, check_range, BasisKind, Claim, Report, SeriesWhich};
use unstable_core::steinberg::Flavor;

use cache::{EntryKey, Lookup, Workspace};

#[derive(Debug, Parser)]
#[command(name = "unstable", version, about = "Verify unstable-module constructions over GF(2)")]
pub struct Cli {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Cache directory for computed reports and bases.
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Size {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Degree cap; defaults to 16 for n <= 2 and 24 for n = 3.
    #[arg(long)]
    pub cap: Option<usize>,
}

impl Size {
    fn cap(&self) -> usize {
        self.cap.unwrap_or_else(|| report::default_cap(self.n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    #[value(name = "M")]
    M,
    #[value(name = "L")]
    L,
    #[value(name = "Lprime")]
    Lprime,
    #[value(name = "omegaL")]
    OmegaL,
    #[value(name = "dickson")]
    Dickson,
    #[value(name = "J")]
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Andrews,
    Mu,
    #[value(name = "t_series")]
    TSeries,
    #[value(name = "dickson")]
    Dickson,
    All,
}

impl From<WhichArg> for SeriesWhich {
    fn from(w: WhichArg) -> SeriesWhich {
        match w {
            WhichArg::Andrews => SeriesWhich::Andrews,
            WhichArg::Mu => SeriesWhich::Mu,
            WhichArg::TSeries => SeriesWhich::TSeries,
            WhichArg::Dickson => SeriesWhich::Dickson,
            WhichArg::All => SeriesWhich::All,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Idempotent and Hecke identities in F_2[M_n(F_2)].
    Idempotent {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Emit a labelled basis and cross-check its Poincaré series.
    Basis {
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        #[command(flatten)]
        size: Size,
        /// Exponent `j` of ω^j L or `i` of D ω^i.
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// The presentation of J(2^n - 1) by the Mitchell-Priddy relations.
    Presentation {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// The resolution of L'_n: complex, exactness, Ext table.
    Resolution {
        #[command(flatten)]
        size: Size,
    },
    /// The Takayasu complex and its comparison with the resolution.
    Takayasu {
        #[command(flatten)]
        size: Size,
    },
    /// Generating-function identities.
    Series {
        #[arg(long, value_enum, default_value_t = WhichArg::All)]
        which: WhichArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Every suite that applies to `n`.
    All {
        #[command(flatten)]
        size: Size,
    },
}

/// Runs a suite through the cache if there is one.
struct Runner {
    workspace: Option<Workspace>,
}

impl Runner {
    fn cached<T, F>(&self, key: EntryKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let Some(ws) = &self.workspace else {
            return compute();
        };
        let (value, lookup) = ws.get_or_compute(&key, compute)?;
        match lookup {
            Lookup::Hit => eprintln!("cache hit: {} n={} cap={}", key.kind, key.n, key.cap),
            Lookup::Discarded => {
                eprintln!("cache entry for {} discarded and recomputed", key.kind)
            }
            Lookup::Miss => {}
        }
        Ok(value)
    }

    fn claims(
        &self,
        kind: &str,
        n: usize,
        flavor: Option<String>,
        cap: usize,
        compute: impl FnOnce() -> unstable_core::Result<Vec<Claim>>,
    ) -> Result<Vec<Claim>> {
        self.cached(EntryKey::new(kind, n, flavor, cap), || Ok(compute()?))
    }
}

fn flavor_of(arg: FlavorArg, power: u32) -> BasisKind {
    match arg {
        FlavorArg::M => BasisKind::Steinberg(Flavor::M),
        FlavorArg::L => BasisKind::Steinberg(Flavor::L),
        FlavorArg::Lprime => BasisKind::Steinberg(Flavor::LPrime),
        FlavorArg::OmegaL => BasisKind::Steinberg(Flavor::OmegaL(power)),
        FlavorArg::Dickson => BasisKind::Steinberg(Flavor::Dickson(power)),
        FlavorArg::J => BasisKind::BrownGitler,
    }
}

fn basis(r: &Runner, kind: BasisKind, n: usize, cap: usize) -> Result<Vec<Claim>> {
    let name = match kind {
        BasisKind::Steinberg(f) => format!("{f:?}"),
        BasisKind::BrownGitler => "J".into(),
    };
    r.claims("basis", n, Some(name), cap, || report::basis_claims(kind, n, cap))
}

const PROPERTY_CASES: usize = 1500;
const WITNESS_SAMPLES: usize = 1000;
const WITNESS_BRUTE: usize = 100;
const SEED: u64 = 0x5eed;

/// Validates the arguments and runs the command.
pub fn execute(cli: &Cli) -> Result<Report> {
    let r = Runner {
        workspace: cli.workspace.clone().map(Workspace::new),
    };
    let report = match &cli.command {
        Command::Idempotent { n } => {
            check_range("n", *n, 2, 4)?;
            let mut rep = Report::new("idempotent").param("n", n);
            rep.extend(r.claims("idempotent", *n, None, 0, || report::idempotent_claims(*n))?);
            rep
        }
        Command::Basis { flavor, size, power } => {
            let cap = size.cap();
            let max_n = if *flavor == FlavorArg::J { 5 } else { 4 };
            check_range("n", size.n, 1, max_n)?;
            check_range("cap", cap, 0, 64)?;
            let mut rep = Report::new("basis")
                .param("flavor", format!("{flavor:?}"))
                .param("n", size.n)
                .param("cap", cap);
            if matches!(flavor, FlavorArg::OmegaL | FlavorArg::Dickson) {
                rep = rep.param("power", power);
            }
            rep.extend(basis(&r, flavor_of(*flavor, *power), size.n, cap)?);
            rep
        }
        Command::Presentation { n } => {
            check_range("n", *n, 1, 4)?;
            let mut rep = Report::new("presentation")
                .param("n", n)
                .param("cap", (1usize << n) - 1);
            rep.extend(r.claims("presentation", *n, None, (1 << n) - 1, || {
                report::presentation_claims(*n)
            })?);
            rep
        }
        Command::Resolution { size } => {
            let (n, cap) = (size.n, size.cap());
            check_range("n", n, 1, 3)?;
            check_range("cap", cap, 1, 32)?;
            let mut rep = Report::new("resolution").param("n", n).param("cap", cap);
            rep.extend(r.claims("resolution", n, None, cap, || report::resolution_claims(n, cap))?);
            rep
        }
        Command::Takayasu { size } => {
            let (n, cap) = (size.n, size.cap());
            check_range("n", n, 1, 3)?;
            check_range("cap", cap, 1, 32)?;
            let mut rep = Report::new("takayasu").param("n", n).param("cap", cap);
            rep.extend(r.claims("takayasu", n, None, cap, || report::takayasu_claims(n, cap))?);
            rep
        }
        Command::Series { which, n, cap } => {
            check_range("n", *n, 1, 5)?;
            check_range("cap", *cap, 0, 256)?;
            let mut rep = Report::new("series")
                .param("which", format!("{which:?}"))
                .param("n", n)
                .param("cap", cap);
            rep.extend(report::series_claims((*which).into(), *n, *cap)?);
            if matches!(which, WhichArg::Dickson | WhichArg::TSeries | WhichArg::All) {
                rep.notes.push(report::DICKSON_REMARK.into());
            }
            rep
        }
        Command::All { size } => {
            let (n, cap) = (size.n, size.cap());
            check_range("n", n, 1, 3)?;
            check_range("cap", cap, 1, 32)?;
            let mut rep = Report::new("all").param("n", n).param("cap", cap);
            if n >= 2 {
                rep.extend(r.claims("idempotent", n, None, 0, || report::idempotent_claims(n))?);
            }
            for f in [FlavorArg::M, FlavorArg::L, FlavorArg::Lprime, FlavorArg::J] {
                rep.extend(basis(&r, flavor_of(f, 1), n, cap)?);
            }
            if (2..=3).contains(&n) {
                rep.extend(r.claims("four_descriptions", n, None, cap, || {
                    Ok(vec![report::four_descriptions_claim(n, cap)?])
                })?);
            }
            rep.extend(r.claims("steinberg_structure", 0, None, 0, report::steinberg_structure_claims)?);
            rep.extend(r.claims("presentation", n, None, (1 << n) - 1, || {
                report::presentation_claims(n)
            })?);
            rep.extend(r.claims("witness", 3, None, WITNESS_SAMPLES, || {
                report::witness_claims(WITNESS_SAMPLES, WITNESS_BRUTE, SEED)
            })?);
            rep.extend(r.claims("resolution", n, None, cap, || report::resolution_claims(n, cap))?);
            rep.extend(r.claims("takayasu", n, None, cap, || report::takayasu_claims(n, cap))?);
            rep.extend(report::series_claims(SeriesWhich::All, n, 64)?);
            rep.notes.push(report::DICKSON_REMARK.into());
            rep.extend(r.claims("properties", 0, None, PROPERTY_CASES, || {
                report::property_claims(PROPERTY_CASES, SEED)
            })?);
            rep
        }
    };
    Ok(report)
}

/// Whether an error is a usage error (exit code 2) rather than a failure.
pub fn is_usage_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<unstable_core::Error>(),
        Some(unstable_core::Error::OutOfRange { .. })
    )
}
