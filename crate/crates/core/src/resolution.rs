//! The injective resolution
//! `0 -> L'_n -> L_n -> L_{n-1} (x) J(1) -> ... -> J(2^n - 1) -> 0`,
//! the Takayasu complex, primitives and `Ext_U(Σ^t F_2, L'_n)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::brown_gitler::{minc_sequences, pi_values, GMap};
use crate::gf2::{BitVec, GF2Matrix, Monomial, Poly};
use crate::matrix_algebra::MAX_N;
use crate::steenrod::{total_square_upto, Action, GradedMap, GradedModule};
use crate::steinberg::{build_steinberg, Flavor, OmegaLabel};
use crate::{Error, Result};

/// A basis label of `L_m (x) J(2^s - 1)`: an ω-label `(i_1, ..., i_m)` and a
/// Minc sequence `(i_{m+1}, ..., i_n)` naming `g_s(x^{i_{m+1}} ⋯ x_n^{i_n})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelPair {
    pub omega: Vec<u32>,
    pub g: Vec<u32>,
}

impl LabelPair {
    /// The whole chain `(i_1, ..., i_n)`.
    pub fn chain(&self) -> Vec<u32> {
        self.omega.iter().chain(&self.g).copied().collect()
    }

    /// Membership in `A(s, d)`: `i_m <= 2 i_{m+1}`, reading a missing
    /// `i_{m+1}` as `1/2` and a missing `i_m` as infinite.
    pub fn in_a(&self) -> bool {
        match (self.omega.last(), self.g.first()) {
            (None, _) => false,
            (Some(&a), None) => a == 1,
            (Some(&a), Some(&b)) => a <= 2 * b,
        }
    }
}

/// `L_{n-s} (x) J(2^s - 1)` in the basis `ω^{i_1..i_{n-s}} (x) g^{i_{n-s+1}..i_n}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorTerm {
    pub n: usize,
    pub s: usize,
    pub pairs: Vec<Vec<LabelPair>>,
    pub module: GradedModule,
}

impl TensorTerm {
    /// Basis indices in `A(s, d)`.
    pub fn a_set(&self, d: usize) -> Vec<usize> {
        (0..self.pairs[d].len()).filter(|&j| self.pairs[d][j].in_a()).collect()
    }

    /// Basis indices in `B(s, d)`.
    pub fn b_set(&self, d: usize) -> Vec<usize> {
        (0..self.pairs[d].len()).filter(|&j| !self.pairs[d][j].in_a()).collect()
    }

    pub fn name(&self) -> String {
        let m = self.n - self.s;
        match (m, self.s) {
            (_, 0) => format!("L_{m}"),
            (0, s) => format!("J({})", (1usize << s) - 1),
            (m, s) => format!("L_{m} (x) J({})", (1usize << s) - 1),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("1 <= n <= {MAX_N}"),
        })
    }
}

/// `J(2^s - 1)` with basis `g_s(x^a)`, `a` running over `Ω_s`.
pub fn j_g_basis(s: usize, cap: usize) -> Result<(GradedModule, Vec<Vec<Vec<u32>>>)> {
    let seqs = minc_sequences(s, cap);
    let g = GMap::new(s)?;
    let basis: Vec<Vec<Poly>> = seqs
        .iter()
        .map(|v| v.iter().map(|a| g.value(a)).collect())
        .collect();
    let labels = seqs
        .iter()
        .map(|v| {
            v.iter()
                .map(|a| {
                    let parts: Vec<String> = a.iter().map(u32::to_string).collect();
                    format!("g({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let module = GradedModule::from_polys(
        s,
        Action::MILLER,
        cap,
        basis,
        Some(labels),
        Some((1 << s) - 1),
    )?;
    Ok((module, seqs))
}

pub fn build_tensor_term(n: usize, s: usize, cap: usize) -> Result<TensorTerm> {
    check_n(n)?;
    if s > n {
        return Err(Error::OutOfRange {
            what: "s",
            value: s,
            bound: format!("0 <= s <= n = {n}"),
        });
    }
    let m = n - s;
    let left = build_steinberg(Flavor::L, m, cap)?;
    if s == 0 {
        let pairs = left
            .labels
            .iter()
            .map(|v| {
                v.iter()
                    .map(|l| LabelPair {
                        omega: l.clone(),
                        g: Vec::new(),
                    })
                    .collect()
            })
            .collect();
        return Ok(TensorTerm {
            n,
            s,
            pairs,
            module: left.module,
        });
    }
    let (right, seqs) = j_g_basis(s, cap)?;
    let module = left.module.tensor(&right, cap);
    if !module.is_poly_backed() {
        return Err(Error::Falsified(format!("L_{m} (x) J is not polynomial backed")));
    }
    let pairs = (0..=cap)
        .map(|d| {
            let mut v = Vec::new();
            for a in 0..=d {
                for l in &left.labels[a] {
                    for g in &seqs[d - a] {
                        v.push(LabelPair {
                            omega: l.clone(),
                            g: g.clone(),
                        });
                    }
                }
            }
            v
        })
        .collect();
    Ok(TensorTerm {
        n,
        s,
        pairs,
        module,
    })
}

/// `f_{s,n}: L_{m+1} (x) J(2^{s-1} - 1) -> L_m (x) J(2^s - 1)` on polynomials:
/// `x^a t^b -> x_1^{a_1} ⋯ x_m^{a_m} π_{s-1}(x^{a_{m+1}}) t^b`.
pub fn f_poly(n: usize, s: usize) -> Result<impl Fn(&Poly) -> Poly + Sync> {
    assert!((1..=n).contains(&s));
    let m = n - s;
    let pis = pi_values(s - 1)?;
    Ok(move |p: &Poly| {
        let mut out = Poly::zero(n);
        for mono in p.terms() {
            let e = mono.exps(n);
            let Some(pv) = pis.get(e[m] as usize).filter(|q| !q.is_zero()) else {
                continue;
            };
            let mut rest = vec![0u32; n];
            rest[..m].copy_from_slice(&e[..m]);
            rest[m..m + s - 1].copy_from_slice(&e[m + 1..]);
            out += &pv.shift(n, m).mul_monomial(&Monomial::new(&rest));
        }
        out
    })
}

pub fn build_f(s: usize, n: usize, cap: usize) -> Result<GradedMap> {
    check_n(n)?;
    if s == 0 {
        let lp = build_steinberg(Flavor::LPrime, n, cap)?;
        let l = build_steinberg(Flavor::L, n, cap)?;
        return GradedMap::from_poly_images(&lp.module, &l.module, cap, Poly::clone);
    }
    let source = build_tensor_term(n, s - 1, cap)?;
    let target = build_tensor_term(n, s, cap)?;
    GradedMap::from_poly_images(&source.module, &target.module, cap, f_poly(n, s)?)
}

/// The whole resolution through `cap`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Resolution {
    pub n: usize,
    pub cap: usize,
    pub lprime: GradedModule,
    /// `terms[s] = L_{n-s} (x) J(2^s - 1)`.
    pub terms: Vec<TensorTerm>,
    /// `maps[s] = f_{s,n}`, out of `L'_n` for `s = 0`.
    pub maps: Vec<GradedMap>,
}

impl Resolution {
    pub fn build(n: usize, cap: usize) -> Result<Resolution> {
        check_n(n)?;
        let lprime = build_steinberg(Flavor::LPrime, n, cap)?.module;
        let terms = (0..=n)
            .into_par_iter()
            .map(|s| build_tensor_term(n, s, cap))
            .collect::<Result<Vec<_>>>()?;
        let maps = (0..=n)
            .into_par_iter()
            .map(|s| {
                if s == 0 {
                    GradedMap::from_poly_images(&lprime, &terms[0].module, cap, Poly::clone)
                } else {
                    GradedMap::from_poly_images(
                        &terms[s - 1].module,
                        &terms[s].module,
                        cap,
                        f_poly(n, s)?,
                    )
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Resolution {
            n,
            cap,
            lprime,
            terms,
            maps,
        })
    }

    /// Source and target of `f_{s,n}`.
    pub fn ends(&self, s: usize) -> (&GradedModule, &GradedModule) {
        let source = if s == 0 {
            &self.lprime
        } else {
            &self.terms[s - 1].module
        };
        (source, &self.terms[s].module)
    }

    pub fn names(&self) -> Vec<String> {
        std::iter::once(format!("L'_{}", self.n))
            .chain(self.terms.iter().map(TensorTerm::name))
            .collect()
    }
}

/// First `(degree, source index)` where `second ∘ first` is nonzero.
fn first_nonzero(second: &GradedMap, first: &GradedMap) -> Option<(usize, usize)> {
    let c = second.compose(first);
    c.matrices.iter().enumerate().find_map(|(d, m)| {
        (0..m.cols())
            .find(|&j| !m.column(j).is_zero())
            .map(|j| (d, j))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeCheck {
    /// `f_{s+1} ∘ f_s`.
    pub s: usize,
    /// `(degree, source basis index)` of a nonzero column.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearityCheck {
    pub s: usize,
    /// `(k, d)` where the map fails to commute with `Sq^k`.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiProductCheck {
    pub i: usize,
    /// `(degree, L_2 basis index)` where the composite is nonzero.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialAbsence {
    pub a: u32,
    pub b: u32,
    pub i: usize,
    pub absent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexReport {
    pub n: usize,
    pub cap: usize,
    pub composites: Vec<CompositeCheck>,
    pub linearity: Vec<LinearityCheck>,
    /// `L_2 -> L_1 (x) L_1 -> J(2^i) (x) J(2^{i-1}) -> J(2^i + 2^{i-1})` vanishes.
    pub pi_products: Vec<PiProductCheck>,
    /// `e_2 ω_1^{a-2b} ω_2^b` has no term `x_1^{2^i} x_2^{2^{i-1}}`.
    pub monomial_absence: Vec<MonomialAbsence>,
    pub passed: bool,
}

pub fn pi_product_checks(cap: usize) -> Result<Vec<PiProductCheck>> {
    let l2 = build_steinberg(Flavor::L, 2, cap)?;
    let mut out = Vec::new();
    let mut i = 1;
    while (1usize << i) + (1 << (i - 1)) <= cap {
        let top = (1usize << i) + (1 << (i - 1));
        let high = pi_values(i)?;
        let low = pi_values(i - 1)?;
        let image = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(i + 1);
            for m in p.terms() {
                let (a, b) = (m.exp(0) as usize, m.exp(1) as usize);
                if let (Some(u), Some(v)) = (high.get(a), low.get(b)) {
                    acc += &(u * &v.rename(i + 1, |x| x));
                }
            }
            acc
        };
        let witness = (0..=top).find_map(|d| {
            l2.module
                .polys(d)
                .unwrap()
                .iter()
                .position(|p| !image(p).is_zero())
                .map(|j| (d, j))
        });
        out.push(PiProductCheck { i, witness });
        i += 1;
    }
    Ok(out)
}

pub fn monomial_absence_checks(cap: usize) -> Result<Vec<MonomialAbsence>> {
    let mut out = Vec::new();
    let mut i = 1;
    while (1usize << i) + (1 << (i - 1)) <= cap {
        let total = (1u32 << i) + (1 << (i - 1));
        let target = Monomial::new(&[1 << i, 1 << (i - 1)]);
        for b in 1..total {
            let a = total - b;
            if a <= 2 * b {
                continue;
            }
            let p = OmegaLabel::new(vec![a, b])?.basis_poly()?;
            out.push(MonomialAbsence {
                a,
                b,
                i,
                absent: !p.contains(&target),
            });
        }
        i += 1;
    }
    Ok(out)
}

pub fn verify_complex_of(res: &Resolution) -> Result<ComplexReport> {
    let n = res.n;
    let composites: Vec<CompositeCheck> = (0..n)
        .map(|s| CompositeCheck {
            s,
            witness: first_nonzero(&res.maps[s + 1], &res.maps[s]),
        })
        .collect();
    let linearity: Vec<LinearityCheck> = (0..=n)
        .map(|s| {
            let (src, tgt) = res.ends(s);
            LinearityCheck {
                s,
                witness: res.maps[s].first_noncommuting(src, tgt),
            }
        })
        .collect();
    let pi_products = pi_product_checks(res.cap)?;
    let monomial_absence = monomial_absence_checks(res.cap)?;
    let passed = composites.iter().all(|c| c.witness.is_none())
        && linearity.iter().all(|c| c.witness.is_none())
        && pi_products.iter().all(|c| c.witness.is_none())
        && monomial_absence.iter().all(|c| c.absent);
    Ok(ComplexReport {
        n,
        cap: res.cap,
        composites,
        linearity,
        pi_products,
        monomial_absence,
        passed,
    })
}

pub fn verify_complex(n: usize, cap: usize) -> Result<ComplexReport> {
    verify_complex_of(&Resolution::build(n, cap)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessRow {
    pub degree: usize,
    /// `L'_n`, then `L_{n-s} (x) J(2^s - 1)` for `s = 0..=n`.
    pub dims: Vec<usize>,
    /// `rank f_{s,n}` for `s = 0..=n`.
    pub ranks: Vec<usize>,
    /// `|A(s-1, d)|` for `s = 1..=n`.
    pub a_sizes: Vec<usize>,
    pub exact: bool,
    /// `rank f_{s,n} = |A(s-1, d)|` and the `A`-columns already have full rank.
    pub lemma_bound_sharp: bool,
    /// Each `A(s-1)` label maps to its partner in `B(s)` with coefficient 1.
    pub leading_terms: bool,
    /// `|A(s)| + |B(s)| = dim`, `|A(s)| = |B(s+1)|`, `|B(0)| = dim L'_n`.
    pub ab_counts: bool,
    pub euler: i64,
}

impl ExactnessRow {
    pub fn holds(&self) -> bool {
        self.exact && self.lemma_bound_sharp && self.leading_terms && self.ab_counts && self.euler == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub n: usize,
    pub cap: usize,
    pub terms: Vec<String>,
    pub composites_zero: bool,
    pub rows: Vec<ExactnessRow>,
    pub passed: bool,
}

fn exactness_row(res: &Resolution, d: usize) -> ExactnessRow {
    let n = res.n;
    let mut dims = vec![res.lprime.dim(d)];
    dims.extend(res.terms.iter().map(|t| t.module.dim(d)));
    let ranks: Vec<usize> = res.maps.iter().map(|f| f.matrix(d).rank()).collect();
    // incoming rank at position p (0 = L'_n) is ranks[p - 1], outgoing ranks[p]
    let mut exact = ranks[0] == dims[0];
    for s in 0..n {
        exact &= ranks[s] + ranks[s + 1] == dims[s + 1];
    }
    exact &= ranks[n] == dims[n + 1];
    let a_sets: Vec<Vec<usize>> = res.terms.iter().map(|t| t.a_set(d)).collect();
    let b_sets: Vec<Vec<usize>> = res.terms.iter().map(|t| t.b_set(d)).collect();
    let a_sizes: Vec<usize> = (1..=n).map(|s| a_sets[s - 1].len()).collect();
    let mut lemma_bound_sharp = true;
    let mut leading_terms = true;
    for s in 1..=n {
        let f = res.maps[s].matrix(d);
        let a = &a_sets[s - 1];
        lemma_bound_sharp &= ranks[s] == a.len() && f.select_columns(a).rank() == a.len();
        let source = &res.terms[s - 1].pairs[d];
        let target = &res.terms[s].pairs[d];
        let index: HashMap<Vec<u32>, usize> = target
            .iter()
            .enumerate()
            .map(|(j, p)| (p.chain(), j))
            .collect();
        let m = n - s;
        for &j in a {
            let chain = source[j].chain();
            match index.get(&chain) {
                Some(&r) if target[r].omega.len() == m && f.get(r, j) => {}
                _ => leading_terms = false,
            }
        }
    }
    let mut ab_counts = b_sets[0].len() == dims[0];
    for s in 0..=n {
        ab_counts &= a_sets[s].len() + b_sets[s].len() == dims[s + 1];
        if s < n {
            ab_counts &= a_sets[s].len() == b_sets[s + 1].len();
        }
    }
    let euler = dims
        .iter()
        .enumerate()
        .map(|(p, &x)| if p % 2 == 0 { -(x as i64) } else { x as i64 })
        .sum();
    ExactnessRow {
        degree: d,
        dims,
        ranks,
        a_sizes,
        exact,
        lemma_bound_sharp,
        leading_terms,
        ab_counts,
        euler,
    }
}

pub fn verify_exactness_of(res: &Resolution) -> ExactnessReport {
    let composites_zero =
        (0..res.n).all(|s| first_nonzero(&res.maps[s + 1], &res.maps[s]).is_none());
    let rows: Vec<ExactnessRow> = (0..=res.cap)
        .into_par_iter()
        .map(|d| exactness_row(res, d))
        .collect();
    let passed = composites_zero && rows.iter().all(ExactnessRow::holds);
    ExactnessReport {
        n: res.n,
        cap: res.cap,
        terms: res.names(),
        composites_zero,
        rows,
        passed,
    }
}

pub fn verify_exactness(n: usize, cap: usize) -> Result<ExactnessReport> {
    Ok(verify_exactness_of(&Resolution::build(n, cap)?))
}

/// `ω_m^{2^k-1} L_m (x) Σ^{2^k-1} F_2` with `m = n - k`, labelled by the full
/// labels of the products `ω_m^{2^k-1} ω^{i_1..i_m}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TakayasuTerm {
    pub k: usize,
    pub m: usize,
    pub labels: Vec<Vec<Vec<u32>>>,
    /// Polynomials of `ω_m^{2^k-1} L_m` before suspension, by unsuspended degree.
    pub polys: Vec<Vec<Poly>>,
    pub module: GradedModule,
}

impl TakayasuTerm {
    pub fn shift(&self) -> usize {
        (1 << self.k) - 1
    }
}

pub fn takayasu_term(n: usize, k: usize, cap: usize) -> Result<TakayasuTerm> {
    let m = n - k;
    let c = (1usize << k) - 1;
    let omega_l = build_steinberg(Flavor::OmegaL(c as u32), m, cap)?;
    let mut labels = vec![Vec::new(); cap + 1];
    labels[c..=cap].clone_from_slice(&omega_l.labels[..=cap - c]);
    let polys = (0..=cap)
        .map(|d| omega_l.module.polys(d).unwrap().to_vec())
        .collect();
    let module = if c == 0 {
        omega_l.module
    } else {
        omega_l.module.suspend(c, cap)
    };
    Ok(TakayasuTerm {
        k,
        m,
        labels,
        polys,
        module,
    })
}

/// `δ_{k,n}`: a label whose last index is the least possible, `2^{k-1}`, loses
/// it; every other label goes to zero.
pub fn takayasu_delta(source: &TakayasuTerm, target: &TakayasuTerm) -> Result<GradedMap> {
    let cap = source.module.cap();
    let least = 1u32 << (target.k - 1);
    let matrices = (0..=cap)
        .map(|d| {
            let mut f = GF2Matrix::zeros(target.labels[d].len(), source.labels[d].len());
            let index: HashMap<&[u32], usize> = target.labels[d]
                .iter()
                .enumerate()
                .map(|(r, l)| (l.as_slice(), r))
                .collect();
            for (j, l) in source.labels[d].iter().enumerate() {
                if l.last() == Some(&least) {
                    let r = index.get(&l[..l.len() - 1]).ok_or_else(|| {
                        Error::Falsified(format!("δ of {l:?} has no target in degree {d}"))
                    })?;
                    f.set(*r, j, true);
                }
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedMap {
        shift: 0,
        cap,
        matrices,
    })
}

/// `y (x) ι_{2^k-1} -> y (x) t_0^{2^k-1}` into `L_m (x) J(2^k - 1)`.
fn takayasu_vertical(u: &TakayasuTerm, t: &TensorTerm) -> Result<GradedMap> {
    let cap = u.module.cap();
    let c = u.shift();
    let n = u.m + u.k;
    let iota = Poly::monomial(n, Monomial::ONE.with_exp(u.m, c as u32));
    let matrices = (0..=cap)
        .map(|d| {
            let cols = if d < c {
                Vec::new()
            } else {
                u.polys[d - c]
                    .iter()
                    .map(|y| {
                        let image = &y.shift(n, 0) * &iota;
                        t.module.coordinates(d, &image).ok_or_else(|| {
                            Error::Falsified(format!("{image} is not in {}", t.name()))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            Ok(GF2Matrix::from_columns(&cols, t.module.dim(d)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedMap {
        shift: 0,
        cap,
        matrices,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TakayasuRow {
    pub degree: usize,
    /// `ω_n L_n`, then the terms for `k = 0..=n`.
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub exact: bool,
    pub euler: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TakayasuReport {
    pub n: usize,
    pub cap: usize,
    pub composites_zero: bool,
    /// `(k, Sq^j, degree)` where `δ_{k,n}` fails to be A-linear.
    pub nonlinear: Vec<(usize, usize, usize)>,
    /// `k` and the first degree where `f_{k,n} ∘ v = v ∘ δ_{k,n}` fails.
    pub square_failures: Vec<(usize, usize)>,
    pub rows: Vec<TakayasuRow>,
    pub passed: bool,
}

/// The complex `T'` with its maps, `maps[0]` being `ω_n L_n ⊂ L_n` and
/// `maps[k] = δ_{k,n}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Takayasu {
    pub n: usize,
    pub cap: usize,
    pub lprime: GradedModule,
    pub terms: Vec<TakayasuTerm>,
    pub maps: Vec<GradedMap>,
}

impl Takayasu {
    pub fn build(n: usize, cap: usize) -> Result<Takayasu> {
        check_n(n)?;
        let lprime = build_steinberg(Flavor::LPrime, n, cap)?.module;
        let terms = (0..=n)
            .map(|k| takayasu_term(n, k, cap))
            .collect::<Result<Vec<_>>>()?;
        let mut maps = vec![GradedMap::from_poly_images(
            &lprime,
            &terms[0].module,
            cap,
            Poly::clone,
        )?];
        for k in 1..=n {
            maps.push(takayasu_delta(&terms[k - 1], &terms[k])?);
        }
        Ok(Takayasu {
            n,
            cap,
            lprime,
            terms,
            maps,
        })
    }
}

pub fn takayasu_complex(n: usize, cap: usize) -> Result<(Takayasu, TakayasuReport)> {
    let t = Takayasu::build(n, cap)?;
    let res = Resolution::build(n, cap)?;
    let composites_zero = (0..n).all(|k| first_nonzero(&t.maps[k + 1], &t.maps[k]).is_none());
    let mut nonlinear = Vec::new();
    for k in 0..=n {
        let src = if k == 0 { &t.lprime } else { &t.terms[k - 1].module };
        if let Some((j, d)) = t.maps[k].first_noncommuting(src, &t.terms[k].module) {
            nonlinear.push((k, j, d));
        }
    }
    let verticals = t
        .terms
        .iter()
        .zip(&res.terms)
        .map(|(u, r)| takayasu_vertical(u, r))
        .collect::<Result<Vec<_>>>()?;
    let mut square_failures = Vec::new();
    for k in 0..=n {
        let lhs = if k == 0 {
            res.maps[0].clone()
        } else {
            res.maps[k].compose(&verticals[k - 1])
        };
        let rhs = verticals[k].compose(&t.maps[k]);
        if let Some(d) = (0..=cap).find(|&d| lhs.matrix(d) != rhs.matrix(d)) {
            square_failures.push((k, d));
        }
    }
    let rows: Vec<TakayasuRow> = (0..=cap)
        .map(|d| {
            let mut dims = vec![t.lprime.dim(d)];
            dims.extend(t.terms.iter().map(|u| u.module.dim(d)));
            let ranks: Vec<usize> = t.maps.iter().map(|f| f.matrix(d).rank()).collect();
            let mut exact = ranks[0] == dims[0] && ranks[n] == dims[n + 1];
            for k in 0..n {
                exact &= ranks[k] + ranks[k + 1] == dims[k + 1];
            }
            let euler = dims
                .iter()
                .enumerate()
                .map(|(p, &x)| if p % 2 == 0 { -(x as i64) } else { x as i64 })
                .sum();
            TakayasuRow {
                degree: d,
                dims,
                ranks,
                exact,
                euler,
            }
        })
        .collect();
    let passed = composites_zero
        && nonlinear.is_empty()
        && square_failures.is_empty()
        && rows.iter().all(|r| r.exact && r.euler == 0);
    let report = TakayasuReport {
        n,
        cap,
        composites_zero,
        nonlinear,
        square_failures,
        rows,
        passed,
    };
    Ok((t, report))
}

/// A basis of `{x in M^t : Sq^k x = 0 for all k >= 1}`.
///
/// Instability leaves only `k <= t`. Polynomial-backed modules evaluate the
/// squares on polynomials, so `t` may exceed `cap / 2`; otherwise the stored
/// matrices must reach degree `2t`.
pub fn primitives(m: &GradedModule, t: usize) -> Result<Vec<BitVec>> {
    if t > m.cap() {
        if m.is_bounded() {
            return Ok(Vec::new());
        }
        return Err(Error::CapTooSmall {
            cap: m.cap(),
            reason: format!("primitives in degree {t}"),
        });
    }
    let dim = m.dim(t);
    if dim == 0 {
        return Ok(Vec::new());
    }
    if let (Some(action), Some(basis)) = (m.action(), m.polys(t)) {
        let mut rows: HashMap<(usize, Monomial), usize> = HashMap::new();
        let mut cols: Vec<Vec<usize>> = Vec::with_capacity(dim);
        for p in basis {
            let mut col = Vec::new();
            for (k, image) in total_square_upto(action, p, t) {
                if k == 0 {
                    continue;
                }
                for mono in image.terms() {
                    let next = rows.len();
                    col.push(*rows.entry((k, *mono)).or_insert(next));
                }
            }
            cols.push(col);
        }
        let nrows = rows.len();
        let columns: Vec<BitVec> = cols
            .into_iter()
            .map(|c| BitVec::from_indices(nrows, c))
            .collect();
        return Ok(GF2Matrix::from_columns(&columns, nrows).kernel());
    }
    if 2 * t > m.cap() && !m.is_bounded() {
        return Err(Error::CapTooSmall {
            cap: m.cap(),
            reason: format!("squares out of degree {t} reach degree {}", 2 * t),
        });
    }
    let mut stacked = GF2Matrix::zeros(0, dim);
    for k in 1..=t {
        stacked = stacked.vstack(&m.sq(k, t));
    }
    Ok(stacked.kernel())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub n: usize,
    pub t_max: usize,
    /// `ext[s][t] = dim Ext_U^s(Σ^t F_2, L'_n)` for `s = 0..=n + 1`.
    pub ext: Vec<Vec<usize>>,
    /// Dimension of the primitives of `I^s` in degree `t`.
    pub primitives: Vec<Vec<usize>>,
    /// Every differential induced on primitives vanishes. This is evidence
    /// for minimality, not a proof of it.
    pub differentials_vanish: bool,
    /// Primitives of `I^s` vanish above degree `2^s - 1`.
    pub primitives_bounded: bool,
    /// Nonzero entries `(s, t, dim)`.
    pub nonzero: Vec<(usize, usize, usize)>,
}

pub fn ext_u_table_of(res: &Resolution, t_max: usize) -> Result<ExtTable> {
    if t_max > res.cap {
        return Err(Error::OutOfRange {
            what: "t_max",
            value: t_max,
            bound: format!("<= cap = {}", res.cap),
        });
    }
    let n = res.n;
    let prims: Vec<Vec<Vec<BitVec>>> = res
        .terms
        .par_iter()
        .map(|term| {
            (0..=t_max)
                .map(|t| primitives(&term.module, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ext = vec![vec![0; t_max + 1]; n + 2];
    let mut differentials_vanish = true;
    let mut primitives_bounded = true;
    for t in 0..=t_max {
        // rank of the induced differential P^s -> P^{s+1}
        let out_rank: Vec<usize> = (0..=n)
            .map(|s| {
                if s == n {
                    return 0;
                }
                let f = res.maps[s + 1].matrix(t);
                let images: Vec<BitVec> = prims[s][t].iter().map(|v| f.mul_vec(v)).collect();
                if images.iter().any(|v| !v.is_zero()) {
                    differentials_vanish = false;
                }
                GF2Matrix::from_columns(&images, f.rows()).rank()
            })
            .collect();
        for s in 0..=n {
            let incoming = if s == 0 { 0 } else { out_rank[s - 1] };
            ext[s][t] = prims[s][t].len() - out_rank[s] - incoming;
            if t >= 1 << s && !prims[s][t].is_empty() {
                primitives_bounded = false;
            }
        }
    }
    let nonzero = (0..=n + 1)
        .flat_map(|s| (0..=t_max).map(move |t| (s, t)))
        .filter(|&(s, t)| ext[s][t] > 0)
        .map(|(s, t)| (s, t, ext[s][t]))
        .collect();
    let mut primitives: Vec<Vec<usize>> = prims
        .iter()
        .map(|p| p.iter().map(Vec::len).collect())
        .collect();
    primitives.push(vec![0; t_max + 1]);
    Ok(ExtTable {
        n,
        t_max,
        ext,
        primitives,
        differentials_vanish,
        primitives_bounded,
        nonzero,
    })
}

pub fn ext_u_table(n: usize, t_max: usize) -> Result<ExtTable> {
    ext_u_table_of(&Resolution::build(n, t_max)?, t_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brown_gitler::j_basis;
    use crate::series::{ell, mu, poincare};
    use proptest::prelude::*;

    #[test]
    fn tensor_terms() {
        let t = build_tensor_term(2, 1, 12).unwrap();
        assert_eq!(t.module.dims()[..2], [0, 0]);
        assert!(t.module.dims()[2..].iter().all(|&x| x == 1));
        assert!(t.module.check_polys().unwrap());
        let cap = 20;
        for n in 1..=3 {
            for s in 0..n {
                let a = build_tensor_term(n, s, cap).unwrap();
                let b = build_tensor_term(n, s + 1, cap).unwrap();
                for d in 0..=cap {
                    assert_eq!(a.a_set(d).len() + a.b_set(d).len(), a.module.dim(d));
                    assert_eq!(a.a_set(d).len(), b.b_set(d).len(), "n={n} s={s} d={d}");
                }
            }
        }
    }

    #[test]
    fn f_example() {
        let f = f_poly(2, 2).unwrap();
        let x2t = Poly::from_exponents(2, &[&[2, 1]]);
        // J(3) lives in t_0, t_1
        assert_eq!(f(&x2t), Poly::from_exponents(2, &[&[3, 0]]));
        let m = build_f(2, 2, 10).unwrap();
        assert_eq!(m.ranks()[3], 1);
    }

    #[test]
    fn complexes() {
        for n in 1..=2 {
            let r = verify_complex(n, 16).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = verify_complex(2, 16).unwrap();
        assert_eq!(r.pi_products.len(), 3);
        assert!(r
            .monomial_absence
            .iter()
            .any(|x| (x.a, x.b, x.i) == (5, 1, 2) && x.absent));
        // L_2 starts in degree 4
        assert_eq!(r.pi_products[0], PiProductCheck { i: 1, witness: None });
    }

    #[test]
    fn exactness() {
        let r = verify_exactness(1, 16).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_exactness(2, 16).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows[7].dims, vec![1, 2, 1, 0]);
        assert_eq!(r.rows[7].euler, 0);
    }

    #[test]
    fn takayasu() {
        let (t, r) = takayasu_complex(2, 16).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows[3].dims, vec![0, 0, 1, 1]);
        // δ_{1,2}: (i_1, 1) -> (i_1), (i_1, 3) -> 0
        let (src, tgt) = (&t.terms[0], &t.terms[1]);
        let at = |u: &TakayasuTerm, l: &[u32]| {
            let d = l.iter().sum::<u32>() as usize + u.shift();
            (d, u.labels[d].iter().position(|x| x == l).unwrap())
        };
        let (d, j) = at(src, &[5, 1]);
        let (d2, r2) = at(tgt, &[5]);
        assert_eq!(d, d2);
        assert_eq!(t.maps[1].matrix(d).column(j), BitVec::unit(tgt.labels[d].len(), r2));
        let (d, j) = at(src, &[7, 3]);
        assert!(t.maps[1].matrix(d).column(j).is_zero());
        let (_, r) = takayasu_complex(1, 12).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn primitive_examples() {
        for m in 1..=7 {
            let j = j_basis(m, 10).unwrap();
            for t in 0..=10 {
                let dim = primitives(&j, t).unwrap().len();
                assert_eq!(dim, usize::from(t == m), "J({m}) degree {t}");
            }
        }
        let t = build_tensor_term(2, 1, 16).unwrap();
        let l2 = build_steinberg(Flavor::L, 2, 16).unwrap();
        for d in 0..=16 {
            assert!(primitives(&t.module, d).unwrap().is_empty());
            assert!(primitives(&l2.module, d).unwrap().is_empty());
        }
        // the stored-matrix route, without polynomials
        let abstract_j = j_basis(3, 8).unwrap().suspend(0, 8);
        assert_eq!(primitives(&abstract_j, 3).unwrap().len(), 1);
    }

    #[test]
    fn ext_tables() {
        let e = ext_u_table(2, 16).unwrap();
        assert_eq!(e.nonzero, vec![(2, 3, 1)]);
        assert!(e.differentials_vanish && e.primitives_bounded);
        let e = ext_u_table(1, 12).unwrap();
        assert_eq!(e.nonzero, vec![(1, 1, 1)]);
    }

    #[test]
    fn terms_match_series() {
        let cap = 24;
        for n in 1..=3 {
            let res = Resolution::build(n, cap).unwrap();
            assert_eq!(poincare(&res.lprime), ell(n, cap).shift((1 << n) - 1));
            for (s, t) in res.terms.iter().enumerate() {
                assert_eq!(poincare(&t.module), &ell(n - s, cap) * &mu(s, cap), "n={n} s={s}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn tensor_dims_convolve(n in 1usize..=3, s in 0usize..=3, cap in 4usize..18) {
            prop_assume!(s <= n);
            let t = build_tensor_term(n, s, cap).unwrap();
            let l = build_steinberg(Flavor::L, n - s, cap).unwrap();
            let j = minc_sequences(s, cap);
            for d in 0..=cap {
                let conv: usize = (0..=d).map(|a| l.module.dim(a) * j[d - a].len()).sum();
                prop_assert_eq!(t.module.dim(d), conv);
                prop_assert_eq!(t.pairs[d].len(), conv);
            }
        }

    }
}
