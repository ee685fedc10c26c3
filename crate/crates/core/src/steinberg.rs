//! Dickson and Mùi invariants and the Steinberg summands `M_n`, `L_n`,
//! `ω_n^j L_n` of `F_2[x_1, ..., x_n]`, with the basis
//! `e_n · ω_1^{i_1-2i_2} ⋯ ω_{n-1}^{i_{n-1}-2i_n} ω_n^{i_n}`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gf2::{GF2Matrix, Monomial, Poly, PolySpan, MAX_VARS};
use crate::matrix_algebra::{apply_steinberg, MAX_N};
use crate::steenrod::{sq, tensor_map, Action, GradedMap, GradedModule, Morphism};
use crate::{Error, Result};

/// The sum of the variables selected by `mask`, in a ring with `nvars`
/// variables.
fn linear_form(nvars: usize, mask: u32) -> Poly {
    Poly::from_monomials(
        nvars,
        (0..nvars)
            .filter(|j| (mask >> j) & 1 == 1)
            .map(Monomial::var),
    )
}

/// `ω_k` in the first `k` of `nvars` variables: the product of the nonzero
/// linear forms in `x_1, ..., x_k`.
fn omega_in(k: usize, nvars: usize) -> Poly {
    assert!(k <= nvars && nvars <= MAX_VARS);
    (1u32..1 << k).fold(Poly::one(nvars), |acc, mask| &acc * &linear_form(nvars, mask))
}

/// `ω_n`, of degree `2^n - 1`. `ω_0 = 1`.
pub fn omega(n: usize) -> Poly {
    omega_in(n, n)
}

/// `det(x_j^{2^{i-1}})`, the Moore determinant.
pub fn moore_determinant(n: usize) -> Poly {
    assert!(n <= MAX_VARS);
    // over F_2 the determinant is the permanent
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    Poly::from_monomials(
        n,
        perms(n).into_iter().map(|p| {
            let exps: Vec<u32> = (0..n).map(|j| 1 << p[j]).collect();
            Monomial::new(&exps)
        }),
    )
}

/// Mùi's `V_k = ∏_λ (λ_1 x_1 + ⋯ + λ_{k-1} x_{k-1} + x_k)` in `n` variables.
pub fn mui_v(k: usize, n: usize) -> Result<Poly> {
    if !(1..=n).contains(&k) || n > MAX_VARS {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            bound: format!("1 <= k <= n <= {MAX_VARS}"),
        });
    }
    let top = 1u32 << (k - 1);
    Ok((0..top).fold(Poly::one(n), |acc, lambda| {
        &acc * &linear_form(n, lambda | top)
    }))
}

/// The Dickson invariant `Q_{n,i}` of degree `2^n - 2^i`, read off from
/// `∏_{v ∈ F_2^n} (X + v·x) = X^{2^n} + Σ_i Q_{n,i} X^{2^i}`.
pub fn dickson_q(n: usize, i: usize) -> Result<Poly> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("1 <= n <= {MAX_N}"),
        });
    }
    if i >= n {
        return Err(Error::OutOfRange {
            what: "i",
            value: i,
            bound: format!("0 <= i <= {}", n - 1),
        });
    }
    let x = Poly::var(n + 1, n);
    let product = (0u32..1 << n).fold(Poly::one(n + 1), |acc, v| {
        &acc * &(&x + &linear_form(n + 1, v))
    });
    let coeff = product
        .coefficients_in(n)
        .remove(&(1 << i))
        .unwrap_or_else(|| Poly::zero(n + 1));
    Ok(coeff.rename(n, |j| j))
}

/// A label `(i_1, ..., i_m)` with `i_1 > 2i_2 > ⋯ > 2^{m-1} i_m >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OmegaLabel(Vec<u32>);

impl OmegaLabel {
    pub fn new(seq: Vec<u32>) -> Result<OmegaLabel> {
        if seq.len() > MAX_N {
            return Err(Error::OutOfRange {
                what: "label length",
                value: seq.len(),
                bound: format!("<= {MAX_N}"),
            });
        }
        if seq.windows(2).any(|w| w[0] <= 2 * w[1]) {
            return Err(Error::Falsified(format!(
                "{seq:?} violates i_j > 2 i_(j+1)"
            )));
        }
        Ok(OmegaLabel(seq))
    }

    pub fn seq(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&i| i as usize).sum()
    }

    /// The label of `ω_n^c` times this element: adds `c(2^{n-1}, ..., 2, 1)`.
    pub fn times_omega(&self, c: u32) -> OmegaLabel {
        let n = self.0.len();
        OmegaLabel(
            self.0
                .iter()
                .enumerate()
                .map(|(j, &i)| i + c * (1 << (n - 1 - j)))
                .collect(),
        )
    }

    /// `e_n · ω_1^{i_1-2i_2} ⋯ ω_n^{i_n}` in `n = len` variables.
    pub fn basis_poly(&self) -> Result<Poly> {
        let n = self.0.len();
        if n == 0 {
            return Ok(Poly::one(0));
        }
        let mut p = Poly::one(n);
        for j in 0..n {
            let e = self.0[j] - self.0.get(j + 1).map_or(0, |&next| 2 * next);
            if e > 0 {
                p = &p * &omega_in(j + 1, n).pow(e);
            }
        }
        apply_steinberg(n, &p)
    }
}

impl fmt::Display for OmegaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "w({})", parts.join(","))
    }
}

/// Admissible labels of length `n` with `i_n >= min_last`, by degree up to
/// `cap`, each degree in lexicographic order.
pub fn admissible_labels(n: usize, cap: usize, min_last: u32) -> Vec<Vec<OmegaLabel>> {
    fn go(
        pos: usize,
        lower: u32,
        budget: usize,
        suffix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == 0 {
            out.push(suffix.iter().rev().copied().collect());
            return;
        }
        let mut i = lower;
        while (i as usize) <= budget {
            suffix.push(i);
            go(pos - 1, 2 * i + 1, budget - i as usize, suffix, out);
            suffix.pop();
            i += 1;
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        go(n, min_last, cap, &mut Vec::new(), &mut out);
    }
    let mut by_degree: Vec<Vec<OmegaLabel>> = vec![Vec::new(); cap + 1];
    for seq in out {
        let l = OmegaLabel(seq);
        by_degree[l.degree()].push(l);
    }
    for v in &mut by_degree {
        v.sort();
    }
    by_degree
}

/// Which summand of `F_2[x_1, ..., x_n]` a [`SteinbergModule`] is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    M,
    L,
    /// `L'_n = ω_n L_n`.
    LPrime,
    /// `ω_n^j L_n`.
    OmegaL(u32),
    /// The ideal `D(n) ω_n^i` of the Dickson algebra.
    Dickson(u32),
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::M => write!(f, "M"),
            Flavor::L => write!(f, "L"),
            Flavor::LPrime => write!(f, "L'"),
            Flavor::OmegaL(j) => write!(f, "w^{j}L"),
            Flavor::Dickson(i) => write!(f, "D w^{i}"),
        }
    }
}

/// A labeled basis of a Steinberg summand together with its Steenrod squares.
///
/// For [`Flavor::Dickson`] a label is the exponent vector `(a_0, ..., a_{n-1})`
/// of `Q_{n,0}^{a_0} ⋯ Q_{n,n-1}^{a_{n-1}}`; otherwise it is an
/// [`OmegaLabel`] sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinbergModule {
    pub flavor: Flavor,
    pub n: usize,
    pub labels: Vec<Vec<Vec<u32>>>,
    pub module: GradedModule,
}

impl SteinbergModule {
    pub fn dims(&self) -> Vec<usize> {
        self.module.dims()
    }
}

fn check_size(n: usize, cap: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("<= {MAX_N}"),
        });
    }
    if n == MAX_N && cap > 15 {
        return Err(Error::OutOfRange {
            what: "cap",
            value: cap,
            bound: format!("<= 15 when n = {MAX_N}"),
        });
    }
    Ok(())
}

/// The trivial module `F_2` in degree 0, as a polynomial module in no
/// variables.
fn ground_field(flavor: Flavor, cap: usize) -> Result<SteinbergModule> {
    let mut basis = vec![Vec::new(); cap + 1];
    basis[0].push(Poly::one(0));
    let mut labels = vec![Vec::new(); cap + 1];
    labels[0].push("1".to_string());
    let module = GradedModule::from_polys(0, Action::CLASSICAL, cap, basis, Some(labels), Some(0))?;
    let mut raw = vec![Vec::new(); cap + 1];
    raw[0].push(Vec::new());
    Ok(SteinbergModule {
        flavor,
        n: 0,
        labels: raw,
        module,
    })
}

pub fn build_steinberg(flavor: Flavor, n: usize, cap: usize) -> Result<SteinbergModule> {
    check_size(n, cap)?;
    let j = match flavor {
        Flavor::Dickson(i) => return dickson_module(n, i, cap),
        Flavor::M | Flavor::L => 0,
        Flavor::LPrime => 1,
        Flavor::OmegaL(j) => j,
    };
    if n == 0 {
        // M_0 = L_0 = F_2 and ω_0 = 1
        return ground_field(flavor, cap);
    }
    let min_last = if flavor == Flavor::M { 0 } else { 1 };
    let shift = j as usize * ((1 << n) - 1);
    let base: Vec<OmegaLabel> = admissible_labels(n, cap.saturating_sub(shift), min_last)
        .into_iter()
        .flatten()
        .filter(|l| l.degree() + shift <= cap)
        .collect();
    let omega_j = omega(n).pow(j);
    let polys: Vec<(OmegaLabel, Poly)> = base
        .par_iter()
        .map(|l| {
            let p = l.basis_poly()?;
            Ok((l.times_omega(j), &p * &omega_j))
        })
        .collect::<Result<_>>()?;
    let mut basis = vec![Vec::new(); cap + 1];
    let mut names = vec![Vec::new(); cap + 1];
    let mut labels = vec![Vec::new(); cap + 1];
    for (l, p) in polys {
        let d = l.degree();
        if p.degree() != Some(d) {
            return Err(Error::Falsified(format!("basis element {l} is {p}, not of degree {d}")));
        }
        names[d].push(l.to_string());
        labels[d].push(l.0);
        basis[d].push(p);
    }
    let module = GradedModule::from_polys(n, Action::CLASSICAL, cap, basis, Some(names), None)?;
    Ok(SteinbergModule {
        flavor,
        n,
        labels,
        module,
    })
}

/// Exponent vectors `(a_0, ..., a_{n-1})` with `a_0 >= i` and
/// `Σ a_j (2^n - 2^j) <= cap`, by degree.
fn dickson_exponents(n: usize, i: u32, cap: usize) -> Vec<Vec<Vec<u32>>> {
    let degs: Vec<usize> = (0..n).map(|j| (1 << n) - (1 << j)).collect();
    let mut out = vec![Vec::new(); cap + 1];
    fn go(
        degs: &[usize],
        pos: usize,
        lower: u32,
        deg: usize,
        cap: usize,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if pos == degs.len() {
            out[deg].push(cur.clone());
            return;
        }
        let lo = if pos == 0 { lower } else { 0 };
        let mut a = lo;
        while deg + a as usize * degs[pos] <= cap {
            cur.push(a);
            go(degs, pos + 1, lower, deg + a as usize * degs[pos], cap, cur, out);
            cur.pop();
            a += 1;
        }
    }
    go(&degs, 0, i, 0, cap, &mut Vec::new(), &mut out);
    for v in &mut out {
        v.sort();
    }
    out
}

/// The ideal `D(n) ω_n^i`, with basis `ω_n^i Q_{n,0}^{a_0 - i} ⋯` labeled by
/// the Dickson exponents `a` (`a_0 >= i`). `n = 0` gives `F_2`.
pub fn dickson_module(n: usize, i: u32, cap: usize) -> Result<SteinbergModule> {
    check_size(n, cap)?;
    if n == 0 {
        return ground_field(Flavor::Dickson(i), cap);
    }
    let q: Vec<Poly> = (0..n).map(|j| dickson_q(n, j)).collect::<Result<_>>()?;
    let w = omega(n).pow(i);
    let labels = dickson_exponents(n, i, cap);
    let basis: Vec<Vec<Poly>> = labels
        .par_iter()
        .map(|per_degree| {
            per_degree
                .iter()
                .map(|a| {
                    a.iter().enumerate().fold(w.clone(), |acc, (j, &e)| {
                        let e = if j == 0 { e - i } else { e };
                        &acc * &q[j].pow(e)
                    })
                })
                .collect()
        })
        .collect();
    let names = labels
        .iter()
        .map(|v| {
            v.iter()
                .map(|a| {
                    let parts: Vec<String> = a.iter().map(u32::to_string).collect();
                    format!("Q({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let module = GradedModule::from_polys(n, Action::CLASSICAL, cap, basis, Some(names), None)?;
    Ok(SteinbergModule {
        flavor: Flavor::Dickson(i),
        n,
        labels,
        module,
    })
}

/// One degree of the comparison in [`verify_four_descriptions`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourDescriptionsRow {
    pub degree: usize,
    /// Dimensions of: the `L_n` basis span, `e_n·(x_1⋯x_n)`, `ω_n M_n`, and
    /// the intersection of the `MP(i)`.
    pub dims: [usize; 4],
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourDescriptionsReport {
    pub n: usize,
    pub cap: usize,
    pub rows: Vec<FourDescriptionsRow>,
    pub passed: bool,
}

/// Monomials of degree `d` in `k` variables with every exponent at least 1,
/// placed at variables `offset..offset + k` of a ring with `nvars` variables.
pub(crate) fn positive_monomials(k: usize, d: usize, offset: usize, nvars: usize) -> Vec<Poly> {
    fn go(k: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in 1..=d {
            if d - a < k - 1 {
                break;
            }
            cur.push(a as u32);
            go(k - 1, d - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, d, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|e| {
            let mut exps = vec![0u32; nvars];
            exps[offset..offset + k].copy_from_slice(&e);
            Poly::monomial(nvars, Monomial::new(&exps))
        })
        .collect()
}

/// Spanning elements of `L_1^{⊗i} ⊗ L_2 ⊗ L_1^{⊗(n-i-2)}` in degree `d`,
/// with the `L_2` factor on `x_{i+1}, x_{i+2}`. `l2` must know degree `d`.
pub(crate) fn mp_relations(n: usize, i: usize, d: usize, l2: &GradedModule) -> Vec<Poly> {
    let mut out = Vec::new();
    for e in 0..=d {
        for b in l2.polys(e).unwrap_or(&[]) {
            let b = b.shift(n, i);
            for rest in 0..=d - e {
                for u in positive_monomials(i, rest, 0, n) {
                    for v in positive_monomials(n - i - 2, d - e - rest, i + 2, n) {
                        out.push(&(&u * &b) * &v);
                    }
                }
            }
        }
    }
    out
}

/// Checks that four descriptions of `L_n` agree degreewise up to `cap`.
pub fn verify_four_descriptions(n: usize, cap: usize) -> Result<FourDescriptionsReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: "2 <= n <= 3".into(),
        });
    }
    let l = build_steinberg(Flavor::L, n, cap)?;
    let w = omega(n);
    let shift = (1 << n) - 1;
    let m = build_steinberg(Flavor::M, n, cap.saturating_sub(shift))?;
    let l2 = build_steinberg(Flavor::L, 2, cap)?;
    let rows = (0..=cap)
        .into_par_iter()
        .map(|d| {
            let a = PolySpan::from_polys(n, l.module.polys(d).unwrap_or(&[]));
            let mut b = PolySpan::new(n);
            for mono in positive_monomials(n, d, 0, n) {
                b.insert(&apply_steinberg(n, &mono)?);
            }
            let c = if d >= shift {
                let prods: Vec<Poly> = m
                    .module
                    .polys(d - shift)
                    .unwrap_or(&[])
                    .iter()
                    .map(|p| p * &w)
                    .collect();
                PolySpan::from_polys(n, &prods)
            } else {
                PolySpan::new(n)
            };
            let mut inter: Option<PolySpan> = None;
            for i in 0..n - 1 {
                let mp = PolySpan::from_polys(n, &mp_relations(n, i, d, &l2.module));
                inter = Some(match inter {
                    None => mp,
                    Some(s) => s.intersection(&mp),
                });
            }
            let dd = inter.expect("n >= 2");
            let dims = [a.dim(), b.dim(), c.dim(), dd.dim()];
            let agree = dims.iter().all(|&x| x == dims[0])
                && b.is_subspace_of(&a)
                && c.is_subspace_of(&a)
                && dd.is_subspace_of(&a);
            Ok(FourDescriptionsRow {
                degree: d,
                dims,
                agree,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.agree);
    Ok(FourDescriptionsReport {
        n,
        cap,
        rows,
        passed,
    })
}

fn tensor_of(left: &GradedModule, right: &GradedModule, cap: usize) -> GradedModule {
    left.tensor(right, cap)
}

/// The inclusion `δ: L_n -> L_k ⊗ L_{n-k}`.
pub fn coproduct(n: usize, k: usize, cap: usize) -> Result<Morphism> {
    if !(1..n).contains(&k) {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            bound: format!("1 <= k <= {}", n.saturating_sub(1)),
        });
    }
    let source = build_steinberg(Flavor::L, n, cap)?.module;
    let left = build_steinberg(Flavor::L, k, cap)?.module;
    let right = build_steinberg(Flavor::L, n - k, cap)?.module;
    let target = tensor_of(&left, &right, cap);
    let map = GradedMap::from_poly_images(&source, &target, cap, Poly::clone)?;
    Ok(Morphism {
        map,
        source,
        target,
    })
}

/// `(δ ⊗ id) δ = (id ⊗ δ) δ` on `L_3` up to `cap`, compared through the
/// product polynomials of the two triple tensor products. Also checks that
/// both composites are A-linear.
pub fn verify_coassociativity(cap: usize) -> Result<bool> {
    let l1 = build_steinberg(Flavor::L, 1, cap)?.module;
    let d12 = coproduct(3, 1, cap)?; // L_3 -> L_1 ⊗ L_2
    let d21 = coproduct(3, 2, cap)?; // L_3 -> L_2 ⊗ L_1
    let d11 = coproduct(2, 1, cap)?; // L_2 -> L_1 ⊗ L_1
    let id1 = GradedMap::identity(&l1);
    let right = tensor_map(&id1, (&l1, &l1), &d11.map, (&d11.source, &d11.target), cap);
    let left = tensor_map(&d11.map, (&d11.source, &d11.target), &id1, (&l1, &l1), cap);
    let t_right = tensor_of(&l1, &d11.target, cap);
    let t_left = tensor_of(&d11.target, &l1, cap);
    let via_right = right.compose(&d12.map);
    let via_left = left.compose(&d21.map);
    if !via_right.is_linear(&d12.source, &t_right) || !via_left.is_linear(&d21.source, &t_left) {
        return Ok(false);
    }
    for d in 0..=cap {
        let dim = d12.source.dim(d);
        for c in 0..dim {
            let e = crate::gf2::BitVec::unit(dim, c);
            let r = t_right.element(d, &via_right.matrix(d).mul_vec(&e));
            let l = t_left.element(d, &via_left.matrix(d).mul_vec(&e));
            let src = d12.source.element(d, &e);
            if r.is_none() || r != l || r != src {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecursionReport {
    pub label: Vec<u32>,
    /// The coefficient of `x_n^{i_n}` is the basis element for `(i_1, ..., i_{n-1})`.
    pub leading_matches: bool,
    /// Every other exponent of `x_n` exceeds `i_n`.
    pub higher_exponents: bool,
    /// Every other coefficient lies in `L_{n-1}`.
    pub tails_in_l: bool,
    pub passed: bool,
}

/// Expands a basis element in powers of `x_n`.
pub fn verify_label_recursion(label: &OmegaLabel) -> Result<LabelRecursionReport> {
    let n = label.len();
    if !(2..=3).contains(&n) || label.seq()[n - 1] == 0 {
        return Err(Error::OutOfRange {
            what: "label length",
            value: n,
            bound: "2 <= n <= 3 with i_n > 0".into(),
        });
    }
    let seq = label.seq();
    let p = label.basis_poly()?;
    let coeffs = p.coefficients_in(n - 1);
    let lower = OmegaLabel(seq[..n - 1].to_vec()).basis_poly()?;
    let i_n = seq[n - 1];
    let leading_matches = coeffs
        .get(&i_n)
        .is_some_and(|c| c.rename(n - 1, |j| j) == lower);
    let higher_exponents = coeffs.keys().all(|&e| e >= i_n);
    let max_deg = coeffs
        .values()
        .filter_map(Poly::degree)
        .max()
        .unwrap_or(0);
    let l = build_steinberg(Flavor::L, n - 1, max_deg)?;
    let tails_in_l = coeffs
        .iter()
        .filter(|(&e, _)| e != i_n)
        .all(|(_, c)| {
            let c = c.rename(n - 1, |j| j);
            let d = c.degree().unwrap_or(0);
            l.module.coordinates(d, &c).is_some()
        });
    Ok(LabelRecursionReport {
        label: seq.to_vec(),
        leading_matches,
        higher_exponents,
        tails_in_l,
        passed: leading_matches && higher_exponents && tails_in_l,
    })
}

/// `Σ_i x^{2^{n-1}-i} Sq^i V_n(x_1, ..., x_n) = V_{n+1}(x, x_1, ..., x_n)`.
pub fn verify_mui_total_square(n: usize) -> Result<bool> {
    if n + 1 > MAX_VARS {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("< {MAX_VARS}"),
        });
    }
    let v = mui_v(n, n)?.shift(n + 1, 1);
    let deg = 1usize << (n - 1);
    let x = Poly::var(n + 1, 0);
    let lhs = (0..=deg).fold(Poly::zero(n + 1), |acc, i| {
        &acc + &(&x.pow((deg - i) as u32) * &sq(i, &v))
    });
    Ok(lhs == mui_v(n + 1, n + 1)?)
}

/// One degree of the dimension count
/// `dim D(n)ω^{i-1} = dim D(n)ω^i + dim Σ^{i-1}Φ D(n-1)ω^{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DicksonCountRow {
    pub degree: usize,
    pub whole: usize,
    pub sub: usize,
    pub quotient: usize,
}

impl DicksonCountRow {
    pub fn holds(&self) -> bool {
        self.whole == self.sub + self.quotient
    }
}

pub fn dickson_short_exact_dims(n: usize, i: u32, cap: usize) -> Result<Vec<DicksonCountRow>> {
    if n == 0 || i == 0 {
        return Err(Error::OutOfRange {
            what: "n, i",
            value: n.min(i as usize),
            bound: ">= 1".into(),
        });
    }
    let whole = dickson_module(n, i - 1, cap)?;
    let sub = dickson_module(n, i, cap)?;
    let lower = dickson_module(n - 1, i - 1, cap / 2)?;
    let s = (i - 1) as usize;
    Ok((0..=cap)
        .map(|d| {
            let quotient = if d >= s && (d - s).is_multiple_of(2) {
                lower.module.dim((d - s) / 2)
            } else {
                0
            };
            DicksonCountRow {
                degree: d,
                whole: whole.module.dim(d),
                sub: sub.module.dim(d),
                quotient,
            }
        })
        .collect())
}

/// Matrix of multiplication by `ω_n^j` from `L_n` into `ω_n^j L_n`, degree
/// `d` to `d + j(2^n-1)`.
pub fn omega_multiplication(
    l: &SteinbergModule,
    target: &SteinbergModule,
    d: usize,
) -> Result<GF2Matrix> {
    let Flavor::OmegaL(j) = target.flavor else {
        return Err(Error::DimensionMismatch("target is not w^j L".into()));
    };
    let w = omega(l.n).pow(j);
    let e = d + j as usize * ((1 << l.n) - 1);
    let cols = l
        .module
        .polys(d)
        .unwrap_or(&[])
        .iter()
        .map(|p| {
            target
                .module
                .coordinates(e, &(p * &w))
                .ok_or_else(|| Error::Falsified(format!("w^{j} {p} is not in w^{j}L")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GF2Matrix::from_columns(&cols, target.module.dim(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_algebra::{act, MatrixN};

    fn p(exps: &[&[u32]]) -> Poly {
        Poly::from_exponents(exps[0].len(), exps)
    }

    fn gl_generators(n: usize) -> Vec<MatrixN> {
        let mut g = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.push(MatrixN::transvection(n, i, j));
                }
            }
        }
        g
    }

    /// Coefficients of `∏ 1/(1 - q^a)` times `q^shift`, up to `cap`.
    fn product_series(shift: usize, parts: &[usize], cap: usize) -> Vec<usize> {
        let mut c = vec![0usize; cap + 1];
        if shift <= cap {
            c[shift] = 1;
        }
        for &a in parts {
            for d in a..=cap {
                c[d] += c[d - a];
            }
        }
        c
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1), p(&[&[1]]));
        assert_eq!(omega(2), p(&[&[2, 1], &[1, 2]]));
        let w3 = omega(3);
        assert_eq!(w3.degree(), Some(7));
        assert!(w3.is_homogeneous());
        for n in 1..=3 {
            assert_eq!(omega(n), moore_determinant(n), "n = {n}");
            for g in gl_generators(n) {
                assert_eq!(act(&g, &omega(n)).unwrap(), omega(n));
            }
        }
    }

    #[test]
    fn mui_examples() {
        assert_eq!(mui_v(1, 1).unwrap(), p(&[&[1]]));
        assert_eq!(mui_v(2, 2).unwrap(), p(&[&[1, 1], &[0, 2]]));
        let prod = (1..=3).fold(Poly::one(3), |acc, k| &acc * &mui_v(k, 3).unwrap());
        assert_eq!(prod, omega(3));
        assert!(mui_v(0, 2).is_err());
        assert!(mui_v(3, 2).is_err());
    }

    #[test]
    fn dickson_examples() {
        assert_eq!(dickson_q(1, 0).unwrap(), p(&[&[1]]));
        for n in 1..=3 {
            assert_eq!(dickson_q(n, 0).unwrap(), omega(n), "Q_(n,0) = w_n for n = {n}");
            for i in 0..n {
                let q = dickson_q(n, i).unwrap();
                assert_eq!(q.degree(), Some((1 << n) - (1 << i)));
                for g in gl_generators(n) {
                    assert_eq!(act(&g, &q).unwrap(), q);
                }
                let swap = MatrixN::permutation(&(0..n).rev().collect::<Vec<_>>());
                assert_eq!(act(&swap, &q).unwrap(), q);
            }
        }
        assert!(dickson_q(2, 2).is_err());
    }

    #[test]
    fn label_enumeration() {
        let l = admissible_labels(2, 7, 1);
        let seqs: Vec<Vec<Vec<u32>>> = l
            .iter()
            .map(|v| v.iter().map(|x| x.seq().to_vec()).collect())
            .collect();
        assert_eq!(seqs[4], vec![vec![3, 1]]);
        assert_eq!(seqs[7], vec![vec![5, 2], vec![6, 1]]);
        assert!(OmegaLabel::new(vec![2, 1]).is_err());
        assert_eq!(
            OmegaLabel::new(vec![3, 1]).unwrap().times_omega(1).seq(),
            &[5, 2]
        );
    }

    #[test]
    fn m1_and_l2() {
        let m1 = build_steinberg(Flavor::M, 1, 10).unwrap();
        assert_eq!(m1.dims(), vec![1; 11]);
        let l2 = build_steinberg(Flavor::L, 2, 7).unwrap();
        assert_eq!(&l2.dims()[4..], &[1, 1, 1, 2]);
        assert_eq!(l2.module.polys(4).unwrap()[0], p(&[&[3, 1], &[2, 2]]));
    }

    #[test]
    fn basis_elements_are_fixed_by_e_n() {
        for n in 1..=3 {
            let m = build_steinberg(Flavor::M, n, 12).unwrap();
            for d in 0..=12 {
                for q in m.module.polys(d).unwrap() {
                    assert_eq!(&apply_steinberg(n, q).unwrap(), q);
                }
            }
        }
    }

    #[test]
    fn dimensions_follow_the_product_formulas() {
        let cap = 24;
        for n in 1..=3usize {
            let l = build_steinberg(Flavor::L, n, cap).unwrap();
            let parts: Vec<usize> = (1..=n).map(|i| (1 << i) - 1).collect();
            let shift: usize = parts.iter().sum();
            assert_eq!(l.dims(), product_series(shift, &parts, cap), "L_{n}");
            let lp = build_steinberg(Flavor::LPrime, n, cap).unwrap();
            assert_eq!(
                lp.dims(),
                product_series(shift + (1 << n) - 1, &parts, cap),
                "L'_{n}"
            );
            let m = build_steinberg(Flavor::M, n, cap).unwrap();
            let lower = build_steinberg(Flavor::L, n - 1, cap).unwrap();
            let sum: Vec<usize> = l.dims().iter().zip(lower.dims()).map(|(a, b)| a + b).collect();
            assert_eq!(m.dims(), sum, "M_{n} = L_{n} + L_{}", n - 1);
        }
    }

    #[test]
    fn omega_multiple_labels_agree_with_e_n() {
        let lp = build_steinberg(Flavor::OmegaL(2), 2, 20).unwrap();
        for d in 0..=20 {
            for (label, q) in lp.labels[d].iter().zip(lp.module.polys(d).unwrap()) {
                let direct = OmegaLabel::new(label.clone()).unwrap().basis_poly().unwrap();
                assert_eq!(&direct, q);
            }
        }
        let l = build_steinberg(Flavor::L, 2, 14).unwrap();
        let m = omega_multiplication(&l, &lp, 6).unwrap();
        assert_eq!(m.rank(), l.module.dim(6));
    }

    #[test]
    fn four_descriptions_for_two_variables() {
        let r = verify_four_descriptions(2, 12).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows[4].dims, [1, 1, 1, 1]);
    }

    #[test]
    fn four_descriptions_for_three_variables() {
        let r = verify_four_descriptions(3, 16).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows[11].dims, [1, 1, 1, 1]);
    }

    #[test]
    fn coproduct_splits_variables() {
        let c = coproduct(2, 1, 8).unwrap();
        let col = c.map.matrix(4).column(0);
        let images: Vec<&str> = col.ones().map(|i| c.target.labels(4)[i].as_str()).collect();
        assert_eq!(images.len(), 2);
        let polys: Vec<Poly> = col.ones().map(|i| c.target.polys(4).unwrap()[i].clone()).collect();
        assert!(polys.contains(&p(&[&[3, 1]])));
        assert!(polys.contains(&p(&[&[2, 2]])));
        assert!(c.map.is_linear(&c.source, &c.target));
        for d in 0..4 {
            assert_eq!(c.map.matrix(d).cols(), 0);
        }
    }

    #[test]
    fn coassociative_on_l3() {
        assert!(verify_coassociativity(14).unwrap());
    }

    #[test]
    fn label_recursion_examples() {
        for seq in [vec![3, 1], vec![5, 1], vec![7, 3, 1], vec![9, 3, 1], vec![8, 3]] {
            let r = verify_label_recursion(&OmegaLabel::new(seq.clone()).unwrap()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn mui_total_square() {
        for n in 1..=3 {
            assert!(verify_mui_total_square(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn dickson_dimensions() {
        let d1 = dickson_module(1, 3, 10).unwrap();
        let expect: Vec<usize> = (0..=10).map(|d| usize::from(d >= 3)).collect();
        assert_eq!(d1.dims(), expect);
        let d2 = dickson_module(2, 0, 24).unwrap();
        assert_eq!(d2.dims(), product_series(0, &[2, 3], 24));
        for i in 1..=4 {
            for row in dickson_short_exact_dims(2, i, 24).unwrap() {
                assert!(row.holds(), "i = {i}: {row:?}");
            }
        }
    }

    #[test]
    fn size_limits() {
        assert!(build_steinberg(Flavor::L, 4, 16).is_err());
        assert!(build_steinberg(Flavor::L, 4, 15).unwrap().module.total_dim() == 0);
        let m4 = build_steinberg(Flavor::M, 4, 15).unwrap();
        let l3 = build_steinberg(Flavor::L, 3, 15).unwrap();
        assert_eq!(m4.dims(), l3.dims());
        assert!(build_steinberg(Flavor::M, 5, 4).is_err());
    }
}
