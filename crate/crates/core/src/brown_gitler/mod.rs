//! Brown-Gitler modules `J(k)` inside Miller's algebra `J_* = F_2[t_0, t_1, ...]`
//! (`t_i` of degree 1 and weight `2^i`, `St(t_i) = t_i + t_{i-1}^2`).
//!
//! `J(k)` is spanned by the monomials of weight exactly `k`. The maps
//! `π_s: L_1 -> J(2^s)` come from the Hom solver; `g_s` multiplies their
//! values together.

mod presentation;
mod twisted;
mod witness;

pub use presentation::{
    is_minc_admissible, presentation_check, rewrite_admissible, PresentationReport,
    PresentationRow,
};
pub use twisted::{campbell_selick_check, CampbellSelickReport};
pub use witness::{generator_witness, lex_raise, target_monomial, witness_search, Raise};

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::gf2::{GF2Matrix, Monomial, Poly, MAX_VARS};
use crate::steenrod::{hom_space, Action, GradedMap, GradedModule, Morphism};
use crate::steinberg::{build_steinberg, positive_monomials, Flavor};
use crate::{Error, Result};

/// Number of Miller generators needed for weight `k`: `t_0, ..., t_{bits(k)-1}`.
pub fn generators_for_weight(k: usize) -> usize {
    (usize::BITS - k.leading_zeros()) as usize
}

/// Weight of a monomial in `J_*`.
pub fn weight(m: &Monomial) -> u64 {
    m.weight(0)
}

/// `t0^3 t1`-style name of a monomial in `J_*`.
pub fn bg_label(m: &Monomial) -> String {
    let parts: Vec<String> = (0..MAX_VARS)
        .filter(|&i| m.exp(i) > 0)
        .map(|i| match m.exp(i) {
            1 => format!("t{i}"),
            e => format!("t{i}^{e}"),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// Monomials of weight `k` and degree at most `cap`, by degree.
pub fn weight_monomials(k: usize, cap: usize) -> Vec<Vec<Monomial>> {
    fn go(h: usize, left: usize, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if h == 0 {
            // t_0 absorbs the rest
            exps[0] = left as u32;
            out.push(exps.clone());
            return;
        }
        for a in 0..=left >> h {
            exps[h] = a as u32;
            go(h - 1, left - (a << h), exps, out);
        }
        exps[h] = 0;
    }
    let nvars = generators_for_weight(k);
    let mut by_degree = vec![Vec::new(); cap + 1];
    if nvars == 0 {
        by_degree[0].push(Monomial::ONE);
        return by_degree;
    }
    let mut all = Vec::new();
    go(nvars - 1, k, &mut vec![0; nvars], &mut all);
    for e in all {
        let m = Monomial::new(&e);
        if m.degree() <= cap {
            by_degree[m.degree()].push(m);
        }
    }
    for v in &mut by_degree {
        v.sort();
    }
    by_degree
}

/// `J(k)` through degree `cap`, in the generators `t_0, ..., t_{bits(k)-1}`.
pub fn j_basis(k: usize, cap: usize) -> Result<GradedModule> {
    let nvars = generators_for_weight(k);
    let monos = weight_monomials(k, cap);
    let labels = monos
        .iter()
        .map(|v| v.iter().map(bg_label).collect())
        .collect();
    let basis = monos
        .into_iter()
        .map(|v| v.into_iter().map(|m| Poly::monomial(nvars, m)).collect())
        .collect();
    GradedModule::from_polys(nvars, Action::MILLER, cap, basis, Some(labels), Some(k))
}

/// `Ω_k`: sequences `0 < i_1 <= 2i_2 <= ⋯ <= 2^{k-1} i_k` with `i_k = 1`,
/// by degree `Σ i_j` up to `cap`, each degree in lexicographic order.
pub fn minc_sequences(k: usize, cap: usize) -> Vec<Vec<Vec<u32>>> {
    fn go(pos: usize, upper: u32, budget: usize, rev: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == 0 {
            out.push(rev.iter().rev().copied().collect());
            return;
        }
        for i in 1..=upper.min(budget as u32) {
            rev.push(i);
            go(pos - 1, 2 * i, budget - i as usize, rev, out);
            rev.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
    } else if cap >= 1 {
        let mut rev = vec![1];
        go(k - 1, 2, cap - 1, &mut rev, &mut out);
    }
    let mut by_degree = vec![Vec::new(); cap + 1];
    for s in out {
        let d: usize = s.iter().map(|&i| i as usize).sum();
        by_degree[d].push(s);
    }
    for v in &mut by_degree {
        v.sort();
    }
    by_degree
}

/// `α_0 = 2i_1 - 1`, `α_h = 2i_{h+1} - i_h`.
pub fn minc_to_exponents(seq: &[u32]) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(seq.len());
    for h in 0..seq.len() {
        let prev = if h == 0 { 1 } else { seq[h - 1] };
        let a = (2 * seq[h]).checked_sub(prev).ok_or_else(|| {
            Error::Falsified(format!("{seq:?} gives a negative exponent at t{h}"))
        })?;
        out.push(a);
    }
    Ok(out)
}

/// `i_h = (Σ_{j<h} α_j 2^j + 1) / 2^h`, if every quotient is an integer.
pub fn exponents_to_minc(alpha: &[u32]) -> Result<Vec<u32>> {
    let mut acc: u64 = 1;
    let mut out = Vec::with_capacity(alpha.len());
    for (h, &a) in alpha.iter().enumerate() {
        acc += (a as u64) << h;
        let d = 1u64 << (h + 1);
        if !acc.is_multiple_of(d) {
            return Err(Error::Falsified(format!(
                "{alpha:?}: i_{} is not an integer",
                h + 1
            )));
        }
        out.push((acc / d) as u32);
    }
    Ok(out)
}

/// The bijection between `Ω_k` and the degree-`d` monomials of
/// `J(2^k - 1)`, checked in both directions.
pub fn minc_bijection(k: usize, d: usize) -> Result<Vec<(Vec<u32>, Vec<u32>)>> {
    let target = (1usize << k) - 1;
    let monos = weight_monomials(target, d).swap_remove(d);
    let seqs = minc_sequences(k, d).swap_remove(d);
    let mut pairs = Vec::with_capacity(monos.len());
    for m in &monos {
        let alpha = m.exps(k);
        let seq = exponents_to_minc(&alpha)?;
        if !seqs.contains(&seq) {
            return Err(Error::Falsified(format!("{alpha:?} maps to {seq:?}, not in Ω_{k}")));
        }
        if minc_to_exponents(&seq)? != alpha {
            return Err(Error::Falsified(format!("{seq:?} does not map back to {alpha:?}")));
        }
        pairs.push((seq, alpha));
    }
    if pairs.len() != seqs.len() {
        return Err(Error::Falsified(format!(
            "degree {d}: {} monomials but {} sequences",
            pairs.len(),
            seqs.len()
        )));
    }
    pairs.sort();
    Ok(pairs)
}

/// Product in `J_*`, in the larger of the two rings.
pub fn bg_multiply(u: &Poly, v: &Poly) -> Poly {
    let n = u.nvars().max(v.nvars());
    &u.rename(n, |i| i) * &v.rename(n, |i| i)
}

/// The multiplication `left ⊗ right -> target` in the basis of
/// [`GradedModule::tensor`]. All three must be polynomial backed in `J_*`.
pub fn product_map(
    left: &GradedModule,
    right: &GradedModule,
    target: &GradedModule,
    cap: usize,
) -> Result<GradedMap> {
    let no_polys = || Error::DimensionMismatch("factor has no polynomials".into());
    let matrices = (0..=cap)
        .map(|d| {
            let mut cols = Vec::new();
            for a in 0..=d {
                let (l, r) = (left.polys(a).ok_or_else(no_polys)?, right.polys(d - a).ok_or_else(no_polys)?);
                for u in l {
                    for v in r {
                        // a product of the right weight only involves the target's generators
                        let w = bg_multiply(u, v).rename(target.nvars(), |i| i);
                        cols.push(target.coordinates(d, &w).ok_or_else(|| {
                            Error::Falsified(format!("{w} is not in the target"))
                        })?);
                    }
                }
            }
            Ok(GF2Matrix::from_columns(&cols, target.dim(d)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedMap {
        shift: 0,
        cap,
        matrices,
    })
}

/// The unique nonzero A-linear map `π_s: L_1 -> J(2^s)`, from the Hom solver,
/// with `x^{2^s} -> t_0^{2^s}`.
pub fn pi_map(s: usize, cap: usize) -> Result<Morphism> {
    let top = 1usize << s;
    if cap < top {
        return Err(Error::CapTooSmall {
            cap,
            reason: format!("π_{s} needs degree {top}"),
        });
    }
    let source = build_steinberg(Flavor::L, 1, cap)?.module;
    let target = j_basis(top, cap)?;
    let maps = hom_space(&source, &target)?;
    if maps.len() != 1 {
        return Err(Error::Falsified(format!(
            "Hom(L_1, J({top})) has dimension {}",
            maps.len()
        )));
    }
    let map = maps.into_iter().next().expect("one map");
    // the fundamental class is the only basis element in degree 2^s
    if map.matrix(top).is_zero() {
        return Err(Error::Falsified(format!("π_{s} vanishes on x^{top}")));
    }
    Ok(Morphism {
        source,
        target,
        map,
    })
}

/// `π_s(x^c)` for `c = 0, ..., 2^s`, as polynomials in `t_0, ..., t_s`.
/// Memoized.
pub fn pi_values(s: usize) -> Result<Vec<Poly>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<Poly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache poisoned").get(&s) {
        return Ok(v.clone());
    }
    let top = 1usize << s;
    let pi = pi_map(s, top)?;
    let values = (0..=top)
        .map(|c| {
            let col = pi.map.matrix(c).column(0);
            if pi.source.dim(c) == 0 {
                return Poly::zero(s + 1);
            }
            pi.target.element(c, &col).expect("target knows degree c")
        })
        .collect::<Vec<_>>();
    cache
        .lock()
        .expect("cache poisoned")
        .insert(s, values.clone());
    Ok(values)
}

/// `g_s = μ ∘ (π_{s-1} ⊗ ⋯ ⊗ π_0)` on `F_2[x_1, ..., x_s]`: `x_j` goes
/// through `π_{s-j}`.
#[derive(Clone, Debug)]
pub struct GMap {
    s: usize,
    pis: Vec<Vec<Poly>>,
}

impl GMap {
    pub fn new(s: usize) -> Result<GMap> {
        Ok(GMap {
            s,
            pis: (0..s).map(pi_values).collect::<Result<_>>()?,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `π_h(x^c)` in `t_0, ..., t_h`.
    pub fn pi(&self, h: usize, c: u32) -> Option<&Poly> {
        self.pis.get(h)?.get(c as usize)
    }

    /// `g_s(x_1^{a_1} ⋯ x_s^{a_s})` in `t_0, ..., t_{s-1}`.
    pub fn value(&self, exps: &[u32]) -> Poly {
        let s = self.s;
        assert_eq!(exps.len(), s);
        let mut acc = Poly::one(s);
        for (j, &a) in exps.iter().enumerate() {
            match self.pi(s - 1 - j, a) {
                Some(p) if !p.is_zero() => acc = &acc * &p.rename(s, |i| i),
                _ => return Poly::zero(s),
            }
        }
        acc
    }

    /// The linear extension of [`GMap::value`].
    pub fn apply(&self, p: &Poly) -> Poly {
        let terms = p
            .terms()
            .iter()
            .flat_map(|m| self.value(&m.exps(self.s)).terms().to_vec())
            .collect::<Vec<_>>();
        Poly::from_monomials(self.s, terms)
    }
}

/// `L_1^{⊗s}` as the ideal `(x_1 ⋯ x_s)`, with its monomial basis.
pub fn l1_tensor_power(s: usize, cap: usize) -> Result<GradedModule> {
    let basis = (0..=cap).map(|d| positive_monomials(s, d, 0, s)).collect();
    GradedModule::from_polys(s, Action::CLASSICAL, cap, basis, None, None)
}

/// `g_s: L_1^{⊗s} -> J(2^s - 1)` through degree `cap`.
pub fn g_map(s: usize, cap: usize) -> Result<Morphism> {
    if s == 0 {
        return Err(Error::OutOfRange {
            what: "s",
            value: s,
            bound: ">= 1".into(),
        });
    }
    let g = GMap::new(s)?;
    let source = l1_tensor_power(s, cap)?;
    let target = j_basis((1 << s) - 1, cap)?;
    let map = GradedMap::from_poly_images(&source, &target, cap, |p| g.apply(p))?;
    Ok(Morphism {
        source,
        target,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::sq_with;
    use proptest::prelude::*;

    fn t(exps: &[u32]) -> Poly {
        Poly::monomial(exps.len(), Monomial::new(exps))
    }

    #[test]
    fn j_examples() {
        let j1 = j_basis(1, 4).unwrap();
        assert_eq!(j1.dims(), vec![0, 1, 0, 0, 0]);
        assert_eq!(j1.polys(1).unwrap()[0], t(&[1]));
        let j3 = j_basis(3, 3).unwrap();
        assert_eq!(j3.dims(), vec![0, 0, 1, 1]);
        assert_eq!(j3.polys(2).unwrap()[0], t(&[1, 1]));
        assert_eq!(j3.polys(3).unwrap()[0], t(&[3, 0]));
        let j7 = j_basis(7, 7).unwrap();
        assert_eq!(&j7.dims()[3..], &[1, 2, 1, 1, 1]);
        assert!(j7.check_unstable().is_ok());
        assert!(j_basis(0, 2).unwrap().dims() == vec![1, 0, 0]);
    }

    #[test]
    fn minc_examples() {
        let pairs = minc_bijection(3, 3).unwrap();
        assert_eq!(pairs, vec![(vec![1, 1, 1], vec![1, 1, 1])]);
        let pairs = minc_bijection(2, 3).unwrap();
        assert_eq!(pairs, vec![(vec![2, 1], vec![3, 0])]);
        assert_eq!(minc_bijection(3, 4).unwrap().len(), 2);
        for k in 0..=5 {
            let top = (1 << k) - 1;
            let j = weight_monomials(top, top);
            let omega = minc_sequences(k, top);
            for d in 0..=top {
                assert_eq!(j[d].len(), omega[d].len(), "k = {k}, d = {d}");
                minc_bijection(k, d).unwrap();
            }
        }
    }

    #[test]
    fn multiplication() {
        assert_eq!(bg_multiply(&t(&[0, 1]), &t(&[1])), t(&[1, 1]));
        assert_eq!(bg_multiply(&t(&[2]), &t(&[1])), t(&[3]));
    }

    #[test]
    fn multiplication_is_the_unique_map() {
        let (j2, j1, j3) = (j_basis(2, 3).unwrap(), j_basis(1, 3).unwrap(), j_basis(3, 3).unwrap());
        let tensor = j2.tensor(&j1, 3);
        let maps = hom_space(&tensor, &j3).unwrap();
        assert_eq!(maps.len(), 1);
        let mu = product_map(&j2, &j1, &j3, 3).unwrap();
        assert_eq!(maps[0], mu);
        assert!(mu.is_linear(&tensor, &j3));
    }

    #[test]
    fn pi_examples() {
        let p0 = pi_values(0).unwrap();
        assert_eq!(p0[1], t(&[1]));
        let p1 = pi_values(1).unwrap();
        assert_eq!(p1[1], t(&[0, 1]));
        assert_eq!(p1[2], t(&[2, 0]));
        let p2 = pi_values(2).unwrap();
        assert_eq!(p2[1], t(&[0, 0, 1]));
        assert_eq!(p2[2], t(&[0, 2, 0]));
        assert_eq!(p2[3], t(&[2, 1, 0]));
        assert_eq!(p2[4], t(&[4, 0, 0]));
        let m = pi_map(2, 9).unwrap();
        assert!(m.is_linear());
        for d in 5..=9 {
            assert!(m.map.matrix(d).is_zero());
        }
    }

    #[test]
    fn pi_is_nonzero_up_to_the_fundamental_class() {
        // Sq^{low bit of c} x^c = x^{c + low bit}, so x^c reaches x^{2^s}
        for s in 0..=4 {
            let values = pi_values(s).unwrap();
            for c in 1..=1usize << s {
                assert!(!values[c].is_zero(), "s = {s}, c = {c}");
                for t in values[c].terms() {
                    assert_eq!(weight(t), 1 << s);
                }
            }
        }
    }

    #[test]
    fn g_examples() {
        let g = GMap::new(2).unwrap();
        assert_eq!(g.value(&[1, 1]), t(&[1, 1]));
        assert_eq!(g.value(&[2, 1]), t(&[3, 0]));
        assert!(g.value(&[1, 2]).is_zero());
        for s in 1..=4 {
            let top = (1 << s) - 1;
            let m = g_map(s, top).unwrap();
            assert!(m.is_linear());
            let ranks = m.map.ranks();
            assert_eq!(ranks, m.target.dims(), "g_{s} is onto");
        }
    }

    proptest! {
        #[test]
        fn squares_preserve_weight(exps in proptest::collection::vec(0u32..5, 4), k in 1usize..8) {
            let m = Monomial::new(&exps);
            let image = sq_with(Action::MILLER, k, &Poly::monomial(4, m));
            for term in image.terms() {
                prop_assert_eq!(weight(term), weight(&m));
            }
        }

        #[test]
        fn minc_round_trip(k in 1usize..6, pick in 0usize..1000) {
            let top = (1 << k) - 1;
            let all: Vec<Vec<u32>> = minc_sequences(k, top).into_iter().flatten().collect();
            let seq = &all[pick % all.len()];
            let alpha = minc_to_exponents(seq).unwrap();
            let w: u64 = alpha.iter().enumerate().map(|(h, &a)| (a as u64) << h).sum();
            prop_assert_eq!(w, top as u64);
            prop_assert_eq!(&exponents_to_minc(&alpha).unwrap(), seq);
        }
    }
}
