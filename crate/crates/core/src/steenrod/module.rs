use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{total_square_upto, Action};
use crate::gf2::{BitVec, GF2Matrix, Insert, Poly, PolySpan};
use crate::{Error, Result};

/// A graded vector space with the matrices of every Steenrod square, known
/// through degree `cap`.
///
/// `sq(k, d)` is the matrix of `Sq^k` from degree `d` to `d + k`; it is stored
/// whenever `d + k <= cap`. If the module is polynomial-backed, each basis
/// element also carries the polynomial it stands for, together with the action
/// on the ambient ring.
///
/// A module with `top_degree = Some(t)` and `t <= cap` is known to vanish above
/// `t`, so it is known in every degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedModule {
    cap: usize,
    top_degree: Option<usize>,
    nvars: usize,
    action: Option<Action>,
    labels: Vec<Vec<String>>,
    polys: Option<Vec<Vec<Poly>>>,
    // sq[d][k - 1] for 1 <= k <= cap - d
    sq: Vec<Vec<GF2Matrix>>,
    #[serde(skip)]
    spans: OnceLock<Vec<PolySpan>>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap
            && self.top_degree == other.top_degree
            && self.nvars == other.nvars
            && self.action == other.action
            && self.labels == other.labels
            && self.polys == other.polys
            && self.sq == other.sq
    }
}

impl Eq for GradedModule {}

fn homogeneous_basis(basis: &[Vec<Poly>]) -> Result<()> {
    for (d, b) in basis.iter().enumerate() {
        for p in b {
            p.check_homogeneous(d)?;
            if p.is_zero() {
                return Err(Error::Falsified(format!("zero basis element in degree {d}")));
            }
        }
    }
    Ok(())
}

impl GradedModule {
    pub fn zero(cap: usize) -> GradedModule {
        GradedModule::from_matrices(
            cap,
            Some(0),
            vec![Vec::new(); cap + 1],
            (0..=cap)
                .map(|d| (1..=cap - d).map(|_| GF2Matrix::zeros(0, 0)).collect())
                .collect(),
        )
        .expect("the zero module is well formed")
    }

    /// A polynomial-backed module. `basis[d]` must be linearly independent and
    /// homogeneous of degree `d`, and the span must be closed under every
    /// `Sq^k` that stays within `cap`.
    pub fn from_polys(
        nvars: usize,
        action: Action,
        cap: usize,
        basis: Vec<Vec<Poly>>,
        labels: Option<Vec<Vec<String>>>,
        top_degree: Option<usize>,
    ) -> Result<GradedModule> {
        if basis.len() != cap + 1 {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} degrees, expected {}",
                basis.len(),
                cap + 1
            )));
        }
        homogeneous_basis(&basis)?;
        let labels = match labels {
            Some(l) => {
                if l.len() != cap + 1 || l.iter().zip(&basis).any(|(a, b)| a.len() != b.len()) {
                    return Err(Error::DimensionMismatch("labels do not match basis".into()));
                }
                l
            }
            None => basis
                .iter()
                .map(|b| b.iter().map(|p| p.leading().unwrap().to_string()).collect())
                .collect(),
        };
        let mut spans = Vec::with_capacity(cap + 1);
        for (d, b) in basis.iter().enumerate() {
            let mut s = PolySpan::new(nvars);
            for p in b {
                if let Insert::Dependent(_) = s.insert(p) {
                    return Err(Error::Falsified(format!(
                        "basis elements in degree {d} are linearly dependent"
                    )));
                }
            }
            spans.push(s);
        }
        let sq: Vec<Vec<GF2Matrix>> = (0..=cap)
            .into_par_iter()
            .map(|d| {
                let mut per_k: Vec<Vec<BitVec>> = (1..=cap - d).map(|_| Vec::new()).collect();
                for p in &basis[d] {
                    let st = total_square_upto(action, p, cap - d);
                    for k in 1..=cap - d {
                        let image = st.get(&k).cloned().unwrap_or_else(|| Poly::zero(nvars));
                        let coords = spans[d + k].coordinates(&image).ok_or_else(|| {
                            Error::Falsified(format!(
                                "Sq^{k} of {p} leaves the span in degree {}",
                                d + k
                            ))
                        })?;
                        per_k[k - 1].push(coords);
                    }
                }
                Ok(per_k
                    .iter()
                    .enumerate()
                    .map(|(i, cols)| GF2Matrix::from_columns(cols, basis[d + i + 1].len()))
                    .collect())
            })
            .collect::<Result<_>>()?;
        let m = GradedModule {
            cap,
            top_degree,
            nvars,
            action: Some(action),
            labels,
            polys: Some(basis),
            sq,
            spans: OnceLock::new(),
        };
        let _ = m.spans.set(spans);
        m.check_top_degree()?;
        Ok(m)
    }

    /// An abstract module given by its Steenrod-square matrices.
    pub fn from_matrices(
        cap: usize,
        top_degree: Option<usize>,
        labels: Vec<Vec<String>>,
        sq: Vec<Vec<GF2Matrix>>,
    ) -> Result<GradedModule> {
        if labels.len() != cap + 1 || sq.len() != cap + 1 {
            return Err(Error::DimensionMismatch("degree count differs from cap".into()));
        }
        for d in 0..=cap {
            if sq[d].len() != cap - d {
                return Err(Error::DimensionMismatch(format!("missing squares in degree {d}")));
            }
            for (i, m) in sq[d].iter().enumerate() {
                let k = i + 1;
                if m.rows() != labels[d + k].len() || m.cols() != labels[d].len() {
                    return Err(Error::DimensionMismatch(format!(
                        "Sq^{k} on degree {d} has shape {}x{}",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        let m = GradedModule {
            cap,
            top_degree,
            nvars: 0,
            action: None,
            labels,
            polys: None,
            sq,
            spans: OnceLock::new(),
        };
        m.check_top_degree()?;
        Ok(m)
    }

    fn check_top_degree(&self) -> Result<()> {
        if let Some(t) = self.top_degree {
            if let Some(d) = (t + 1..=self.cap).find(|&d| self.dim(d) > 0) {
                return Err(Error::Falsified(format!(
                    "module declared zero above degree {t} has elements in degree {d}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.top_degree
    }

    /// True when the module is known to vanish above its cap.
    pub fn is_bounded(&self) -> bool {
        self.top_degree.is_some_and(|t| t <= self.cap)
    }

    /// Whether degree `d` is known.
    pub fn knows(&self, d: usize) -> bool {
        d <= self.cap || self.is_bounded()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn action(&self) -> Option<Action> {
        self.action
    }

    pub fn dim(&self, d: usize) -> usize {
        if d <= self.cap {
            self.labels[d].len()
        } else {
            assert!(self.is_bounded(), "degree {d} is above the cap {}", self.cap);
            0
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn labels(&self, d: usize) -> &[String] {
        &self.labels[d]
    }

    pub fn polys(&self, d: usize) -> Option<&[Poly]> {
        self.polys.as_ref().map(|p| p[d].as_slice())
    }

    pub fn is_poly_backed(&self) -> bool {
        self.polys.is_some()
    }

    /// The matrix of `Sq^k` from degree `d`, for `k >= 1`. Above a bounded
    /// module's cap the matrix is the (known) zero map.
    pub fn sq(&self, k: usize, d: usize) -> GF2Matrix {
        assert!(k >= 1, "Sq^0 is the identity and is not stored");
        if d + k <= self.cap {
            self.sq[d][k - 1].clone()
        } else {
            assert!(
                self.is_bounded(),
                "Sq^{k} from degree {d} is beyond the cap {}",
                self.cap
            );
            GF2Matrix::zeros(self.dim(d + k), self.dim(d))
        }
    }

    /// Borrowing access to a stored square.
    pub fn sq_ref(&self, k: usize, d: usize) -> &GF2Matrix {
        &self.sq[d][k - 1]
    }

    fn spans(&self) -> Option<&[PolySpan]> {
        let polys = self.polys.as_ref()?;
        Some(self.spans.get_or_init(|| {
            polys
                .iter()
                .map(|b| PolySpan::from_polys(self.nvars, b))
                .collect()
        }))
    }

    /// Coordinates of a homogeneous degree-`d` polynomial in the basis.
    pub fn coordinates(&self, d: usize, p: &Poly) -> Option<BitVec> {
        if d > self.cap {
            return (self.is_bounded() && p.is_zero()).then(|| BitVec::zeros(0));
        }
        self.spans()?[d].coordinates(p)
    }

    /// The polynomial with the given coordinates in degree `d`.
    pub fn element(&self, d: usize, coords: &BitVec) -> Option<Poly> {
        let basis = self.polys(d)?;
        let mut p = Poly::zero(self.nvars);
        for i in coords.ones() {
            p += &basis[i];
        }
        Some(p)
    }

    /// Instability: `Sq^k` vanishes on degree `d` whenever `k > d`.
    pub fn check_unstable(&self) -> std::result::Result<(), (usize, usize)> {
        for d in 0..=self.cap {
            for k in d + 1..=self.cap - d {
                if !self.sq[d][k - 1].is_zero() {
                    return Err((k, d));
                }
            }
        }
        Ok(())
    }

    /// For polynomial-backed modules, recomputes every square from the
    /// polynomials and compares with the stored matrices.
    pub fn check_polys(&self) -> Result<bool> {
        let (Some(action), Some(_)) = (self.action, &self.polys) else {
            return Ok(true);
        };
        for d in 0..=self.cap {
            for (j, p) in self.polys(d).unwrap().iter().enumerate() {
                for k in 1..=self.cap - d {
                    let image = super::sq_with(action, k, p);
                    let stored = self.element(d + k, &self.sq[d][k - 1].column(j)).unwrap();
                    if image != stored {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The same module known only through `cap`.
    pub fn truncate(&self, cap: usize) -> GradedModule {
        assert!(cap <= self.cap);
        GradedModule {
            cap,
            top_degree: self.top_degree,
            nvars: self.nvars,
            action: self.action,
            labels: self.labels[..=cap].to_vec(),
            polys: self.polys.as_ref().map(|p| p[..=cap].to_vec()),
            sq: (0..=cap).map(|d| self.sq[d][..cap - d].to_vec()).collect(),
            spans: OnceLock::new(),
        }
    }

    /// `Sigma^shift M`: the same matrices moved up by `shift` degrees.
    /// Polynomials are dropped since they no longer sit in the right degree.
    pub fn suspend(&self, shift: usize, cap: usize) -> GradedModule {
        assert!(cap <= self.cap + shift || self.is_bounded());
        let mut labels = vec![Vec::new(); cap + 1];
        for d in shift..=cap {
            if self.knows(d - shift) {
                labels[d] = self.labels.get(d - shift).cloned().unwrap_or_default();
            }
        }
        let sq = (0..=cap)
            .map(|d| {
                (1..=cap - d)
                    .map(|k| {
                        if d < shift {
                            GF2Matrix::zeros(labels[d + k].len(), 0)
                        } else {
                            self.sq(k, d - shift)
                        }
                    })
                    .collect()
            })
            .collect();
        GradedModule::from_matrices(cap, self.top_degree.map(|t| t + shift), labels, sq)
            .expect("suspension preserves shapes")
    }

    /// `M (x) N` through `cap`, with squares given by the Cartan formula.
    ///
    /// Basis order in degree `d`: by the degree `a` of the left factor, then
    /// the left index, then the right index. If both factors are polynomial
    /// backed in compatible rings (classical on the left, classical or Miller
    /// on the right), the product polynomials in the joint ring are kept.
    pub fn tensor(&self, other: &GradedModule, cap: usize) -> GradedModule {
        assert!(
            (cap <= self.cap || self.is_bounded()) && (cap <= other.cap || other.is_bounded()),
            "tensor cap {cap} exceeds a factor's cap"
        );
        // offsets[d][a] = index of the first basis element with left degree a
        let offsets: Vec<Vec<usize>> = (0..=cap)
            .map(|d| {
                let mut acc = 0;
                (0..=d)
                    .map(|a| {
                        let o = acc;
                        acc += self.dim(a) * other.dim(d - a);
                        o
                    })
                    .collect()
            })
            .collect();
        let dim = |d: usize| (0..=d).map(|a| self.dim(a) * other.dim(d - a)).sum::<usize>();
        let labels: Vec<Vec<String>> = (0..=cap)
            .map(|d| {
                let mut l = Vec::with_capacity(dim(d));
                for a in 0..=d {
                    if self.dim(a) == 0 || other.dim(d - a) == 0 {
                        continue;
                    }
                    for u in self.label_iter(a) {
                        for v in other.label_iter(d - a) {
                            l.push(format!("{u} ⊗ {v}"));
                        }
                    }
                }
                l
            })
            .collect();
        let sq: Vec<Vec<GF2Matrix>> = (0..=cap)
            .into_par_iter()
            .map(|d| {
                (1..=cap - d)
                    .map(|k| {
                        let mut m = GF2Matrix::zeros(dim(d + k), dim(d));
                        for a in 0..=d {
                            let b = d - a;
                            let (da, db) = (self.dim(a), other.dim(b));
                            if da == 0 || db == 0 {
                                continue;
                            }
                            for r in 0..=k.min(a) {
                                let s = k - r;
                                if s > b {
                                    continue;
                                }
                                let left = if r == 0 { None } else { Some(self.sq(r, a)) };
                                let right = if s == 0 { None } else { Some(other.sq(s, b)) };
                                let (ta, tb) = (a + r, b + s);
                                let tdb = other.dim(tb);
                                let base = offsets[d + k][ta];
                                for i in 0..da {
                                    let li: Vec<usize> = match &left {
                                        None => vec![i],
                                        Some(mat) => mat.column(i).ones().collect(),
                                    };
                                    for j in 0..db {
                                        let rj: Vec<usize> = match &right {
                                            None => vec![j],
                                            Some(mat) => mat.column(j).ones().collect(),
                                        };
                                        let col = offsets[d][a] + i * db + j;
                                        for &p in &li {
                                            for &q in &rj {
                                                m.flip(base + p * tdb + q, col);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let top = match (self.top_degree, other.top_degree) {
            (Some(s), Some(t)) => Some(s + t),
            _ => None,
        };
        let mut out = GradedModule::from_matrices(cap, top, labels, sq)
            .expect("tensor product shapes are consistent");
        if let Some((nvars, action, polys)) = self.tensor_polys(other, cap) {
            out.nvars = nvars;
            out.action = Some(action);
            out.polys = Some(polys);
        }
        out
    }

    fn label_iter(&self, d: usize) -> impl Iterator<Item = &String> {
        self.labels.get(d).into_iter().flatten()
    }

    fn tensor_polys(
        &self,
        other: &GradedModule,
        cap: usize,
    ) -> Option<(usize, Action, Vec<Vec<Poly>>)> {
        let (Some(Action::Standard { classical: c1 }), Some(Action::Standard { classical: c2 })) =
            (self.action, other.action)
        else {
            return None;
        };
        self.polys.as_ref()?;
        other.polys.as_ref()?;
        // left factor must be purely classical
        if c1 < self.nvars {
            return None;
        }
        let nvars = self.nvars + other.nvars;
        if nvars > crate::gf2::MAX_VARS {
            return None;
        }
        let action = if c2 >= other.nvars {
            Action::CLASSICAL
        } else if c2 == 0 {
            Action::Standard {
                classical: self.nvars,
            }
        } else {
            return None;
        };
        let empty: Vec<Poly> = Vec::new();
        let polys = (0..=cap)
            .map(|d| {
                let mut out = Vec::new();
                for a in 0..=d {
                    let lp = if a <= self.cap { self.polys(a).unwrap() } else { &empty[..] };
                    let rp = if d - a <= other.cap { other.polys(d - a).unwrap() } else { &empty[..] };
                    for u in lp {
                        let u = u.shift(nvars, 0);
                        for v in rp {
                            out.push(&u * &v.shift(nvars, self.nvars));
                        }
                    }
                }
                out
            })
            .collect();
        Some((nvars, action, polys))
    }
}

/// The smallest sub-module containing `generators` and closed under every
/// `Sq^k` within `cap`. Each degree gets its fully reduced echelon basis, so
/// the result does not depend on the order of the generators.
pub fn close_under_action(
    nvars: usize,
    generators: &[Poly],
    cap: usize,
    action: Action,
) -> Result<GradedModule> {
    let mut spans: Vec<PolySpan> = (0..=cap).map(|_| PolySpan::new(nvars)).collect();
    let mut queue: Vec<Poly> = Vec::new();
    for g in generators {
        let Some(d) = g.degree() else { continue };
        g.check_homogeneous(d)?;
        if d > cap {
            return Err(Error::CapTooSmall {
                cap,
                reason: format!("generator {g} has degree {d}"),
            });
        }
        if let Insert::Independent(_) = spans[d].insert(g) {
            queue.push(g.clone());
        }
    }
    while let Some(p) = queue.pop() {
        let d = p.degree().unwrap();
        for (k, image) in total_square_upto(action, &p, cap - d) {
            if k == 0 {
                continue;
            }
            if let Insert::Independent(_) = spans[d + k].insert(&image) {
                queue.push(image);
            }
        }
    }
    let basis = spans.iter().map(PolySpan::reduced_basis).collect();
    GradedModule::from_polys(nvars, action, cap, basis, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_x() {
        let m = close_under_action(1, &[Poly::var(1, 0)], 8, Action::CLASSICAL).unwrap();
        assert_eq!(m.dims(), vec![0, 1, 1, 0, 1, 0, 0, 0, 1]);
        assert_eq!(m.polys(8).unwrap()[0], Poly::from_exponents(1, &[&[8]]));
    }

    #[test]
    fn closure_of_the_l2_generator() {
        let g = Poly::from_exponents(2, &[&[3, 1], &[2, 2]]);
        let m = close_under_action(2, &[g], 7, Action::CLASSICAL).unwrap();
        assert_eq!(&m.dims()[4..], &[1, 1, 1, 2]);
        assert!(m.check_polys().unwrap());
        assert!(m.check_unstable().is_ok());
    }

    #[test]
    fn empty_closure_is_zero() {
        let m = close_under_action(2, &[], 5, Action::CLASSICAL).unwrap();
        assert_eq!(m.total_dim(), 0);
    }

    #[test]
    fn generator_above_cap_is_rejected() {
        let g = Poly::from_exponents(1, &[&[6]]);
        assert!(matches!(
            close_under_action(1, &[g], 5, Action::CLASSICAL),
            Err(Error::CapTooSmall { .. })
        ));
    }

    #[test]
    fn tensor_matches_product_polynomials() {
        let x = close_under_action(1, &[Poly::var(1, 0)], 9, Action::CLASSICAL).unwrap();
        let x3 = close_under_action(1, &[Poly::from_exponents(1, &[&[3]])], 9, Action::CLASSICAL)
            .unwrap();
        let t = x.tensor(&x3, 9);
        assert!(t.is_poly_backed());
        assert!(t.check_polys().unwrap());
    }

    #[test]
    fn suspension_shifts_dimensions() {
        let x = close_under_action(1, &[Poly::var(1, 0)], 8, Action::CLASSICAL).unwrap();
        let s = x.suspend(3, 8);
        assert_eq!(s.dims(), vec![0, 0, 0, 0, 1, 1, 0, 1, 0]);
        assert_eq!(s.sq(1, 4), x.sq(1, 1));
    }
}
