use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GradedModule;
use crate::gf2::{BitVec, GF2Matrix, Poly};
use crate::{Error, Result};

/// A graded linear map raising degree by `shift`: `matrices[d]` sends the
/// source in degree `d` to the target in degree `d + shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedMap {
    pub shift: usize,
    pub cap: usize,
    pub matrices: Vec<GF2Matrix>,
}

impl GradedMap {
    pub fn zero(source: &GradedModule, target: &GradedModule, cap: usize) -> GradedMap {
        GradedMap {
            shift: 0,
            cap,
            matrices: (0..=cap)
                .map(|d| GF2Matrix::zeros(target.dim(d), source.dim(d)))
                .collect(),
        }
    }

    pub fn identity(m: &GradedModule) -> GradedMap {
        GradedMap {
            shift: 0,
            cap: m.cap(),
            matrices: (0..=m.cap()).map(|d| GF2Matrix::identity(m.dim(d))).collect(),
        }
    }

    /// The map between polynomial-backed modules induced by `f` on basis
    /// polynomials. Fails if some image is not in the target.
    pub fn from_poly_images(
        source: &GradedModule,
        target: &GradedModule,
        cap: usize,
        f: impl Fn(&Poly) -> Poly + Sync,
    ) -> Result<GradedMap> {
        let matrices = (0..=cap)
            .into_par_iter()
            .map(|d| {
                let basis = source
                    .polys(d)
                    .ok_or_else(|| Error::DimensionMismatch("source has no polynomials".into()))?;
                let cols = basis
                    .iter()
                    .map(|p| {
                        let image = f(p);
                        target.coordinates(d, &image).ok_or_else(|| {
                            Error::Falsified(format!("image of {p} is not in the target, degree {d}"))
                        })
                    })
                    .collect::<Result<Vec<BitVec>>>()?;
                Ok(GF2Matrix::from_columns(&cols, target.dim(d)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GradedMap {
            shift: 0,
            cap,
            matrices,
        })
    }

    pub fn matrix(&self, d: usize) -> &GF2Matrix {
        &self.matrices[d]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &GradedMap) -> GradedMap {
        let cap = self.cap.min(first.cap);
        let matrices = (0..=cap)
            .filter(|&d| d + first.shift <= self.cap)
            .map(|d| self.matrices[d + first.shift].mul(&first.matrices[d]))
            .collect::<Vec<_>>();
        GradedMap {
            shift: self.shift + first.shift,
            cap: matrices.len().saturating_sub(1),
            matrices,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrices.iter().all(GF2Matrix::is_zero)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.matrices.iter().map(GF2Matrix::rank).collect()
    }

    /// First `(k, d)` at which the map fails to commute with `Sq^k` out of
    /// degree `d`, checking every square known on both sides.
    pub fn first_noncommuting(
        &self,
        source: &GradedModule,
        target: &GradedModule,
    ) -> Option<(usize, usize)> {
        let cap = self.cap.min(source.cap());
        (0..=cap)
            .into_par_iter()
            .flat_map_iter(|d| (1..=cap - d).map(move |k| (k, d)))
            .filter(|&(k, d)| {
                let td = d + self.shift;
                if !target.knows(td + k) {
                    return false;
                }
                let lhs = self.matrices[d + k].mul(&source.sq(k, d));
                let rhs = target.sq(k, td).mul(&self.matrices[d]);
                lhs != rhs
            })
            .min_by_key(|&(k, d)| (d, k))
    }

    pub fn is_linear(&self, source: &GradedModule, target: &GradedModule) -> bool {
        self.first_noncommuting(source, target).is_none()
    }
}

/// A map together with its source and target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub source: GradedModule,
    pub target: GradedModule,
    pub map: GradedMap,
}

impl Morphism {
    pub fn is_linear(&self) -> bool {
        self.map.is_linear(&self.source, &self.target)
    }
}

/// A basis of the degree-preserving A-linear maps `M -> N`.
///
/// The unknowns are the entries of every degree's matrix; each stored square
/// contributes the linear equations `N.Sq^k F_d = F_{d+k} M.Sq^k`. Truncation
/// could admit spurious solutions unless `N` is known to vanish above the
/// common cap, so an unbounded `N` is rejected.
pub fn hom_space(m: &GradedModule, n: &GradedModule) -> Result<Vec<GradedMap>> {
    let Some(top) = n.top_degree() else {
        return Err(Error::CapTooSmall {
            cap: n.cap(),
            reason: "target module is not known to be bounded".into(),
        });
    };
    if m.cap() < top || n.cap() < top {
        return Err(Error::CapTooSmall {
            cap: m.cap().min(n.cap()),
            reason: format!("target has elements up to degree {top}"),
        });
    }
    // variables: entries (r, c) of F_d for d <= top, row-major within d
    let mut offset = vec![0usize; top + 2];
    for d in 0..=top {
        offset[d + 1] = offset[d] + n.dim(d) * m.dim(d);
    }
    let nunknowns = offset[top + 1];
    let var = |d: usize, r: usize, c: usize| offset[d] + r * m.dim(d) + c;
    let mut rows: Vec<BitVec> = Vec::new();
    for d in 0..=top {
        for k in 1..=m.cap() - d {
            let e = d + k;
            // equations live in Hom(M^d, N^e); both sides vanish once e > top
            if e > top || m.dim(d) == 0 || n.dim(e) == 0 {
                continue;
            }
            let nsq = n.sq(k, d);
            let msq = m.sq(k, d);
            for i in 0..n.dim(e) {
                for j in 0..m.dim(d) {
                    let mut row = BitVec::zeros(nunknowns);
                    // (N.Sq F_d)[i, j] = sum_r nsq[i, r] F_d[r, j]
                    for r in 0..n.dim(d) {
                        if nsq.get(i, r) {
                            row.flip(var(d, r, j));
                        }
                    }
                    // (F_e M.Sq)[i, j] = sum_c F_e[i, c] msq[c, j]
                    for c in 0..m.dim(e) {
                        if msq.get(c, j) {
                            row.flip(var(e, i, c));
                        }
                    }
                    if !row.is_zero() {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let system = GF2Matrix::from_rows(&rows, nunknowns);
    // N vanishes above `top`, so the maps are known through M's cap
    let cap = m.cap();
    let maps = system
        .kernel()
        .into_iter()
        .map(|v| {
            let matrices = (0..=cap)
                .map(|d| {
                    let mut f = GF2Matrix::zeros(n.dim(d), m.dim(d));
                    if d <= top {
                        for r in 0..n.dim(d) {
                            for c in 0..m.dim(d) {
                                if v.get(var(d, r, c)) {
                                    f.set(r, c, true);
                                }
                            }
                        }
                    }
                    f
                })
                .collect();
            GradedMap {
                shift: 0,
                cap,
                matrices,
            }
        })
        .collect::<Vec<_>>();
    for f in &maps {
        if !f.is_linear(m, n) {
            return Err(Error::Falsified("hom solver returned a non-linear map".into()));
        }
    }
    Ok(maps)
}

/// `f (x) g` as a map `M (x) N -> M' (x) N'`, in the bases produced by
/// [`GradedModule::tensor`].
pub fn tensor_map(
    f: &GradedMap,
    (m, m2): (&GradedModule, &GradedModule),
    g: &GradedMap,
    (n, n2): (&GradedModule, &GradedModule),
    cap: usize,
) -> GradedMap {
    assert_eq!(f.shift + g.shift, 0, "only degree-preserving maps are supported");
    let block = |a: &GradedModule, b: &GradedModule, d: usize| -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(d + 1);
        let mut acc = 0;
        for x in 0..=d {
            offsets.push(acc);
            acc += a.dim(x) * b.dim(d - x);
        }
        (offsets, acc)
    };
    let fmat = |x: usize| -> GF2Matrix {
        if x <= f.cap {
            f.matrices[x].clone()
        } else {
            assert!(m.dim(x) == 0 || m2.dim(x) == 0, "left map unknown in degree {x}");
            GF2Matrix::zeros(m2.dim(x), m.dim(x))
        }
    };
    let gmat = |x: usize| -> GF2Matrix {
        if x <= g.cap {
            g.matrices[x].clone()
        } else {
            assert!(n.dim(x) == 0 || n2.dim(x) == 0, "right map unknown in degree {x}");
            GF2Matrix::zeros(n2.dim(x), n.dim(x))
        }
    };
    let matrices = (0..=cap)
        .into_par_iter()
        .map(|d| {
            let (so, sdim) = block(m, n, d);
            let (to, tdim) = block(m2, n2, d);
            let mut out = GF2Matrix::zeros(tdim, sdim);
            for a in 0..=d {
                let b = d - a;
                if m.dim(a) == 0 || n.dim(b) == 0 || m2.dim(a) == 0 || n2.dim(b) == 0 {
                    continue;
                }
                let (fa, gb) = (fmat(a), gmat(b));
                let (nb, n2b) = (n.dim(b), n2.dim(b));
                for i in 0..m.dim(a) {
                    let fi: Vec<usize> = fa.column(i).ones().collect();
                    if fi.is_empty() {
                        continue;
                    }
                    for j in 0..nb {
                        let col = so[a] + i * nb + j;
                        for q in gb.column(j).ones() {
                            for &p in &fi {
                                out.flip(to[a] + p * n2b + q, col);
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    GradedMap {
        shift: 0,
        cap,
        matrices,
    }
}
