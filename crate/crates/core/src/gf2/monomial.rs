use std::cmp::Ordering;
use std::fmt;

/// Largest number of variables any computation here needs (four classical
/// variables plus up to four Brown-Gitler generators).
pub const MAX_VARS: usize = 8;

/// An exponent vector `x_1^{e_1} ... x_k^{e_k}`.
///
/// Ordering is graded first, then lexicographic with `x_1` most significant,
/// so within one degree `x_1^3 x_2 > x_1^2 x_2^2 > x_1 x_2^3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    // Field order matters: the derived `Ord` is the global monomial order.
    degree: u32,
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        degree: 0,
        exps: [0; MAX_VARS],
    };

    pub fn new(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many variables: {}", exps.len());
        let mut m = Monomial::ONE;
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = u16::try_from(e).expect("exponent overflow");
            m.degree += e;
        }
        m
    }

    pub fn var(i: usize) -> Monomial {
        Monomial::ONE.with_exp(i, 1)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exps(&self, nvars: usize) -> Vec<u32> {
        self.exps[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn with_exp(mut self, i: usize, e: u32) -> Monomial {
        self.degree = self.degree - self.exps[i] as u32 + e;
        self.exps[i] = u16::try_from(e).expect("exponent overflow");
        self
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        out.degree += other.degree;
        out
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_sub(other.exps[i])?;
        }
        out.degree -= other.degree;
        Some(out)
    }

    /// Highest index with a nonzero exponent, plus one.
    pub fn support_len(&self) -> usize {
        self.exps
            .iter()
            .rposition(|&e| e != 0)
            .map_or(0, |i| i + 1)
    }

    /// Pure lexicographic comparison, ignoring degree.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.exps.cmp(&other.exps)
    }

    /// Weight with respect to `w(v_i) = 2^(i - offset)` for `i >= offset`;
    /// variables below `offset` contribute nothing.
    pub fn weight(&self, offset: usize) -> u64 {
        (offset..MAX_VARS)
            .map(|i| (self.exps[i] as u64) << (i - offset))
            .sum()
    }

    /// Moves exponent `i` to position `map(i)`; positions not hit become 0.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Monomial {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            if self.exps[i] != 0 {
                let j = map(i);
                out.exps[j] += self.exps[i];
            }
        }
        out.degree = self.degree;
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..self.support_len()])
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_then_lex() {
        let a = Monomial::new(&[3, 1]);
        let b = Monomial::new(&[2, 2]);
        let c = Monomial::new(&[0, 5]);
        assert!(a > b);
        assert!(c > a, "higher degree wins");
        let mut v = vec![b, c, a];
        v.sort();
        assert_eq!(v, vec![b, a, c]);
    }

    #[test]
    fn degree_tracks_exponents() {
        let m = Monomial::new(&[1, 2, 3]).with_exp(1, 7);
        assert_eq!(m.degree(), 11);
        assert_eq!(m.mul(&Monomial::var(3)).degree(), 12);
        assert_eq!(m.div(&Monomial::new(&[1, 7])).unwrap(), Monomial::new(&[0, 0, 3]));
        assert!(m.div(&Monomial::new(&[2])).is_none());
    }

    #[test]
    fn weight() {
        // t0^3 t1 t2^2 has weight 3 + 2 + 8
        assert_eq!(Monomial::new(&[3, 1, 2]).weight(0), 13);
        assert_eq!(Monomial::new(&[5, 3, 1, 2]).weight(1), 13);
    }
}
