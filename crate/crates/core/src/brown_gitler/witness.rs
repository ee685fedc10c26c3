use crate::gf2::{Monomial, Poly};
use crate::matrix_algebra::{act, MatrixN, MAX_N};
use crate::{Error, Result};

/// `x_1^{2^{n-1}} ⋯ x_{n-1}^2 x_n`.
pub fn target_monomial(n: usize) -> Monomial {
    let exps: Vec<u32> = (0..n).map(|i| 1 << (n - 1 - i)).collect();
    Monomial::new(&exps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Raise {
    Admissible,
    /// `m(σ·P) > m(P)` in lexicographic order.
    Raised(MatrixN),
}

/// Coefficients `c[k]` of `a^k b^{D-k}` of a binary form of degree `D`.
type Form = Vec<bool>;

fn divide_by_a(c: &Form) -> Option<Form> {
    (!c[0]).then(|| c[1..].to_vec())
}

fn divide_by_b(c: &Form) -> Option<Form> {
    (!c[c.len() - 1]).then(|| c[..c.len() - 1].to_vec())
}

fn divide_by_sum(c: &Form) -> Option<Form> {
    // c_k = q_{k-1} + q_k
    let d = c.len() - 1;
    if d == 0 {
        return None;
    }
    let mut q = vec![false; d];
    let mut prev = false;
    for k in 0..d {
        q[k] = c[k] ^ prev;
        prev = q[k];
    }
    (prev == c[d]).then_some(q)
}

/// One step of raising the lexicographically largest monomial `m(P)` by a
/// substitution in two adjacent variables.
pub fn lex_raise(p: &Poly, n: usize) -> Result<Raise> {
    if !(1..=MAX_N).contains(&n) || p.nvars() != n {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            bound: format!("1 <= n <= {MAX_N}, matching the polynomial"),
        });
    }
    let Some(m) = p.lex_leading() else {
        return Err(Error::Falsified("the zero polynomial has no leading monomial".into()));
    };
    // 0-based: variables u = s - 1, v = s with 2 i_v > i_u
    let Some(v) = (1..n).find(|&s| 2 * m.exp(s) > m.exp(s - 1)) else {
        return Ok(Raise::Admissible);
    };
    let u = v - 1;
    let deg = (m.exp(u) + m.exp(v)) as usize;
    // Q(x_u, x_v): terms of P agreeing with m(P) outside u, v
    let mut form: Form = vec![false; deg + 1];
    for t in p.terms() {
        if (0..n).all(|i| i == u || i == v || t.exp(i) == m.exp(i)) {
            form[t.exp(u) as usize] ^= true;
        }
    }
    // strip ω_2 = ab(a+b) as often as possible
    loop {
        let next = divide_by_a(&form)
            .and_then(|f| divide_by_b(&f))
            .and_then(|f| divide_by_sum(&f));
        match next {
            Some(f) => form = f,
            None => break,
        }
    }
    let d = form.len() - 1;
    let sigma = if form[d] {
        return Err(Error::Falsified(format!(
            "Q' contains a pure power of x_{} although {m:?} is not admissible",
            u + 1
        )));
    } else if form[0] {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(u, v);
        MatrixN::permutation(&perm)
    } else {
        // x_v -> x_u + x_v
        MatrixN::transvection(n, u, v)
    };
    let image = act(&sigma, p)?;
    match image.lex_leading() {
        Some(m2) if m2.lex_cmp(&m).is_gt() => Ok(Raise::Raised(sigma)),
        _ => Err(Error::Falsified(format!(
            "substitution did not raise the leading monomial of {p}"
        ))),
    }
}

/// Some `σ` with `σ·P` containing [`target_monomial`], by exhaustive search.
pub fn witness_search(p: &Poly, n: usize) -> Option<MatrixN> {
    let target = target_monomial(n);
    MatrixN::all(n).find(|s| act(s, p).is_ok_and(|q| q.contains(&target)))
}

/// A matrix `σ` with `σ·P` containing `x_1^{2^{n-1}} ⋯ x_{n-1}^2 x_n`, for
/// nonzero `P` of degree `2^n - 1`. Follows the inductive construction:
/// raise `m(P)` until admissible, then substitute `x_1 -> x_1 + u` and recurse
/// on the coefficient of `x_1^{2^{n-1}}`.
pub fn generator_witness(p: &Poly, n: usize) -> Result<MatrixN> {
    let top = (1usize << n) - 1;
    if p.is_zero() || p.nvars() != n || !p.is_homogeneous() || p.degree() != Some(top) {
        return Err(Error::OutOfRange {
            what: "degree",
            value: p.degree().unwrap_or(0),
            bound: format!("nonzero and homogeneous of degree {top} in {n} variables"),
        });
    }
    let sigma = construct(p, n)?;
    let image = act(&sigma, p)?;
    if image.contains(&target_monomial(n)) {
        Ok(sigma)
    } else {
        Err(Error::Falsified(format!("constructed matrix is not a witness for {p}")))
    }
}

fn construct(p: &Poly, n: usize) -> Result<MatrixN> {
    if n == 1 {
        return Ok(MatrixN::identity(1));
    }
    let mut total = MatrixN::identity(n);
    if p.contains(&target_monomial(n)) {
        return Ok(total);
    }
    let mut current = p.clone();
    // m(σP) rises strictly, so this ends within the number of monomials
    while let Raise::Raised(s) = lex_raise(&current, n)? {
        current = act(&s, &current)?;
        total = s.mul(&total);
    }
    let half = 1u32 << (n - 1);
    if current.contains(&target_monomial(n)) {
        return Ok(total);
    }
    for mask in 1u8..1 << (n - 1) {
        let mut sigma_u = MatrixN::identity(n);
        for j in 1..n {
            if (mask >> (j - 1)) & 1 == 1 {
                sigma_u.set(j, 0, true);
            }
        }
        // with P = x_1^{half} f + R, Q = f(u, x_2, ..., x_n) is the
        // coefficient of x_1^{half} in σ_u·P
        let shifted = act(&sigma_u, &current)?;
        let q = shifted
            .coefficients_in(0)
            .remove(&half)
            .unwrap_or_else(|| Poly::zero(n));
        if q.is_zero() {
            continue;
        }
        let q_low = q.rename(n - 1, |i| i - 1);
        let tau = construct(&q_low, n - 1)?.embed(n, 1);
        return Ok(tau.mul(&sigma_u).mul(&total));
    }
    // P = x_1^{half} f + R with f(u, ...) = 0 for every u forces
    // f = ∏_u (x_1 + u), and then P contains the target, handled above
    Err(Error::Falsified(format!("no substitution x_1 -> x_1 + u works for {p}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVec;

    fn p(exps: &[&[u32]]) -> Poly {
        Poly::from_exponents(exps[0].len(), exps)
    }

    #[test]
    fn examples() {
        let t = Poly::monomial(3, target_monomial(3));
        assert_eq!(generator_witness(&t, 3).unwrap(), MatrixN::identity(3));
        let cube = p(&[&[3, 0]]);
        let s = generator_witness(&cube, 2).unwrap();
        assert!(act(&s, &cube).unwrap().contains(&target_monomial(2)));
        assert!(witness_search(&cube, 2).is_some());
        assert_eq!(lex_raise(&p(&[&[3, 1]]), 2).unwrap(), Raise::Admissible);
        let Raise::Raised(s) = lex_raise(&p(&[&[1, 2]]), 2).unwrap() else {
            panic!("x y^2 is not admissible");
        };
        // Q' = x y^2 has no pure power of y, so the transvection y -> x + y applies
        assert_eq!(s, MatrixN::transvection(2, 0, 1));
        let m = act(&s, &p(&[&[1, 2]])).unwrap().lex_leading().unwrap();
        assert_eq!(m, Monomial::new(&[3, 0]));
        let mut swap = p(&[&[1, 2], &[0, 3]]);
        swap = act(&MatrixN::permutation(&[1, 0]), &swap).unwrap();
        assert_eq!(swap.lex_leading(), Some(Monomial::new(&[3, 0])));
        let Raise::Raised(s) = lex_raise(&p(&[&[1, 2], &[0, 3]]), 2).unwrap() else {
            panic!("x y^2 + y^3 is not admissible");
        };
        assert_eq!(s, MatrixN::permutation(&[1, 0]));
    }

    #[test]
    fn every_cubic_in_two_variables() {
        let monos: Vec<Monomial> = (0..=3).map(|a| Monomial::new(&[a, 3 - a])).collect();
        for code in 1u32..16 {
            let bits = BitVec::from_indices(4, (0..4).filter(|b| (code >> b) & 1 == 1));
            let q = Poly::from_monomials(2, bits.ones().map(|i| monos[i]));
            assert!(witness_search(&q, 2).is_some(), "{q}");
            generator_witness(&q, 2).unwrap();
        }
    }

    #[test]
    fn random_septics_in_three_variables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let monos: Vec<Monomial> = (0..=7u32)
            .flat_map(|a| (0..=7 - a).map(move |b| Monomial::new(&[a, b, 7 - a - b])))
            .collect();
        for _ in 0..300 {
            let q = Poly::from_monomials(3, monos.iter().copied().filter(|_| rng.gen_bool(0.3)));
            if q.is_zero() {
                continue;
            }
            assert!(witness_search(&q, 3).is_some(), "{q}");
            generator_witness(&q, 3).unwrap();
        }
    }

    #[test]
    fn raising_is_strict() {
        let q = p(&[&[1, 3, 3], &[0, 4, 3], &[2, 2, 3]]);
        let mut cur = q;
        let mut seen = 0;
        while let Raise::Raised(s) = lex_raise(&cur, 3).unwrap() {
            let next = act(&s, &cur).unwrap();
            assert!(next.lex_leading().unwrap().lex_cmp(&cur.lex_leading().unwrap()).is_gt());
            cur = next;
            seen += 1;
            assert!(seen < 36);
        }
    }
}
