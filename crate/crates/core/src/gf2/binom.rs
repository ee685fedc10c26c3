/// `C(a, b) mod 2` by Lucas' theorem: odd exactly when the binary digits of
/// `b` are a subset of those of `a`. Returns 0 for `b > a`.
#[inline]
pub fn binom_mod2(a: u64, b: u64) -> bool {
    a & b == b
}
