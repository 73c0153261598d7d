//! Scalar aliases and small constructors used throughout the crate.
//!
//! All algebraic data (measures, convolution coefficients) is kept in
//! arbitrary-precision rationals so that every identity in the library is
//! decided exactly, never up to a tolerance.

use num::complex::Complex;
use num::{BigInt, BigRational, One, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Exact complex-rational scalar, the coefficient field of the convolution
/// algebras.
pub type CRat = Complex<Rat>;

/// The rational `n / d`. Panics if `d == 0`; intended for literals in tests
/// and generators where the denominator is a known constant.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The complex rational `n / d` (purely real).
pub fn crat(n: i64, d: i64) -> CRat {
    CRat::new(rat(n, d), Rat::zero())
}

/// Embeds a real rational as a complex scalar.
pub fn real(r: Rat) -> CRat {
    CRat::new(r, Rat::zero())
}

/// Complex conjugate.
pub fn conj(z: &CRat) -> CRat {
    CRat::new(z.re.clone(), -z.im.clone())
}

/// Renders a complex rational the way the CLI and error messages expect:
/// `re` when the imaginary part vanishes, `re+im*i` (or `re-im*i`) otherwise.
pub fn fmt_crat(z: &CRat) -> String {
    if z.im.is_zero() {
        format!("{}", z.re)
    } else if z.re.is_zero() {
        format!("{}i", z.im)
    } else if z.im >= Rat::zero() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// `1` as a complex rational.
pub fn one() -> CRat {
    CRat::new(Rat::one(), Rat::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_follows_sign_conventions() {
        assert_eq!(fmt_crat(&crat(1, 8)), "1/8");
        assert_eq!(fmt_crat(&CRat::new(rat(1, 2), rat(-1, 3))), "1/2-1/3i");
        assert_eq!(fmt_crat(&CRat::new(Rat::zero(), rat(2, 1))), "2i");
        assert_eq!(fmt_crat(&crat(0, 1)), "0");
    }
}
