//! Scalar arithmetic: exact rationals, the field Q(i) of Gaussian
//! rationals, exact square roots in Q(i), and correctly rounded
//! conversion of rationals to binary floating point of any precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds `n/d` exactly. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "rat: zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parses `"p/q"` or a bare integer `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num_str.trim()).map_err(|_| bad())?;
    let d = BigInt::from_str(den_str.trim()).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Formats a rational as `"p/q"`, always including the denominator, so
/// that output is stable to parse and compare as bytes.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serde adapter serializing a [`Rational`] field as a `"p/q"` string
/// and accepting either such a string or a bare JSON integer.
pub mod rat_str {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RatRepr {
        Int(i64),
        Str(String),
    }

    impl RatRepr {
        pub(crate) fn into_rational(self) -> Result<Rational> {
            match self {
                RatRepr::Int(n) => Ok(rat_int(n)),
                RatRepr::Str(s) => parse_rational(&s),
            }
        }
    }

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let repr = RatRepr::deserialize(d)?;
        repr.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Element `re + im*i` of the field Q(i).
///
/// Both parts are exact rationals; equality and hashing are exact. The
/// field has no useful total order, so no `Ord` instance is provided;
/// [`GaussianRational::cmp_lex`] gives a deterministic ordering for
/// canonical sorting.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational::from_rational(rat_int(n))
    }

    /// Builds `(a + b*i) / d` from integers. Panics if `d == 0`.
    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        GaussianRational::new(rat(a, d), rat(b, d))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// `|x|^2 = re^2 + im^2`, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact rational upper bound on `|x|`: `|re| + |im|`.
    pub fn abs_upper(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }

    /// Exact rational lower bound on `|x|`: `max(|re|, |im|)`.
    pub fn abs_lower(&self) -> Rational {
        self.re.abs().max(self.im.abs())
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    /// Division with an error instead of a panic on zero divisor.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Lexicographic comparison by `(re, im)`; a deterministic order
    /// for canonical sorting, with no metric meaning.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Nearest complex float, both parts correctly rounded to 53 bits.
    pub fn to_complex64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Rounds both parts to `bits` of precision, returning an exact
    /// rational approximation with `|x - round(x)|` at most
    /// `2^(1-bits) * |x|` componentwise.
    pub fn round_to_bits(&self, bits: u32) -> Self {
        GaussianRational::new(round_to_bits(&self.re, bits), round_to_bits(&self.im, bits))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_mag = self.im.abs();
        let sign = if self.im.is_negative() { "-" } else if self.re.is_zero() { "" } else { "+" };
        let re_part = if self.re.is_zero() { String::new() } else { self.re.to_string() };
        if im_mag.is_one() {
            write!(f, "{re_part}{sign}i")
        } else {
            write!(f, "{re_part}{sign}{im_mag}*i")
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Parses `"p/q"`, `"i"`, `"-i"`, `"p/q*i"`, and `"re+im*i"` /
    /// `"re-im*i"` combinations of those.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::InvalidInput("empty Gaussian rational".into()));
        }
        // Split at the last top-level '+' or '-' that is not a leading
        // sign and not part of "/-" (no exponents occur in this grammar).
        let bytes = s.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            if (bytes[idx] == b'+' || bytes[idx] == b'-') && bytes[idx - 1] != b'/' {
                split = Some(idx);
                break;
            }
        }
        let parse_imag = |t: &str| -> Result<Rational> {
            let body = t.strip_suffix('i').ok_or_else(|| {
                Error::InvalidInput(format!("expected imaginary part in {s:?}"))
            })?;
            let body = body.strip_suffix('*').unwrap_or(body);
            match body {
                "" => Ok(Rational::one()),
                "-" => Ok(-Rational::one()),
                _ => parse_rational(body),
            }
        };
        if let Some(idx) = split {
            let (head, tail) = s.split_at(idx);
            if !tail.ends_with('i') {
                return Err(Error::InvalidInput(format!("not a Gaussian rational: {s:?}")));
            }
            let re = parse_rational(head)?;
            let sign = if tail.starts_with('-') { -Rational::one() } else { Rational::one() };
            let im = parse_imag(&tail[1..])? * sign;
            Ok(GaussianRational::new(re, im))
        } else if s.ends_with('i') {
            Ok(GaussianRational::new(Rational::zero(), parse_imag(&s)?))
        } else {
            Ok(GaussianRational::from_rational(parse_rational(&s)?))
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    /// Panics on a zero divisor; use [`GaussianRational::checked_div`]
    /// when the divisor is not known to be nonzero.
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero in Q(i)")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $imp<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GaussianRational", 2)?;
        st.serialize_field("re", &format_rational(&self.re))?;
        st.serialize_field("im", &format_rational(&self.im))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use rat_str::RatRepr;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct GrObj {
            re: Option<RatRepr>,
            im: Option<RatRepr>,
        }

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum GrRepr {
            Int(i64),
            Str(String),
            Obj(GrObj),
        }

        let err = serde::de::Error::custom;
        match GrRepr::deserialize(d)? {
            GrRepr::Int(n) => Ok(GaussianRational::from_int(n)),
            GrRepr::Str(s) => s.parse().map_err(err),
            GrRepr::Obj(o) => {
                let re = match o.re {
                    Some(r) => r.into_rational().map_err(err)?,
                    None => Rational::zero(),
                };
                let im = match o.im {
                    Some(r) => r.into_rational().map_err(err)?,
                    None => Rational::zero(),
                };
                Ok(GaussianRational::new(re, im))
            }
        }
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect
/// square in Q. The result is the nonnegative root.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let ns = x.numer().magnitude().sqrt();
    let ds = x.denom().magnitude().sqrt();
    if &ns * &ns != *x.numer().magnitude() || &ds * &ds != *x.denom().magnitude() {
        return None;
    }
    Some(Rational::new(
        BigInt::from_biguint(Sign::Plus, ns),
        BigInt::from_biguint(Sign::Plus, ds),
    ))
}

/// Exact square root in Q(i), if one exists.
///
/// Returns the canonical root `y` with `y*y == x`: positive real part,
/// or nonnegative imaginary part when the real part is zero. Returns
/// `None` when `x` has no square root inside Q(i) (for example
/// `sqrt(2)`, which is real but irrational).
pub fn sqrt_qi(x: &GaussianRational) -> Option<GaussianRational> {
    if x.is_zero() {
        return Some(GaussianRational::zero());
    }
    if x.im.is_zero() {
        if x.re.is_negative() {
            let d = rational_sqrt(&-x.re.clone())?;
            return Some(GaussianRational::new(Rational::zero(), d));
        }
        let c = rational_sqrt(&x.re)?;
        return Some(GaussianRational::from_rational(c));
    }
    // For y = c + d*i with y^2 = x: c^2 + d^2 = |x| and c^2 - d^2 = re(x),
    // so c^2 = (re(x) + |x|) / 2 and d = im(x) / (2c). Both square roots
    // must land in Q for y to exist; |x| > |re(x)| since im(x) != 0, so
    // c > 0 and the root is canonical.
    let n = rational_sqrt(&x.norm_sqr())?;
    let c2 = (&x.re + n) / rat_int(2);
    let c = rational_sqrt(&c2)?;
    let d = &x.im / (rat_int(2) * &c);
    Some(GaussianRational::new(c, d))
}

/// Binary floating point value `mantissa * 2^exponent` obtained by
/// correctly rounding an exact rational to a fixed precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    /// Signed mantissa. Zero only for the value zero; otherwise exactly
    /// `precision` bits with the top bit set.
    pub mantissa: BigInt,
    /// Power of two scaling the mantissa.
    pub exponent: i64,
    /// Bit width nonzero mantissas are normalized to.
    pub precision: u32,
}

impl Dyadic {
    /// Rounds `x` to `precision` bits, nearest, ties to even. The
    /// result differs from `x` by at most half an ulp, that is
    /// `2^(exponent - 1)`.
    pub fn round(x: &Rational, precision: u32) -> Dyadic {
        assert!(precision >= 1, "Dyadic::round: zero precision");
        if x.is_zero() {
            return Dyadic { mantissa: BigInt::zero(), exponent: 0, precision };
        }
        let n = x.numer().magnitude();
        let d = x.denom().magnitude();
        let p = i64::from(precision);
        let mut k = p - (n.bits() as i64) + (d.bits() as i64);
        let mantissa = loop {
            let (num, den) = if k >= 0 {
                (n << k as u64, d.clone())
            } else {
                (n.clone(), d << (-k) as u64)
            };
            let (mut q, r) = num.div_rem(&den);
            match (&r << 1u32).cmp(&den) {
                Ordering::Greater => q += 1u32,
                Ordering::Equal => {
                    if q.is_odd() {
                        q += 1u32;
                    }
                }
                Ordering::Less => {}
            }
            let bits = q.bits() as i64;
            if bits == p {
                break q;
            }
            k += p - bits;
        };
        let sign = if x.is_negative() { Sign::Minus } else { Sign::Plus };
        Dyadic {
            mantissa: BigInt::from_biguint(sign, mantissa),
            exponent: -k,
            precision,
        }
    }

    /// The exact rational value of this dyadic number.
    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from(&self.mantissa << self.exponent as u64)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    /// Nearest `f64` to this dyadic value (correctly rounded from the
    /// dyadic, clamping to infinity or zero outside the `f64` range).
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let (m53, exp) = if self.precision <= 53 {
            (self.mantissa.clone(), self.exponent)
        } else {
            let r = Dyadic::round(&self.to_rational(), 53);
            (r.mantissa, r.exponent)
        };
        ldexp(m53.to_f64().expect("53-bit mantissa fits f64"), exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

/// Multiplies by `2^e` exactly, clamping to zero or infinity beyond the
/// `f64` range.
fn ldexp(x: f64, e: i64) -> f64 {
    let mut r = x;
    let mut e = e;
    while e > 0 {
        let c = e.min(512);
        r *= 2f64.powi(c as i32);
        e -= c;
        if r.is_infinite() {
            return r;
        }
    }
    while e < 0 {
        let c = (-e).min(512);
        r /= 2f64.powi(c as i32);
        e += c;
        if r == 0.0 {
            return r;
        }
    }
    r
}

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn rational_to_f64(x: &Rational) -> f64 {
    Dyadic::round(x, 53).to_f64()
}

/// Rounds a rational to `bits` bits of precision, returned as an exact
/// rational. The relative error is at most `2^(1-bits)`.
pub fn round_to_bits(x: &Rational, bits: u32) -> Rational {
    Dyadic::round(x, bits).to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussianRational {
        GaussianRational::new(rat(re_n, re_d), rat(im_n, im_d))
    }

    fn random_gr(rng: &mut ChaCha8Rng) -> GaussianRational {
        let part = |rng: &mut ChaCha8Rng| rat(rng.random_range(-40..=40), rng.random_range(1..=12));
        GaussianRational::new(part(rng), part(rng))
    }

    #[test]
    fn basic_identities() {
        let one_plus_i = g(1, 1, 1, 1);
        let one_minus_i = g(1, 1, -1, 1);
        assert_eq!(&one_plus_i * &one_minus_i, GaussianRational::from_int(2));
        assert_eq!(rat(2, 3) + rat(1, 3), rat_int(1));
        let z = g(3, 1, 4, 1);
        assert_eq!(&z / &z, GaussianRational::one());
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
        assert_eq!(z.conj().conj(), z);
        assert_eq!(z.norm_sqr(), rat_int(25));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = GaussianRational::one();
        assert!(matches!(z.checked_div(&GaussianRational::zero()), Err(Error::DivisionByZero)));
        assert!(GaussianRational::zero().inv().is_err());
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = random_gr(&mut rng);
            let b = random_gr(&mut rng);
            let c = random_gr(&mut rng);
            assert_eq!((&a + &b) + &c, &a + (&b + &c));
            assert_eq!((&a * &b) * &c, &a * (&b * &c));
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !a.is_zero() {
                assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
            }
            assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            assert_eq!((&a + &b).norm_sqr() <= rat_int(0), (&a + &b).is_zero());
        }
    }

    #[test]
    fn abs_bounds_bracket_the_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let a = random_gr(&mut rng);
            let lo = a.abs_lower();
            let hi = a.abs_upper();
            assert!(&lo * &lo <= a.norm_sqr());
            assert!(&hi * &hi >= a.norm_sqr());
        }
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational(" 4/6 ").unwrap(), rat(2, 3));
        assert_eq!(format_rational(&rat_int(5)), "5/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn parse_and_format_gaussian_rationals() {
        let cases = [
            ("1/2+3/4*i", g(1, 2, 3, 4)),
            ("1/2-3/4*i", g(1, 2, -3, 4)),
            ("i", GaussianRational::i()),
            ("-i", -GaussianRational::i()),
            ("3", GaussianRational::from_int(3)),
            ("-2/3*i", g(0, 1, -2, 3)),
            ("-1/2+i", g(-1, 2, 1, 1)),
        ];
        for (text, value) in cases {
            assert_eq!(text.parse::<GaussianRational>().unwrap(), value, "parsing {text:?}");
        }
        // Display output always parses back to the same value.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a = random_gr(&mut rng);
            assert_eq!(a.to_string().parse::<GaussianRational>().unwrap(), a);
        }
        assert!("".parse::<GaussianRational>().is_err());
        assert!("1+".parse::<GaussianRational>().is_err());
        assert!("1+2j".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn serde_round_trip_and_alternate_forms() {
        let z = g(1, 2, -3, 4);
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(json, r#"{"re":"1/2","im":"-3/4"}"#);
        assert_eq!(serde_json::from_str::<GaussianRational>(&json).unwrap(), z);
        // Shorthand forms accepted on input.
        assert_eq!(serde_json::from_str::<GaussianRational>("5").unwrap(), GaussianRational::from_int(5));
        assert_eq!(serde_json::from_str::<GaussianRational>(r#""2/3""#).unwrap(), g(2, 3, 0, 1));
        assert_eq!(serde_json::from_str::<GaussianRational>(r#""i""#).unwrap(), GaussianRational::i());
        assert_eq!(serde_json::from_str::<GaussianRational>(r#"{"re":2}"#).unwrap(), GaussianRational::from_int(2));
        assert_eq!(serde_json::from_str::<GaussianRational>(r#"{"im":"1/2"}"#).unwrap(), g(0, 1, 1, 2));
        // Floating point numbers are rejected rather than silently
        // converted to a nearby rational.
        assert!(serde_json::from_str::<GaussianRational>("0.5").is_err());
        assert!(serde_json::from_str::<GaussianRational>(r#"{"re":"1/2","imm":"0"}"#).is_err());
    }

    #[test]
    fn square_roots_in_qi() {
        assert_eq!(sqrt_qi(&GaussianRational::from_int(-1)), Some(GaussianRational::i()));
        assert_eq!(sqrt_qi(&g(0, 1, 2, 1)), Some(g(1, 1, 1, 1)));
        assert_eq!(sqrt_qi(&GaussianRational::from_int(4)), Some(GaussianRational::from_int(2)));
        assert_eq!(sqrt_qi(&GaussianRational::from_int(-4)), Some(g(0, 1, 2, 1)));
        assert_eq!(sqrt_qi(&g(9, 16, 0, 1)), Some(g(3, 4, 0, 1)));
        assert_eq!(sqrt_qi(&GaussianRational::zero()), Some(GaussianRational::zero()));
        // Irrational cases: real sqrt(2), and a nonreal value whose
        // norm is a square but whose half-trace shift is not.
        assert_eq!(sqrt_qi(&GaussianRational::from_int(2)), None);
        assert_eq!(sqrt_qi(&GaussianRational::from_int(-2)), None);
        assert_eq!(sqrt_qi(&g(3, 1, 4, 1)), Some(g(2, 1, 1, 1)));
        assert_eq!(sqrt_qi(&g(4, 1, 3, 1)), None);
    }

    #[test]
    fn square_root_of_square_is_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let y = random_gr(&mut rng);
            let x = &y * &y;
            let r = sqrt_qi(&x).expect("square of an element is a square");
            assert_eq!(&r * &r, x);
            // Canonical choice: re > 0, or re == 0 and im >= 0.
            assert!(r.re.is_positive() || (r.re.is_zero() && !r.im.is_negative()));
            assert!(r == y || r == -&y);
        }
    }

    #[test]
    fn dyadic_rounding_is_correct_at_53_bits() {
        // f64 arithmetic is correctly rounded, so simple quotients give
        // an independent reference.
        let cases = [(1, 3), (2, 3), (1, 10), (22, 7), (-355, 113), (1, 998244353)];
        for (n, d) in cases {
            let x = rat(n, d);
            assert_eq!(rational_to_f64(&x), n as f64 / d as f64, "{n}/{d}");
        }
        assert_eq!(rational_to_f64(&rat_int(0)), 0.0);
    }

    #[test]
    fn dyadic_handles_magnitudes_beyond_f64_integers() {
        let big = Rational::from(BigInt::from(10).pow(40));
        assert_eq!(rational_to_f64(&big), 1e40);
        let tiny = Rational::new(BigInt::one(), BigInt::from(10).pow(40));
        assert_eq!(rational_to_f64(&tiny), 1e-40);
        // 2^200 + 1 rounds to 2^200 at 53 bits.
        let x = Rational::from((BigInt::one() << 200u32) + BigInt::one());
        let d = Dyadic::round(&x, 53);
        assert_eq!(d.to_rational(), Rational::from(BigInt::one() << 200u32));
    }

    #[test]
    fn dyadic_half_ulp_bound_and_exactness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = rat(rng.random_range(-1_000_000..=1_000_000), rng.random_range(1..=1_000_000));
            for bits in [24u32, 53, 113, 256] {
                let d = Dyadic::round(&x, bits);
                if x.is_zero() {
                    assert!(d.mantissa.is_zero());
                    continue;
                }
                let err = (d.to_rational() - &x).abs();
                let half_ulp = Rational::new(BigInt::one(), BigInt::one() << 1u32)
                    * Dyadic { mantissa: BigInt::one(), exponent: d.exponent, precision: 1 }.to_rational();
                assert!(err <= half_ulp, "{x} at {bits} bits: err {err}");
                assert_eq!(d.mantissa.magnitude().bits(), u64::from(bits));
            }
        }
        // Values that are already dyadic round trip exactly.
        for bits in [24u32, 53, 256] {
            let x = rat(-5, 8);
            assert_eq!(Dyadic::round(&x, bits).to_rational(), x);
        }
    }

    #[test]
    fn dyadic_ties_round_to_even() {
        // 3/2 at 1 bit: between 1 and 2, rounds to the even mantissa 1
        // scaled up, that is to 2.
        assert_eq!(Dyadic::round(&rat(3, 2), 1).to_rational(), rat_int(2));
        // 5/4 at 2 bits: between 1 (mantissa 0b10) and 3/2 (0b11),
        // rounds to 1.
        assert_eq!(Dyadic::round(&rat(5, 4), 2).to_rational(), rat_int(1));
        // 7/4 at 2 bits: between 3/2 and 2, rounds to 2.
        assert_eq!(Dyadic::round(&rat(7, 4), 2).to_rational(), rat_int(2));
    }

    #[test]
    fn dyadic_rounding_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let a = rat(rng.random_range(-10_000..=10_000), rng.random_range(1..=10_000));
            let b = rat(rng.random_range(-10_000..=10_000), rng.random_range(1..=10_000));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            assert!(Dyadic::round(&lo, 11).to_rational() <= Dyadic::round(&hi, 11).to_rational());
        }
    }

    #[test]
    fn round_to_bits_relative_error() {
        let x = rat(1, 3);
        let r = round_to_bits(&x, 100);
        assert!(((&r - &x).abs() / &x) <= Rational::new(BigInt::one(), BigInt::one() << 99u32));
        assert_ne!(r, x);
    }
}
