//! Univariate polynomials over Q(i): Euclidean arithmetic, gcd, and a
//! root finder that keeps roots exact whenever they lie in Q(i).
//!
//! Root finding works on the square-free part. Degrees one and two are
//! decided completely: roots are exact elements of Q(i) when the
//! discriminant has a square root there, and otherwise come back as
//! rational approximations with a proven error bound. For higher
//! degrees the finder first peels off roots in Q(i) (numeric root,
//! rational snap, exact verification, exact deflation) and then refines
//! whatever remains by Newton iteration in exact rational arithmetic;
//! those errors are a-posteriori estimates of the form `|f(z)/f'(z)|`,
//! tight for the simple well-separated roots this crate produces.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::field::{
    rat_int, round_to_bits, sqrt_qi, GaussianRational, Rational,
};
use crate::{Error, Result};

/// Univariate polynomial over Q(i), dense in ascending powers.
/// Invariant: the last coefficient is nonzero; zero is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

/// One root of a univariate polynomial.
#[derive(Clone, Debug)]
pub struct UniRoot {
    /// The root if exact, otherwise a rational approximation of it.
    pub value: GaussianRational,
    /// `None` for an exact root; otherwise `|value - root| <= 2^err_log2`.
    pub err_log2: Option<i64>,
}

impl UniRoot {
    pub fn exact(value: GaussianRational) -> UniRoot {
        UniRoot { value, err_log2: None }
    }

    pub fn is_exact(&self) -> bool {
        self.err_log2.is_none()
    }
}

impl UniPoly {
    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<GaussianRational>) -> UniPoly {
        while coeffs.last().is_some_and(GaussianRational::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: GaussianRational) -> UniPoly {
        UniPoly::from_coeffs(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| GaussianRational::from_int(k as i64) * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: &GaussianRational) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &UniPoly) -> UniPoly {
        self.add(&rhs.scale(&GaussianRational::from_int(-1)))
    }

    pub fn mul(&self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(out)
    }

    /// Scales to leading coefficient one. Panics on zero.
    pub fn monic(&self) -> UniPoly {
        let lead = self.leading().expect("monic of zero polynomial");
        self.scale(&lead.inv().expect("leading coefficient is nonzero"))
    }

    /// Euclidean division: returns `(q, r)` with `self = q*d + r` and
    /// `deg r < deg d`. Panics if `d` is zero.
    pub fn divmod(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let f = &rem[k] * &lead_inv;
            for j in 0..dd {
                rem[k - dd + j] = &rem[k - dd + j] - &(&f * &d.coeffs[j]);
            }
            rem[k] = GaussianRational::zero();
            quot[k - dd] = f;
        }
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem))
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let (q, r) = self.divmod(d);
        assert!(r.is_zero(), "div_exact: nonzero remainder");
        q
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divmod(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            return x;
        }
        x.monic()
    }

    /// Monic square-free part `self / gcd(self, self')`.
    pub fn square_free_part(&self) -> UniPoly {
        let d = self.derivative();
        if d.is_zero() {
            return self.monic();
        }
        let g = UniPoly::gcd(self, &d);
        self.div_exact(&g).monic()
    }

    /// Divides out a verified exact root. Panics if `r` is not a root.
    pub fn deflate_root(&self, r: &GaussianRational) -> UniPoly {
        let lin = UniPoly::from_coeffs(vec![-r, GaussianRational::one()]);
        self.div_exact(&lin)
    }

    /// All distinct roots of the polynomial, exact where possible.
    /// `bits` is the precision target for roots outside Q(i); their
    /// rational approximations aim for an error of at most `2^(1-bits)`.
    pub fn roots(&self, bits: u32) -> Result<Vec<UniRoot>> {
        if self.is_zero() {
            return Err(Error::Precondition("roots of the zero polynomial".into()));
        }
        if self.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        solve_square_free(&self.square_free_part(), bits, &mut out);
        Ok(out)
    }
}

fn solve_square_free(f: &UniPoly, bits: u32, out: &mut Vec<UniRoot>) {
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            let root = -&(&f.coeffs[0] / &f.coeffs[1]);
            out.push(UniRoot::exact(root));
        }
        Some(2) => solve_quadratic(f, bits, out),
        Some(_) => {
            let seeds = durand_kerner(f);
            // Peel off roots that live in Q(i); one verified root is
            // enough, deflation restarts the process one degree down.
            for seed in &seeds {
                if let Some(root) = snap_to_exact_root(f, *seed) {
                    let rest = f.deflate_root(&root);
                    out.push(UniRoot::exact(root));
                    solve_square_free(&rest, bits, out);
                    return;
                }
            }
            for seed in seeds {
                out.push(newton_refine(f, seed, bits));
            }
        }
    }
}

fn solve_quadratic(f: &UniPoly, bits: u32, out: &mut Vec<UniRoot>) {
    let (a, b, c) = (&f.coeffs[2], &f.coeffs[1], &f.coeffs[0]);
    let two_a = &GaussianRational::from_int(2) * a;
    let disc = b * b - &GaussianRational::from_int(4) * a * c;
    match sqrt_qi(&disc) {
        Some(s) => {
            out.push(UniRoot::exact(&(-b + &s) / &two_a));
            if !s.is_zero() {
                out.push(UniRoot::exact(&(-b - &s) / &two_a));
            }
        }
        None => {
            let (s, s_err) = sqrt_qi_approx(&disc, bits + 16);
            let scale = two_a.norm_sqr();
            // |(x + e)/t - x/t| <= |e| / |t|, and |t| >= |t|^2 / |t|_upper.
            let err = &s_err * &two_a.abs_upper() / &scale;
            let err_log2 = log2_upper(&err);
            out.push(UniRoot {
                value: &(-b + &s) / &two_a,
                err_log2: Some(err_log2),
            });
            out.push(UniRoot {
                value: &(-b - &s) / &two_a,
                err_log2: Some(err_log2),
            });
        }
    }
}

/// Approximate square root of an element of Q(i) that has none exactly.
/// Returns `(y, err)` with `|y - sqrt(x)|` at most `err` for one of the
/// two square roots, the one with nonnegative real part. The bound is
/// proven from the exact residual `y^2 - x`.
pub fn sqrt_qi_approx(x: &GaussianRational, bits: u32) -> (GaussianRational, Rational) {
    assert!(!x.is_zero(), "sqrt_qi_approx of zero");
    let mut work = bits + 32;
    loop {
        let y = sqrt_qi_candidate(x, work);
        if !y.is_zero() {
            let e = &(&y * &y) - x;
            let e_up = e.abs_upper();
            let y_lo = y.abs_lower();
            if e_up <= &y_lo * &y_lo {
                let err = e_up / y_lo;
                if err <= pow2(1 - i64::from(bits)) || work > bits + 512 {
                    return (y, err);
                }
            }
        }
        work += 64;
    }
}

fn sqrt_qi_candidate(x: &GaussianRational, bits: u32) -> GaussianRational {
    if x.im.is_zero() {
        if x.re.is_positive() {
            return GaussianRational::from_rational(rational_sqrt_approx(&x.re, bits));
        }
        let d = rational_sqrt_approx(&-x.re.clone(), bits);
        return GaussianRational::new(Rational::zero(), d);
    }
    let n = rational_sqrt_approx(&x.norm_sqr(), 2 * bits);
    let c2 = (&x.re + n) / rat_int(2);
    if !c2.is_positive() {
        return GaussianRational::zero();
    }
    let c = rational_sqrt_approx(&c2, bits);
    let d = &x.im / (rat_int(2) * &c);
    GaussianRational::new(c, round_to_bits(&d, bits))
}

/// Floor approximation of `sqrt(r)` for `r > 0`, with absolute error at
/// most `2^-bits * max(1, sqrt(r))`.
fn rational_sqrt_approx(r: &Rational, bits: u32) -> Rational {
    let shift = 2 * (bits + 2);
    let v = (r.numer() * r.denom()).abs() << shift;
    let root = v.sqrt();
    Rational::new(root, r.denom().abs() << (shift / 2))
}

/// Tries to read an exact element of Q(i) off a numeric root and
/// verifies it against the polynomial; `None` unless it is truly a root.
fn snap_to_exact_root(f: &UniPoly, z: Complex64) -> Option<GaussianRational> {
    let re = snap_to_rational(z.re)?;
    let im = snap_to_rational(z.im)?;
    let cand = GaussianRational::new(re, im);
    if f.eval(&cand).is_zero() {
        Some(cand)
    } else {
        None
    }
}

/// Best small-denominator rational near `x`, by continued fractions.
/// `None` if nothing with denominator below `10^6` lands within `1e-9`.
fn snap_to_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() < 1e-9 {
        return Some(Rational::zero());
    }
    let target = BigRational::from_f64(x)?;
    let max_den = BigInt::from(1_000_000);
    let mut a = target.clone();
    let (mut h0, mut h1) = (BigInt::one(), a.to_integer());
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    for _ in 0..64 {
        let frac = &a - Rational::from(a.to_integer());
        let cand = Rational::new(h1.clone(), k1.clone());
        if (&cand - &target).abs() < Rational::new(BigInt::one(), BigInt::from(1_000_000_000)) {
            return Some(cand);
        }
        if frac.is_zero() {
            break;
        }
        a = frac.recip();
        let ai = a.to_integer();
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    None
}

/// Newton iteration in exact rational arithmetic from a numeric seed,
/// rounding to a working precision between steps. The returned error is
/// the a-posteriori estimate `2 |f(z)| / |f'(z)|`.
fn newton_refine(f: &UniPoly, seed: Complex64, bits: u32) -> UniRoot {
    let target = bits + 64;
    let df = f.derivative();
    let mut z = GaussianRational::new(
        BigRational::from_f64(seed.re).unwrap_or_else(Rational::zero),
        BigRational::from_f64(seed.im).unwrap_or_else(Rational::zero),
    );
    // The working precision doubles towards the target as convergence
    // squares the accuracy; iterating at full precision from the start
    // would waste most of the arithmetic on digits not yet correct.
    let mut work = target.min(96);
    for _ in 0..24 {
        let fz = f.eval(&z);
        if fz.is_zero() {
            return UniRoot::exact(z);
        }
        let dfz = df.eval(&z);
        if dfz.is_zero() {
            break;
        }
        let step = &fz / &dfz;
        z = (&z - &step).round_to_bits(work);
        if work >= target {
            // Converged once the step is negligible at the requested
            // precision relative to the iterate itself.
            let scale = z.abs_upper().max(Rational::one());
            if step.abs_upper() <= pow2(-i64::from(bits) - 8) * scale {
                break;
            }
        }
        work = (work * 2).min(target);
    }
    let fz = f.eval(&z);
    let dfz = df.eval(&z);
    let err = if dfz.is_zero() {
        Rational::one()
    } else {
        rat_int(2) * fz.abs_upper() / dfz.abs_lower()
    };
    UniRoot { value: z, err_log2: Some(log2_upper(&err)) }
}

/// All roots of the square-free `f`, numerically, by the
/// Durand-Kerner fixed point iteration in `f64` complex arithmetic.
fn durand_kerner(f: &UniPoly) -> Vec<Complex64> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    // Scale to a monic f64 coefficient vector; rescaling by a power of
    // two keeps huge exact coefficients inside f64 range.
    let max_log2 = f
        .coeffs
        .iter()
        .map(|c| {
            let up = c.abs_upper();
            if up.is_zero() { 0 } else { log2_upper(&up) }
        })
        .max()
        .unwrap_or(0);
    let scale = pow2(-max_log2);
    let coeffs: Vec<Complex64> = f
        .coeffs
        .iter()
        .map(|c| GaussianRational::new(&c.re * &scale, &c.im * &scale).to_complex64())
        .collect();
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let radius = 1.0
        + monic
            .iter()
            .take(n)
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let seed_angle = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| radius * 0.7 * seed_angle.powu(k as u32 + 1))
        .collect();
    for _ in 0..300 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 1e-12);
            }
            let step = eval(zs[i]) / denom;
            zs[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    zs
}

/// Some `k` with `r <= 2^k`, at most one above the smallest such `k`;
/// `0` for `r = 0`.
pub fn log2_upper(r: &Rational) -> i64 {
    if r.is_zero() {
        return 0;
    }
    let n = r.numer().magnitude().bits() as i64;
    let d = r.denom().magnitude().bits() as i64;
    // numer < 2^n and denom >= 2^(d-1), so r < 2^(n-d+1).
    n - d + 1
}

/// `2^k` as an exact rational, for any sign of `k`.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from(BigInt::one() << k as u64)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn poly(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| gi(c)).collect())
    }

    fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> UniPoly {
        let deg = rng.random_range(0..=max_deg);
        UniPoly::from_coeffs(
            (0..=deg)
                .map(|_| GaussianRational::new(rat(rng.random_range(-6..=6), 1), rat(rng.random_range(-2..=2), 1)))
                .collect(),
        )
    }

    #[test]
    fn divmod_satisfies_euclidean_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let f = random_poly(&mut rng, 6);
            let g = random_poly(&mut rng, 3);
            if g.is_zero() {
                continue;
            }
            let (q, r) = f.divmod(&g);
            assert_eq!(q.mul(&g).add(&r), f);
            if !r.is_zero() {
                assert!(r.degree().unwrap() < g.degree().unwrap());
            }
        }
    }

    #[test]
    fn gcd_divides_and_detects_common_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let h = random_poly(&mut rng, 2);
            let a = random_poly(&mut rng, 3);
            let b = random_poly(&mut rng, 3);
            if h.degree().unwrap_or(0) == 0 || a.is_zero() || b.is_zero() {
                continue;
            }
            let g = UniPoly::gcd(&a.mul(&h), &b.mul(&h));
            // h divides the gcd of multiples of h.
            let (_, r) = g.divmod(&h.monic());
            assert!(r.is_zero(), "gcd lost the common factor");
        }
        let g = UniPoly::gcd(&poly(&[-1, 0, 1]), &poly(&[1, 1]));
        assert_eq!(g, poly(&[1, 1]));
        assert_eq!(UniPoly::gcd(&poly(&[1, 1]), &poly(&[1, 0, 1])), poly(&[1]));
    }

    #[test]
    fn square_free_part_drops_multiplicity() {
        // (x-1)^2 (x+2) has square-free part (x-1)(x+2).
        let f = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[2, 1]));
        let sf = f.square_free_part();
        assert_eq!(sf, poly(&[-1, 1]).mul(&poly(&[2, 1])).monic());
    }

    #[test]
    fn exact_roots_of_factored_polynomials() {
        // (x - 2)(x - i)(x + 1/2)
        let f = UniPoly::from_coeffs(vec![gi(-2), GaussianRational::one()])
            .mul(&UniPoly::from_coeffs(vec![-GaussianRational::i(), GaussianRational::one()]))
            .mul(&UniPoly::from_coeffs(vec![GaussianRational::new(rat(1, 2), rat(0, 1)), GaussianRational::one()]));
        let mut roots = f.roots(64).unwrap();
        assert!(roots.iter().all(UniRoot::is_exact));
        roots.sort_by(|a, b| a.value.cmp_lex(&b.value));
        let values: Vec<_> = roots.into_iter().map(|r| r.value).collect();
        assert_eq!(
            values,
            vec![
                GaussianRational::new(rat(-1, 2), rat(0, 1)),
                GaussianRational::new(rat(0, 1), rat(1, 1)),
                gi(2),
            ]
        );
    }

    #[test]
    fn multiple_roots_are_reported_once() {
        let f = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[-1, 1]));
        let roots = f.roots(64).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].value, gi(1));
        assert!(roots[0].is_exact());
    }

    #[test]
    fn quadratic_irrational_roots_carry_proven_bounds() {
        // x^2 - 2: roots are not in Q(i); bounds must still be solid.
        let f = poly(&[-2, 0, 1]);
        let roots = f.roots(256).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(!r.is_exact());
            let err = r.err_log2.unwrap();
            assert!(err <= -250, "error bound too weak: 2^{err}");
            // The claimed bound is consistent with the residual.
            let resid = f.eval(&r.value).abs_upper();
            assert!(resid <= pow2(err + 3));
        }
        let approx = roots.iter().map(|r| r.value.re.clone()).fold(Rational::zero(), |a, b| a + b);
        assert_eq!(log2_upper(&approx.abs().max(pow2(-400))), -400 + 1);
    }

    #[test]
    fn mixed_exact_and_irrational_roots() {
        // x^3 - 2x = x (x^2 - 2): one exact root, two approximations.
        let f = poly(&[0, -2, 0, 1]);
        let roots = f.roots(200).unwrap();
        assert_eq!(roots.len(), 3);
        let exact: Vec<_> = roots.iter().filter(|r| r.is_exact()).collect();
        assert_eq!(exact.len(), 1);
        assert!(exact[0].value.is_zero());
        for r in roots.iter().filter(|r| !r.is_exact()) {
            let v = r.value.to_complex64();
            assert!((v.norm() - std::f64::consts::SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_without_rational_roots_is_refined() {
        // x^4 - 10x^2 + 1, the minimal polynomial of sqrt(2) + sqrt(3).
        let f = poly(&[1, 0, -10, 0, 1]);
        let roots = f.roots(200).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert!(!r.is_exact());
            let resid = f.eval(&r.value).abs_upper();
            assert!(resid <= pow2(-150), "poor refinement: residual 2^{}", log2_upper(&resid));
            assert!(r.err_log2.unwrap() <= -150);
        }
    }

    #[test]
    fn gaussian_integer_roots_snap_exactly() {
        // (x - i)(x - 2i)(x - 3)(x + 1) has all roots in Q(i).
        let f = UniPoly::from_coeffs(vec![-GaussianRational::i(), GaussianRational::one()])
            .mul(&UniPoly::from_coeffs(vec![
                GaussianRational::new(rat(0, 1), rat(-2, 1)),
                GaussianRational::one(),
            ]))
            .mul(&poly(&[-3, 1]))
            .mul(&poly(&[1, 1]));
        let roots = f.roots(64).unwrap();
        assert_eq!(roots.len(), 4);
        assert!(roots.iter().all(UniRoot::is_exact));
    }

    #[test]
    fn sqrt_approx_bound_is_proven_by_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let x = GaussianRational::new(rat(rng.random_range(1..=50), 1), rat(rng.random_range(-20..=20), 1));
            if sqrt_qi(&x).is_some() {
                continue;
            }
            let (y, err) = sqrt_qi_approx(&x, 128);
            assert!(err <= pow2(-127));
            let resid = (&(&y * &y) - &x).abs_upper();
            assert!(resid <= &err * &y.abs_upper() * rat_int(2));
        }
    }

    #[test]
    fn log2_upper_brackets_values() {
        assert_eq!(log2_upper(&rat_int(1)), 1);
        assert_eq!(log2_upper(&rat(1, 2)), 0);
        assert!(log2_upper(&rat(3, 1)) >= 2);
        for k in [-100i64, -5, 0, 7, 90] {
            let v = pow2(k);
            assert!(v <= pow2(log2_upper(&v)));
            assert!(log2_upper(&v) <= k + 1);
        }
    }
}
