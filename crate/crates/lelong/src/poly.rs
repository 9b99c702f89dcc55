//! Sparse multivariate polynomials over Q(i).
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration
//! order, serialized bytes and derived constructions are all canonical.
//! The geometry layers use these for homogeneous forms on projective
//! space and their affine restrictions; everything stays exact.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::{rat_int, GaussianRational, Rational};
use crate::linalg::Matrix;
use crate::uni::UniPoly;
use crate::{Error, Result};

/// Multivariate polynomial in `num_vars` variables over Q(i).
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> MultiPoly {
        MultiPoly { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: GaussianRational) -> MultiPoly {
        let mut p = MultiPoly::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    pub fn one(num_vars: usize) -> MultiPoly {
        MultiPoly::constant(num_vars, GaussianRational::one())
    }

    /// The variable `x_i`.
    pub fn variable(i: usize, num_vars: usize) -> MultiPoly {
        assert!(i < num_vars, "variable index out of range");
        let mut e = vec![0; num_vars];
        e[i] = 1;
        MultiPoly::monomial(e, GaussianRational::one())
    }

    pub fn monomial(exponents: Vec<u32>, coeff: GaussianRational) -> MultiPoly {
        let mut p = MultiPoly::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, all
    /// of length `num_vars`; duplicate exponent vectors are summed.
    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    ) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exponents: Vec<u32>, coeff: GaussianRational) {
        debug_assert_eq!(exponents.len(), self.num_vars);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> GaussianRational {
        self.terms.get(exponents).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero(self.num_vars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * s;
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.num_vars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Scales so that the first stored term has coefficient one; the
    /// canonical representative of a polynomial up to scaling.
    pub fn normalized(&self) -> MultiPoly {
        match self.terms.values().next() {
            None => self.clone(),
            Some(c) => self.scale(&c.inv().expect("stored coefficients are nonzero")),
        }
    }

    pub fn evaluate(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.num_vars, "point dimension mismatch");
        let pows = PowerTable::new(point, &self.max_exponents());
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            acc = acc + c * &pows.monomial(e);
        }
        acc
    }

    /// Numeric evaluation in complex double precision.
    pub fn evaluate_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.num_vars, "point dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = c.to_complex64();
            for (v, &k) in e.iter().enumerate() {
                m *= point[v].powu(k);
            }
            acc += m;
        }
        acc
    }

    pub fn partial(&self, var: usize) -> MultiPoly {
        assert!(var < self.num_vars, "variable index out of range");
        let mut out = MultiPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * &GaussianRational::from_int(i64::from(e[var])));
        }
        out
    }

    /// Substitutes `x_i := forms[i]`; the forms must all share one
    /// variable count, which becomes the result's.
    pub fn substitute(&self, forms: &[MultiPoly]) -> MultiPoly {
        assert_eq!(forms.len(), self.num_vars, "one form per variable required");
        let target_vars = forms.first().map_or(0, MultiPoly::num_vars);
        assert!(forms.iter().all(|f| f.num_vars == target_vars), "form variable counts differ");
        let maxes = self.max_exponents();
        // Cache powers of each substituted form up to its needed height.
        let pows: Vec<Vec<MultiPoly>> = forms
            .iter()
            .enumerate()
            .map(|(v, f)| {
                let mut tower = vec![MultiPoly::one(target_vars)];
                for _ in 0..maxes[v] {
                    tower.push(tower.last().unwrap().mul(f));
                }
                tower
            })
            .collect();
        let mut acc = MultiPoly::zero(target_vars);
        for (e, c) in &self.terms {
            let mut m = MultiPoly::constant(target_vars, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = m.mul(&pows[v][k as usize]);
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// `p(z + c)` as a polynomial in `z`.
    pub fn translate(&self, center: &[GaussianRational]) -> MultiPoly {
        assert_eq!(center.len(), self.num_vars, "center dimension mismatch");
        let forms: Vec<MultiPoly> = (0..self.num_vars)
            .map(|i| {
                MultiPoly::variable(i, self.num_vars)
                    .add(&MultiPoly::constant(self.num_vars, center[i].clone()))
            })
            .collect();
        self.substitute(&forms)
    }

    /// Vanishing order at an affine point: the least total degree of a
    /// term of `p(z + point)`. `None` for the zero polynomial, whose
    /// order is infinite.
    pub fn order_at(&self, point: &[GaussianRational]) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        self.translate(point).terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Homogenizes with a new last variable, to degree `degree`, which
    /// must be at least the total degree. Errors on the zero polynomial.
    pub fn homogenize(&self, degree: u32) -> Result<MultiPoly> {
        let d = self.degree().ok_or_else(|| {
            Error::Precondition("cannot homogenize the zero polynomial".into())
        })?;
        if d > degree {
            return Err(Error::Precondition(format!(
                "homogenization degree {degree} below total degree {d}"
            )));
        }
        let mut out = MultiPoly::zero(self.num_vars + 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.push(degree - e.iter().sum::<u32>());
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Sets `x_var := 1` and drops that variable, keeping the order of
    /// the others.
    pub fn dehomogenize_at(&self, var: usize) -> MultiPoly {
        assert!(var < self.num_vars, "variable index out of range");
        let mut out = MultiPoly::zero(self.num_vars - 1);
        for (e, c) in &self.terms {
            let e2: Vec<u32> =
                e.iter().enumerate().filter(|&(i, _)| i != var).map(|(_, &k)| k).collect();
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Coefficient of `x_var^k` as a polynomial in the same variable
    /// set (with `x_var` absent from it).
    pub fn coeff_of_power(&self, var: usize, k: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// View as a univariate polynomial in `var`; errors if any other
    /// variable occurs.
    pub fn to_univariate(&self, var: usize) -> Result<UniPoly> {
        let deg = self.degree_in(var).unwrap_or(0);
        let mut coeffs = vec![GaussianRational::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != var && k > 0) {
                return Err(Error::Precondition(format!(
                    "polynomial is not univariate in x{var}"
                )));
            }
            coeffs[e[var] as usize] = c.clone();
        }
        Ok(UniPoly::from_coeffs(coeffs))
    }

    /// Embeds a univariate polynomial as a multivariate one in `var`.
    pub fn from_univariate(u: &UniPoly, num_vars: usize, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(num_vars);
        for (k, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; num_vars];
            e[var] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.num_vars];
        for e in self.terms.keys() {
            for (v, &k) in e.iter().enumerate() {
                m[v] = m[v].max(k);
            }
        }
        m
    }
}

struct PowerTable {
    towers: Vec<Vec<GaussianRational>>,
}

impl PowerTable {
    fn new(point: &[GaussianRational], maxes: &[u32]) -> PowerTable {
        let towers = point
            .iter()
            .zip(maxes)
            .map(|(x, &m)| {
                let mut t = vec![GaussianRational::one()];
                for _ in 0..m {
                    t.push(t.last().unwrap() * x);
                }
                t
            })
            .collect();
        PowerTable { towers }
    }

    fn monomial(&self, e: &[u32]) -> GaussianRational {
        let mut acc = GaussianRational::one();
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                acc = acc * &self.towers[v][k as usize];
            }
        }
        acc
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{v}")?,
                    _ => write!(f, "*x{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: GaussianRational,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr { exponents: e.clone(), coeff: c.clone() })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let Some(first) = terms.first() else {
            return Err(D::Error::custom(
                "empty polynomial: variable count cannot be inferred from no terms",
            ));
        };
        let num_vars = first.exponents.len();
        MultiPoly::from_terms(num_vars, terms.into_iter().map(|t| (t.exponents, t.coeff)))
            .map_err(D::Error::custom)
    }
}

/// Resultant of `p` and `q` with respect to `x_var`: the determinant of
/// the Sylvester matrix over the remaining variables. Zero exactly when
/// the two share a factor of positive degree in `x_var` (given that
/// both have positive degree in it).
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly> {
    assert_eq!(p.num_vars(), q.num_vars(), "variable count mismatch");
    let n = p.num_vars();
    let dp = p.degree_in(var).unwrap_or(0) as usize;
    let dq = q.degree_in(var).unwrap_or(0) as usize;
    if p.is_zero() || q.is_zero() {
        return Err(Error::Precondition("resultant of the zero polynomial".into()));
    }
    if dp == 0 || dq == 0 {
        return Err(Error::Precondition(format!(
            "resultant needs positive degree in x{var} on both sides"
        )));
    }
    let size = dp + dq;
    let mut rows: Vec<Vec<MultiPoly>> = Vec::with_capacity(size);
    let coeff_row = |f: &MultiPoly, df: usize, offset: usize| -> Vec<MultiPoly> {
        let mut row = vec![MultiPoly::zero(n); size];
        for k in 0..=df {
            row[offset + k] = f.coeff_of_power(var, (df - k) as u32);
        }
        row
    };
    for off in 0..dq {
        rows.push(coeff_row(p, dp, off));
    }
    for off in 0..dp {
        rows.push(coeff_row(q, dq, off));
    }
    Ok(poly_det(&rows))
}

/// Determinant of a small matrix of polynomials by expansion along
/// rows, memoized on the set of remaining columns.
fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let size = m.len();
    assert!(size <= 16, "polynomial determinant too large");
    let n = m.first().and_then(|r| r.first()).map_or(0, MultiPoly::num_vars);
    let full: u32 = if size == 32 { u32::MAX } else { (1 << size) - 1 };
    let mut memo: std::collections::HashMap<u32, MultiPoly> = std::collections::HashMap::new();
    fn go(
        m: &[Vec<MultiPoly>],
        mask: u32,
        n: usize,
        memo: &mut std::collections::HashMap<u32, MultiPoly>,
    ) -> MultiPoly {
        if mask == 0 {
            return MultiPoly::one(n);
        }
        if let Some(hit) = memo.get(&mask) {
            return hit.clone();
        }
        let row = m.len() - mask.count_ones() as usize;
        let mut acc = MultiPoly::zero(n);
        let mut sign = false;
        for c in 0..m.len() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let entry = &m[row][c];
            if !entry.is_zero() {
                let sub = go(m, mask & !(1 << c), n, memo);
                let term = entry.mul(&sub);
                acc = if sign { acc.sub(&term) } else { acc.add(&term) };
            }
            sign = !sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    go(m, full, n, &mut memo)
}

/// Decides whether two nonzero bivariate polynomials are coprime, that
/// is share no nonconstant factor. Exact: combines the resultant in
/// `x_0` with a gcd of contents to catch factors free of `x_0`.
pub fn is_coprime(p: &MultiPoly, q: &MultiPoly) -> Result<bool> {
    if p.num_vars() != 2 || q.num_vars() != 2 {
        return Err(Error::Unsupported("coprimality test is for bivariate polynomials".into()));
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::Precondition("coprimality of the zero polynomial".into()));
    }
    let dp = p.degree_in(0).unwrap_or(0);
    let dq = q.degree_in(0).unwrap_or(0);
    // A common factor not involving x0 divides both contents.
    let cp = content_in_y(p)?;
    let cq = content_in_y(q)?;
    let content_gcd = UniPoly::gcd(&cp, &cq);
    if content_gcd.degree().unwrap_or(0) > 0 {
        return Ok(false);
    }
    match (dp, dq) {
        (0, 0) => Ok(true),
        (0, _) => {
            let pu = p.to_univariate(1)?;
            Ok(UniPoly::gcd(&pu, &cq).degree().unwrap_or(0) == 0)
        }
        (_, 0) => {
            let qu = q.to_univariate(1)?;
            Ok(UniPoly::gcd(&qu, &cp).degree().unwrap_or(0) == 0)
        }
        _ => Ok(!resultant(p, q, 0)?.is_zero()),
    }
}

/// Gcd of the `x_1`-coefficient polynomials of `p` viewed in `x_0`,
/// as a univariate polynomial in `x_1`.
fn content_in_y(p: &MultiPoly) -> Result<UniPoly> {
    let mut acc = UniPoly::zero();
    for k in 0..=p.degree_in(0).unwrap_or(0) {
        let c = p.coeff_of_power(0, k);
        if c.is_zero() {
            continue;
        }
        let u = c.to_univariate(1)?;
        acc = if acc.is_zero() { u.monic() } else { UniPoly::gcd(&acc, &u) };
        if acc.degree() == Some(0) {
            break;
        }
    }
    Ok(acc)
}

/// Basis of the space of polynomials in two variables of total degree
/// at most `degree` vanishing to order at least `orders[i]` at
/// `points[i]`. Rows impose derivative conditions; the basis is the
/// canonical nullspace of that exact linear system.
pub fn interpolation_nullspace(
    points: &[Vec<GaussianRational>],
    orders: &[u32],
    degree: u32,
) -> Result<Vec<MultiPoly>> {
    if points.len() != orders.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: orders.len() });
    }
    for pt in points {
        if pt.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: pt.len() });
        }
    }
    let monomials = bivariate_monomials(degree);
    let mut rows = Vec::new();
    for (pt, &ord) in points.iter().zip(orders) {
        for a in 0..ord {
            for b in 0..ord - a {
                rows.push(derivative_row(pt, a, b, degree));
            }
        }
    }
    if rows.is_empty() {
        rows.push(vec![GaussianRational::zero(); monomials.len()]);
    }
    let basis = Matrix::from_rows(rows).nullspace();
    Ok(basis.into_iter().map(|v| bivariate_from_coeffs(&v, degree)).collect())
}

/// Monomial exponents of total degree at most `degree` in two
/// variables, in the fixed order shared by the interpolation helpers.
pub fn bivariate_monomials(degree: u32) -> Vec<(u32, u32)> {
    (0..=degree)
        .flat_map(|e1| (0..=degree - e1).map(move |e2| (e1, e2)))
        .collect()
}

/// Row of the scaled derivative d^(a,b)/(a! b!) evaluated at `point`,
/// indexed against `bivariate_monomials(degree)`: the entry for
/// monomial x^e1 y^e2 is binom(e1,a) binom(e2,b) x^(e1-a) y^(e2-b).
pub fn derivative_row(
    point: &[GaussianRational],
    a: u32,
    b: u32,
    degree: u32,
) -> Vec<GaussianRational> {
    let (x, y) = (&point[0], &point[1]);
    let xpow = power_tower(x, degree);
    let ypow = power_tower(y, degree);
    bivariate_monomials(degree)
        .iter()
        .map(|&(e1, e2)| {
            if e1 < a || e2 < b {
                return GaussianRational::zero();
            }
            let scale = binomial(e1, a) * binomial(e2, b);
            GaussianRational::from_rational(scale)
                * &xpow[(e1 - a) as usize]
                * &ypow[(e2 - b) as usize]
        })
        .collect()
}

/// Bivariate polynomial from a coefficient vector indexed against
/// `bivariate_monomials(degree)`.
pub fn bivariate_from_coeffs(coeffs: &[GaussianRational], degree: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(2);
    for (&(e1, e2), c) in bivariate_monomials(degree).iter().zip(coeffs) {
        p.add_term(vec![e1, e2], c.clone());
    }
    p
}

fn power_tower(x: &GaussianRational, max: u32) -> Vec<GaussianRational> {
    let mut t = vec![GaussianRational::one()];
    for _ in 0..max {
        t.push(t.last().unwrap() * x);
    }
    t
}

/// Exact binomial coefficient as a rational.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::from(num_bigint::BigInt::from(0));
    }
    let mut acc = rat_int(1);
    for j in 0..k {
        acc = acc * rat_int(i64::from(n - j)) / rat_int(i64::from(j + 1));
    }
    acc
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

    fn x() -> MultiPoly {
        MultiPoly::variable(0, 2)
    }

    fn y() -> MultiPoly {
        MultiPoly::variable(1, 2)
    }

    fn c(n: i64) -> MultiPoly {
        MultiPoly::constant(2, gi(n))
    }

    fn random_poly(rng: &mut ChaCha8Rng, num_vars: usize, deg: u32) -> MultiPoly {
        let mut p = MultiPoly::zero(num_vars);
        for _ in 0..rng.random_range(1..=6) {
            let mut e = vec![0u32; num_vars];
            let mut left = deg;
            for v in e.iter_mut() {
                *v = rng.random_range(0..=left);
                left -= *v;
            }
            p = p.add(&MultiPoly::monomial(e, gi(rng.random_range(-4..=4))));
        }
        p
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<GaussianRational> {
        (0..n)
            .map(|_| GaussianRational::new(rat(rng.random_range(-5..=5), 1), rat(rng.random_range(-2..=2), 1)))
            .collect()
    }

    /// Independent vanishing order: differentiate and evaluate until
    /// some derivative is nonzero.
    fn order_at_oracle(p: &MultiPoly, pt: &[GaussianRational]) -> Option<u32> {
        if p.is_zero() {
            return None;
        }
        let n = p.num_vars();
        let mut layer = vec![p.clone()];
        for k in 0..=p.degree().unwrap() + 1 {
            if layer.iter().any(|d| !d.evaluate(pt).is_zero()) {
                return Some(k);
            }
            layer = layer
                .iter()
                .flat_map(|d| (0..n).map(|v| d.partial(v)).collect::<Vec<_>>())
                .collect();
        }
        Some(p.degree().unwrap() + 1)
    }

    #[test]
    fn arithmetic_and_degrees() {
        let p = x().mul(&x()).add(&y().scale(&gi(3)));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.sub(&p), MultiPoly::zero(2));
        assert!(MultiPoly::zero(2).degree().is_none());
        let q = x().add(&y()).pow(2);
        let expanded = x().mul(&x()).add(&x().mul(&y()).scale(&gi(2))).add(&y().mul(&y()));
        assert_eq!(q, expanded);
        assert!(q.is_homogeneous());
        assert!(!q.add(&c(1)).is_homogeneous());
    }

    #[test]
    fn evaluation_translation_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let p = random_poly(&mut rng, 3, 4);
            let a = random_point(&mut rng, 3);
            let b = random_point(&mut rng, 3);
            // p(z + a) at b equals p at a + b.
            let sum: Vec<GaussianRational> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
            assert_eq!(p.translate(&a).evaluate(&b), p.evaluate(&sum));
        }
    }

    #[test]
    fn substitution_matches_pointwise_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 2, 3);
            let f0 = random_poly(&mut rng, 2, 2);
            let f1 = random_poly(&mut rng, 2, 2);
            let composed = p.substitute(&[f0.clone(), f1.clone()]);
            let pt = random_point(&mut rng, 2);
            let inner = [f0.evaluate(&pt), f1.evaluate(&pt)];
            assert_eq!(composed.evaluate(&pt), p.evaluate(&inner));
        }
    }

    #[test]
    fn order_at_examples() {
        // x^2 + y^3 vanishes to order 2 at the origin.
        let p = x().pow(2).add(&y().pow(3));
        assert_eq!(p.order_at(&[gi(0), gi(0)]), Some(2));
        // x*y vanishes to order 2 at the origin, order 1 on an axis.
        let q = x().mul(&y());
        assert_eq!(q.order_at(&[gi(0), gi(0)]), Some(2));
        assert_eq!(q.order_at(&[gi(0), gi(1)]), Some(1));
        assert_eq!(q.order_at(&[gi(1), gi(1)]), Some(0));
        // (x-1)^2 (y+2) has order 3 at (1, -2).
        let r = x().sub(&c(1)).pow(2).mul(&y().add(&c(2)));
        assert_eq!(r.order_at(&[gi(1), gi(-2)]), Some(3));
        assert!(MultiPoly::zero(2).order_at(&[gi(0), gi(0)]).is_none());
    }

    #[test]
    fn order_at_agrees_with_derivative_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let base = random_poly(&mut rng, 2, 2);
            let pt = random_point(&mut rng, 2);
            // Force interesting orders by multiplying in vanishing factors.
            let lin = x()
                .sub(&MultiPoly::constant(2, pt[0].clone()))
                .add(&y().sub(&MultiPoly::constant(2, pt[1].clone())));
            let p = base.add(&c(1)).mul(&lin.pow(rng.random_range(0..=2)));
            assert_eq!(p.order_at(&pt), order_at_oracle(&p, &pt), "{p} at {pt:?}");
        }
    }

    #[test]
    fn homogenize_round_trip() {
        let p = x().pow(2).add(&y()).add(&c(5));
        let h = p.homogenize(2).unwrap();
        assert!(h.is_homogeneous());
        assert_eq!(h.num_vars(), 3);
        assert_eq!(h.dehomogenize_at(2), p);
        // Homogenizing above the total degree pads with the new variable.
        let h3 = p.homogenize(3).unwrap();
        assert!(h3.is_homogeneous());
        assert_eq!(h3.degree(), Some(3));
        assert!(p.homogenize(1).is_err());
        assert!(MultiPoly::zero(2).homogenize(1).is_err());
    }

    #[test]
    fn resultant_of_known_pair() {
        // Res_x(x^2 - y, x - y) = y^2 - y.
        let p = x().pow(2).sub(&y());
        let q = x().sub(&y());
        let r = resultant(&p, &q, 0).unwrap();
        assert_eq!(r, y().pow(2).sub(&y()));
    }

    #[test]
    fn resultant_vanishes_exactly_on_common_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut nonzero_seen = 0;
        for _ in 0..40 {
            let h = x().add(&y().scale(&gi(rng.random_range(1..=3)))).add(&c(rng.random_range(-2..=2)));
            let a = random_poly(&mut rng, 2, 2).add(&x());
            let b = random_poly(&mut rng, 2, 2).add(&x().mul(&x()));
            if a.degree_in(0).unwrap_or(0) == 0 || b.degree_in(0).unwrap_or(0) == 0 {
                continue;
            }
            let r_shared = resultant(&a.mul(&h), &b.mul(&h), 0).unwrap();
            assert!(r_shared.is_zero(), "shared factor must kill the resultant");
            let r_plain = resultant(&a, &b, 0).unwrap();
            if !r_plain.is_zero() {
                nonzero_seen += 1;
            }
        }
        assert!(nonzero_seen > 10);
    }

    #[test]
    fn resultant_is_multiplicative_in_one_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let f = random_poly(&mut rng, 2, 2).add(&x().pow(2));
            let g = random_poly(&mut rng, 2, 1).add(&x());
            let h = random_poly(&mut rng, 2, 1).add(&x());
            if f.degree_in(0).unwrap_or(0) == 0
                || g.degree_in(0).unwrap_or(0) == 0
                || h.degree_in(0).unwrap_or(0) == 0
            {
                continue;
            }
            let lhs = resultant(&f, &g.mul(&h), 0).unwrap();
            let rhs = resultant(&f, &g, 0).unwrap().mul(&resultant(&f, &h, 0).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn coprimality_catches_factors_with_and_without_x() {
        // y*x and y*(x+1) share the factor y, invisible to the resultant
        // in x alone.
        let p = y().mul(&x());
        let q = y().mul(&x().add(&c(1)));
        assert!(!is_coprime(&p, &q).unwrap());
        assert!(is_coprime(&x().mul(&y()), &x().add(&y())).unwrap());
        assert!(is_coprime(&x().pow(2).sub(&y()), &x().sub(&y())).unwrap());
        assert!(!is_coprime(&x().mul(&y()), &x()).unwrap());
        assert!(is_coprime(&c(5), &x()).unwrap());
        assert!(is_coprime(&y().add(&c(1)), &y().add(&c(2))).unwrap());
        assert!(!is_coprime(&y().add(&c(1)), &y().pow(2).sub(&c(1))).unwrap());
        assert!(is_coprime(&y().add(&c(1)), &x().add(&c(1))).unwrap());
        assert!(is_coprime(&x().add(&c(1)), &y().pow(2).sub(&c(1))).unwrap());
        assert!(is_coprime(&x(), &y()).unwrap());
        assert!(is_coprime(&x(), &x().add(&y())).unwrap());
        assert!(!is_coprime(&x(), &x()).unwrap());
        assert!(is_coprime(&x().sub(&y()), &x().add(&y())).unwrap());
        assert!(matches!(is_coprime(&MultiPoly::zero(2), &x()), Err(Error::Precondition(_))));
    }

    #[test]
    fn coprimality_on_random_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let mut uncommon = 0;
        for _ in 0..60 {
            let h = x().add(&y().scale(&gi(rng.random_range(1..=4)))).add(&c(rng.random_range(-3..=3)));
            let a = random_poly(&mut rng, 2, 2);
            let b = random_poly(&mut rng, 2, 2);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            assert!(!is_coprime(&a.mul(&h), &b.mul(&h)).unwrap());
            if is_coprime(&a.add(&c(1)), &b.add(&x().pow(3))).unwrap_or(false) {
                uncommon += 1;
            }
        }
        assert!(uncommon > 20);
    }

    #[test]
    fn interpolation_dimensions_match_conic_counts() {
        let pts = |v: &[(i64, i64)]| -> Vec<Vec<GaussianRational>> {
            v.iter().map(|&(a, b)| vec![gi(a), gi(b)]).collect()
        };
        // Five general points determine a unique conic.
        let five = pts(&[(0, 0), (1, 0), (0, 1), (1, 1), (2, 3)]);
        let basis = interpolation_nullspace(&five, &[1; 5], 2).unwrap();
        assert_eq!(basis.len(), 1);
        // Four general points leave a pencil.
        let four = pts(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        assert_eq!(interpolation_nullspace(&four, &[1; 4], 2).unwrap().len(), 2);
        // A double point imposes three conditions on conics.
        let basis = interpolation_nullspace(&pts(&[(0, 0)]), &[2], 2).unwrap();
        assert_eq!(basis.len(), 3);
        // A triple point kills every conic.
        assert!(interpolation_nullspace(&pts(&[(0, 0)]), &[3], 2).unwrap().is_empty());
        // No conditions: the full space of conics has dimension six.
        assert_eq!(interpolation_nullspace(&[], &[], 2).unwrap().len(), 6);
    }

    #[test]
    fn interpolation_basis_satisfies_order_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let k = rng.random_range(1..=3);
            let points: Vec<Vec<GaussianRational>> =
                (0..k).map(|_| random_point(&mut rng, 2)).collect();
            let orders: Vec<u32> = (0..k).map(|_| rng.random_range(1..=2)).collect();
            let degree = rng.random_range(2..=4);
            let basis = interpolation_nullspace(&points, &orders, degree).unwrap();
            for p in &basis {
                assert!(!p.is_zero());
                assert!(p.degree().unwrap() <= degree);
                for (pt, &ord) in points.iter().zip(&orders) {
                    assert!(p.order_at(pt).is_none_or(|o| o >= ord), "{p} at {pt:?}");
                }
            }
            // Dimension bound from counting conditions.
            let conditions: u32 = orders.iter().map(|o| o * (o + 1) / 2).sum();
            let dim = (degree + 1) * (degree + 2) / 2;
            assert!(basis.len() as u32 >= dim.saturating_sub(conditions));
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), rat_int(10));
        assert_eq!(binomial(4, 0), rat_int(1));
        assert_eq!(binomial(3, 5), rat_int(0));
        assert_eq!(binomial(6, 3), rat_int(20));
    }

    #[test]
    fn serde_round_trip_and_canonical_bytes() {
        let p = x().pow(2).sub(&y().scale(&gi(3))).add(&c(1));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"[{"exponents":[0,0],"coeff":{"re":"1/1","im":"0/1"}},{"exponents":[0,1],"coeff":{"re":"-3/1","im":"0/1"}},{"exponents":[2,0],"coeff":{"re":"1/1","im":"0/1"}}]"#
        );
        let back: MultiPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        // Duplicate exponent vectors merge, zero merges vanish.
        let merged: MultiPoly = serde_json::from_str(
            r#"[{"exponents":[1,0],"coeff":"2"},{"exponents":[1,0],"coeff":"-2"},{"exponents":[0,1],"coeff":"1"}]"#,
        )
        .unwrap();
        assert_eq!(merged, y());
        assert!(serde_json::from_str::<MultiPoly>("[]").is_err());
        assert!(serde_json::from_str::<MultiPoly>(
            r#"[{"exponents":[1,0],"coeff":"1"},{"exponents":[1],"coeff":"1"}]"#
        )
        .is_err());
    }
}
