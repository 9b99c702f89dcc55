//! Divisor-type positive closed currents on projective space:
//! weighted sums of integration currents along lines and plane curves,
//! plus a nonnegative residual of known mass but unknown support.
//!
//! The residual contributes nothing to Lelong lower bounds and its
//! full mass to upper bounds at every point, the loosest sound model
//! when only the mass of the remainder is known.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::{rat_int, rat_str, GaussianRational, Rational};
use crate::geom::{
    curve_curve_intersection_bits, curves_coprime, eval_error_bound, line_curve_intersection,
    line_line_intersection, same_point, Line, LocatedPoint, PlaneCurve, ProjPoint, ProjTransform,
};
use crate::poly::MultiPoly;
use crate::{Error, Result};

/// One irreducible support piece of a current: a projective line, or a
/// plane curve of degree at least two.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Line(Line),
    Curve(PlaneCurve),
}

impl Component {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Component::Line(l) => l.ambient_dim(),
            Component::Curve(_) => 2,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Component::Line(_) => 1,
            Component::Curve(c) => c.degree(),
        }
    }

    /// Multiplicity at all but finitely many of the component's own
    /// points: one, except for a conic that is a doubled line.
    pub fn generic_multiplicity(&self) -> u32 {
        match self {
            Component::Line(_) => 1,
            Component::Curve(c) => c.generic_multiplicity(),
        }
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        match self {
            Component::Line(l) => l.contains(p),
            Component::Curve(c) => c.contains(p),
        }
    }

    pub fn contains_located(&self, p: &LocatedPoint) -> bool {
        match self {
            Component::Line(l) => l.contains_located(p),
            Component::Curve(c) => c.contains_located(p),
        }
    }

    /// Exact vanishing multiplicity at an exact point.
    pub fn multiplicity_at(&self, p: &ProjPoint) -> u32 {
        match self {
            Component::Line(l) => u32::from(l.contains(p)),
            Component::Curve(c) => c.multiplicity_at(p),
        }
    }

    /// Multiplicity at a located point. Exact points are decided
    /// exactly; for approximate points the value is the largest order
    /// consistent with the error bound (zero is a proof of absence).
    pub fn multiplicity_located(&self, p: &LocatedPoint) -> u32 {
        match p {
            LocatedPoint::Exact(q) => self.multiplicity_at(q),
            LocatedPoint::Approx(q) => match self {
                Component::Line(l) => u32::from(l.contains_approx(q)),
                Component::Curve(c) => {
                    consistent_multiplicity(c.poly(), &q.coords, &q.err_bound())
                }
            },
        }
    }

    /// Singular points of the support (empty for lines).
    pub fn singular_points(&self) -> Result<Vec<LocatedPoint>> {
        match self {
            Component::Line(_) => Ok(Vec::new()),
            Component::Curve(c) => c.singular_points(),
        }
    }

    pub fn cmp_canonical(&self, other: &Component) -> Ordering {
        match (self, other) {
            (Component::Line(a), Component::Line(b)) => a.cmp_canonical(b),
            (Component::Line(_), Component::Curve(_)) => Ordering::Less,
            (Component::Curve(_), Component::Line(_)) => Ordering::Greater,
            (Component::Curve(a), Component::Curve(b)) => a.cmp_canonical(b),
        }
    }

    /// The defining polynomial, for plane components.
    pub fn to_poly(&self) -> Result<MultiPoly> {
        match self {
            Component::Line(l) => l.to_form(),
            Component::Curve(c) => Ok(c.poly().clone()),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Line(l) => write!(f, "{l}"),
            Component::Curve(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Largest vanishing order of `f` at the point that the given error
/// bound cannot rule out; all derivatives of total order below the
/// returned value are consistent with zero.
fn consistent_multiplicity(f: &MultiPoly, coords: &[GaussianRational], err: &Rational) -> u32 {
    let max = f.degree().unwrap_or(0);
    let mut layer = vec![f.clone()];
    for order in 0..=max {
        for g in &layer {
            let margin = eval_error_bound(g, coords, err);
            if g.evaluate(coords).abs_upper() > margin {
                return order;
            }
        }
        let mut next = Vec::new();
        for g in &layer {
            for v in 0..f.num_vars() {
                let d = g.partial(v);
                if !d.is_zero() {
                    next.push(d);
                }
            }
        }
        if next.is_empty() {
            return order + 1;
        }
        layer = next;
    }
    max + 1
}

/// Closed interval bracketing a Lelong number: the lower end sums the
/// certain contributions of listed components, the upper end adds the
/// residual mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LelongInterval {
    #[serde(with = "rat_str")]
    pub lower: Rational,
    #[serde(with = "rat_str")]
    pub upper: Rational,
}

impl LelongInterval {
    pub fn point(v: Rational) -> LelongInterval {
        LelongInterval { lower: v.clone(), upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

impl fmt::Display for LelongInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", crate::field::format_rational(&self.lower))
        } else {
            write!(
                f,
                "[{}, {}]",
                crate::field::format_rational(&self.lower),
                crate::field::format_rational(&self.upper)
            )
        }
    }
}

/// A Lelong number bracket together with whether every incidence that
/// produced it was decided exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LelongEstimate {
    pub interval: LelongInterval,
    pub certified: bool,
}

/// Threshold verdict for one point of a level set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// One candidate point of a level set with its bracket and verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedPoint {
    pub point: LocatedPoint,
    pub interval: LelongInterval,
    pub membership: Membership,
    /// True when the point is exact and all incidences were decided
    /// exactly rather than at tolerance.
    pub certified: bool,
}

/// An upper level set of the Lelong numbers of a divisor-type current:
/// whole curve components passing the threshold, plus the finitely
/// many candidate points that can exceed the generic values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSet {
    pub curve_components: Vec<CurveEntry>,
    pub isolated_points: Vec<IsolatedPoint>,
    #[serde(with = "rat_str")]
    pub threshold: Rational,
    pub strict: bool,
}

/// A component whose generic Lelong value passes the level-set
/// threshold, listed with that value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveEntry {
    pub component: Component,
    #[serde(with = "rat_str")]
    pub generic_value: Rational,
}

impl LevelSet {
    /// Points with a definite "in" verdict.
    pub fn points_in(&self) -> impl Iterator<Item = &IsolatedPoint> {
        self.isolated_points.iter().filter(|p| p.membership == Membership::In)
    }

    /// Points whose bracket straddles the threshold.
    pub fn points_unknown(&self) -> impl Iterator<Item = &IsolatedPoint> {
        self.isolated_points.iter().filter(|p| p.membership == Membership::Unknown)
    }

    pub fn is_empty(&self) -> bool {
        self.curve_components.is_empty()
            && self.isolated_points.iter().all(|p| p.membership == Membership::Out)
    }
}

fn threshold_verdict(interval: &LelongInterval, alpha: &Rational, strict: bool) -> Membership {
    if strict {
        if interval.lower > *alpha {
            Membership::In
        } else if interval.upper <= *alpha {
            Membership::Out
        } else {
            Membership::Unknown
        }
    } else if interval.lower >= *alpha {
        Membership::In
    } else if interval.upper < *alpha {
        Membership::Out
    } else {
        Membership::Unknown
    }
}

/// Positive closed current of divisor type: strictly positive weights
/// on distinct, pairwise non-overlapping components, plus residual
/// mass. Degree-one curve components are canonicalized into lines.
#[derive(Clone, PartialEq, Eq)]
pub struct Current {
    ambient_dim: usize,
    terms: Vec<(Rational, Component)>,
    residual_mass: Rational,
    probe_points: Vec<ProjPoint>,
}

impl Current {
    pub fn new(
        ambient_dim: usize,
        terms: Vec<(Rational, Component)>,
        residual_mass: Rational,
        probe_points: Vec<ProjPoint>,
    ) -> Result<Current> {
        if ambient_dim < 2 {
            return Err(Error::InvalidInput("ambient projective space must have dimension >= 2".into()));
        }
        if residual_mass < rat_int(0) {
            return Err(Error::InvalidInput("residual mass must be nonnegative".into()));
        }
        let mut canonical: Vec<(Rational, Component)> = Vec::new();
        for (w, comp) in terms {
            if w <= rat_int(0) {
                return Err(Error::InvalidInput("component weights must be strictly positive".into()));
            }
            if comp.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: comp.ambient_dim(),
                });
            }
            let comp = match comp {
                Component::Curve(c) if c.degree() == 1 => {
                    let coeffs: Vec<GaussianRational> =
                        (0..3).map(|v| c.poly().coeff(&unit_exp(v))).collect();
                    Component::Line(Line::from_form_coeffs(&coeffs)?)
                }
                other => other,
            };
            match canonical.iter_mut().find(|(_, c)| *c == comp) {
                Some((wc, _)) => *wc = wc.clone() + w,
                None => canonical.push((w, comp)),
            }
        }
        // Distinct components must not overlap as sets; otherwise the
        // generic Lelong value along the shared piece is not the value
        // of any single term.
        for i in 0..canonical.len() {
            for j in i + 1..canonical.len() {
                if components_overlap(&canonical[i].1, &canonical[j].1)? {
                    return Err(Error::CommonComponent(format!(
                        "{} overlaps {}",
                        canonical[i].1, canonical[j].1
                    )));
                }
            }
        }
        for p in &probe_points {
            if p.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: p.ambient_dim(),
                });
            }
        }
        canonical.sort_by(|(_, a), (_, b)| a.cmp_canonical(b));
        let mut probes = probe_points;
        probes.sort_by(ProjPoint::cmp_canonical);
        probes.dedup();
        Ok(Current { ambient_dim, terms: canonical, residual_mass, probe_points: probes })
    }

    /// The zero current.
    pub fn zero(ambient_dim: usize) -> Current {
        Current {
            ambient_dim,
            terms: Vec::new(),
            residual_mass: rat_int(0),
            probe_points: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn terms(&self) -> &[(Rational, Component)] {
        &self.terms
    }

    pub fn residual_mass(&self) -> &Rational {
        &self.residual_mass
    }

    pub fn probe_points(&self) -> &[ProjPoint] {
        &self.probe_points
    }

    /// Total mass: weighted degrees plus the residual.
    pub fn mass(&self) -> Rational {
        self.terms
            .iter()
            .fold(self.residual_mass.clone(), |acc, (w, c)| acc + w * rat_int(i64::from(c.degree())))
    }

    /// Lelong number bracket at an exact point, decided exactly.
    pub fn lelong_at(&self, p: &ProjPoint) -> LelongInterval {
        let lower = self.terms.iter().fold(rat_int(0), |acc, (w, c)| {
            acc + w * rat_int(i64::from(c.multiplicity_at(p)))
        });
        LelongInterval { upper: &lower + &self.residual_mass, lower }
    }

    /// Lelong number bracket at a located point; flagged uncertified
    /// when any incidence was decided only at tolerance.
    pub fn lelong_located(&self, p: &LocatedPoint) -> LelongEstimate {
        match p {
            LocatedPoint::Exact(q) => {
                LelongEstimate { interval: self.lelong_at(q), certified: true }
            }
            LocatedPoint::Approx(_) => {
                let lower = self.terms.iter().fold(rat_int(0), |acc, (w, c)| {
                    acc + w * rat_int(i64::from(c.multiplicity_located(p)))
                });
                LelongEstimate {
                    interval: LelongInterval { upper: &lower + &self.residual_mass, lower },
                    certified: false,
                }
            }
        }
    }

    /// The upper level set at `alpha`: `{p : nu(T,p) > alpha}` when
    /// strict, `>=` otherwise.
    pub fn upper_level_set(&self, alpha: &Rational, strict: bool) -> Result<LevelSet> {
        self.upper_level_set_bits(alpha, strict, crate::DEFAULT_PRECISION_BITS)
    }

    pub fn upper_level_set_bits(
        &self,
        alpha: &Rational,
        strict: bool,
        bits: u32,
    ) -> Result<LevelSet> {
        if *alpha < rat_int(0) || *alpha >= rat_int(1) {
            return Err(Error::Precondition("level-set threshold must lie in [0, 1)".into()));
        }
        let passes = |v: &Rational| if strict { v > alpha } else { v >= alpha };
        let curve_components: Vec<CurveEntry> = self
            .terms
            .iter()
            .filter_map(|(w, c)| {
                let generic = w * rat_int(i64::from(c.generic_multiplicity()));
                passes(&generic).then(|| CurveEntry { component: c.clone(), generic_value: generic })
            })
            .collect();
        // Candidate points: every pairwise intersection, every
        // singular point of a component, and the declared probes.
        // Away from these, the Lelong number equals a generic
        // component value already accounted for.
        let mut candidates: Vec<LocatedPoint> = Vec::new();
        let push = |pt: LocatedPoint, candidates: &mut Vec<LocatedPoint>| {
            if !candidates.iter().any(|q| same_point(q, &pt)) {
                candidates.push(pt);
            }
        };
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                for pt in component_intersection(&self.terms[i].1, &self.terms[j].1, bits)? {
                    push(pt, &mut candidates);
                }
            }
            for pt in self.terms[i].1.singular_points()? {
                push(pt, &mut candidates);
            }
        }
        for p in &self.probe_points {
            push(LocatedPoint::Exact(p.clone()), &mut candidates);
        }
        let mut isolated_points: Vec<IsolatedPoint> = candidates
            .into_iter()
            .filter(|pt| !curve_components.iter().any(|e| e.component.contains_located(pt)))
            .map(|pt| {
                let est = self.lelong_located(&pt);
                IsolatedPoint {
                    membership: threshold_verdict(&est.interval, alpha, strict),
                    interval: est.interval,
                    certified: est.certified,
                    point: pt,
                }
            })
            .collect();
        isolated_points.sort_by(|a, b| a.point.cmp_canonical(&b.point));
        Ok(LevelSet { curve_components, isolated_points, threshold: alpha.clone(), strict })
    }

    /// Splits off `beta` times the integration current along `c`,
    /// returning the remainder.
    pub fn decompose(&self, c: &Component, beta: &Rational) -> Result<Current> {
        if *beta <= rat_int(0) {
            return Err(Error::Precondition("decomposition weight must be positive".into()));
        }
        let Some(idx) = self.terms.iter().position(|(_, comp)| comp == c) else {
            return Err(Error::Precondition(format!("{c} is not a component of the current")));
        };
        if self.terms[idx].0 < *beta {
            return Err(Error::Precondition(format!(
                "component {c} has weight below the requested split",
            )));
        }
        let mut terms = self.terms.clone();
        terms[idx].0 = &terms[idx].0 - beta;
        if terms[idx].0 == rat_int(0) {
            terms.remove(idx);
        }
        Ok(Current {
            ambient_dim: self.ambient_dim,
            terms,
            residual_mass: self.residual_mass.clone(),
            probe_points: self.probe_points.clone(),
        })
    }

    /// Sum of currents on the same space.
    pub fn add(&self, other: &Current) -> Result<Current> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut probes = self.probe_points.clone();
        probes.extend(other.probe_points.iter().cloned());
        Current::new(
            self.ambient_dim,
            terms,
            &self.residual_mass + &other.residual_mass,
            probes,
        )
    }

    /// Multiplies every weight and the residual by a positive factor.
    pub fn scaled(&self, factor: &Rational) -> Result<Current> {
        if *factor <= rat_int(0) {
            return Err(Error::Precondition("scaling factor must be positive".into()));
        }
        Ok(Current {
            ambient_dim: self.ambient_dim,
            terms: self.terms.iter().map(|(w, c)| (w * factor, c.clone())).collect(),
            residual_mass: &self.residual_mass * factor,
            probe_points: self.probe_points.clone(),
        })
    }

    /// Image of the current under a projective change of coordinates.
    pub fn transformed(&self, t: &ProjTransform) -> Result<Current> {
        if t.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: t.ambient_dim(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| {
                let image = match c {
                    Component::Line(l) => Component::Line(t.apply_line(l)),
                    Component::Curve(cv) => Component::Curve(t.apply_curve(cv)),
                };
                (w.clone(), image)
            })
            .collect();
        Ok(Current {
            ambient_dim: self.ambient_dim,
            terms,
            residual_mass: self.residual_mass.clone(),
            probe_points: self.probe_points.iter().map(|p| t.apply_point(p)).collect(),
        })
    }
}

fn unit_exp(v: usize) -> Vec<u32> {
    let mut e = vec![0u32; 3];
    e[v] = 1;
    e
}

/// True when two distinct components share a piece of support: a line
/// dividing a curve, or the curves sharing a factor. Distinct lines
/// never overlap.
fn components_overlap(a: &Component, b: &Component) -> Result<bool> {
    match (a, b) {
        (Component::Line(_), Component::Line(_)) => Ok(false),
        (Component::Line(l), Component::Curve(c)) | (Component::Curve(c), Component::Line(l)) => {
            let lc = PlaneCurve::new(l.to_form()?)?;
            Ok(!curves_coprime(&lc, c)?)
        }
        (Component::Curve(c1), Component::Curve(c2)) => Ok(!curves_coprime(c1, c2)?),
    }
}

/// All intersection points of two non-overlapping components.
pub fn component_intersection(
    a: &Component,
    b: &Component,
    bits: u32,
) -> Result<Vec<LocatedPoint>> {
    match (a, b) {
        (Component::Line(l1), Component::Line(l2)) => Ok(line_line_intersection(l1, l2)?
            .map(|p| vec![LocatedPoint::Exact(p)])
            .unwrap_or_default()),
        (Component::Line(l), Component::Curve(c)) | (Component::Curve(c), Component::Line(l)) => {
            line_curve_intersection(l, c, bits)
        }
        (Component::Curve(c1), Component::Curve(c2)) => {
            curve_curve_intersection_bits(c1, c2, bits)
        }
    }
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.residual_mass == rat_int(0) {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}·[{c}]", crate::field::format_rational(w))?;
        }
        if self.residual_mass != rat_int(0) {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "residual({})", crate::field::format_rational(&self.residual_mass))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(with = "rat_str")]
    weight: Rational,
    component: Component,
}

#[derive(Serialize, Deserialize)]
struct CurrentRepr {
    ambient_dim: usize,
    terms: Vec<TermRepr>,
    #[serde(with = "rat_str")]
    residual_mass: Rational,
    #[serde(default)]
    probe_points: Vec<ProjPoint>,
}

impl Serialize for Current {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurrentRepr {
            ambient_dim: self.ambient_dim,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermRepr { weight: w.clone(), component: c.clone() })
                .collect(),
            residual_mass: self.residual_mass.clone(),
            probe_points: self.probe_points.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Current {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CurrentRepr::deserialize(d)?;
        Current::new(
            repr.ambient_dim,
            repr.terms.into_iter().map(|t| (t.weight, t.component)).collect(),
            repr.residual_mass,
            repr.probe_points,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::poly::MultiPoly;

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn pt(coords: &[i64]) -> ProjPoint {
        ProjPoint::from_ints(coords)
    }

    fn line(coeffs: &[i64]) -> Component {
        Component::Line(Line::from_int_form(coeffs))
    }

    /// The triangle current: one third of each coordinate line of the
    /// plane; mass one, Lelong number 2/3 at each vertex.
    fn triangle() -> Current {
        Current::new(
            2,
            vec![
                (rat(1, 3), line(&[1, 0, 0])),
                (rat(1, 3), line(&[0, 1, 0])),
                (rat(1, 3), line(&[0, 0, 1])),
            ],
            rat_int(0),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn mass_of_reference_currents() {
        // Four lines with weight one quarter each.
        let t = Current::new(
            2,
            vec![
                (rat(1, 4), line(&[1, 0, 0])),
                (rat(1, 4), line(&[0, 1, 0])),
                (rat(1, 4), line(&[0, 0, 1])),
                (rat(1, 4), line(&[1, 1, 1])),
            ],
            rat_int(0),
            vec![],
        )
        .unwrap();
        assert_eq!(t.mass(), rat_int(1));
        // Half a conic.
        let c = Current::new(
            2,
            vec![(rat(1, 2), Component::Curve(PlaneCurve::standard_conic()))],
            rat_int(0),
            vec![],
        )
        .unwrap();
        assert_eq!(c.mass(), rat_int(1));
        assert_eq!(Current::zero(2).mass(), rat_int(0));
        // Residual counts toward the mass.
        let r = Current::new(2, vec![], rat(1, 3), vec![]).unwrap();
        assert_eq!(r.mass(), rat(1, 3));
    }

    #[test]
    fn lelong_numbers_at_vertices_and_elsewhere() {
        let t = triangle();
        // Vertices lie on two of the three lines.
        for v in [pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])] {
            assert_eq!(t.lelong_at(&v), LelongInterval::point(rat(2, 3)));
        }
        // A generic point of one line.
        assert_eq!(t.lelong_at(&pt(&[0, 1, 1])), LelongInterval::point(rat(1, 3)));
        // A point on no component.
        assert_eq!(t.lelong_at(&pt(&[1, 1, 1])), LelongInterval::point(rat_int(0)));
        // Lelong numbers never exceed the mass.
        assert!(t.lelong_at(&pt(&[1, 0, 0])).upper <= t.mass());
    }

    #[test]
    fn residual_widens_the_interval() {
        let t = Current::new(2, vec![(rat(1, 2), line(&[1, 0, 0]))], rat(1, 2), vec![]).unwrap();
        let on = t.lelong_at(&pt(&[0, 1, 0]));
        assert_eq!(on, LelongInterval { lower: rat(1, 2), upper: rat_int(1) });
        let off = t.lelong_at(&pt(&[1, 1, 1]));
        assert_eq!(off, LelongInterval { lower: rat_int(0), upper: rat(1, 2) });
        assert!(!off.is_exact());
    }

    #[test]
    fn node_of_a_line_pair_doubles_the_weight() {
        // Half the singular conic x0 x1 = 0: order two at the node.
        let pair = PlaneCurve::new(MultiPoly::monomial(vec![1, 1, 0], gi(1))).unwrap();
        let t = Current::new(2, vec![(rat(1, 2), Component::Curve(pair))], rat_int(0), vec![])
            .unwrap();
        assert_eq!(t.lelong_at(&pt(&[0, 0, 1])), LelongInterval::point(rat_int(1)));
        assert_eq!(t.lelong_at(&pt(&[0, 1, 1])), LelongInterval::point(rat(1, 2)));
    }

    #[test]
    fn level_set_of_the_triangle() {
        let t = triangle();
        let e = t.upper_level_set(&rat(2, 3), false).unwrap();
        assert!(e.curve_components.is_empty());
        let ins: Vec<_> = e.points_in().collect();
        assert_eq!(ins.len(), 3);
        for p in &ins {
            assert!(p.certified);
            assert_eq!(p.interval, LelongInterval::point(rat(2, 3)));
        }
        assert_eq!(e.points_unknown().count(), 0);
        // Strictly above 2/3 nothing survives.
        let v = t.upper_level_set(&rat(2, 3), true).unwrap();
        assert!(v.is_empty());
        // At a lower threshold the lines themselves appear.
        let e = t.upper_level_set(&rat(1, 3), false).unwrap();
        assert_eq!(e.curve_components.len(), 3);
        // Vertices lie on listed components, so no isolated points.
        assert!(e.isolated_points.is_empty());
    }

    #[test]
    fn level_set_with_residual_straddling() {
        let t = Current::new(
            2,
            vec![(rat(1, 2), line(&[1, 0, 0]))],
            rat(1, 2),
            vec![pt(&[1, 1, 1])],
        )
        .unwrap();
        let v = t.upper_level_set(&rat(2, 5), true).unwrap();
        assert_eq!(v.curve_components.len(), 1);
        assert_eq!(v.curve_components[0].generic_value, rat(1, 2));
        // The probe point off the line straddles: [0, 1/2] vs 2/5.
        assert_eq!(v.isolated_points.len(), 1);
        assert_eq!(v.isolated_points[0].membership, Membership::Unknown);
        assert!(!v.is_empty());
    }

    #[test]
    fn level_set_threshold_domain() {
        let t = triangle();
        assert!(t.upper_level_set(&rat_int(1), false).is_err());
        assert!(t.upper_level_set(&rat(-1, 2), false).is_err());
        assert!(t.upper_level_set(&rat_int(0), false).is_ok());
    }

    #[test]
    fn decompose_splits_and_validates() {
        let l = line(&[1, 0, 0]);
        let t = Current::new(2, vec![(rat_int(1), l.clone())], rat_int(0), vec![]).unwrap();
        let r = t.decompose(&l, &rat_int(1)).unwrap();
        assert_eq!(r.mass(), rat_int(0));
        assert!(r.terms().is_empty());
        // Partial split leaves the remainder on the same component.
        let r = t.decompose(&l, &rat(1, 3)).unwrap();
        assert_eq!(r.mass(), rat(2, 3));
        assert_eq!(r.lelong_at(&pt(&[0, 1, 0])), LelongInterval::point(rat(2, 3)));
        // Conic at exactly its weight.
        let c = Component::Curve(PlaneCurve::standard_conic());
        let t = Current::new(2, vec![(rat(1, 2), c.clone())], rat_int(0), vec![]).unwrap();
        assert_eq!(t.decompose(&c, &rat(1, 2)).unwrap().mass(), rat_int(0));
        // Requesting more than the stored weight fails.
        assert!(t.decompose(&c, &rat(2, 3)).is_err());
        assert!(t.decompose(&line(&[0, 1, 0]), &rat(1, 4)).is_err());
    }

    #[test]
    fn construction_merges_and_rejects() {
        // Repeated component: weights merge.
        let t = Current::new(
            2,
            vec![(rat(1, 4), line(&[1, 0, 0])), (rat(1, 4), line(&[2, 0, 0]))],
            rat_int(0),
            vec![],
        )
        .unwrap();
        assert_eq!(t.terms().len(), 1);
        assert_eq!(t.terms()[0].0, rat(1, 2));
        // A degree-one curve is canonicalized into a line and merged.
        let as_curve = Component::Curve(
            PlaneCurve::new(MultiPoly::monomial(vec![1, 0, 0], gi(3))).unwrap(),
        );
        let t = Current::new(
            2,
            vec![(rat(1, 4), line(&[1, 0, 0])), (rat(1, 4), as_curve)],
            rat_int(0),
            vec![],
        )
        .unwrap();
        assert_eq!(t.terms().len(), 1);
        // A line lying inside a reducible conic is rejected.
        let pair = PlaneCurve::new(MultiPoly::monomial(vec![1, 1, 0], gi(1))).unwrap();
        let bad = Current::new(
            2,
            vec![(rat(1, 2), line(&[1, 0, 0])), (rat(1, 2), Component::Curve(pair))],
            rat_int(0),
            vec![],
        );
        assert!(matches!(bad, Err(Error::CommonComponent(_))));
        // Nonpositive weights and negative residuals are invalid.
        assert!(Current::new(2, vec![(rat_int(0), line(&[1, 0, 0]))], rat_int(0), vec![]).is_err());
        assert!(Current::new(2, vec![], rat(-1, 2), vec![]).is_err());
    }

    #[test]
    fn addition_is_componentwise() {
        let a = Current::new(2, vec![(rat(1, 3), line(&[1, 0, 0]))], rat(1, 6), vec![]).unwrap();
        let b = Current::new(
            2,
            vec![(rat(1, 3), line(&[1, 0, 0])), (rat(1, 4), line(&[0, 1, 0]))],
            rat(1, 12),
            vec![],
        )
        .unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.mass(), a.mass() + b.mass());
        for p in [pt(&[0, 0, 1]), pt(&[0, 1, 0]), pt(&[1, 1, 1])] {
            let ia = a.lelong_at(&p);
            let ib = b.lelong_at(&p);
            let is = s.lelong_at(&p);
            assert_eq!(is.lower, ia.lower + ib.lower);
            assert_eq!(is.upper, ia.upper + ib.upper);
        }
    }

    #[test]
    fn lelong_invariant_under_projective_transforms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let t = triangle();
        for _ in 0..10 {
            let g = ProjTransform::random(&mut rng, 2);
            let tg = t.transformed(&g).unwrap();
            for p in [pt(&[1, 0, 0]), pt(&[0, 1, 1]), pt(&[1, 1, 1]), pt(&[2, 3, 5])] {
                assert_eq!(t.lelong_at(&p), tg.lelong_at(&g.apply_point(&p)));
            }
        }
    }

    #[test]
    fn level_set_with_conic_and_line_candidates() {
        // Half a conic plus half a secant line: the secant meets the
        // conic at the parameter-0 and parameter-1 points of
        // [1:t:t^2], and each crossing carries Lelong number 1.
        let l = Component::Line(
            Line::through(&pt(&[1, 0, 0]), &pt(&[1, 1, 1])).unwrap(),
        );
        let c = Component::Curve(PlaneCurve::standard_conic());
        let t = Current::new(2, vec![(rat(1, 2), l), (rat(1, 2), c)], rat_int(0), vec![])
            .unwrap();
        let e = t.upper_level_set(&rat(3, 4), false).unwrap();
        assert!(e.curve_components.is_empty());
        let ins: Vec<_> = e.points_in().collect();
        assert_eq!(ins.len(), 2);
        for p in ins {
            assert_eq!(p.interval, LelongInterval::point(rat_int(1)));
        }
    }

    #[test]
    fn multiplicity_at_approx_points_is_consistent() {
        // Intersect the conic with a line producing irrational points,
        // then check the located multiplicities seen by a current.
        let conic = PlaneCurve::standard_conic();
        let l = Line::from_int_form(&[1, 1, -1]);
        let pts = crate::geom::line_curve_intersection(&l, &conic, 256).unwrap();
        let t = Current::new(
            2,
            vec![
                (rat(1, 2), Component::Curve(conic)),
                (rat(1, 3), Component::Line(l)),
                (rat(1, 5), line(&[1, 0, 0])),
            ],
            rat_int(0),
            vec![],
        )
        .unwrap();
        for p in &pts {
            let est = t.lelong_located(p);
            assert!(!est.certified);
            // On the conic and the secant, off the third line.
            assert_eq!(est.interval, LelongInterval::point(rat(1, 2) + rat(1, 3)));
        }
    }

    #[test]
    fn serde_round_trip_and_shape() {
        let t = Current::new(
            2,
            vec![
                (rat(1, 2), line(&[1, 0, 0])),
                (rat(1, 4), Component::Curve(PlaneCurve::standard_conic())),
            ],
            rat(1, 4),
            vec![pt(&[1, 1, 1])],
        )
        .unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"ambient_dim\":2"));
        assert!(json.contains("\"weight\":\"1/2\""));
        assert!(json.contains("\"residual_mass\":\"1/4\""));
        assert!(json.contains("\"probe_points\""));
        let back: Current = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        // Probe points default to empty.
        let bare: Current = serde_json::from_str(
            r#"{"ambient_dim":2,"terms":[],"residual_mass":"0"}"#,
        )
        .unwrap();
        assert_eq!(bare, Current::zero(2));
        // Overlapping terms are rejected at parse time: the line
        // {x0 = 0} sits inside the reducible conic x0 x1 = 0.
        let bad = r#"{"ambient_dim":2,"terms":[
            {"weight":"1/2","component":{"span":[["0","1","0"],["0","0","1"]]}},
            {"weight":"1/2","component":{"poly":[{"exponents":[1,1,0],"coeff":"1"}],"degree":2}}
        ],"residual_mass":"0"}"#;
        assert!(serde_json::from_str::<Current>(bad).is_err());
    }

    #[test]
    fn lines_in_three_space() {
        // Two concurrent lines in three-dimensional projective space.
        let l1 = Component::Line(Line::through(&pt(&[1, 0, 0, 0]), &pt(&[0, 1, 0, 0])).unwrap());
        let l2 = Component::Line(Line::through(&pt(&[1, 0, 0, 0]), &pt(&[0, 0, 1, 0])).unwrap());
        let t = Current::new(
            3,
            vec![(rat(1, 2), l1), (rat(1, 2), l2)],
            rat_int(0),
            vec![],
        )
        .unwrap();
        assert_eq!(t.mass(), rat_int(1));
        assert_eq!(t.lelong_at(&pt(&[1, 0, 0, 0])), LelongInterval::point(rat_int(1)));
        let e = t.upper_level_set(&rat(3, 4), false).unwrap();
        assert_eq!(e.points_in().count(), 1);
    }
}
