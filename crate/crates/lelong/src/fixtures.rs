//! Worked example currents with their claimed facts attached as
//! checkable assertions, plus seeded random generators for currents
//! and for point configurations feeding the Green constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::current::{Component, Current, Membership};
use crate::field::{rat, rat_int, GaussianRational, Rational};
use crate::geom::{m_invariant, Line, PlaneCurve, PointConfig, ProjPoint, ProjTransform};
use crate::green::affine_m_invariant;
use crate::linalg::Matrix;
use crate::{Error, Result};

/// One verifiable claim about a current, checked in exact arithmetic.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fact {
    /// Total mass, residual included.
    Mass {
        #[serde(with = "crate::field::rat_str")]
        value: Rational,
    },
    /// Represented Lelong number at a point (the interval's lower
    /// bound; exact when the current has no residual mass).
    LelongAt {
        point: ProjPoint,
        #[serde(with = "crate::field::rat_str")]
        value: Rational,
    },
    /// The level set consists of exactly these points, all decided, no
    /// curve components.
    LevelSetPoints {
        #[serde(with = "crate::field::rat_str")]
        alpha: Rational,
        strict: bool,
        points: Vec<ProjPoint>,
    },
    /// Every one of these points lies in the level set.
    LevelSetContains {
        #[serde(with = "crate::field::rat_str")]
        alpha: Rational,
        strict: bool,
        points: Vec<ProjPoint>,
    },
    /// The point is decidedly outside the level set.
    LevelSetExcludes {
        #[serde(with = "crate::field::rat_str")]
        alpha: Rational,
        strict: bool,
        point: ProjPoint,
    },
    /// The component appears in the level set with a passing generic
    /// value.
    LevelSetCurve {
        #[serde(with = "crate::field::rat_str")]
        alpha: Rational,
        strict: bool,
        component: Component,
    },
    /// Every decided-in point of the level set lies on the component.
    PointsInOnComponent {
        #[serde(with = "crate::field::rat_str")]
        alpha: Rational,
        strict: bool,
        component: Component,
    },
    /// Largest number of the points on one line.
    MaxOnLine { points: Vec<ProjPoint>, value: u32 },
    /// Largest number of the points on one conic.
    MaxOnConic { points: Vec<ProjPoint>, value: u32 },
}

impl Fact {
    pub fn check(&self, t: &Current) -> Result<bool> {
        match self {
            Fact::Mass { value } => Ok(t.mass() == *value),
            Fact::LelongAt { point, value } => Ok(t.lelong_at(point).lower == *value),
            Fact::LevelSetPoints { alpha, strict, points } => {
                let ls = t.upper_level_set(alpha, *strict)?;
                if !ls.curve_components.is_empty() || ls.points_unknown().next().is_some() {
                    return Ok(false);
                }
                let mut found: Vec<&ProjPoint> = Vec::new();
                for p in ls.points_in() {
                    match &p.point {
                        crate::geom::LocatedPoint::Exact(q) => found.push(q),
                        crate::geom::LocatedPoint::Approx(_) => return Ok(false),
                    }
                }
                if found.len() != points.len() {
                    return Ok(false);
                }
                Ok(points.iter().all(|p| found.contains(&p)))
            }
            Fact::LevelSetContains { alpha, strict, points } => {
                let ls = t.upper_level_set(alpha, *strict)?;
                let found: Vec<_> = ls.points_in().collect();
                Ok(points.iter().all(|p| {
                    found.iter().any(|q| {
                        matches!(&q.point, crate::geom::LocatedPoint::Exact(e) if e == p)
                    })
                }))
            }
            Fact::LevelSetExcludes { alpha, strict, point } => {
                let ls = t.upper_level_set(alpha, *strict)?;
                for p in &ls.isolated_points {
                    if let crate::geom::LocatedPoint::Exact(e) = &p.point {
                        if e == point {
                            return Ok(p.membership == Membership::Out);
                        }
                    }
                }
                Ok(!ls
                    .curve_components
                    .iter()
                    .any(|e| e.component.contains_located(&crate::geom::LocatedPoint::Exact(point.clone()))))
            }
            Fact::LevelSetCurve { alpha, strict, component } => {
                let ls = t.upper_level_set(alpha, *strict)?;
                Ok(ls
                    .curve_components
                    .iter()
                    .any(|e| e.component.cmp_canonical(component).is_eq()))
            }
            Fact::PointsInOnComponent { alpha, strict, component } => {
                let ls = t.upper_level_set(alpha, *strict)?;
                let all_on = ls.points_in().all(|p| component.contains_located(&p.point));
                Ok(all_on)
            }
            Fact::MaxOnLine { points, value } => {
                Ok(m_invariant(&PointConfig::new(points.clone())?, 1)? == *value)
            }
            Fact::MaxOnConic { points, value } => {
                Ok(m_invariant(&PointConfig::new(points.clone())?, 2)? == *value)
            }
        }
    }

    pub fn describe(&self) -> String {
        use crate::field::format_rational as fr;
        match self {
            Fact::Mass { value } => format!("mass = {}", fr(value)),
            Fact::LelongAt { point, value } => format!("nu at {point} = {}", fr(value)),
            Fact::LevelSetPoints { alpha, strict, points } => format!(
                "level set at {} ({}) is exactly {} point(s)",
                fr(alpha),
                if *strict { ">" } else { ">=" },
                points.len()
            ),
            Fact::LevelSetContains { alpha, strict, points } => format!(
                "level set at {} ({}) contains {} listed point(s)",
                fr(alpha),
                if *strict { ">" } else { ">=" },
                points.len()
            ),
            Fact::LevelSetExcludes { alpha, strict, point } => format!(
                "level set at {} ({}) excludes {point}",
                fr(alpha),
                if *strict { ">" } else { ">=" }
            ),
            Fact::LevelSetCurve { alpha, strict, component } => format!(
                "level set at {} ({}) lists component {component}",
                fr(alpha),
                if *strict { ">" } else { ">=" }
            ),
            Fact::PointsInOnComponent { alpha, strict, component } => format!(
                "all level-set points at {} ({}) lie on {component}",
                fr(alpha),
                if *strict { ">" } else { ">=" }
            ),
            Fact::MaxOnLine { points, value } => {
                format!("at most {value} of the {} points on a line", points.len())
            }
            Fact::MaxOnConic { points, value } => {
                format!("at most {value} of the {} points on a conic", points.len())
            }
        }
    }
}

/// Parameters for the example families that take any.
#[derive(Clone, Debug, Default)]
pub struct ExampleParams {
    /// Number of concurrent lines in the pencil family (at least 2).
    pub m: Option<u32>,
    /// Number of represented terms in the convergent family (at least
    /// 1, at most 40); the tail becomes residual mass.
    pub truncation: Option<u32>,
}

/// A worked example: the exact current and its claimed facts.
#[derive(Clone, Debug)]
pub struct ExampleData {
    pub id: String,
    pub current: Current,
    pub facts: Vec<Fact>,
}

impl ExampleData {
    /// Runs every fact, returning the descriptions of those that fail.
    pub fn failures(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for f in &self.facts {
            if !f.check(&self.current)? {
                out.push(f.describe());
            }
        }
        Ok(out)
    }
}

fn line(coeffs: &[i64; 3]) -> Component {
    Component::Line(Line::from_int_form(coeffs))
}

fn pt(coords: &[i64]) -> ProjPoint {
    ProjPoint::from_ints(coords)
}

/// The catalog of worked examples, by identifier "3.2" through "3.9".
pub fn gen_example(id: &str, params: &ExampleParams) -> Result<ExampleData> {
    match id {
        "3.2" => {
            let current = Current::new(
                2,
                vec![
                    (rat(1, 3), line(&[1, 0, 0])),
                    (rat(1, 3), line(&[0, 1, 0])),
                    (rat(1, 3), line(&[1, 1, -1])),
                ],
                rat_int(0),
                vec![],
            )?;
            let corners = vec![pt(&[1, 0, 1]), pt(&[0, 1, 1]), pt(&[0, 0, 1])];
            let mut facts = vec![Fact::Mass { value: rat_int(1) }];
            for p in &corners {
                facts.push(Fact::LelongAt { point: p.clone(), value: rat(2, 3) });
            }
            facts.push(Fact::LevelSetPoints {
                alpha: rat(2, 3),
                strict: false,
                points: corners.clone(),
            });
            facts.push(Fact::MaxOnLine { points: corners, value: 2 });
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.3" => {
            let current = Current::new(
                2,
                vec![
                    (rat(1, 4), line(&[1, 0, 0])),
                    (rat(1, 4), line(&[0, 1, 0])),
                    (rat(1, 4), line(&[0, 0, 1])),
                    (rat(1, 4), line(&[1, 1, 1])),
                ],
                rat_int(0),
                vec![],
            )?;
            let crossings = vec![
                pt(&[0, 0, 1]),
                pt(&[0, 1, 0]),
                pt(&[0, 1, -1]),
                pt(&[1, 0, 0]),
                pt(&[1, 0, -1]),
                pt(&[1, -1, 0]),
            ];
            let facts = vec![
                Fact::Mass { value: rat_int(1) },
                Fact::LelongAt { point: crossings[0].clone(), value: rat(1, 2) },
                Fact::LevelSetPoints {
                    alpha: rat(1, 2),
                    strict: false,
                    points: crossings.clone(),
                },
                Fact::LevelSetPoints { alpha: rat(1, 2), strict: true, points: vec![] },
                Fact::MaxOnLine { points: crossings.clone(), value: 3 },
                Fact::MaxOnConic { points: crossings, value: 5 },
            ];
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.4" => {
            let conic = Component::Curve(PlaneCurve::standard_conic());
            let current =
                Current::new(2, vec![(rat(1, 2), conic.clone())], rat_int(0), vec![])?;
            let facts = vec![
                Fact::Mass { value: rat_int(1) },
                Fact::LevelSetCurve { alpha: rat(1, 2), strict: false, component: conic.clone() },
                Fact::LevelSetCurve { alpha: rat(2, 5), strict: true, component: conic },
            ];
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.5" => {
            let m = params.m.unwrap_or(3);
            if !(2..=50).contains(&m) {
                return Err(Error::InvalidInput(format!(
                    "the pencil family needs 2 <= m <= 50, got {m}"
                )));
            }
            let m = i64::from(m);
            // Lines through the origin of slopes 0..m-1, cut by the
            // vertical line x = 1.
            let mut terms = vec![(rat(m - 1, 2 * m), line(&[1, 0, -1]))];
            let mut points = Vec::new();
            for j in 1..=m {
                terms.push((rat(m + 1, 2 * m * m), line(&[j - 1, -1, 0])));
                points.push(pt(&[1, j - 1, 1]));
            }
            let q = pt(&[0, 0, 1]);
            let current = Current::new(2, terms, rat_int(0), vec![])?;
            let mut facts = vec![Fact::Mass { value: rat_int(1) }];
            for p in &points {
                facts.push(Fact::LelongAt {
                    point: p.clone(),
                    value: rat(m * m + 1, 2 * m * m),
                });
            }
            facts.push(Fact::LelongAt { point: q.clone(), value: rat(m + 1, 2 * m) });
            let mut all = points.clone();
            all.push(q);
            facts.push(Fact::LevelSetPoints {
                alpha: rat(1, 2),
                strict: true,
                points: all.clone(),
            });
            facts.push(Fact::MaxOnLine { points: all, value: m as u32 });
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.6" => {
            let heavy: [[i64; 3]; 6] = [
                [1, 0, 0],
                [0, 1, 0],
                [1, 1, -1],
                [3, -1, -3],
                [1, -1, 1],
                [3, -2, 0],
            ];
            let light: [[i64; 3]; 3] = [[3, 1, 3], [9, -1, -3], [3, -7, 3]];
            let mut terms: Vec<(Rational, Component)> =
                heavy.iter().map(|c| (rat(2, 15), line(c))).collect();
            terms.extend(light.iter().map(|c| (rat(1, 15), line(c))));
            let current = Current::new(2, terms, rat_int(0), vec![])?;
            let s = vec![
                pt(&[1, 0, 1]),
                pt(&[0, 1, 1]),
                pt(&[0, 0, 1]),
                pt(&[2, 3, 1]),
                pt(&[0, -3, 1]),
                pt(&[-1, 0, 1]),
                pt(&[2, 3, 5]),
            ];
            let mut facts = vec![Fact::Mass { value: rat_int(1) }];
            for p in &s {
                facts.push(Fact::LelongAt { point: p.clone(), value: rat(2, 5) });
            }
            facts.push(Fact::LevelSetPoints {
                alpha: rat(2, 5),
                strict: false,
                points: s.clone(),
            });
            facts.push(Fact::LevelSetPoints { alpha: rat(2, 5), strict: true, points: vec![] });
            facts.push(Fact::MaxOnLine { points: s.clone(), value: 3 });
            facts.push(Fact::MaxOnConic { points: s, value: 5 });
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.7" => {
            let n = params.truncation.unwrap_or(10);
            if !(1..=40).contains(&n) {
                return Err(Error::InvalidInput(format!(
                    "the convergent family needs 1 <= truncation <= 40, got {n}"
                )));
            }
            let conic = Component::Curve(PlaneCurve::standard_conic());
            let q = pt(&[1, 0, 1]);
            let mut points = vec![pt(&[1, 0, 0])];
            for j in 1..n {
                let j = i64::from(j);
                points.push(pt(&[1 << (2 * j), 1 << j, 1]));
            }
            let mut terms = vec![(rat(2, 5), conic.clone())];
            for (j, p) in points.iter().enumerate() {
                let weight = rat(1, 5 * (1i64 << (j + 1)));
                terms.push((weight, Component::Line(Line::through(p, &q)?)));
            }
            let residual = rat(1, 5 * (1i64 << n));
            let current = Current::new(2, terms, residual, vec![q.clone()])?;
            let facts = vec![
                Fact::Mass { value: rat_int(1) },
                Fact::LevelSetContains { alpha: rat(2, 5), strict: true, points },
                Fact::PointsInOnComponent { alpha: rat(2, 5), strict: true, component: conic },
                Fact::LevelSetExcludes { alpha: rat(2, 5), strict: true, point: q },
            ];
            Ok(ExampleData { id: id.into(), current, facts })
        }
        "3.9" => {
            let l1 = line(&[1, 0, 0]);
            let l2 = line(&[0, 1, 0]);
            let current = Current::new(
                2,
                vec![(rat(1, 2), l1.clone()), (rat(1, 2), l2.clone())],
                rat_int(0),
                vec![],
            )?;
            let q = pt(&[0, 0, 1]);
            let facts = vec![
                Fact::Mass { value: rat_int(1) },
                Fact::LelongAt { point: q.clone(), value: rat_int(1) },
                Fact::LevelSetCurve { alpha: rat(1, 2), strict: false, component: l1 },
                Fact::LevelSetCurve { alpha: rat(1, 2), strict: false, component: l2 },
                Fact::LevelSetPoints { alpha: rat(1, 2), strict: true, points: vec![q] },
            ];
            Ok(ExampleData { id: id.into(), current, facts })
        }
        other => Err(Error::InvalidInput(format!("unknown example id: {other}"))),
    }
}

/// Shape of a requested random current.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub ambient_dim: usize,
    pub max_components: usize,
    pub allow_conics: bool,
    pub total_mass: Rational,
}

fn random_point(rng: &mut ChaCha8Rng, ambient_dim: usize) -> ProjPoint {
    loop {
        let coords: Vec<i64> =
            (0..=ambient_dim).map(|_| rng.random_range(-3..=3)).collect();
        if coords.iter().any(|&c| c != 0) {
            return ProjPoint::from_ints(&coords);
        }
    }
}

fn random_line(rng: &mut ChaCha8Rng, ambient_dim: usize) -> Line {
    loop {
        let p = random_point(rng, ambient_dim);
        let q = random_point(rng, ambient_dim);
        if let Ok(l) = Line::through(&p, &q) {
            return l;
        }
    }
}

/// Deterministic pseudo-random current: distinct components with
/// small-integer data and exact rational weights whose degree-weighted
/// sum equals the requested mass.
pub fn random_current(seed: u64, spec: &RandomSpec) -> Result<Current> {
    if spec.ambient_dim < 2 {
        return Err(Error::InvalidInput("currents live in dimension at least 2".into()));
    }
    if spec.max_components == 0 {
        return Err(Error::InvalidInput("at least one component is required".into()));
    }
    if spec.total_mass <= rat_int(0) {
        return Err(Error::InvalidInput("the total mass must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let k = rng.random_range(1..=spec.max_components);
        let mut components: Vec<Component> = Vec::new();
        for _ in 0..k {
            if spec.allow_conics && spec.ambient_dim == 2 && rng.random_bool(0.34) {
                let map = ProjTransform::random(&mut rng, 2);
                components.push(Component::Curve(map.apply_curve(&PlaneCurve::standard_conic())));
            } else {
                components.push(Component::Line(random_line(&mut rng, spec.ambient_dim)));
            }
        }
        let shares: Vec<i64> = components.iter().map(|_| rng.random_range(1..=6)).collect();
        let denom: i64 = components
            .iter()
            .zip(&shares)
            .map(|(c, &a)| a * i64::from(c.degree()))
            .sum();
        let terms: Vec<(Rational, Component)> = components
            .into_iter()
            .zip(&shares)
            .map(|(c, &a)| (rat_int(a) * &spec.total_mass / rat_int(denom), c))
            .collect();
        if let Ok(t) = Current::new(spec.ambient_dim, terms, rat_int(0), vec![]) {
            return Ok(t);
        }
    }
    Err(Error::ConstructionFailed(
        "no valid random current within the attempt budget".into(),
    ))
}

fn gi(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn random_affine_point(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> Vec<GaussianRational> {
    (0..dim).map(|_| gi(rng.random_range(-bound..=bound))).collect()
}

fn distinct(points: &[Vec<GaussianRational>]) -> bool {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return false;
            }
        }
    }
    true
}

fn collinear_triples(points: &[Vec<GaussianRational>]) -> usize {
    let mut count = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                let ux = &points[j][0] - &points[i][0];
                let uy = &points[j][1] - &points[i][1];
                let vx = &points[k][0] - &points[i][0];
                let vy = &points[k][1] - &points[i][1];
                if (&ux * &vy - &uy * &vx).is_zero() {
                    count += 1;
                }
            }
        }
    }
    count
}

/// A random invertible affine map of the plane with small integer
/// entries, applied to a point.
struct PlaneMap {
    a: [[i64; 2]; 2],
    b: [i64; 2],
}

impl PlaneMap {
    fn random(rng: &mut ChaCha8Rng) -> PlaneMap {
        loop {
            let a = [
                [rng.random_range(-2..=2), rng.random_range(-2..=2)],
                [rng.random_range(-2..=2), rng.random_range(-2..=2)],
            ];
            if a[0][0] * a[1][1] - a[0][1] * a[1][0] != 0 {
                return PlaneMap { a, b: [rng.random_range(-3..=3), rng.random_range(-3..=3)] };
            }
        }
    }

    fn apply(&self, x: i64, y: i64) -> Vec<GaussianRational> {
        vec![
            gi(self.a[0][0] * x + self.a[0][1] * y + self.b[0]),
            gi(self.a[1][0] * x + self.a[1][1] * y + self.b[1]),
        ]
    }
}

fn distinct_parameters(rng: &mut ChaCha8Rng, count: usize, bound: i64) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    while out.len() < count {
        let t = rng.random_range(-bound..=bound);
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Four affinely independent points in complex affine 3-space.
pub fn random_spatial_config(seed: u64) -> Vec<Vec<GaussianRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Vec<GaussianRational>> =
            (0..4).map(|_| random_affine_point(&mut rng, 3, 3)).collect();
        if !distinct(&pts) {
            continue;
        }
        let diffs: Vec<Vec<GaussianRational>> = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
            .collect();
        if Matrix::from_rows(diffs).rank() == 3 {
            return pts;
        }
    }
}

/// Three or four plane points with no collinear triple.
pub fn random_pencil_config(seed: u64, size: usize) -> Vec<Vec<GaussianRational>> {
    assert!(size == 3 || size == 4, "pencils take 3 or 4 points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Vec<GaussianRational>> =
            (0..size).map(|_| random_affine_point(&mut rng, 2, 5)).collect();
        if distinct(&pts) && collinear_triples(&pts) == 0 {
            return pts;
        }
    }
}

/// Which collinearity structure a seven-point configuration carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SevenPointKind {
    /// No three collinear.
    Generic,
    /// Exactly one collinear triple.
    OneTriple,
    /// Two collinear triples sharing a point.
    TwoTriples,
}

/// Seven plane points with at most five on any conic, in the requested
/// collinearity class.
pub fn random_seven_point_config(seed: u64, kind: SevenPointKind) -> Vec<Vec<GaussianRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let map = PlaneMap::random(&mut rng);
        let pts: Vec<Vec<GaussianRational>> = match kind {
            SevenPointKind::Generic => {
                // Five points of a smooth conic plus two free points.
                let ts = distinct_parameters(&mut rng, 5, 4);
                let mut pts: Vec<Vec<GaussianRational>> =
                    ts.iter().map(|&t| map.apply(t, t * t)).collect();
                pts.push(random_affine_point(&mut rng, 2, 6));
                pts.push(random_affine_point(&mut rng, 2, 6));
                pts
            }
            SevenPointKind::OneTriple => {
                // Three points of a line plus four free points.
                let ts = distinct_parameters(&mut rng, 3, 4);
                let mut pts: Vec<Vec<GaussianRational>> =
                    ts.iter().map(|&t| map.apply(t, 0)).collect();
                for _ in 0..4 {
                    pts.push(random_affine_point(&mut rng, 2, 6));
                }
                pts
            }
            SevenPointKind::TwoTriples => {
                // Two lines through a shared point, two further points
                // on each, plus two free points.
                let ts = distinct_parameters(&mut rng, 5, 4);
                let mut pts = vec![map.apply(0, 0)];
                for &t in &ts[..2] {
                    if t == 0 {
                        continue;
                    }
                    pts.push(map.apply(t, 0));
                }
                for &t in &ts[2..4] {
                    if t == 0 {
                        continue;
                    }
                    pts.push(map.apply(0, t));
                }
                if pts.len() != 5 {
                    continue;
                }
                pts.push(random_affine_point(&mut rng, 2, 6));
                pts.push(random_affine_point(&mut rng, 2, 6));
                pts
            }
        };
        if pts.len() != 7 || !distinct(&pts) {
            continue;
        }
        let Ok(m2) = affine_m_invariant(&pts, 2) else { continue };
        if m2 != 5 {
            continue;
        }
        let triples = collinear_triples(&pts);
        let ok = match kind {
            SevenPointKind::Generic => triples == 0,
            SevenPointKind::OneTriple => triples == 1,
            SevenPointKind::TwoTriples => triples == 2,
        };
        if ok {
            return pts;
        }
    }
}

/// Seven points with exactly six on a conic, plus an extra point off
/// the conic. With `force_line` the extra point is placed so that a
/// line carries it, the off-conic point, and two conic points.
pub fn random_eight_point_config(
    seed: u64,
    force_line: bool,
) -> (Vec<Vec<GaussianRational>>, Vec<GaussianRational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let map = PlaneMap::random(&mut rng);
        let ts = distinct_parameters(&mut rng, 6, 5);
        let mut a: Vec<Vec<GaussianRational>> =
            ts.iter().map(|&t| map.apply(t, t * t)).collect();
        let (p1, q) = if force_line {
            // The off-conic point and the extra point both go on the
            // secant through the first two conic points.
            let (t1, t2) = (ts[0], ts[1]);
            let u1 = rng.random_range(-6..=6);
            let u2 = rng.random_range(-6..=6);
            // Parametrize the secant by the conic parameter: points
            // (u, (t1 + t2) u - t1 t2) lie on it.
            let on_secant = |u: i64| map.apply(u, (t1 + t2) * u - t1 * t2);
            (on_secant(u1), on_secant(u2))
        } else {
            (random_affine_point(&mut rng, 2, 6), random_affine_point(&mut rng, 2, 6))
        };
        a.push(p1);
        if a.len() != 7 || !distinct(&a) || a.contains(&q) {
            continue;
        }
        let Ok(m1) = affine_m_invariant(&a, 1) else { continue };
        let Ok(m2) = affine_m_invariant(&a, 2) else { continue };
        if m1 > 3 || m2 != 6 {
            continue;
        }
        let mut aq = a.clone();
        aq.push(q.clone());
        let Ok(m1q) = affine_m_invariant(&aq, 1) else { continue };
        if force_line {
            if m1q == 4 {
                return (a, q);
            }
        } else if m1q <= 3 {
            return (a, q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::{construct_prop24, Prop24Outcome};

    #[test]
    fn examples_verify_their_facts() {
        for id in ["3.2", "3.3", "3.4", "3.6", "3.9"] {
            let ex = gen_example(id, &ExampleParams::default()).unwrap();
            let failures = ex.failures().unwrap();
            assert!(failures.is_empty(), "example {id} failed: {failures:?}");
        }
        for m in 2..=6 {
            let ex =
                gen_example("3.5", &ExampleParams { m: Some(m), ..Default::default() }).unwrap();
            let failures = ex.failures().unwrap();
            assert!(failures.is_empty(), "pencil family m = {m} failed: {failures:?}");
        }
        for n in [1u32, 3, 10] {
            let ex = gen_example(
                "3.7",
                &ExampleParams { truncation: Some(n), ..Default::default() },
            )
            .unwrap();
            let failures = ex.failures().unwrap();
            assert!(failures.is_empty(), "truncation {n} failed: {failures:?}");
            assert!(*ex.current.residual_mass() > rat_int(0));
        }
    }

    #[test]
    fn examples_reject_bad_params() {
        assert!(gen_example("9.9", &ExampleParams::default()).is_err());
        assert!(gen_example("3.5", &ExampleParams { m: Some(1), ..Default::default() }).is_err());
        assert!(gen_example(
            "3.7",
            &ExampleParams { truncation: Some(0), ..Default::default() }
        )
        .is_err());
    }

    #[test]
    fn random_currents_are_reproducible_and_exact() {
        let spec = RandomSpec {
            ambient_dim: 2,
            max_components: 4,
            allow_conics: true,
            total_mass: rat_int(1),
        };
        for seed in 0..20 {
            let a = random_current(seed, &spec).unwrap();
            let b = random_current(seed, &spec).unwrap();
            assert_eq!(a.mass(), rat_int(1));
            assert_eq!(format!("{a}"), format!("{b}"));
        }
        let spatial = RandomSpec {
            ambient_dim: 3,
            max_components: 3,
            allow_conics: false,
            total_mass: rat(1, 2),
        };
        let t = random_current(7, &spatial).unwrap();
        assert_eq!(t.mass(), rat(1, 2));
        assert_eq!(t.ambient_dim(), 3);
    }

    #[test]
    fn seven_point_generator_hits_each_kind() {
        for (seed, kind) in [
            (1, SevenPointKind::Generic),
            (2, SevenPointKind::OneTriple),
            (3, SevenPointKind::TwoTriples),
        ] {
            let pts = random_seven_point_config(seed, kind);
            assert_eq!(pts.len(), 7);
            assert_eq!(affine_m_invariant(&pts, 2).unwrap(), 5);
            let expected = match kind {
                SevenPointKind::Generic => 0,
                SevenPointKind::OneTriple => 1,
                SevenPointKind::TwoTriples => 2,
            };
            assert_eq!(collinear_triples(&pts), expected);
        }
    }

    #[test]
    fn eight_point_generator_controls_the_line() {
        let (a, q) = random_eight_point_config(5, false);
        let mut aq = a.clone();
        aq.push(q.clone());
        assert!(affine_m_invariant(&aq, 1).unwrap() <= 3);
        match construct_prop24(&a, &q).unwrap() {
            Prop24Outcome::FullSet { green, .. } => assert_eq!(green.gamma(), 3),
            other => panic!("expected the eight-pole case, got {other:?}"),
        }
        let (a, q) = random_eight_point_config(6, true);
        let mut aq = a.clone();
        aq.push(q.clone());
        assert_eq!(affine_m_invariant(&aq, 1).unwrap(), 4);
        match construct_prop24(&a, &q).unwrap() {
            Prop24Outcome::Subset { green, .. } => assert_eq!(green.gamma(), 4),
            other => panic!("expected a seven-point subset, got {other:?}"),
        }
    }
}
