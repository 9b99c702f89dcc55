//! Classification of upper level sets into the shapes the structure
//! theorems allow (lines, conics, and near-misses by one point), and
//! checkers for those theorems on concrete currents. The theorems are
//! proved facts, so a failed check on a valid input is an
//! implementation defect, never new mathematics.

use serde::Serialize;

use crate::current::{Component, Current, LevelSet};
use crate::field::{rat, rat_int, GaussianRational, Rational};
use crate::geom::{Line, LocatedPoint, PlaneCurve, ProjPoint};
use crate::linalg::Matrix;
use crate::poly::MultiPoly;
use crate::{Error, Result};

/// The covering shape of a level set, with the incidence witnesses
/// needed to re-verify every membership claim.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Empty,
    /// The level set is exactly a complex line.
    ComplexLine { line: Line },
    FiniteSubsetOfLine { line: Line, points: Vec<LocatedPoint> },
    FiniteOneOffLine { line: Line, points: Vec<LocatedPoint>, outlier: LocatedPoint },
    /// The level set is exactly a conic.
    Conic { conic: PlaneCurve },
    /// A full line plus finitely many points on a second line.
    LineUnionSubsetOfLine { line: Line, subset_line: Line, points: Vec<LocatedPoint> },
    FiniteSubsetOfConic { conic: PlaneCurve, points: Vec<LocatedPoint> },
    FiniteOneOffConic { conic: PlaneCurve, points: Vec<LocatedPoint>, outlier: LocatedPoint },
    /// No allowed shape covers the set; carries the points that resist
    /// classification (or whose membership is undecided).
    Unclassified { evidence: Vec<LocatedPoint> },
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Empty => "empty",
            Shape::ComplexLine { .. } => "complex line",
            Shape::FiniteSubsetOfLine { .. } => "finite subset of a line",
            Shape::FiniteOneOffLine { .. } => "finite, one point off a line",
            Shape::Conic { .. } => "conic",
            Shape::LineUnionSubsetOfLine { .. } => "line plus a subset of a line",
            Shape::FiniteSubsetOfConic { .. } => "finite subset of a conic",
            Shape::FiniteOneOffConic { .. } => "finite, one point off a conic",
            Shape::Unclassified { .. } => "unclassified",
        }
    }
}

/// A classified level set. `truncated` records that the current
/// carried residual mass, so the classification describes the
/// represented part; `tolerance_qualified` records that at least one
/// incidence in the certificate was decided at tolerance rather than
/// exactly.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub shape: Shape,
    pub truncated: bool,
    pub tolerance_qualified: bool,
}

impl Classification {
    /// Re-runs every incidence claim in the certificate. Exact points
    /// use exact tests; approximate points use the one-sided tests, so
    /// an "off" claim is a proof while an "on" claim holds at the
    /// point's tolerance.
    pub fn verify(&self) -> bool {
        let on_line = |l: &Line, pts: &[LocatedPoint]| pts.iter().all(|p| l.contains_located(p));
        let on_conic =
            |c: &PlaneCurve, pts: &[LocatedPoint]| pts.iter().all(|p| c.contains_located(p));
        match &self.shape {
            Shape::Empty
            | Shape::ComplexLine { .. }
            | Shape::Conic { .. }
            | Shape::Unclassified { .. } => true,
            Shape::FiniteSubsetOfLine { line, points } => on_line(line, points),
            Shape::FiniteOneOffLine { line, points, outlier } => {
                on_line(line, points) && !line.contains_located(outlier)
            }
            Shape::LineUnionSubsetOfLine { subset_line, points, .. } => {
                on_line(subset_line, points)
            }
            Shape::FiniteSubsetOfConic { conic, points } => on_conic(conic, points),
            Shape::FiniteOneOffConic { conic, points, outlier } => {
                on_conic(conic, points) && !conic.contains_located(outlier)
            }
        }
    }
}

/// On/off split of a point list against a witness, tracking whether
/// any "on" verdict was decided only at tolerance.
struct Cover {
    on: Vec<LocatedPoint>,
    off: Vec<LocatedPoint>,
    at_tolerance: bool,
}

fn split_cover(points: &[LocatedPoint], test: impl Fn(&LocatedPoint) -> bool) -> Cover {
    let mut cover = Cover { on: Vec::new(), off: Vec::new(), at_tolerance: false };
    for p in points {
        if test(p) {
            if matches!(p, LocatedPoint::Approx(_)) {
                cover.at_tolerance = true;
            }
            cover.on.push(p.clone());
        } else {
            cover.off.push(p.clone());
        }
    }
    cover
}

fn exact_points(points: &[LocatedPoint]) -> Vec<&ProjPoint> {
    points
        .iter()
        .filter_map(|p| match p {
            LocatedPoint::Exact(q) => Some(q),
            LocatedPoint::Approx(_) => None,
        })
        .collect()
}

/// Candidate witness lines: the current's line components, lines
/// through pairs of exact points, and for a lone exact point a line
/// through it and a standard point.
fn line_candidates(t: &Current, points: &[LocatedPoint]) -> Vec<Line> {
    let mut out: Vec<Line> = t
        .terms()
        .iter()
        .filter_map(|(_, c)| match c {
            Component::Line(l) => Some(l.clone()),
            Component::Curve(_) => None,
        })
        .collect();
    let exact = exact_points(points);
    for i in 0..exact.len() {
        for j in i + 1..exact.len() {
            if let Ok(l) = Line::through(exact[i], exact[j]) {
                out.push(l);
            }
        }
    }
    if exact.len() == 1 {
        let n = exact[0].ambient_dim();
        for k in 0..=n {
            let mut coords = vec![GaussianRational::zero(); n + 1];
            coords[k] = GaussianRational::one();
            let e = ProjPoint::new(coords).expect("standard point");
            if let Ok(l) = Line::through(exact[0], &e) {
                out.push(l);
                break;
            }
        }
    }
    out.dedup_by(|a, b| a.cmp_canonical(b).is_eq());
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A conic through up to five projective plane points, from the
/// nullspace of the degree-two monomial matrix.
fn conic_through_proj(points: &[&ProjPoint]) -> Result<Option<PlaneCurve>> {
    let exps: Vec<Vec<u32>> = (0..=2u32)
        .flat_map(|a| (0..=2 - a).map(move |b| vec![a, b, 2 - a - b]))
        .collect();
    let rows: Vec<Vec<GaussianRational>> = points
        .iter()
        .map(|p| {
            exps.iter()
                .map(|e| {
                    let mut v = GaussianRational::one();
                    for (c, &k) in p.coords().iter().zip(e) {
                        for _ in 0..k {
                            v = &v * c;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    for basis in Matrix::from_rows(rows).nullspace() {
        let mut poly = MultiPoly::zero(3);
        for (e, c) in exps.iter().zip(&basis) {
            poly = poly.add(&MultiPoly::monomial(e.clone(), c.clone()));
        }
        if !poly.is_zero() {
            return Ok(Some(PlaneCurve::new(poly)?));
        }
    }
    Ok(None)
}

/// Candidate witness conics: the current's conic components, conics
/// interpolated through five-point subsets of the exact points (or
/// through all of them when there are fewer than five), and degenerate
/// conics built from pairs of candidate lines. The line pairs matter
/// when four exact points are collinear: interpolation then yields a
/// pencil rather than the single correct witness.
fn conic_candidates(t: &Current, points: &[LocatedPoint]) -> Result<Vec<PlaneCurve>> {
    let mut out: Vec<PlaneCurve> = t
        .terms()
        .iter()
        .filter_map(|(_, c)| match c {
            Component::Curve(curve) if curve.degree() == 2 => Some(curve.clone()),
            _ => None,
        })
        .collect();
    let exact = exact_points(points);
    if !exact.is_empty() {
        let size = exact.len().min(5);
        for subset in subsets_of_size(exact.len(), size) {
            let chosen: Vec<&ProjPoint> = subset.iter().map(|&i| exact[i]).collect();
            if let Some(c) = conic_through_proj(&chosen)? {
                out.push(c);
            }
        }
    }
    let lines = line_candidates(t, points);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let form = lines[i].to_form()?.mul(&lines[j].to_form()?);
            out.push(PlaneCurve::new(form)?);
        }
    }
    out.sort_by(|a, b| a.cmp_canonical(b));
    out.dedup_by(|a, b| a.cmp_canonical(b).is_eq());
    Ok(out)
}

/// Classifies the strict upper level set of `T` at `alpha` into one of
/// the theorem shapes, with incidence certificates. Undecided
/// memberships (possible only when residual mass straddles the
/// threshold) yield `Unclassified` carrying those points.
pub fn classify(t: &Current, alpha: &Rational) -> Result<Classification> {
    let ls = t.upper_level_set(alpha, true)?;
    classify_level_set(t, &ls)
}

/// Classification of an already computed level set.
pub fn classify_level_set(t: &Current, ls: &LevelSet) -> Result<Classification> {
    for (_, c) in t.terms() {
        if c.degree() > 2 {
            return Err(Error::Unsupported(
                "classification covers currents with components of degree at most 2".into(),
            ));
        }
    }
    let truncated = *t.residual_mass() > rat_int(0);
    let unknown: Vec<LocatedPoint> =
        ls.points_unknown().map(|p| p.point.clone()).collect();
    if !unknown.is_empty() {
        return Ok(Classification {
            shape: Shape::Unclassified { evidence: unknown },
            truncated,
            tolerance_qualified: false,
        });
    }
    let points: Vec<LocatedPoint> = ls.points_in().map(|p| p.point.clone()).collect();
    let curves: Vec<&Component> = ls.curve_components.iter().map(|e| &e.component).collect();
    match curves.as_slice() {
        [] => classify_points(t, &points, truncated),
        [Component::Line(l)] => {
            if points.is_empty() {
                return Ok(Classification {
                    shape: Shape::ComplexLine { line: l.clone() },
                    truncated,
                    tolerance_qualified: false,
                });
            }
            for cand in line_candidates(t, &points) {
                let cover = split_cover(&points, |p| cand.contains_located(p));
                if cover.off.is_empty() {
                    return Ok(Classification {
                        shape: Shape::LineUnionSubsetOfLine {
                            line: l.clone(),
                            subset_line: cand,
                            points: cover.on,
                        },
                        truncated,
                        tolerance_qualified: cover.at_tolerance,
                    });
                }
            }
            Ok(Classification {
                shape: Shape::Unclassified { evidence: points },
                truncated,
                tolerance_qualified: false,
            })
        }
        [Component::Curve(c)] if c.degree() == 2 && points.is_empty() => Ok(Classification {
            shape: Shape::Conic { conic: c.clone() },
            truncated,
            tolerance_qualified: false,
        }),
        [Component::Line(a), Component::Line(b)]
            if t.ambient_dim() == 2 && points.is_empty() =>
        {
            // Two full lines form a degenerate conic.
            let pair = PlaneCurve::new(a.to_form()?.mul(&b.to_form()?))?;
            Ok(Classification {
                shape: Shape::Conic { conic: pair },
                truncated,
                tolerance_qualified: false,
            })
        }
        _ => Ok(Classification {
            shape: Shape::Unclassified { evidence: points },
            truncated,
            tolerance_qualified: false,
        }),
    }
}

fn classify_points(
    t: &Current,
    points: &[LocatedPoint],
    truncated: bool,
) -> Result<Classification> {
    if points.is_empty() {
        return Ok(Classification {
            shape: Shape::Empty,
            truncated,
            tolerance_qualified: false,
        });
    }
    let lines = line_candidates(t, points);
    for cand in &lines {
        let cover = split_cover(points, |p| cand.contains_located(p));
        if cover.off.is_empty() {
            return Ok(Classification {
                shape: Shape::FiniteSubsetOfLine { line: cand.clone(), points: cover.on },
                truncated,
                tolerance_qualified: cover.at_tolerance,
            });
        }
    }
    for cand in &lines {
        let cover = split_cover(points, |p| cand.contains_located(p));
        if cover.off.len() == 1 {
            return Ok(Classification {
                shape: Shape::FiniteOneOffLine {
                    line: cand.clone(),
                    points: cover.on,
                    outlier: cover.off[0].clone(),
                },
                truncated,
                tolerance_qualified: cover.at_tolerance,
            });
        }
    }
    if t.ambient_dim() == 2 {
        let conics = conic_candidates(t, points)?;
        for cand in &conics {
            let cover = split_cover(points, |p| cand.contains_located(p));
            if cover.off.is_empty() {
                return Ok(Classification {
                    shape: Shape::FiniteSubsetOfConic { conic: cand.clone(), points: cover.on },
                    truncated,
                    tolerance_qualified: cover.at_tolerance,
                });
            }
        }
        for cand in &conics {
            let cover = split_cover(points, |p| cand.contains_located(p));
            if cover.off.len() == 1 {
                return Ok(Classification {
                    shape: Shape::FiniteOneOffConic {
                        conic: cand.clone(),
                        points: cover.on,
                        outlier: cover.off[0].clone(),
                    },
                    truncated,
                    tolerance_qualified: cover.at_tolerance,
                });
            }
        }
    }
    Ok(Classification {
        shape: Shape::Unclassified { evidence: points.to_vec() },
        truncated,
        tolerance_qualified: false,
    })
}

/// Verdict of a structure-theorem check: the classification that was
/// found and, on failure, the points that witness the violation.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub pass: bool,
    pub classification: Classification,
    pub violations: Vec<LocatedPoint>,
}

fn decided_level_set(t: &Current, alpha: &Rational, strict: bool) -> Result<LevelSet> {
    let ls = t.upper_level_set(alpha, strict)?;
    if ls.points_unknown().next().is_some() {
        return Err(Error::Unsupported(
            "residual mass straddles the threshold; memberships are undecided".into(),
        ));
    }
    Ok(ls)
}

fn require_unit_mass(t: &Current) -> Result<()> {
    if t.mass() != rat_int(1) {
        return Err(Error::Precondition(format!("the current must have mass 1, found {}", t.mass())));
    }
    Ok(())
}

/// Structure of a strict level set at `alpha >= 1/2` for a unit-mass
/// current: contained in a line for `alpha >= 2/3`, at most one point
/// off a line for `1/2 <= alpha < 2/3`.
pub fn check_thm11(t: &Current, alpha: &Rational) -> Result<TheoremReport> {
    require_unit_mass(t)?;
    if *alpha < rat(1, 2) {
        return Err(Error::Precondition("the threshold must be at least 1/2".into()));
    }
    let ls = decided_level_set(t, alpha, true)?;
    let classification = classify_level_set(t, &ls)?;
    let line_shape = matches!(
        classification.shape,
        Shape::Empty | Shape::ComplexLine { .. } | Shape::FiniteSubsetOfLine { .. }
    );
    let pass = if *alpha >= rat(2, 3) {
        line_shape
    } else {
        line_shape || matches!(classification.shape, Shape::FiniteOneOffLine { .. })
    };
    let violations = if pass { Vec::new() } else { ls.points_in().map(|p| p.point.clone()).collect() };
    Ok(TheoremReport { pass, classification, violations })
}

/// Structure of a strict level set at `2/5 <= alpha < 1/2` for a
/// unit-mass current on the projective plane: a conic, a line plus a
/// subset of a line, a subset of a conic, or at most one point off a
/// conic.
pub fn check_thm12(t: &Current, alpha: &Rational) -> Result<TheoremReport> {
    require_unit_mass(t)?;
    if t.ambient_dim() != 2 {
        return Err(Error::Precondition("this classification is planar".into()));
    }
    if *alpha < rat(2, 5) || *alpha >= rat(1, 2) {
        return Err(Error::Precondition("the threshold must lie in [2/5, 1/2)".into()));
    }
    let ls = decided_level_set(t, alpha, true)?;
    let classification = classify_level_set(t, &ls)?;
    let pass = !matches!(classification.shape, Shape::Unclassified { .. });
    let violations = if pass { Vec::new() } else { ls.points_in().map(|p| p.point.clone()).collect() };
    Ok(TheoremReport { pass, classification, violations })
}

/// Outcome of the two-large-points check: the witness line through one
/// of the distinguished points that leaves at most one level-set point
/// off, when one exists.
#[derive(Clone, Debug, Serialize)]
pub struct Thm38Report {
    #[serde(with = "crate::field::rat_str")]
    pub beta: Rational,
    pub pass: bool,
    pub witness: Option<Line>,
    pub off_witness: Vec<LocatedPoint>,
}

/// Given two points with Lelong number at least `alpha > 1/2`, the
/// level set at `beta = (2 - alpha)/3` has at most one point off some
/// line through one of them.
pub fn check_thm38(
    t: &Current,
    alpha: &Rational,
    q1: &ProjPoint,
    q2: &ProjPoint,
) -> Result<Thm38Report> {
    require_unit_mass(t)?;
    if *alpha <= rat(1, 2) {
        return Err(Error::Precondition("the threshold must exceed 1/2".into()));
    }
    if q1 == q2 {
        return Err(Error::Precondition("the two distinguished points must differ".into()));
    }
    for q in [q1, q2] {
        if t.lelong_at(q).lower < *alpha {
            return Err(Error::Precondition(format!(
                "the current needs Lelong number at least {alpha} at {q}"
            )));
        }
    }
    let beta = (rat_int(2) - alpha) / rat_int(3);
    let ls = decided_level_set(t, &beta, true)?;
    let points: Vec<LocatedPoint> = ls.points_in().map(|p| p.point.clone()).collect();
    // Candidate witnesses: the line joining the distinguished points,
    // then lines pairing each of them with a level-set point, then
    // level-set line components through one of them.
    let mut candidates: Vec<Line> = vec![Line::through(q1, q2)?];
    for q in [q1, q2] {
        for p in exact_points(&points) {
            if p != q {
                candidates.push(Line::through(q, p)?);
            }
        }
    }
    for entry in &ls.curve_components {
        if let Component::Line(l) = &entry.component {
            if l.contains(q1) || l.contains(q2) {
                candidates.push(l.clone());
            }
        }
    }
    candidates.dedup_by(|a, b| a.cmp_canonical(b).is_eq());
    for cand in candidates {
        // Any full component of the level set must be the witness line
        // itself, else infinitely many points stay off.
        let curves_ok = ls.curve_components.iter().all(|e| match &e.component {
            Component::Line(l) => l.cmp_canonical(&cand).is_eq(),
            Component::Curve(_) => false,
        });
        if !curves_ok {
            continue;
        }
        let cover = split_cover(&points, |p| cand.contains_located(p));
        if cover.off.len() <= 1 {
            return Ok(Thm38Report {
                beta,
                pass: true,
                witness: Some(cand),
                off_witness: cover.off,
            });
        }
    }
    Ok(Thm38Report { beta, pass: false, witness: None, off_witness: points })
}

/// Outcome of the three-small-points check.
#[derive(Clone, Debug, Serialize)]
pub struct Prop310Report {
    pub pass: bool,
    pub off_line: Vec<LocatedPoint>,
    /// Second conclusion, evaluated only for `alpha >= 2/3`: the level
    /// set lies on the line, or has at most two points.
    pub on_line_or_small: Option<bool>,
}

/// Given three points of the closed level set at `1 - alpha` lying on
/// a line `L`, the strict level set at `alpha >= 1/2` has at most one
/// point off `L`; for `alpha >= 2/3` it lies on `L` or has at most two
/// points.
pub fn check_prop310(
    t: &Current,
    alpha: &Rational,
    triple: &[ProjPoint; 3],
    l: &Line,
) -> Result<Prop310Report> {
    require_unit_mass(t)?;
    if *alpha < rat(1, 2) {
        return Err(Error::Precondition("the threshold must be at least 1/2".into()));
    }
    if triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2] {
        return Err(Error::Precondition("the three points must be distinct".into()));
    }
    let small = rat_int(1) - alpha;
    for p in triple {
        if !l.contains(p) {
            return Err(Error::Precondition(format!("{p} does not lie on the given line")));
        }
        if t.lelong_at(p).lower < small {
            return Err(Error::Precondition(format!(
                "the current needs Lelong number at least {small} at {p}"
            )));
        }
    }
    let ls = decided_level_set(t, alpha, true)?;
    let points: Vec<LocatedPoint> = ls.points_in().map(|p| p.point.clone()).collect();
    let curves_on_l = ls.curve_components.iter().all(|e| match &e.component {
        Component::Line(cl) => cl.cmp_canonical(l).is_eq(),
        Component::Curve(_) => false,
    });
    let cover = split_cover(&points, |p| l.contains_located(p));
    let first = curves_on_l && cover.off.len() <= 1;
    let second = if *alpha >= rat(2, 3) {
        let subset_of_l = curves_on_l && cover.off.is_empty();
        let small_set = ls.curve_components.is_empty() && points.len() <= 2;
        Some(subset_of_l || small_set)
    } else {
        None
    };
    Ok(Prop310Report {
        pass: first && second.unwrap_or(true),
        off_line: cover.off,
        on_line_or_small: second,
    })
}
