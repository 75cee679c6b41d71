//! Cone families cut out by hyperplanes through the origin, and discrete
//! partial-homogeneity thinning of colored point sets.
//!
//! A family stores each realized sign pattern `p` once, with `p[0] = +1`; the cone
//! `C(−p)` is its negative half. "`x` is a limit of a set `S`" is discretized as "more
//! than `k` points of `S` lie within distance `r` of `x`".

use crate::error::{Error, Result};
use crate::lp::Lp;
use crate::{Vector, TAU};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeFamily {
    pub dim: usize,
    /// Unit normals of the hyperplanes.
    #[serde(with = "crate::serde_vec::list")]
    pub normals: Vec<Vector>,
    /// Realized sign patterns, first entry `+1`.
    pub cones: Vec<Vec<i8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMembership {
    pub cone: usize,
    /// `+1` for `C(p)`, `−1` for `C(−p)`.
    pub sign: i8,
    /// False when the vector lies on some hyperplane (tie broken to the positive side).
    pub interior: bool,
}

fn pattern_feasible(normals: &[Vector], p: &[i8]) -> bool {
    let d = normals[0].len();
    let mut lp = Lp::new(d);
    for (n, &s) in normals.iter().zip(p) {
        let a: Vec<f64> = n.iter().map(|v| -(s as f64) * v).collect();
        lp.le(&a, -1.0);
    }
    lp.minimize(&vec![0.0; d]).is_ok()
}

/// Family of all realized patterns, built by splitting realized cells one hyperplane at
/// a time.
pub fn build_cone_family(normals: &[Vector]) -> Result<ConeFamily> {
    let first = normals.first().ok_or_else(|| Error::invalid("no hyperplanes given"))?;
    let d = first.len();
    let mut units: Vec<Vector> = Vec::with_capacity(normals.len());
    for (i, n) in normals.iter().enumerate() {
        if n.len() != d {
            return Err(Error::invalid(format!("normal {i} has the wrong dimension")));
        }
        let u = crate::linalg::unit(n).ok_or_else(|| Error::invalid(format!("normal {i} is zero")))?;
        if let Some(j) = units
            .iter()
            .position(|v| (v - &u).norm() <= 1e-9 || (v + &u).norm() <= 1e-9)
        {
            return Err(Error::invalid(format!(
                "normals {j} and {i} define the same hyperplane"
            )));
        }
        units.push(u);
    }
    let mut cells: Vec<Vec<i8>> = vec![vec![1]];
    for k in 1..units.len() {
        let mut next = Vec::new();
        for c in &cells {
            for s in [1i8, -1] {
                let mut p = c.clone();
                p.push(s);
                if pattern_feasible(&units[..=k], &p) {
                    next.push(p);
                }
            }
        }
        cells = next;
    }
    cells.sort_by(|a, b| b.cmp(a));
    Ok(ConeFamily {
        dim: d,
        normals: units,
        cones: cells,
    })
}

/// `1 − cos θ < δ²/2` solved for the largest admissible angle.
pub fn max_angle_for_delta(delta: f64) -> f64 {
    (1.0 - delta * delta / 2.0).clamp(-1.0, 1.0).acos()
}

/// Planar family of lines with every angular gap `< max_angle`, containing each seed
/// direction as a line.
pub fn refined_family_2d(max_angle: f64, seeds: &[Vector]) -> Result<ConeFamily> {
    if !(max_angle > 0.0 && max_angle <= PI / 2.0) {
        return Err(Error::invalid("maxAngle must lie in (0, pi/2]"));
    }
    let mut angles: Vec<f64> = Vec::new();
    for s in seeds {
        if s.len() != 2 || s.norm() <= TAU {
            return Err(Error::invalid("seed directions must be nonzero 2-vectors"));
        }
        angles.push(s[1].atan2(s[0]).rem_euclid(PI));
    }
    if angles.is_empty() {
        angles.push(0.0);
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    if angles.len() > 1 && (angles[0] + PI - angles[angles.len() - 1]).abs() <= 1e-12 {
        angles.pop();
    }
    let mut lines = Vec::new();
    for i in 0..angles.len() {
        let a = angles[i];
        let b = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + PI
        };
        let gap = b - a;
        let mut m = (gap / max_angle).ceil().max(1.0) as usize;
        // Margin keeps the strict inequality through angle round-off.
        if gap / m as f64 >= max_angle * (1.0 - 1e-9) {
            m += 1;
        }
        for j in 0..m {
            lines.push(a + gap * j as f64 / m as f64);
        }
    }
    let normals: Vec<Vector> = lines
        .iter()
        .map(|t| Vector::from_vec(vec![-t.sin(), t.cos()]))
        .collect();
    build_cone_family(&normals)
}

impl ConeFamily {
    /// Largest angle between consecutive lines of a planar family.
    pub fn max_gap_2d(&self) -> Option<f64> {
        if self.dim != 2 {
            return None;
        }
        let mut a: Vec<f64> = self
            .normals
            .iter()
            .map(|n| (n[1].atan2(n[0]) + PI / 2.0).rem_euclid(PI))
            .collect();
        a.sort_by(f64::total_cmp);
        let mut g = a[0] + PI - a[a.len() - 1];
        for w in a.windows(2) {
            g = g.max(w[1] - w[0]);
        }
        Some(g)
    }

    /// Cone of `v`, tie-breaking zero coordinates to `+`.
    pub fn cone_of_vector(&self, v: &Vector) -> Result<ConeMembership> {
        if v.len() != self.dim {
            return Err(Error::invalid("vector dimension differs from the family"));
        }
        let len = v.norm();
        if len <= TAU {
            return Err(Error::invalid("zero vector has no cone"));
        }
        let raw: Vec<f64> = self.normals.iter().map(|n| n.dot(v) / len).collect();
        let tie: Vec<bool> = raw.iter().map(|x| x.abs() <= 1e-9).collect();
        let interior = !tie.iter().any(|&t| t);
        let p: Vec<i8> = raw
            .iter()
            .zip(&tie)
            .map(|(x, &t)| if t || *x > 0.0 { 1 } else { -1 })
            .collect();
        let canon = |p: &[i8]| -> (Vec<i8>, i8) {
            if p[0] > 0 {
                (p.to_vec(), 1)
            } else {
                (p.iter().map(|s| -s).collect(), -1)
            }
        };
        let (q, sign) = canon(&p);
        if let Some(i) = self.cones.iter().position(|c| *c == q) {
            return Ok(ConeMembership {
                cone: i,
                sign,
                interior,
            });
        }
        // The tie-broken pattern is not a cell: take a realized cell whose closure holds v,
        // preferring `+` on the tied hyperplanes.
        let mut best: Option<(usize, usize, i8)> = None;
        for (i, c) in self.cones.iter().enumerate() {
            for s in [1i8, -1] {
                let ok = c
                    .iter()
                    .zip(&raw)
                    .zip(&tie)
                    .all(|((&ci, x), &t)| t || (ci * s) as f64 * x > 0.0);
                if ok {
                    let plus = c.iter().zip(&tie).filter(|(&ci, &t)| t && ci * s > 0).count();
                    if best.map_or(true, |(_, b, _)| plus > b) {
                        best = Some((i, plus, s));
                    }
                }
            }
        }
        let (i, _, s) = best.ok_or_else(|| Error::Numerical("no cone contains the vector".into()))?;
        Ok(ConeMembership {
            cone: i,
            sign: s,
            interior: false,
        })
    }

    pub fn cone_of(&self, x: &Vector, y: &Vector) -> Result<ConeMembership> {
        if (y - x).norm() <= TAU {
            return Err(Error::invalid("x and y coincide"));
        }
        self.cone_of_vector(&(y - x))
    }
}

/// Points with a symmetric coloring of pairs by colors `1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredPointSet {
    #[serde(with = "crate::serde_vec::list")]
    pub points: Vec<Vector>,
    pub colors: usize,
    /// `coloring[i][j]` for `i ≠ j`; the diagonal is ignored.
    pub coloring: Vec<Vec<usize>>,
    pub r: f64,
    pub k: usize,
}

impl ColoredPointSet {
    pub fn from_fn(
        points: Vec<Vector>,
        colors: usize,
        r: f64,
        k: usize,
        c: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = points.len();
        let mut coloring = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = c(i, j);
                coloring[i][j] = v;
                coloring[j][i] = v;
            }
        }
        let s = ColoredPointSet {
            points,
            colors,
            coloring,
            r,
            k,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if !(self.r > 0.0) {
            return Err(Error::invalid("radius r must be positive"));
        }
        if self.colors == 0 {
            return Err(Error::invalid("need at least one color"));
        }
        if self.coloring.len() != n || self.coloring.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("coloring must be an n×n matrix"));
        }
        for i in 0..n {
            for j in i + 1..n {
                let c = self.coloring[i][j];
                if c != self.coloring[j][i] {
                    return Err(Error::invalid(format!("coloring is not symmetric at ({i},{j})")));
                }
                if c == 0 || c > self.colors {
                    return Err(Error::invalid(format!("color {c} at ({i},{j}) is out of range")));
                }
            }
        }
        Ok(())
    }

    /// Points of `members` within `r` of `x` joined to it by color `c`.
    fn same_color_near(&self, x: usize, c: usize, members: &[bool]) -> usize {
        (0..self.points.len())
            .filter(|&y| {
                y != x && members[y] && self.coloring[x][y] == c && (&self.points[x] - &self.points[y]).norm() <= self.r
            })
            .count()
    }

    /// Smallness threshold: sets below it count as "small".
    pub fn floor(&self) -> usize {
        let q = (self.points.len() as f64 / (4 * (self.colors + 1)) as f64).ceil() as usize;
        q.max(self.k + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinningStage {
    pub color: usize,
    /// Points isolated in this color relative to the stage's input.
    pub isolated: Vec<usize>,
    /// Further deletions, round by round, after removing the isolated points.
    pub rounds: Vec<Vec<usize>>,
    pub residual: usize,
    pub outcome: StageOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageOutcome {
    /// The isolated set is large; it becomes the next stage's input.
    Descend,
    /// The residual is large and homogeneous.
    Homogeneous,
    /// Neither set is large; the next color starts from the same input.
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinningResult {
    /// `(subset, color)` on success.
    pub witness: Option<(Vec<usize>, usize)>,
    pub floor: usize,
    pub stages: Vec<ThinningStage>,
    pub note: Option<String>,
}

/// Delete `isolated(x)` points from `alive` until none remain; returns the rounds.
fn erode(alive: &mut [bool], mut isolated: impl FnMut(usize, &[bool]) -> bool) -> Vec<Vec<usize>> {
    let mut rounds = Vec::new();
    loop {
        let out: Vec<usize> = (0..alive.len()).filter(|&x| alive[x] && isolated(x, alive)).collect();
        if out.is_empty() {
            return rounds;
        }
        for &x in &out {
            alive[x] = false;
        }
        rounds.push(out);
    }
}

/// Staged thinning for a partially homogeneous subset.
///
/// For each color in turn, the points of the current set with at most `k` same-colored
/// neighbours within `r` are set aside. If they are numerous they become the new current
/// set; otherwise the remaining points are eroded to a fixpoint and returned if at least
/// `floor` survive.
pub fn thinning_homogeneous(data: &ColoredPointSet) -> Result<ThinningResult> {
    data.validate()?;
    let n = data.points.len();
    let floor = data.floor();
    let mut res = ThinningResult {
        witness: None,
        floor,
        stages: Vec::new(),
        note: None,
    };
    if n < 2 * data.k * (data.colors + 1) {
        res.note = Some(format!(
            "{n} points are below the feasibility floor 2k(n+1) = {}",
            2 * data.k * (data.colors + 1)
        ));
        return Ok(res);
    }
    let mut current = vec![true; n];
    for c in 1..=data.colors {
        let isolated: Vec<usize> = (0..n)
            .filter(|&x| current[x] && data.same_color_near(x, c, &current) <= data.k)
            .collect();
        if isolated.len() >= floor {
            let mut next = vec![false; n];
            for &x in &isolated {
                next[x] = true;
            }
            res.stages.push(ThinningStage {
                color: c,
                isolated,
                rounds: Vec::new(),
                residual: 0,
                outcome: StageOutcome::Descend,
            });
            current = next;
            continue;
        }
        let mut alive = current.clone();
        for &x in &isolated {
            alive[x] = false;
        }
        let rounds = erode(&mut alive, |x, alive| data.same_color_near(x, c, alive) <= data.k);
        let b: Vec<usize> = (0..n).filter(|&x| alive[x]).collect();
        let ok = b.len() >= floor;
        res.stages.push(ThinningStage {
            color: c,
            isolated,
            rounds,
            residual: b.len(),
            outcome: if ok {
                StageOutcome::Homogeneous
            } else {
                StageOutcome::Skip
            },
        });
        if ok {
            res.witness = Some((b, c));
            return Ok(res);
        }
    }
    res.note = Some("every color exhausted".into());
    Ok(res)
}

/// Every point of `b` has more than `k` points of `b` within `r` joined by color `i`.
pub fn verify_partial_homogeneity(data: &ColoredPointSet, b: &[usize], i: usize) -> bool {
    let n = data.points.len();
    if b.iter().any(|&x| x >= n) || b.is_empty() {
        return false;
    }
    let mut members = vec![false; n];
    for &x in b {
        members[x] = true;
    }
    b.iter().all(|&x| data.same_color_near(x, i, &members) > data.k)
}

/// Input for the two-sided cone thinning.
#[derive(Clone, Debug)]
pub struct ConeThinning<'a> {
    pub points: &'a [Vector],
    pub family: &'a ConeFamily,
    pub k: usize,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeThinningResult {
    pub cone: Option<usize>,
    pub subset: Vec<usize>,
    /// Points without neighbours on both sides of the cone in the input sample.
    pub one_sided: Vec<usize>,
    pub rounds: Vec<Vec<usize>>,
}

impl ConeThinning<'_> {
    fn memberships(&self) -> Result<Vec<Vec<Option<ConeMembership>>>> {
        let n = self.points.len();
        let mut m = vec![vec![None; n]; n];
        for x in 0..n {
            for y in 0..n {
                if x != y && (&self.points[x] - &self.points[y]).norm() <= self.r {
                    m[x][y] = Some(self.family.cone_of(&self.points[x], &self.points[y])?);
                }
            }
        }
        Ok(m)
    }

    fn side_counts(m: &[Vec<Option<ConeMembership>>], x: usize, cone: usize, members: &[bool]) -> (usize, usize) {
        let mut plus = 0;
        let mut minus = 0;
        for (y, e) in m[x].iter().enumerate() {
            if let Some(c) = e {
                if members[y] && c.cone == cone {
                    if c.sign > 0 {
                        plus += 1;
                    } else {
                        minus += 1;
                    }
                }
            }
        }
        (plus, minus)
    }

    /// Search for a cone `C` and a subset `B` such that every point of `B` has more than
    /// `k` neighbours of `B` within `r` along `C`, and more than `k` input points within
    /// `r` on each of `C⁺(x)` and `C⁻(x)`.
    ///
    /// Sides are counted in the input: a finite set never has both sides inside itself,
    /// since its maximizer of a functional positive on `C⁺` has no `C⁺` neighbour.
    pub fn run(&self) -> Result<ConeThinningResult> {
        let n = self.points.len();
        let m = self.memberships()?;
        let floor = ((n as f64) / (4.0 * (self.family.cones.len() + 1) as f64)).ceil() as usize;
        let floor = floor.max(self.k + 1);
        let all = vec![true; n];
        let mut best: Option<ConeThinningResult> = None;
        for cone in 0..self.family.cones.len() {
            let one_sided: Vec<usize> = (0..n)
                .filter(|&x| {
                    let (p, q) = Self::side_counts(&m, x, cone, &all);
                    p <= self.k || q <= self.k
                })
                .collect();
            let mut alive = vec![true; n];
            for &x in &one_sided {
                alive[x] = false;
            }
            let rounds = erode(&mut alive, |x, alive| {
                let (p, q) = Self::side_counts(&m, x, cone, alive);
                p + q <= self.k
            });
            let subset: Vec<usize> = (0..n).filter(|&x| alive[x]).collect();
            if subset.len() >= floor && best.as_ref().map_or(true, |b| subset.len() > b.subset.len()) {
                best = Some(ConeThinningResult {
                    cone: Some(cone),
                    subset,
                    one_sided,
                    rounds,
                });
            }
        }
        Ok(best.unwrap_or(ConeThinningResult {
            cone: None,
            subset: Vec::new(),
            one_sided: Vec::new(),
            rounds: Vec::new(),
        }))
    }

    /// Predicate check of a result.
    pub fn verify(&self, res: &ConeThinningResult) -> Result<bool> {
        let Some(cone) = res.cone else { return Ok(false) };
        if res.subset.is_empty() {
            return Ok(false);
        }
        let n = self.points.len();
        let m = self.memberships()?;
        let all = vec![true; n];
        let mut members = vec![false; n];
        for &x in &res.subset {
            members[x] = true;
        }
        Ok(res.subset.iter().all(|&x| {
            let (p, q) = Self::side_counts(&m, x, cone, &all);
            let (bp, bq) = Self::side_counts(&m, x, cone, &members);
            p > self.k && q > self.k && bp + bq > self.k
        }))
    }
}
