//! Convex closure of rate regions over slice grids, plus the region
//! comparisons used to check them (containment, support function, Hausdorff
//! distance).
//!
//! All regions handled here are down-closed subsets of the nonnegative
//! orthant: if a rate tuple is achievable, so is every smaller one. A
//! [`RegionBoundary`] therefore always contains the origin and the
//! projections of its frontier onto the coordinate axes and planes.

use std::collections::HashSet;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lp::{LinearProgram, LpSolution, Relation};
use crate::regions::{RatePolytope, RegionError};

/// Feasibility slack when filtering candidate vertices.
pub const VERTEX_TOL: f64 = 1e-9;
/// Cross products at or below this are treated as collinear in 2-D hulls.
pub const COLLINEAR_TOL: f64 = 1e-10;
/// Minimum distance beyond a facet for a point to enlarge a 3-D hull.
const PLANE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("rate dimension {0} unsupported (only 1 to 3)")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope {0} is unbounded")]
    Unbounded(usize),
    #[error("no polytopes to hull")]
    Empty,
    #[error("grid step {0} does not divide 1")]
    GridStep(f64),
    #[error(transparent)]
    Region(#[from] RegionError),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Half-space `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Extreme points of a down-closed convex region together with the facets
/// that describe it. In 2-D the points are in counter-clockwise order
/// starting from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    labels: Vec<String>,
    points: Vec<Vec<f64>>,
    /// Index of the input polytope each point came from; `None` for points
    /// added by down-closure.
    provenance: Vec<Option<usize>>,
    facets: Vec<Facet>,
}

impl RegionBoundary {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn provenance(&self) -> &[Option<usize>] {
        &self.provenance
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Whether `point` is an extreme point of the region (within `tol` per
    /// coordinate).
    pub fn has_extreme_point(&self, point: &[f64], tol: f64) -> bool {
        self.points
            .iter()
            .any(|p| p.iter().zip(point).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// Points sorted by first coordinate, then the rest.
    pub fn sorted_points(&self) -> Vec<(Vec<f64>, Option<usize>)> {
        let mut pts: Vec<_> = self
            .points
            .iter()
            .cloned()
            .zip(self.provenance.iter().copied())
            .collect();
        pts.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        pts
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Probability vectors over `m` symbols whose coordinates are multiples of
/// `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexGrid {
    m: usize,
    divisions: usize,
}

impl SimplexGrid {
    pub fn new(m: usize, step: f64) -> Result<Self> {
        if m == 0 {
            return Err(GeometryError::Dimension(0));
        }
        let n = (1.0 / step).round();
        if !(step > 0.0) || n < 1.0 || (n * step - 1.0).abs() > 1e-9 {
            return Err(GeometryError::GridStep(step));
        }
        Ok(Self {
            m,
            divisions: n as usize,
        })
    }

    pub fn step(&self) -> f64 {
        1.0 / self.divisions as f64
    }

    pub fn len(&self) -> usize {
        // C(N + m - 1, m - 1)
        let (n, k) = (self.divisions + self.m - 1, self.m - 1);
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All grid points in lexicographic order of their integer counts.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let n = self.divisions;
        let mut out = Vec::with_capacity(self.len());
        let mut counts = vec![0usize; self.m];
        fn rec(
            pos: usize,
            left: usize,
            n: usize,
            counts: &mut Vec<usize>,
            out: &mut Vec<Vec<f64>>,
        ) {
            if pos + 1 == counts.len() {
                counts[pos] = left;
                out.push(counts.iter().map(|&c| c as f64 / n as f64).collect());
                return;
            }
            for c in 0..=left {
                counts[pos] = c;
                rec(pos + 1, left - c, n, counts, out);
            }
        }
        rec(0, n, n, &mut counts, &mut out);
        out
    }
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(GeometryError::Dimension(d))
    }
}

/// Solve the `d × d` system `rows · x = rhs` by Gaussian elimination with
/// partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let d = b.len();
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..d {
            let f = a[r][col] / a[col][col];
            for c in col..d {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
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
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices of a polytope of dimension at most 3, from every set of `d`
/// linearly independent rows whose intersection is feasible within
/// [`VERTEX_TOL`]. Tiny negative coordinates from rounding are clamped to 0.
pub fn polytope_vertices(p: &RatePolytope) -> Result<Vec<Vec<f64>>> {
    let d = p.dim();
    check_dim(d)?;
    let rows = p.inequalities();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |x: Vec<f64>| {
        if rows.iter().all(|r| r.lhs(&x) <= r.rhs + VERTEX_TOL) {
            let x: Vec<f64> = x
                .into_iter()
                .map(|v| if v.abs() < 1e-15 { 0.0 } else { v.max(0.0) })
                .collect();
            if !out
                .iter()
                .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= VERTEX_TOL))
            {
                out.push(x);
            }
        }
    };
    if d == 2 {
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a, b) = (&rows[i], &rows[j]);
                let (a0, a1, b0, b1) = (
                    a.coeffs[0] as f64,
                    a.coeffs[1] as f64,
                    b.coeffs[0] as f64,
                    b.coeffs[1] as f64,
                );
                let det = a0 * b1 - a1 * b0;
                if det == 0.0 {
                    continue;
                }
                push(vec![
                    (a.rhs * b1 - a1 * b.rhs) / det,
                    (a0 * b.rhs - a.rhs * b0) / det,
                ]);
            }
        }
    } else {
        for combo in combinations(rows.len(), d) {
            let a = combo
                .iter()
                .map(|&i| rows[i].coeffs.iter().map(|&c| c as f64).collect())
                .collect();
            let b = combo.iter().map(|&i| rows[i].rhs).collect();
            if let Some(x) = solve_square(a, b) {
                push(x);
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    Ok(out)
}

/// Whether the polytope is bounded. Rows with only nonnegative coefficients
/// bound every coordinate they touch; otherwise the recession cone is checked
/// by LP.
pub fn is_bounded(p: &RatePolytope) -> bool {
    let d = p.dim();
    let covered = (0..d).all(|k| {
        p.inequalities()
            .iter()
            .any(|r| r.coeffs[k] > 0 && r.coeffs.iter().all(|&c| c >= 0))
    });
    if covered {
        return true;
    }
    // recession direction r ≥ 0 with A r ≤ 0 and Σ r = 1
    let mut lp = LinearProgram::minimize(vec![0.0; d]);
    for row in p.inequalities() {
        let c = row.coeffs.iter().map(|&c| c as f64).collect();
        lp.add(c, Relation::Le, 0.0).expect("dimension matches");
    }
    lp.add(vec![1.0; d], Relation::Eq, 1.0)
        .expect("dimension matches");
    !matches!(lp.solve(), Ok(LpSolution::Optimal { .. }))
}

type Tagged<const D: usize> = ([f64; D], Option<usize>);

/// Sort, deduplicate, and prefer tagged points over untagged duplicates so
/// provenance is deterministic.
fn canonical<const D: usize>(pts: &mut Vec<Tagged<D>>) {
    pts.sort_by(|a, b| {
        lex_cmp(&a.0, &b.0).then_with(|| match (a.1, b.1) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        })
    });
    pts.dedup_by(|b, a| a.0 == b.0);
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; counter-clockwise, collinear points removed.
fn hull_2d(mut pts: Vec<Tagged<2>>) -> Vec<Tagged<2>> {
    canonical(&mut pts);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Tagged<2>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2].0, lower[lower.len() - 1].0, p.0) <= COLLINEAR_TOL
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Tagged<2>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2].0, upper[upper.len() - 1].0, p.0) <= COLLINEAR_TOL
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[derive(Debug, Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
}

impl Face {
    fn new(pts: &[Tagged<3>], v: [usize; 3]) -> Option<Self> {
        let n = cross3(
            sub3(pts[v[1]].0, pts[v[0]].0),
            sub3(pts[v[2]].0, pts[v[0]].0),
        );
        let len = norm3(n);
        if len < 1e-14 {
            return None;
        }
        let normal = [n[0] / len, n[1] / len, n[2] / len];
        Some(Self {
            v,
            normal,
            offset: dot3(normal, pts[v[0]].0),
        })
    }

    fn height(&self, p: [f64; 3]) -> f64 {
        dot3(self.normal, p) - self.offset
    }
}

/// Incremental 3-D hull. Returns `None` when the points are coplanar.
fn hull_3d(mut pts: Vec<Tagged<3>>) -> Option<(Vec<Tagged<3>>, Vec<Facet>)> {
    canonical(&mut pts);
    if pts.len() < 4 {
        return None;
    }
    let i0 = 0;
    let dist2 = |a: [f64; 3], b: [f64; 3]| dot3(sub3(a, b), sub3(a, b));
    let i1 = (0..pts.len())
        .max_by(|&a, &b| dist2(pts[a].0, pts[i0].0).total_cmp(&dist2(pts[b].0, pts[i0].0)))?;
    let line = sub3(pts[i1].0, pts[i0].0);
    let off_line = |k: usize| norm3(cross3(line, sub3(pts[k].0, pts[i0].0)));
    let i2 = (0..pts.len()).max_by(|&a, &b| off_line(a).total_cmp(&off_line(b)))?;
    if off_line(i2) < 1e-12 {
        return None;
    }
    let plane = Face::new(&pts, [i0, i1, i2])?;
    let i3 = (0..pts.len()).max_by(|&a, &b| {
        plane
            .height(pts[a].0)
            .abs()
            .total_cmp(&plane.height(pts[b].0).abs())
    })?;
    if plane.height(pts[i3].0).abs() < PLANE_TOL {
        return None;
    }
    let (a, b, c) = if plane.height(pts[i3].0) > 0.0 {
        (i0, i2, i1)
    } else {
        (i0, i1, i2)
    };
    // base (a,b,c) now has the apex on its inner side
    let mut faces: Vec<Option<Face>> = vec![
        Face::new(&pts, [a, b, c]),
        Face::new(&pts, [a, c, i3]),
        Face::new(&pts, [c, b, i3]),
        Face::new(&pts, [b, a, i3]),
    ];
    if faces.iter().any(|f| f.is_none()) {
        return None;
    }
    for k in 0..pts.len() {
        if [i0, i1, i2, i3].contains(&k) {
            continue;
        }
        let p = pts[k].0;
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.filter(|f| f.height(p) > PLANE_TOL).map(|_| i))
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &i in &visible {
            let v = faces[i].expect("visible face is alive").v;
            for e in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                if !edges.remove(&(e.1, e.0)) {
                    edges.insert(e);
                }
            }
        }
        for &i in &visible {
            faces[i] = None;
        }
        let mut horizon: Vec<(usize, usize)> = edges.into_iter().collect();
        horizon.sort_unstable();
        for (u, w) in horizon {
            if let Some(f) = Face::new(&pts, [u, w, k]) {
                faces.push(Some(f));
            }
        }
    }
    let faces: Vec<Face> = faces.into_iter().flatten().collect();
    // keep only true vertices: incident facet normals must span 3-D
    let mut keep = Vec::new();
    for k in 0..pts.len() {
        let normals: Vec<[f64; 3]> = faces
            .iter()
            .filter(|f| f.v.contains(&k))
            .map(|f| f.normal)
            .collect();
        if spans_3d(&normals) {
            keep.push(pts[k]);
        }
    }
    let facets = faces
        .iter()
        .map(|f| Facet {
            normal: f.normal.to_vec(),
            offset: f.offset,
        })
        .collect();
    Some((keep, facets))
}

fn spans_3d(normals: &[[f64; 3]]) -> bool {
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let c = cross3(normals[i], normals[j]);
            if norm3(c) < 1e-7 {
                continue;
            }
            if normals[j + 1..].iter().any(|&n| dot3(c, n).abs() > 1e-7) {
                return true;
            }
        }
    }
    false
}

/// Reduce a batch of tagged points to hull candidates without down-closure.
fn prune(points: Vec<(Vec<f64>, Option<usize>)>, d: usize) -> Vec<(Vec<f64>, Option<usize>)> {
    match d {
        2 => hull_2d(points.into_iter().map(|(p, t)| ([p[0], p[1]], t)).collect())
            .into_iter()
            .map(|(p, t)| (p.to_vec(), t))
            .collect(),
        3 => {
            let pts: Vec<Tagged<3>> = points
                .iter()
                .map(|(p, t)| ([p[0], p[1], p[2]], *t))
                .collect();
            match hull_3d(pts) {
                Some((v, _)) => v.into_iter().map(|(p, t)| (p.to_vec(), t)).collect(),
                None => points,
            }
        }
        _ => points,
    }
}

/// Down-closed convex hull of a point set in `d ≤ 3` dimensions. Points are
/// assumed to have nonnegative coordinates.
pub fn hull_of_points(
    labels: Vec<String>,
    points: Vec<(Vec<f64>, Option<usize>)>,
) -> Result<RegionBoundary> {
    let d = labels.len();
    check_dim(d)?;
    for (p, _) in &points {
        if p.len() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
    }
    let points = prune(points, d);
    // coordinates that are positive somewhere
    let active: Vec<usize> = (0..d)
        .filter(|&k| points.iter().any(|(p, _)| p[k] > 0.0))
        .collect();
    let k = active.len();
    // down-closure: every projection onto a coordinate subspace of the active ones
    let mut reduced: Vec<(Vec<f64>, Option<usize>)> = Vec::new();
    for (p, t) in &points {
        let q: Vec<f64> = active.iter().map(|&i| p[i]).collect();
        for mask in 0..(1usize << k) {
            let full = mask == (1 << k) - 1;
            let proj = q
                .iter()
                .enumerate()
                .map(|(i, &x)| if mask >> i & 1 == 1 { x } else { 0.0 })
                .collect();
            reduced.push((proj, if full { *t } else { None }));
        }
    }
    if reduced.is_empty() {
        reduced.push((vec![0.0; k], None));
    }
    let embed = |q: &[f64]| {
        let mut p = vec![0.0; d];
        for (i, &a) in active.iter().enumerate() {
            p[a] = q[i];
        }
        p
    };
    let (verts, low_facets): (Vec<(Vec<f64>, Option<usize>)>, Vec<Facet>) = match k {
        0 => (vec![(vec![], None)], vec![]),
        1 => {
            let top = reduced
                .iter()
                .filter(|(p, _)| p[0] > 0.0)
                .max_by(|a, b| a.0[0].total_cmp(&b.0[0]).then_with(|| b.1.cmp(&a.1)))
                .cloned()
                .expect("active coordinate has a positive point");
            let facets = vec![
                Facet {
                    normal: vec![1.0],
                    offset: top.0[0],
                },
                Facet {
                    normal: vec![-1.0],
                    offset: 0.0,
                },
            ];
            (vec![(vec![0.0], None), top], facets)
        }
        2 => {
            let h = hull_2d(reduced.iter().map(|(p, t)| ([p[0], p[1]], *t)).collect());
            let mut facets = Vec::new();
            for i in 0..h.len() {
                let (a, b) = (h[i].0, h[(i + 1) % h.len()].0);
                let n = [b[1] - a[1], a[0] - b[0]];
                let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
                facets.push(Facet {
                    normal: vec![n[0] / len, n[1] / len],
                    offset: (n[0] * a[0] + n[1] * a[1]) / len,
                });
            }
            (
                h.into_iter().map(|(p, t)| (p.to_vec(), t)).collect(),
                facets,
            )
        }
        _ => {
            let (v, f) = hull_3d(
                reduced
                    .iter()
                    .map(|(p, t)| ([p[0], p[1], p[2]], *t))
                    .collect(),
            )
            .expect("down-closure of an active point set is full-dimensional");
            (v.into_iter().map(|(p, t)| (p.to_vec(), t)).collect(), f)
        }
    };
    let mut facets: Vec<Facet> = low_facets
        .iter()
        .map(|f| Facet {
            normal: embed(&f.normal),
            offset: f.offset,
        })
        .collect();
    for i in (0..d).filter(|i| !active.contains(i)) {
        let mut n = vec![0.0; d];
        n[i] = 1.0;
        facets.push(Facet {
            normal: n,
            offset: 0.0,
        });
    }
    for i in 0..d {
        let mut n = vec![0.0; d];
        n[i] = -1.0;
        facets.push(Facet {
            normal: n,
            offset: 0.0,
        });
    }
    let (points, provenance) = verts.into_iter().map(|(q, t)| (embed(&q), t)).unzip();
    Ok(RegionBoundary {
        labels,
        points,
        provenance,
        facets,
    })
}

fn polytope_points(p: &RatePolytope, index: usize) -> Result<Vec<(Vec<f64>, Option<usize>)>> {
    if !is_bounded(p) {
        return Err(GeometryError::Unbounded(index));
    }
    Ok(polytope_vertices(p)?
        .into_iter()
        .map(|v| (v, Some(index)))
        .collect())
}

/// Convex closure of a union of rate polytopes. Provenance refers to the
/// position in `polytopes`.
pub fn hull_of_union(polytopes: &[RatePolytope]) -> Result<RegionBoundary> {
    let first = polytopes.first().ok_or(GeometryError::Empty)?;
    let labels = first.rates().to_vec();
    let mut points = Vec::new();
    for (i, p) in polytopes.iter().enumerate() {
        if p.dim() != labels.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: labels.len(),
                got: p.dim(),
            });
        }
        points.extend(polytope_points(p, i)?);
    }
    hull_of_points(labels, points)
}

/// Evaluate `eval` on every slice in parallel and return the convex closure
/// of the resulting polytopes. Provenance refers to the position in `slices`.
/// The result does not depend on the number of threads.
pub fn convex_closure<T, F>(slices: &[T], eval: F) -> Result<RegionBoundary>
where
    T: Sync,
    F: Fn(&T) -> std::result::Result<RatePolytope, RegionError> + Sync,
{
    const CHUNK: usize = 2048;
    if slices.is_empty() {
        return Err(GeometryError::Empty);
    }
    let labels = eval(&slices[0])?.rates().to_vec();
    let d = labels.len();
    check_dim(d)?;
    let chunks: Vec<Vec<(Vec<f64>, Option<usize>)>> = slices
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut pts = Vec::new();
            for (j, s) in chunk.iter().enumerate() {
                let idx = c * CHUNK + j;
                let p = eval(s)?;
                if p.dim() != d {
                    return Err(GeometryError::DimensionMismatch {
                        expected: d,
                        got: p.dim(),
                    });
                }
                pts.extend(polytope_points(&p, idx)?);
            }
            Ok(prune(pts, d))
        })
        .collect::<Result<_>>()?;
    hull_of_points(labels, chunks.into_iter().flatten().collect())
}

pub fn contains(boundary: &RegionBoundary, point: &[f64], tol: f64) -> Result<bool> {
    if point.len() != boundary.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: boundary.dim(),
            got: point.len(),
        });
    }
    Ok(boundary.facets.iter().all(|f| {
        let s: f64 = f.normal.iter().zip(point).map(|(a, b)| a * b).sum();
        s <= f.offset + tol
    }))
}

/// Support function `max_{r ∈ region} w · r`.
pub fn max_weighted_sum(boundary: &RegionBoundary, weights: &[f64]) -> Result<f64> {
    if weights.len() != boundary.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: boundary.dim(),
            got: weights.len(),
        });
    }
    Ok(boundary
        .points
        .iter()
        .map(|p| p.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max))
}

fn require_2d(b: &RegionBoundary) -> Result<()> {
    if b.dim() == 2 {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        })
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a[0] + t * dx, a[1] + t * dy);
    ((p[0] - qx).powi(2) + (p[1] - qy).powi(2)).sqrt()
}

fn edges(b: &RegionBoundary) -> Vec<([f64; 2], [f64; 2])> {
    let pts: Vec<[f64; 2]> = b.points.iter().map(|p| [p[0], p[1]]).collect();
    if pts.len() == 1 {
        return vec![(pts[0], pts[0])];
    }
    (0..pts.len())
        .map(|i| (pts[i], pts[(i + 1) % pts.len()]))
        .collect()
}

fn distance_to_curve(p: [f64; 2], curve: &[([f64; 2], [f64; 2])]) -> f64 {
    curve
        .iter()
        .map(|&(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `point` to the region (zero inside).
pub fn distance_to_region(boundary: &RegionBoundary, point: &[f64]) -> Result<f64> {
    require_2d(boundary)?;
    if contains(boundary, point, 0.0)? {
        return Ok(0.0);
    }
    Ok(distance_to_curve([point[0], point[1]], &edges(boundary)))
}

/// `max_{p ∈ extreme points of a} dist(p, b)`: how far `a` sticks out of `b`.
pub fn excess(a: &RegionBoundary, b: &RegionBoundary) -> Result<f64> {
    require_2d(a)?;
    a.points
        .iter()
        .map(|p| distance_to_region(b, p))
        .try_fold(0.0, |m, d| Ok(f64::max(m, d?)))
}

/// Samples per boundary edge for the Hausdorff computation; the distance to a
/// polyline is 1-Lipschitz, so the error is at most half the sample spacing.
const HAUSDORFF_SAMPLES: usize = 512;

fn directed_hausdorff(a: &RegionBoundary, b: &RegionBoundary) -> f64 {
    let target = edges(b);
    let mut worst = 0.0f64;
    for (p, q) in edges(a) {
        for s in 0..=HAUSDORFF_SAMPLES {
            let t = s as f64 / HAUSDORFF_SAMPLES as f64;
            let x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            worst = worst.max(distance_to_curve(x, &target));
        }
    }
    worst
}

/// Symmetric Hausdorff distance between the boundary curves of two 2-D
/// regions.
pub fn hausdorff_2d(a: &RegionBoundary, b: &RegionBoundary) -> Result<f64> {
    require_2d(a)?;
    require_2d(b)?;
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// CSV with a header of rate names and one extreme point per row, sorted by
/// first coordinate.
pub fn boundary_csv(b: &RegionBoundary) -> String {
    let mut out = b.labels.join(",");
    out.push('\n');
    for (p, _) in b.sorted_points() {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON form with provenance; `describe` renders the slice behind a point.
pub fn boundary_json(b: &RegionBoundary, describe: impl Fn(usize) -> Value) -> Value {
    let points: Vec<Value> = b
        .sorted_points()
        .into_iter()
        .map(|(p, t)| json!({ "rates": p, "source": t.map(&describe) }))
        .collect();
    json!({ "labels": b.labels, "points": points })
}
