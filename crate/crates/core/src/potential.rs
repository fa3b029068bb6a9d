//! Potential evaluation, escape-tube geometry and equipotential sections.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Couplings;

/// Residual target for refined contour vertices, relative to `max(1, |E|)`.
pub const CONTOUR_TOL: f64 = 1e-9;

/// `V(x, y)`, evaluated so that `V(x, y) == V(y, x)` bit for bit when `A = B`
/// and `V(x, 0) == A x²` exactly.
#[inline]
pub fn evaluate(c: &Couplings, x: f64, y: f64) -> f64 {
    let x2 = x * x;
    let y2 = y * y;
    let xy = x2 * y2;
    (c.a * x2 + c.b * y2) + c.c * xy + c.d * xy * (x2 + y2)
}

/// Smallest `y > 0` with `V(x, y) = E`, if any.
///
/// Solves `D x² u² + (B + C x² + D x⁴) u + (A x² − E) = 0` for `u = y²`.
pub fn tube_halfwidth(c: &Couplings, energy: f64, x: f64) -> Option<f64> {
    let x2 = x * x;
    let qa = c.d * x2;
    let qb = c.b + c.c * x2 + c.d * x2 * x2;
    let qc = c.a * x2 - energy;
    let u = smallest_positive_root(qa, qb, qc)?;
    Some(u.sqrt())
}

fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return None;
        }
        let u = -c / b;
        return (u > 0.0).then_some(u);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // cancellation-free pair of roots
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = [q / a, if q != 0.0 { c / q } else { f64::NAN }];
    roots.sort_by(f64::total_cmp);
    roots.into_iter().find(|u| *u > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let w = Window {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        };
        w.validate()?;
        Ok(w)
    }

    /// The square `[−half, half]²` sampled `n × n`.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(Error::domain("window bounds must be finite with min < max"));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::domain("window needs at least 2 samples per axis"));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            return self.x_max;
        }
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            return self.y_max;
        }
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub energy: f64,
    pub polylines: Vec<Polyline>,
}

impl ContourSet {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.polylines.iter().flat_map(|p| p.points.iter().copied())
    }

    /// Largest `|V − E|` over all vertices.
    pub fn max_residual(&self, c: &Couplings) -> f64 {
        self.vertices()
            .map(|(x, y)| (evaluate(c, x, y) - self.energy).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `polyline_id,point_index,x,y`; floats carry 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "polyline_id,point_index,x,y")?;
        for (id, line) in self.polylines.iter().enumerate() {
            for (k, (x, y)) in line.points.iter().enumerate() {
                writeln!(out, "{id},{k},{x:.16e},{y:.16e}")?;
            }
        }
        Ok(())
    }
}

// Edge ids: horizontal edge from node (i, j) to (i+1, j) is j*(nx-1)+i;
// vertical edge from (i, j) to (i, j+1) follows after all horizontal ones.
struct EdgeIndex {
    nx: usize,
    ny: usize,
}

impl EdgeIndex {
    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * (self.nx - 1) + i
    }

    fn vertical(&self, i: usize, j: usize) -> usize {
        (self.nx - 1) * self.ny + j * self.nx + i
    }

    fn endpoints(&self, e: usize) -> ((usize, usize), (usize, usize)) {
        let nh = (self.nx - 1) * self.ny;
        if e < nh {
            let (j, i) = (e / (self.nx - 1), e % (self.nx - 1));
            ((i, j), (i + 1, j))
        } else {
            let e = e - nh;
            let (j, i) = (e / self.nx, e % self.nx);
            ((i, j), (i, j + 1))
        }
    }
}

/// Marching-squares extraction of `{V = E}` inside the window.
///
/// Crossing points are refined along their grid edge until
/// `|V − E| ≤ CONTOUR_TOL · max(1, |E|)` (or the edge bracket collapses to
/// adjacent floats). Saddle cells are resolved by the sign at the cell
/// centre. Curves that leave the window end on its boundary and are
/// reported open.
pub fn extract_section(c: &Couplings, energy: f64, w: &Window) -> Result<ContourSet> {
    w.validate()?;
    if !energy.is_finite() {
        return Err(Error::domain("energy must be finite"));
    }
    let (nx, ny) = (w.nx, w.ny);
    let xs: Vec<f64> = (0..nx).map(|i| w.x(i)).collect();
    let ys: Vec<f64> = (0..ny).map(|j| w.y(j)).collect();
    // node values f = V − E, row-major in j
    let f: Vec<f64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .map(|(x, y)| evaluate(c, x, y) - energy)
        .collect();
    let at = |i: usize, j: usize| f[j * nx + i];
    // a node exactly on the level set counts as "above"
    let inside = |v: f64| v < 0.0;

    let edges = EdgeIndex { nx, ny };
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &v)| acc | ((inside(v) as u8) << k));
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = edges.horizontal(i, j);
            let right = edges.vertical(i + 1, j);
            let top = edges.horizontal(i, j + 1);
            let left = edges.vertical(i, j);
            let centre_inside = || {
                let xc = 0.5 * (xs[i] + xs[i + 1]);
                let yc = 0.5 * (ys[j] + ys[j + 1]);
                inside(evaluate(c, xc, yc) - energy)
            };
            // corners: 0 = (i,j), 1 = (i+1,j), 2 = (i+1,j+1), 3 = (i,j+1)
            match case {
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 => {
                    // corners 0 and 2 inside
                    if centre_inside() {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                10 => {
                    // corners 1 and 3 inside
                    if centre_inside() {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let chains = link_segments(&segments);
    let mut cache: HashMap<usize, (f64, f64)> = HashMap::new();
    let tol = CONTOUR_TOL * energy.abs().max(1.0);
    let mut vertex = |e: usize| -> (f64, f64) {
        *cache.entry(e).or_insert_with(|| {
            let ((i0, j0), (i1, j1)) = edges.endpoints(e);
            refine_crossing(
                c,
                energy,
                (xs[i0], ys[j0], at(i0, j0)),
                (xs[i1], ys[j1], at(i1, j1)),
                tol,
            )
        })
    };
    let polylines = chains
        .into_iter()
        .map(|(ids, closed)| Polyline {
            points: ids.into_iter().map(&mut vertex).collect(),
            closed,
        })
        .collect();
    Ok(ContourSet { energy, polylines })
}

/// Joins edge-to-edge segments into chains of edge ids. Open chains (which
/// start on a window-boundary edge) come first, then closed loops; both in
/// order of their smallest starting edge, so the output is deterministic.
fn link_segments(segments: &[(usize, usize)]) -> Vec<(Vec<usize>, bool)> {
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(s);
        adjacency.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut starts: Vec<usize> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&e, _)| e)
        .collect();
    starts.sort_unstable();
    let mut loop_starts: Vec<usize> = adjacency.keys().copied().collect();
    loop_starts.sort_unstable();

    let walk = |start: usize, used: &mut Vec<bool>| -> Vec<usize> {
        let mut chain = vec![start];
        let mut at = start;
        while let Some(&s) = adjacency[&at].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let (a, b) = segments[s];
            at = if a == at { b } else { a };
            chain.push(at);
        }
        chain
    };

    let mut chains = Vec::new();
    for start in starts {
        if adjacency[&start].iter().all(|&s| used[s]) {
            continue;
        }
        chains.push((walk(start, &mut used), false));
    }
    for start in loop_starts {
        if adjacency[&start].iter().all(|&s| used[s]) {
            continue;
        }
        let mut chain = walk(start, &mut used);
        let closed = chain.len() > 2 && chain.first() == chain.last();
        if closed {
            chain.pop();
        }
        chains.push((chain, closed));
    }
    chains
}

/// Root of `V − E` on the segment between two nodes of opposite sign.
/// Regula falsi with the Illinois modification, falling back to bisection
/// once the bracket stops shrinking.
fn refine_crossing(
    c: &Couplings,
    energy: f64,
    p0: (f64, f64, f64),
    p1: (f64, f64, f64),
    tol: f64,
) -> (f64, f64) {
    let (x0, y0, f0) = p0;
    let (x1, y1, f1) = p1;
    let point = |t: f64| (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
    let g = |t: f64| {
        let (x, y) = point(t);
        evaluate(c, x, y) - energy
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut flo, mut fhi) = (f0, f1);
    if flo == 0.0 {
        return point(0.0);
    }
    if fhi == 0.0 {
        return point(1.0);
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    let mut side = 0i8;
    for iter in 0..200 {
        let mut t = (lo * fhi - hi * flo) / (fhi - flo);
        if !(t > lo && t < hi) || iter % 4 == 3 {
            t = 0.5 * (lo + hi);
        }
        if t <= lo || t >= hi {
            break;
        }
        let ft = g(t);
        if ft.abs() < best.1.abs() {
            best = (t, ft);
        }
        if ft.abs() <= tol * 1e-3 || ft == 0.0 {
            break;
        }
        if (ft < 0.0) == (flo < 0.0) {
            lo = t;
            flo = ft;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            fhi = ft;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    point(best.0)
}
