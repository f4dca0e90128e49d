//! Uniform-grid point index used for nearest neighbours, Hausdorff
//! distances and separation checks.

use std::collections::HashMap;

use crate::metric::Metric;

pub struct Grid<'a> {
    points: &'a [Vec<f64>],
    metric: &'a Metric,
    cell: Vec<f64>,
    origin: Vec<f64>,
    buckets: HashMap<Vec<i64>, Vec<u32>>,
    /// Bucket index range actually populated, per axis.
    extent: Vec<(i64, i64)>,
}

impl<'a> Grid<'a> {
    /// Index with roughly `target` points per cell.
    pub fn auto(points: &'a [Vec<f64>], metric: &'a Metric, target: f64) -> Self {
        let n = points.first().map_or(1, |p| p.len());
        let (lo, hi) = bbox(points);
        let count = points.len().max(1) as f64;
        let extents: Vec<f64> = (0..n).map(|i| (hi[i] - lo[i]).max(1e-12)).collect();
        let occupied = extents.iter().filter(|&&e| e > 1e-12).count().max(1);
        let volume: f64 = extents.iter().filter(|&&e| e > 1e-12).product();
        let side = (volume * target / count).powf(1.0 / occupied as f64);
        let cell: Vec<f64> = extents.iter().map(|&e| if e > 1e-12 { side.min(e) } else { 1.0 }).collect();
        Self::with_cells(points, metric, cell)
    }

    pub fn with_cells(points: &'a [Vec<f64>], metric: &'a Metric, cell: Vec<f64>) -> Self {
        let n = cell.len();
        let (origin, _) = bbox(points);
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        let mut extent = vec![(i64::MAX, i64::MIN); n];
        for (idx, p) in points.iter().enumerate() {
            let key = key_of(p, &origin, &cell);
            for i in 0..n {
                extent[i].0 = extent[i].0.min(key[i]);
                extent[i].1 = extent[i].1.max(key[i]);
            }
            buckets.entry(key).or_default().push(idx as u32);
        }
        Grid { points, metric, cell, origin, buckets, extent }
    }

    /// Index and distance of the nearest indexed point to `q` (ties: lowest index).
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let n = self.cell.len();
        let center = key_of(q, &self.origin, &self.cell);
        let max_ring = (0..n)
            .map(|i| (center[i] - self.extent[i].0).abs().max((self.extent[i].1 - center[i]).abs()))
            .max()
            .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..=max_ring {
            for_each_shell(&center, ring, &mut |key| {
                if let Some(b) = self.buckets.get(key) {
                    for &j in b {
                        let d = self.metric.dist(q, &self.points[j as usize]);
                        let better = match best {
                            None => true,
                            Some((bj, bd)) => d < bd || (d == bd && (j as usize) < bj),
                        };
                        if better {
                            best = Some((j as usize, d));
                        }
                    }
                }
            });
            if let Some((_, bd)) = best {
                // unvisited points differ by at least `ring` whole cells along some axis
                let reach = (0..n)
                    .map(|i| self.metric.axis_lower_bound(ring as f64 * self.cell[i], i))
                    .fold(f64::INFINITY, f64::min);
                if reach > bd {
                    break;
                }
            }
        }
        best
    }

    /// Calls `f(i, j, d)` for each pair `i < j` of indexed points with
    /// `d(p_i, p_j) <= radius`. The grid cells must be at least the
    /// coordinate reach of `radius` (see [`Grid::for_radius`]).
    pub fn close_pairs(&self, radius: f64, mut f: impl FnMut(usize, usize, f64)) {
        let n = self.cell.len();
        for (key, bucket) in &self.buckets {
            let mut nb = key.clone();
            neighbours(key, 0, n, &mut nb, &mut |other| {
                if other < key.as_slice() {
                    return;
                }
                let same = other == key.as_slice();
                if let Some(ob) = self.buckets.get(other) {
                    for (a_pos, &a) in bucket.iter().enumerate() {
                        let start = if same { a_pos + 1 } else { 0 };
                        for &b in &ob[start..] {
                            let d = self.metric.dist(&self.points[a as usize], &self.points[b as usize]);
                            if d <= radius {
                                let (i, j) = if a < b { (a, b) } else { (b, a) };
                                f(i as usize, j as usize, d);
                            }
                        }
                    }
                }
            });
        }
    }

    /// Grid whose cells are exactly the coordinate reach of `radius`.
    pub fn for_radius(points: &'a [Vec<f64>], metric: &'a Metric, radius: f64) -> Self {
        let n = points.first().map_or(1, |p| p.len());
        let cell = (0..n).map(|i| metric.coord_radius(radius, i).max(1e-300)).collect();
        Self::with_cells(points, metric, cell)
    }
}

fn key_of(p: &[f64], origin: &[f64], cell: &[f64]) -> Vec<i64> {
    p.iter().zip(origin).zip(cell).map(|((x, o), c)| ((x - o) / c).floor() as i64).collect()
}

fn neighbours(key: &[i64], axis: usize, n: usize, cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if axis == n {
        f(cur);
        return;
    }
    for d in -1..=1 {
        cur[axis] = key[axis] + d;
        neighbours(key, axis + 1, n, cur, f);
    }
    cur[axis] = key[axis];
}

/// Visits every key at Chebyshev distance exactly `ring` from `center`.
fn for_each_shell(center: &[i64], ring: i64, f: &mut impl FnMut(&[i64])) {
    let n = center.len();
    let mut cur = center.to_vec();
    fn rec(center: &[i64], ring: i64, axis: usize, on_shell: bool, cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        let n = center.len();
        if axis == n {
            if on_shell || ring == 0 {
                f(cur);
            }
            return;
        }
        for d in -ring..=ring {
            cur[axis] = center[axis] + d;
            rec(center, ring, axis + 1, on_shell || d.abs() == ring, cur, f);
        }
        cur[axis] = center[axis];
    }
    let _ = n;
    rec(center, ring, 0, false, &mut cur, f);
}

/// Componentwise bounding box; `([0..], [0..])` for an empty set.
pub fn bbox(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = points.first().map_or(1, |p| p.len());
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in points {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if points.is_empty() {
        return (vec![0.0; n], vec![0.0; n]);
    }
    (lo, hi)
}

/// Directed Hausdorff distance `sup_p inf_q d(p, q)`.
pub fn directed_hausdorff(p: &[Vec<f64>], q: &[Vec<f64>], metric: &Metric) -> f64 {
    let grid = Grid::auto(q, metric, 2.0);
    p.iter().map(|x| grid.nearest(x).map_or(f64::INFINITY, |(_, d)| d)).fold(0.0, f64::max)
}
