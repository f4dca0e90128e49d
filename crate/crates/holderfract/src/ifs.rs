//! Affine contractions and iterated function systems.

use serde::{Deserialize, Serialize};

use crate::metric::Metric;
use crate::{Error, Result};

/// Relative tolerance when comparing a declared Lipschitz constant with the
/// operator norm of the linear part.
const LIP_TOL: f64 = 1e-9;

/// `x -> A x + b` on R^n, with `A` stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub linear: Vec<f64>,
    pub offset: Vec<f64>,
}

impl Affine {
    pub fn identity(n: usize) -> Self {
        let mut linear = vec![0.0; n * n];
        for i in 0..n {
            linear[i * n + i] = 1.0;
        }
        Affine { linear, offset: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.offset.len();
        for i in 0..n {
            let row = &self.linear[i * n..(i + 1) * n];
            out[i] = self.offset[i] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine) -> Affine {
        let n = self.dim();
        let mut linear = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                linear[i * n + j] = (0..n)
                    .map(|k| self.linear[i * n + k] * other.linear[k * n + j])
                    .sum();
            }
        }
        Affine { linear, offset: self.apply(&other.offset) }
    }

    /// Unique fixed point, solving `(I - A) x = b`.
    pub fn fixed_point(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = if i == j { 1.0 } else { 0.0 } - self.linear[i * n + j];
            }
        }
        solve(n, m, self.offset.clone())
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.linear[i * n + j] == 0.0))
    }

    /// Operator 2-norm of the linear part.
    pub fn euclidean_norm(&self) -> f64 {
        let n = self.dim();
        // Gram matrix A^T A
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (0..n)
                    .map(|k| self.linear[k * n + i] * self.linear[k * n + j])
                    .sum();
            }
        }
        let mut best = 0.0f64;
        // several starts so an unlucky start orthogonal to the top eigenvector cannot win
        let starts: Vec<Vec<f64>> = (0..=n)
            .map(|s| {
                (0..n)
                    .map(|i| if s == n { 1.0 / (i + 1) as f64 } else if i == s { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        for mut v in starts {
            let mut lambda = 0.0;
            for _ in 0..10_000 {
                let w: Vec<f64> = (0..n)
                    .map(|i| (0..n).map(|j| g[i * n + j] * v[j]).sum())
                    .collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    lambda = 0.0;
                    break;
                }
                let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
                let residual = w
                    .iter()
                    .zip(&v)
                    .map(|(wi, vi)| (wi - norm * vi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                lambda = norm;
                v = next;
                if residual <= 1e-13 * norm {
                    break;
                }
            }
            best = best.max(lambda);
        }
        best.sqrt()
    }

    /// Lipschitz constant of the map under `metric`, or `None` when the
    /// metric is a snowflake and the matrix is not diagonal.
    pub fn lipschitz(&self, metric: &Metric) -> Option<f64> {
        match metric {
            Metric::Euclidean => Some(self.euclidean_norm()),
            Metric::Snowflake { exponents } => {
                if !self.is_diagonal() {
                    return None;
                }
                let n = self.dim();
                Some(
                    (0..n)
                        .map(|i| self.linear[i * n + i].abs().powf(exponents[i]))
                        .fold(0.0, f64::max),
                )
            }
        }
    }

    /// True when the map scales every distance by the same factor.
    pub fn is_similarity(&self, metric: &Metric, tol: f64) -> bool {
        let n = self.dim();
        match metric {
            Metric::Euclidean => {
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] = (0..n)
                            .map(|k| self.linear[k * n + i] * self.linear[k * n + j])
                            .sum();
                    }
                }
                let c = g[0];
                (0..n).all(|i| {
                    (0..n).all(|j| {
                        let want = if i == j { c } else { 0.0 };
                        (g[i * n + j] - want).abs() <= tol * c.max(1e-300)
                    })
                })
            }
            Metric::Snowflake { exponents } => {
                if !self.is_diagonal() {
                    return false;
                }
                let ratios: Vec<f64> = (0..n)
                    .map(|i| self.linear[i * n + i].abs().powf(exponents[i]))
                    .collect();
                ratios.iter().all(|r| (r - ratios[0]).abs() <= tol * ratios[0])
            }
        }
    }
}

/// Gaussian elimination with partial pivoting.
fn solve(n: usize, mut m: Vec<f64>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))?;
        if m[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
            }
            rhs.swap(piv, col);
        }
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            for j in col..n {
                m[row * n + j] -= f * m[col * n + j];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i * n + j] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[i * n + i];
    }
    Some(x)
}

/// One affine contraction together with its Lipschitz constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionMap {
    pub affine: Affine,
    pub lip: f64,
}

impl ContractionMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.affine.apply(x)
    }
}

/// An ordered list of contractions of R^n under a metric.
///
/// The similarity dimension and the smallest ratio are cached on
/// construction. Maps keep the order they were given in; `normalize` sorts.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    dim: usize,
    maps: Vec<ContractionMap>,
    metric: Metric,
    base_point: Vec<f64>,
    s: f64,
}

/// Serialized form of a system: `dim`, `metric`, `maps`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IfsFile {
    pub dim: usize,
    #[serde(default, deserialize_with = "metric_field")]
    pub metric: Metric,
    pub maps: Vec<MapFile>,
}

/// Accepts `"euclidean"` as shorthand for `{"kind": "euclidean"}`.
fn metric_field<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Metric, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Field {
        Name(String),
        Full(Metric),
    }
    match Field::deserialize(d)? {
        Field::Full(m) => Ok(m),
        Field::Name(n) if n == "euclidean" => Ok(Metric::Euclidean),
        Field::Name(n) => Err(serde::de::Error::custom(format!("unknown metric {n:?}; snowflake needs exponents"))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lip: Option<f64>,
}

impl IfsSystem {
    /// Builds a system from affine maps. A declared `lip` is checked against
    /// the operator norm in `metric`; a missing one is computed.
    pub fn new(dim: usize, maps: Vec<(Affine, Option<f64>)>, metric: Metric) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("a system needs at least one map".into()));
        }
        metric.validate(dim)?;
        let mut out = Vec::with_capacity(maps.len());
        for (index, (affine, declared)) in maps.into_iter().enumerate() {
            if affine.linear.len() != dim * dim || affine.offset.len() != dim {
                return Err(Error::InvalidMap { index, reason: "shape does not match dim".into() });
            }
            if affine.linear.iter().chain(&affine.offset).any(|v| !v.is_finite()) {
                return Err(Error::InvalidMap { index, reason: "non-finite entry".into() });
            }
            let computed = affine.lipschitz(&metric).ok_or_else(|| Error::InvalidMap {
                index,
                reason: "snowflake metrics only support diagonal maps".into(),
            })?;
            let lip = match declared {
                Some(l) => {
                    if (l - computed).abs() > LIP_TOL * computed.max(1.0) {
                        return Err(Error::InvalidMap {
                            index,
                            reason: format!("declared lip {l} but operator norm is {computed}"),
                        });
                    }
                    l
                }
                None => computed,
            };
            if !(lip < 1.0) {
                return Err(Error::InvalidMap { index, reason: format!("lip {lip} is not < 1") });
            }
            out.push(ContractionMap { affine, lip });
        }
        Ok(Self::from_maps(dim, out, metric))
    }

    /// Skips the operator-norm check; `lip` values must still be valid
    /// Lipschitz bounds. Used for iterated systems, whose declared ratios are
    /// products of the generators' ratios.
    pub(crate) fn from_maps(dim: usize, maps: Vec<ContractionMap>, metric: Metric) -> Self {
        let base_point = maps[0].affine.fixed_point().expect("contractions have fixed points");
        let lips: Vec<f64> = maps.iter().map(|m| m.lip).collect();
        let s = similarity_dimension_of(&lips, 1e-15);
        IfsSystem { dim, maps, metric, base_point, s }
    }

    pub fn from_file(file: &IfsFile) -> Result<Self> {
        let maps = file
            .maps
            .iter()
            .map(|m| (Affine { linear: m.matrix.clone(), offset: m.offset.clone() }, m.lip))
            .collect();
        Self::new(file.dim, maps, file.metric.clone())
    }

    pub fn to_file(&self) -> IfsFile {
        IfsFile {
            dim: self.dim,
            metric: self.metric.clone(),
            maps: self
                .maps
                .iter()
                .map(|m| MapFile {
                    matrix: m.affine.linear.clone(),
                    offset: m.affine.offset.clone(),
                    lip: Some(m.lip),
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: IfsFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }
    pub fn len(&self) -> usize {
        self.maps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
    pub fn metric(&self) -> &Metric {
        &self.metric
    }
    pub fn lip(&self, i: usize) -> f64 {
        self.maps[i].lip
    }
    pub fn lips(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.lip).collect()
    }
    /// Fixed point of the first map; lies in the attractor.
    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }
    /// Similarity dimension, cached.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Smallest positive ratio (`L_1`, whatever the map order).
    pub fn min_lip(&self) -> f64 {
        self.maps.iter().map(|m| m.lip).filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max_lip(&self) -> f64 {
        self.maps.iter().map(|m| m.lip).fold(0.0, f64::max)
    }

    pub fn is_sorted(&self) -> bool {
        self.maps.windows(2).all(|w| w[0].lip <= w[1].lip)
    }

    /// `phi_w(x)` for the word with the given 0-based letters.
    pub fn apply_letters(&self, letters: &[u16], x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut buf = vec![0.0; self.dim];
        for &l in letters.iter().rev() {
            self.maps[l as usize].affine.apply_into(&cur, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
        }
        cur
    }

    /// `phi_w` as a single affine map.
    pub fn compose_letters(&self, letters: &[u16]) -> Affine {
        let mut acc = Affine::identity(self.dim);
        for &l in letters {
            acc = acc.compose(&self.maps[l as usize].affine);
        }
        acc
    }

    /// Checks that every map is a similarity under the system metric.
    pub fn check_self_similar(&self) -> Result<()> {
        for (index, m) in self.maps.iter().enumerate() {
            if !m.affine.is_similarity(&self.metric, 1e-10) {
                return Err(Error::NotSelfSimilar { index });
            }
        }
        Ok(())
    }

    /// The system `{phi_w : |w| = m}` in lexicographic order, with ratios
    /// `L_w` (products), so cuts and the similarity dimension are unchanged.
    pub fn iterate(&self, m: usize) -> IfsSystem {
        let k = self.maps.len();
        let mut words: Vec<Vec<u16>> = vec![vec![]];
        for _ in 0..m {
            words = words
                .into_iter()
                .flat_map(|w| {
                    (0..k as u16).map(move |i| {
                        let mut c = w.clone();
                        c.push(i);
                        c
                    })
                })
                .collect();
        }
        let maps = words
            .iter()
            .map(|w| ContractionMap {
                affine: self.compose_letters(w),
                lip: w.iter().map(|&i| self.maps[i as usize].lip).product(),
            })
            .collect();
        IfsSystem::from_maps(self.dim, maps, self.metric.clone())
    }

    /// Removes maps with `lip = 0` and sorts the rest ascending by ratio
    /// (stable, so equal-ratio maps keep their order).
    pub fn normalize(&self) -> Result<IfsSystem> {
        let mut maps: Vec<ContractionMap> =
            self.maps.iter().filter(|m| m.lip > 0.0).cloned().collect();
        if maps.is_empty() {
            return Err(Error::EmptyAfterNormalize);
        }
        maps.sort_by(|a, b| a.lip.total_cmp(&b.lip));
        Ok(IfsSystem::from_maps(self.dim, maps, self.metric.clone()))
    }

    /// Upper bound on `diam K`: `2R` for the invariant ball `B(c, R)` with
    /// `c` the centroid of the fixed points and `R = max d(phi_i c, c)/(1 - L_i)`.
    pub fn diam_bound(&self) -> f64 {
        let fixed: Vec<Vec<f64>> =
            self.maps.iter().map(|m| m.affine.fixed_point().expect("fixed point")).collect();
        let mut c = vec![0.0; self.dim];
        for p in &fixed {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / fixed.len() as f64;
            }
        }
        let r = self
            .maps
            .iter()
            .map(|m| self.metric.dist(&m.affine.apply(&c), &c) / (1.0 - m.lip))
            .fold(0.0, f64::max);
        2.0 * r
    }

    /// Axis-aligned box containing the attractor, obtained by iterating
    /// `B -> bbox(U phi_i(B))` from a box around the invariant ball.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim;
        let fixed: Vec<Vec<f64>> =
            self.maps.iter().map(|m| m.affine.fixed_point().expect("fixed point")).collect();
        let mut c = vec![0.0; n];
        for p in &fixed {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / fixed.len() as f64;
            }
        }
        let r = self.diam_bound() / 2.0;
        let mut lo: Vec<f64> = (0..n).map(|i| c[i] - self.metric.coord_radius(r, i)).collect();
        let mut hi: Vec<f64> = (0..n).map(|i| c[i] + self.metric.coord_radius(r, i)).collect();
        for _ in 0..60 {
            let mut nlo = vec![f64::INFINITY; n];
            let mut nhi = vec![f64::NEG_INFINITY; n];
            for m in &self.maps {
                let (a, b) = affine_box(&m.affine, &lo, &hi);
                for i in 0..n {
                    nlo[i] = nlo[i].min(a[i]);
                    nhi[i] = nhi[i].max(b[i]);
                }
            }
            for i in 0..n {
                lo[i] = lo[i].max(nlo[i]);
                hi[i] = hi[i].min(nhi[i]);
            }
        }
        (lo, hi)
    }
}

/// Bounding box of the image of the box `[lo, hi]` under an affine map.
pub fn affine_box(a: &Affine, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut out_lo = a.offset.clone();
    let mut out_hi = a.offset.clone();
    for i in 0..n {
        for j in 0..n {
            let c = a.linear[i * n + j];
            let (u, v) = (c * lo[j], c * hi[j]);
            out_lo[i] += u.min(v);
            out_hi[i] += u.max(v);
        }
    }
    (out_lo, out_hi)
}

/// Similarity dimension: the root of `sum L_i^s = 1`, by bisection.
///
/// A single map gives 0; maps with ratio 0 contribute nothing.
pub fn similarity_dimension(system: &IfsSystem, tol: f64) -> f64 {
    similarity_dimension_of(&system.lips(), tol)
}

pub fn similarity_dimension_of(lips: &[f64], tol: f64) -> f64 {
    let pos: Vec<f64> = lips.iter().copied().filter(|&l| l > 0.0).collect();
    if pos.len() <= 1 {
        return 0.0;
    }
    let k = pos.len() as f64;
    let lk = pos.iter().copied().fold(0.0, f64::max);
    let f = |s: f64| pos.iter().map(|l| l.powf(s)).sum::<f64>() - 1.0;
    let mut lo = 0.0;
    let mut hi = k.ln() / (1.0 / lk).ln() + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi && f(0.5 * (lo + hi)).abs() <= tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Convenience constructor for similarities `x -> ratio * R x + offset` in
/// the plane, with `R` the rotation by `angle`.
pub fn plane_similarity(ratio: f64, angle: f64, offset: [f64; 2]) -> Affine {
    let (s, c) = angle.sin_cos();
    Affine {
        linear: vec![ratio * c, -ratio * s, ratio * s, ratio * c],
        offset: offset.to_vec(),
    }
}

/// `x -> ratio * x + offset` in R^n.
pub fn homothety(ratio: f64, offset: &[f64]) -> Affine {
    let n = offset.len();
    let mut a = Affine::identity(n);
    for v in a.linear.iter_mut() {
        *v *= ratio;
    }
    a.offset = offset.to_vec();
    a
}
