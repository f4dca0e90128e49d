//! Bedford–McMullen carpets and self-affine sponges: construction,
//! dimension formulas, connectivity prechecks and the snowflake lift.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{connectedness_check, Connectedness};
use crate::holder::SampledCurve;
use crate::ifs::{Affine, ContractionMap, IfsSystem};
use crate::metric::Metric;
use crate::oracle::{AdjacencyOracle, ExactRule};
use crate::remes::{remes_parameterize, validate_sosc, RemesReport, SoscData};
use crate::word::Word;
use crate::{Error, Result};

/// Bases `2 <= n_1 <= ... <= n_N` and the chosen cells (1-based tuples).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpongeSpec {
    pub bases: Vec<u32>,
    pub cells: Vec<Vec<u32>>,
}

impl SpongeSpec {
    pub fn new(bases: Vec<u32>, cells: Vec<Vec<u32>>) -> Result<Self> {
        let spec = SpongeSpec { bases, cells };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bases.len() < 2 {
            return Err(Error::InvalidInput("a sponge needs at least two axes".into()));
        }
        if self.bases.iter().any(|&n| n < 2) || self.bases.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("bases must satisfy 2 <= n_1 <= ... <= n_N".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::InvalidInput("cell set is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.cells {
            if c.len() != self.bases.len() || c.iter().zip(&self.bases).any(|(&i, &n)| i == 0 || i > n) {
                return Err(Error::InvalidInput(format!("cell {c:?} is out of range")));
            }
            if !seen.insert(c.clone()) {
                return Err(Error::InvalidInput(format!("cell {c:?} is listed twice")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SpongeSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    /// `t_i`: number of chosen cells in column `i` (first axis), 1-based `i`.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut t = vec![0; self.bases[0] as usize];
        for c in &self.cells {
            t[c[0] as usize - 1] += 1;
        }
        t
    }

    pub fn occupied_columns(&self) -> usize {
        self.column_counts().iter().filter(|&&t| t > 0).count()
    }

    fn contains(&self, cell: &[u32]) -> bool {
        self.cells.iter().any(|c| c == cell)
    }

    /// The exact adjacency rule for grid carpets (0-based digits).
    pub fn exact_rule(&self) -> ExactRule {
        ExactRule::Carpet {
            bases: self.bases.clone(),
            cells: self.cells.iter().map(|c| c.iter().map(|i| i - 1).collect()).collect(),
        }
    }
}

fn cell_maps(spec: &SpongeSpec) -> Vec<ContractionMap> {
    let n = spec.dim();
    spec.cells
        .iter()
        .map(|c| {
            let mut a = Affine::identity(n);
            for d in 0..n {
                a.linear[d * n + d] = 1.0 / spec.bases[d] as f64;
                a.offset[d] = (c[d] - 1) as f64 / spec.bases[d] as f64;
            }
            ContractionMap { affine: a, lip: 1.0 / spec.bases[0] as f64 }
        })
        .collect()
}

/// The sponge maps `diag(1/n_i) x + ((i_1 - 1)/n_1, ...)` under the
/// Euclidean metric, where each has ratio `1/n_1`.
pub fn sponge_ifs(spec: &SpongeSpec) -> IfsSystem {
    let maps = cell_maps(spec).into_iter().map(|m| (m.affine, Some(m.lip))).collect();
    IfsSystem::new(spec.dim(), maps, Metric::Euclidean).expect("sponge maps are contractions")
}

/// The same maps under [`snowflake_metric`], where they are similarities.
pub fn sponge_ifs_lifted(spec: &SpongeSpec) -> IfsSystem {
    let maps = cell_maps(spec).into_iter().map(|m| (m.affine, Some(m.lip))).collect();
    IfsSystem::new(spec.dim(), maps, snowflake_metric(spec)).expect("lifted maps are similarities")
}

/// Exponents `log_{n_i} n_1`.
pub fn snowflake_metric(spec: &SpongeSpec) -> Metric {
    let n1 = spec.bases[0] as f64;
    let exponents = spec
        .bases
        .iter()
        .map(|&n| if n == spec.bases[0] { 1.0 } else { n1.ln() / (n as f64).ln() })
        .collect();
    Metric::Snowflake { exponents }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub similarity: f64,
    pub hausdorff: Option<f64>,
    pub minkowski: Option<f64>,
    pub assouad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Closed-form dimensions of a carpet (all four) or sponge (similarity only).
pub fn carpet_dimensions(spec: &SpongeSpec) -> DimensionReport {
    let n1 = spec.bases[0] as f64;
    let card = spec.cells.len() as f64;
    let similarity = card.ln() / n1.ln();
    if spec.dim() != 2 {
        return DimensionReport {
            similarity,
            hausdorff: None,
            minkowski: None,
            assouad: None,
            note: Some("only the similarity dimension is computed for N >= 3".into()),
        };
    }
    let n2 = spec.bases[1] as f64;
    let t = spec.column_counts();
    let theta = n1.ln() / n2.ln();
    let hausdorff = t.iter().filter(|&&c| c > 0).map(|&c| (c as f64).powf(theta)).sum::<f64>().ln() / n1.ln();
    let r = spec.occupied_columns() as f64;
    let minkowski = r.ln() / n1.ln() + (card / r).ln() / n2.ln();
    let (assouad, note) = if spec.bases[0] < spec.bases[1] {
        let tmax = *t.iter().max().unwrap() as f64;
        (r.ln() / n1.ln() + tmax.ln() / n2.ln(), None)
    } else {
        (similarity, Some("n1 = n2: the carpet is self-similar; assouad reported as the similarity dimension".into()))
    };
    DimensionReport { similarity, hausdorff: Some(hausdorff), minkowski: Some(minkowski), assouad: Some(assouad), note }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CarpetClass {
    Point,
    VerticalLine,
    Square,
    General,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    pub class: CarpetClass,
    /// Union of the first-iteration rectangles is connected.
    pub first_iteration_connected: Option<bool>,
    /// First iteration meets both the left and the right edge.
    pub touches_left_and_right: Option<bool>,
    /// A chosen cell and the missing vertical neighbour next to it.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
    pub verdict: Connectedness,
}

/// Classification and the necessary connectivity conditions for 2-D carpets;
/// the verdict always comes from the exact adjacency graph.
pub fn carpet_connectivity_precheck(spec: &SpongeSpec) -> Result<ConnectivityReport> {
    if spec.dim() != 2 {
        return Err(Error::InvalidInput("connectivity precheck is for 2-D carpets".into()));
    }
    let (n1, n2) = (spec.bases[0], spec.bases[1]);
    let t = spec.column_counts();
    let class = if spec.cells.len() == 1 {
        CarpetClass::Point
    } else if spec.cells.len() == (n1 * n2) as usize {
        CarpetClass::Square
    } else if spec.occupied_columns() == 1 && t.iter().any(|&c| c == n2 as usize) {
        CarpetClass::VerticalLine
    } else {
        CarpetClass::General
    };
    let system = sponge_ifs(spec);
    let verdict = connectedness_check(&system, &AdjacencyOracle::exact(spec.exact_rule()))?.verdict;
    if class != CarpetClass::General {
        return Ok(ConnectivityReport {
            class,
            first_iteration_connected: None,
            touches_left_and_right: None,
            witness: None,
            verdict,
        });
    }
    // closed rectangles touch iff their cell indices differ by at most 1 per axis
    let k = spec.cells.len();
    let graph: Vec<Vec<usize>> = (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| b != a && spec.cells[a].iter().zip(&spec.cells[b]).all(|(x, y)| x.abs_diff(*y) <= 1))
                .collect()
        })
        .collect();
    let comps = crate::geometry::components(&graph);
    let first_connected = comps.iter().all(|&c| c == 0);
    let touches = spec.cells.iter().any(|c| c[0] == 1) && spec.cells.iter().any(|c| c[0] == n1);
    let mut sorted = spec.cells.clone();
    sorted.sort();
    let witness = sorted
        .iter()
        .find(|c| c[1] < n2 && !spec.contains(&[c[0], c[1] + 1]))
        .map(|c| (c.clone(), vec![c[0], c[1] + 1]))
        .or_else(|| {
            sorted
                .iter()
                .find(|c| c[1] > 1 && !spec.contains(&[c[0], c[1] - 1]))
                .map(|c| (c.clone(), vec![c[0], c[1] - 1]))
        });
    Ok(ConnectivityReport {
        class,
        first_iteration_connected: Some(first_connected),
        touches_left_and_right: Some(touches),
        witness,
        verdict,
    })
}

/// Longest word `w` tried for the SOSC witness `phi_w(p)`.
const WITNESS_WORD_LEN: usize = 3;

#[derive(Clone, Debug)]
pub struct SpongeCurve {
    /// The curve in the Euclidean chart.
    pub curve: SampledCurve,
    /// Witness data in the snowflake metric; absent for segments.
    pub sosc: Option<SoscData>,
    /// Word `w` and 1-based map index `i` with `v = phi_w(fixed point of phi_i)`.
    pub witness: Option<(String, usize)>,
    pub report: Option<RemesReport>,
}

/// The axis along which a segment sponge varies: every cell agrees off that
/// axis and the axis is fully occupied.
fn segment_axis(spec: &SpongeSpec) -> Option<usize> {
    let first = &spec.cells[0];
    let varying: Vec<usize> = (0..spec.dim()).filter(|&d| spec.cells.iter().any(|c| c[d] != first[d])).collect();
    match varying[..] {
        [d] if spec.cells.len() == spec.bases[d] as usize => Some(d),
        _ => None,
    }
}

/// Half the snowflake distance from `p` to the boundary of the unit cube.
fn half_boundary_distance(p: &[f64], metric: &Metric) -> f64 {
    let exps = match metric {
        Metric::Snowflake { exponents } => exponents.clone(),
        _ => vec![1.0; p.len()],
    };
    p.iter().zip(&exps).map(|(&x, &e)| x.min(1.0 - x).max(0.0).powf(e)).fold(f64::INFINITY, f64::min) / 2.0
}

/// Parameterizes a connected sponge by running the tree-tour construction on
/// the lifted (self-similar) system and reading the result in the Euclidean
/// chart. The SOSC witness is a point `v = phi_w(p)` of the attractor, with
/// `p` a fixed point of one of the maps and `v` inside the open unit cube,
/// and `tau` is half the snowflake distance from `v` to the cube boundary.
/// Shorter words come first, then larger `tau`; the first candidate passing
/// the separation check is used.
pub fn sponge_parameterize(spec: &SpongeSpec, n: usize, r_override: Option<f64>) -> Result<SpongeCurve> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if spec.cells.len() < 2 {
        return Err(Error::InvalidInput("a single cell gives a point, not a curve".into()));
    }
    let euclid = sponge_ifs(spec);
    let oracle = AdjacencyOracle::exact(spec.exact_rule());
    if connectedness_check(&euclid, &oracle)?.verdict == Connectedness::Disconnected {
        return Err(Error::DisconnectedCarpet);
    }
    if let Some(axis) = segment_axis(spec) {
        let fixed: Vec<f64> =
            spec.cells[0].iter().zip(&spec.bases).map(|(&c, &b)| (c - 1) as f64 / (b - 1) as f64).collect();
        let steps = 64;
        let t: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let x = t
            .iter()
            .map(|&s| {
                let mut p = fixed.clone();
                p[axis] = s;
                p
            })
            .collect();
        return Ok(SpongeCurve { curve: SampledCurve::new(t, x, Metric::Euclidean)?, sosc: None, witness: None, report: None });
    }
    let lifted = sponge_ifs_lifted(spec);
    let fixed: Vec<Vec<f64>> = lifted.maps().iter().map(|m| m.affine.fixed_point().expect("contractions have a fixed point")).collect();
    let mut candidates: Vec<(usize, f64, Word, usize, Vec<f64>)> = Vec::new();
    let mut frontier = vec![Word::empty()];
    for len in 0..=WITNESS_WORD_LEN {
        for w in &frontier {
            for (i, p) in fixed.iter().enumerate() {
                let v = w.apply(&lifted, p);
                let tau = half_boundary_distance(&v, lifted.metric());
                if tau > 0.0 {
                    candidates.push((len, tau, w.clone(), i + 1, v));
                }
            }
        }
        frontier = frontier.iter().flat_map(|w| (0..lifted.len() as u16).map(move |i| (w, i))).map(|(w, i)| w.child(&lifted, i)).collect();
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut last_err = None;
    for (_, tau, w, i, v) in candidates {
        match validate_sosc(&lifted, &v, tau, n, r_override) {
            Ok(sosc) => {
                let result = remes_parameterize(&lifted, &sosc, n, &oracle)?;
                let mut curve = result.curve;
                curve.metric = Metric::Euclidean;
                return Ok(SpongeCurve { curve, sosc: Some(sosc), witness: Some((w.to_string(), i)), report: Some(result.report) });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidInput("no fixed-point image lies inside the open cube".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn sponge_ifs_examples() {
        let sq = sponge_ifs(&gallery::square_spec());
        assert_eq!(sq.len(), 4);
        let f2 = sponge_ifs(&gallery::fig2_spec());
        assert_eq!(f2.len(), 5);
        assert!(f2.lips().iter().all(|&l| (l - 0.5).abs() < 1e-15));
        let f4 = sponge_ifs(&gallery::fig4_spec());
        assert_eq!(f4.len(), 14);
        assert!(f4.lips().iter().all(|&l| (l - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn fig4_dimensions() {
        let r = carpet_dimensions(&gallery::fig4_spec());
        assert!((r.similarity - 14f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((r.similarity - 2.4022).abs() < 1e-4);
        assert!((r.hausdorff.unwrap() - 1.838).abs() < 1e-3);
        assert!((r.minkowski.unwrap() - 1.8597).abs() < 1e-4);
        assert!((r.assouad.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_dimensions() {
        let full = SpongeSpec::new(vec![2, 3], (1..=2).flat_map(|i| (1..=3).map(move |j| vec![i, j])).collect()).unwrap();
        let r = carpet_dimensions(&full);
        for v in [r.hausdorff.unwrap(), r.minkowski.unwrap(), r.assouad.unwrap()] {
            assert!((v - 2.0).abs() < 1e-12, "{r:?}");
        }
        // six maps of ratio 1/2
        assert!((r.similarity - 6f64.log2()).abs() < 1e-12);
        let single = SpongeSpec::new(vec![2, 3], vec![vec![1, 2]]).unwrap();
        let r = carpet_dimensions(&single);
        for v in [r.similarity, r.hausdorff.unwrap(), r.minkowski.unwrap(), r.assouad.unwrap()] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn equal_bases_collapse() {
        let spec = gallery::sierpinski_spec();
        let r = carpet_dimensions(&spec);
        assert!((r.hausdorff.unwrap() - r.similarity).abs() < 1e-12);
        assert!((r.minkowski.unwrap() - r.similarity).abs() < 1e-12);
        assert!(r.note.is_some());
    }

    #[test]
    fn snowflake_exponents() {
        assert_eq!(snowflake_metric(&gallery::square_spec()), Metric::Snowflake { exponents: vec![1.0, 1.0] });
        match snowflake_metric(&gallery::fig2_spec()) {
            Metric::Snowflake { exponents } => assert!((exponents[1] - 0.6309).abs() < 1e-4),
            _ => unreachable!(),
        }
        match snowflake_metric(&gallery::sponge_235_spec()) {
            Metric::Snowflake { exponents } => {
                assert!((exponents[1] - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
                assert!((exponents[2] - 2f64.ln() / 5f64.ln()).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn precheck_examples() {
        let r = carpet_connectivity_precheck(&gallery::fig4_spec()).unwrap();
        assert_eq!(r.class, CarpetClass::General);
        assert_eq!(r.first_iteration_connected, Some(true));
        assert_eq!(r.touches_left_and_right, Some(true));
        assert_eq!(r.witness, Some((vec![2, 1], vec![2, 2])));
        assert_eq!(r.verdict, Connectedness::Connected);

        let two_columns = SpongeSpec::new(vec![3, 3], vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![3, 1], vec![3, 2], vec![3, 3]]).unwrap();
        let r = carpet_connectivity_precheck(&two_columns).unwrap();
        assert_eq!(r.first_iteration_connected, Some(false));
        assert_eq!(r.verdict, Connectedness::Disconnected);

        let r = carpet_connectivity_precheck(&gallery::square_spec()).unwrap();
        assert_eq!(r.class, CarpetClass::Square);
        let column = SpongeSpec::new(vec![2, 3], vec![vec![2, 1], vec![2, 2], vec![2, 3]]).unwrap();
        assert_eq!(carpet_connectivity_precheck(&column).unwrap().class, CarpetClass::VerticalLine);
    }

    #[test]
    fn spec_validation() {
        assert!(SpongeSpec::new(vec![3, 2], vec![vec![1, 1]]).is_err());
        assert!(SpongeSpec::new(vec![2, 3], vec![vec![1, 4]]).is_err());
        assert!(SpongeSpec::new(vec![2, 3], vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(SpongeSpec::new(vec![2, 3], vec![]).is_err());
    }

    #[test]
    fn square_sponge_tour() {
        let res = sponge_parameterize(&gallery::square_spec(), 2, Some(0.05)).unwrap();
        assert_eq!(res.witness.as_ref().map(|w| w.0.len()), Some(1));
        let sosc = res.sosc.unwrap();
        assert_eq!(sosc.v, vec![0.5, 0.5]);
        assert!((sosc.tau - 0.25).abs() < 1e-15);
        let report = res.report.unwrap();
        assert!(report.every_edge_twice && report.closed);
        let cover = crate::geometry::attractor_cover(&gallery::square(), 0.5f64.powi(6)).unwrap();
        let d = crate::geometry::hausdorff_distance(&res.curve.x, &cover.points, &Metric::Euclidean);
        assert!(d <= 3.0 * 0.05 * 0.05 + cover.certified_eps, "{d}");
        assert_eq!(res.curve.metric, Metric::Euclidean);
    }

    #[test]
    fn fig2_sponge_meets_every_rectangle() {
        let spec = gallery::fig2_spec();
        let res = sponge_parameterize(&spec, 1, None).unwrap();
        let sosc = res.sosc.as_ref().unwrap();
        assert!(sosc.v.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!((sosc.tau - 0.25).abs() < 1e-12, "{sosc:?}");
        for c in &spec.cells {
            let (x0, y0) = ((c[0] - 1) as f64 / 2.0, (c[1] - 1) as f64 / 3.0);
            let hit = res.curve.x.iter().any(|p| p[0] >= x0 && p[0] <= x0 + 0.5 && p[1] >= y0 && p[1] <= y0 + 1.0 / 3.0);
            assert!(hit, "cell {c:?} missed");
        }
        assert!(res.report.unwrap().every_edge_twice);
    }

    #[test]
    fn column_is_a_segment() {
        let column = SpongeSpec::new(vec![2, 3], vec![vec![1, 1], vec![1, 2], vec![1, 3]]).unwrap();
        let res = sponge_parameterize(&column, 3, None).unwrap();
        assert!(res.sosc.is_none());
        let c = &res.curve;
        assert_eq!(c.x[0], vec![0.0, 0.0]);
        assert_eq!(c.x[c.len() - 1], vec![0.0, 1.0]);
        // unit speed: 1-Hölder with constant 1
        for i in 1..c.len() {
            assert!((c.metric.dist(&c.x[i - 1], &c.x[i]) - (c.t[i] - c.t[i - 1])).abs() < 1e-12);
        }
    }

    #[test]
    fn sponge_rejects_disconnected_and_points() {
        let two_columns = SpongeSpec::new(vec![3, 3], vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![3, 1], vec![3, 2], vec![3, 3]]).unwrap();
        assert_eq!(sponge_parameterize(&two_columns, 1, None).unwrap_err(), Error::DisconnectedCarpet);
        let point = SpongeSpec::new(vec![2, 2], vec![vec![1, 1]]).unwrap();
        assert!(matches!(sponge_parameterize(&point, 1, None), Err(Error::InvalidInput(_))));
    }

    fn random_spec() -> impl proptest::strategy::Strategy<Value = SpongeSpec> {
        use proptest::prelude::*;
        (2u32..=4, 0u32..=4)
            .prop_flat_map(|(n1, extra)| {
                let n2 = (n1 + extra).min(8);
                let cells = n1 * n2;
                (Just((n1, n2)), proptest::collection::vec(any::<bool>(), cells as usize), 0..cells)
            })
            .prop_map(|((n1, n2), mask, forced)| {
                let cells = (0..n1 * n2)
                    .filter(|&k| mask[k as usize] || k == forced)
                    .map(|k| vec![k / n2 + 1, k % n2 + 1])
                    .collect();
                SpongeSpec::new(vec![n1, n2], cells).unwrap()
            })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(200))]
        #[test]
        fn dimension_ordering(spec in random_spec()) {
            let r = carpet_dimensions(&spec);
            let (h, m, a) = (r.hausdorff.unwrap(), r.minkowski.unwrap(), r.assouad.unwrap());
            proptest::prop_assert!(h <= m + 1e-9, "{spec:?} {r:?}");
            proptest::prop_assert!(m <= a.min(r.similarity) + 1e-9, "{spec:?} {r:?}");
            if spec.bases[0] == spec.bases[1] {
                proptest::prop_assert!((h - r.similarity).abs() < 1e-12 && (m - r.similarity).abs() < 1e-12);
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(1000))]
        #[test]
        fn lifted_maps_are_similarities(
            which in 0usize..3,
            k in 0usize..64,
            x in proptest::collection::vec(0.0f64..1.0, 3),
            y in proptest::collection::vec(0.0f64..1.0, 3),
        ) {
            let spec = [gallery::fig2_spec(), gallery::fig4_spec(), gallery::sponge_235_spec()][which].clone();
            let sys = sponge_ifs_lifted(&spec);
            let n = spec.dim();
            let (x, y) = (&x[..n], &y[..n]);
            let map = &sys.maps()[k % sys.len()];
            let d = sys.metric().dist(x, y);
            let dm = sys.metric().dist(&map.affine.apply(x), &map.affine.apply(y));
            proptest::prop_assert!((dm * spec.bases[0] as f64 - d).abs() <= 1e-12 * d.max(1e-300));
        }
    }
}
