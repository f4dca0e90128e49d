//! Certified attractor covers, connectedness, Hausdorff distance.

use std::fmt::Write as _;

use serde::Serialize;

use crate::ifs::{affine_box, IfsSystem};
use crate::metric::Metric;
use crate::oracle::{Adjacency, AdjacencyOracle};
use crate::spatial::directed_hausdorff;
use crate::word::{word_cut, Word};
use crate::Result;

/// `{(w, phi_w(base)) : w ∈ A*(delta)}`, within `certified_eps` of the
/// attractor in the Hausdorff metric.
#[derive(Clone, Debug)]
pub struct AttractorCover {
    pub cut_delta: f64,
    pub words: Vec<Word>,
    pub points: Vec<Vec<f64>>,
    pub certified_eps: f64,
    /// Per-axis coordinate error: the largest extent of `phi_w(box K)`.
    pub coord_eps: Vec<f64>,
}

pub fn attractor_cover(system: &IfsSystem, delta: f64) -> Result<AttractorCover> {
    let cut = word_cut(system, delta, &Word::empty())?;
    let base = system.base_point();
    let points = cut.words.iter().map(|w| w.apply(system, base)).collect();
    let (lo, hi) = system.bounding_box();
    let mut coord_eps = vec![0.0; system.dim()];
    for w in &cut.words {
        let (a, b) = affine_box(&system.compose_letters(w.letters()), &lo, &hi);
        for i in 0..coord_eps.len() {
            coord_eps[i] = f64::max(coord_eps[i], b[i] - a[i]);
        }
    }
    Ok(AttractorCover {
        cut_delta: delta,
        words: cut.words,
        points,
        certified_eps: delta * system.diam_bound(),
        coord_eps,
    })
}

impl AttractorCover {
    /// CSV rows `word;x1;..;xn`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (w, p) in self.words.iter().zip(&self.points) {
            let _ = write!(out, "{w}");
            for x in p {
                let _ = write!(out, ";{x}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Connectedness {
    Connected,
    Disconnected,
    ConnectedLikely,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectednessReport {
    pub verdict: Connectedness,
    /// Certified lower bound on the distance between two parts of the
    /// attractor when it is disconnected.
    pub certified_gap: Option<f64>,
    /// Level-1 components, as 1-based letters.
    pub components: Vec<Vec<usize>>,
}

/// Hata's criterion on the level-1 intersection graph.
pub fn connectedness_check(system: &IfsSystem, oracle: &AdjacencyOracle) -> Result<ConnectednessReport> {
    let adj = Adjacency::new(system, oracle)?;
    let words: Vec<Word> = (0..system.len() as u16).map(|i| Word::from_letters(system, vec![i])).collect();
    let graph = adj.graph(&words);
    let comp = components(&graph);
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut groups = vec![Vec::new(); ncomp];
    for (i, &c) in comp.iter().enumerate() {
        groups[c].push(i + 1);
    }
    if ncomp > 1 {
        // every cross pair was rejected; in approximate mode the gap is certified
        let mut gap = f64::INFINITY;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                if comp[i] != comp[j] {
                    gap = gap.min(adj.cloud_gap(&words[i], &words[j]));
                }
            }
        }
        return Ok(ConnectednessReport {
            verdict: Connectedness::Disconnected,
            certified_gap: (gap > 0.0).then_some(gap),
            components: groups,
        });
    }
    let verdict = if oracle.is_exact() { Connectedness::Connected } else { Connectedness::ConnectedLikely };
    Ok(ConnectednessReport { verdict, certified_gap: None, components: groups })
}

/// Connected component index per vertex, numbered in order of first vertex.
pub fn components(graph: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; graph.len()];
    let mut next = 0;
    for start in 0..graph.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(v) = stack.pop() {
            for &u in &graph[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}

/// `max(sup_p inf_q d, sup_q inf_p d)` over finite sets.
pub fn hausdorff_distance(p: &[Vec<f64>], q: &[Vec<f64>], metric: &Metric) -> f64 {
    directed_hausdorff(p, q, metric).max(directed_hausdorff(q, p, metric))
}

/// Quadratic reference implementation.
pub fn hausdorff_distance_exact(p: &[Vec<f64>], q: &[Vec<f64>], metric: &Metric) -> f64 {
    let dir = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|x| b.iter().map(|y| metric.dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    dir(p, q).max(dir(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use proptest::prelude::*;

    #[test]
    fn cover_sizes() {
        let g = gallery::gasket();
        assert_eq!(attractor_cover(&g, 0.6).unwrap().points.len(), 3);
        assert_eq!(attractor_cover(&g, 1.0).unwrap().points, vec![g.base_point().to_vec()]);
        assert_eq!(attractor_cover(&gallery::koch(), 0.2).unwrap().points.len(), 16);
    }

    #[test]
    fn cover_refinement() {
        let g = gallery::gasket();
        let mut delta = 0.5;
        for _ in 0..5 {
            let a = attractor_cover(&g, delta).unwrap();
            let b = attractor_cover(&g, delta / 2.0).unwrap();
            assert!(b.certified_eps <= a.certified_eps / 2.0 + 1e-15);
            let d = hausdorff_distance(&a.points, &b.points, g.metric());
            assert!(d <= 2.0 * delta * g.diam_bound());
            delta /= 2.0;
        }
    }

    #[test]
    fn cover_csv_rows() {
        let c = attractor_cover(&gallery::gasket(), 0.6).unwrap();
        let csv = c.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("1;0;0\n2;0.5;0\n"));
    }

    #[test]
    fn connectedness_examples() {
        let g = gallery::gasket();
        let r = connectedness_check(&g, &gallery::gasket_oracle()).unwrap();
        assert_eq!(r.verdict, Connectedness::Connected);
        let c = gallery::cantor_pair();
        let r = connectedness_check(&c, &AdjacencyOracle::approximate(3)).unwrap();
        assert_eq!(r.verdict, Connectedness::Disconnected);
        assert!(r.certified_gap.unwrap() > 0.0 && r.certified_gap.unwrap() <= 0.4);
        let f4 = gallery::fig4_carpet();
        let r = connectedness_check(&f4, &gallery::carpet_oracle(&gallery::fig4_spec())).unwrap();
        assert_eq!(r.verdict, Connectedness::Connected);
        let r = connectedness_check(&g, &AdjacencyOracle::approximate(3)).unwrap();
        assert_eq!(r.verdict, Connectedness::ConnectedLikely);
    }

    #[test]
    fn hausdorff_examples() {
        let m = Metric::Euclidean;
        let p = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(hausdorff_distance(&p, &p, &m), 0.0);
        assert_eq!(hausdorff_distance(&[vec![0.0, 0.0]], &[vec![1.0, 0.0]], &m), 1.0);
        assert_eq!(hausdorff_distance(&p, &[vec![0.0, 0.0]], &m), 1.0);
    }

    proptest! {
        #[test]
        fn grid_hausdorff_matches_quadratic(
            p in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..40),
            q in prop::collection::vec(prop::collection::vec(-1.0f64..3.0, 2), 1..40),
        ) {
            let m = Metric::Snowflake { exponents: vec![1.0, 0.7] };
            let a = hausdorff_distance(&p, &q, &m);
            let b = hausdorff_distance_exact(&p, &q, &m);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
