//! Euclidean and coordinate-snowflaked metrics on R^n.

use serde::{Deserialize, Serialize};

/// Distance on R^n.
///
/// `Snowflake` uses `d(x, y) = (sum_i |x_i - y_i|^(2 e_i))^(1/2)`, which makes
/// the diagonal carpet maps similarities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Snowflake { exponents: Vec<f64> },
}

impl Default for Metric {
    fn default() -> Self {
        Metric::Euclidean
    }
}

impl Metric {
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Snowflake { exponents } => a
                .iter()
                .zip(b)
                .zip(exponents)
                .map(|((x, y), e)| (x - y).abs().powf(2.0 * e))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Largest coordinate offset along axis `i` that two points at distance
    /// at most `d` can have. Used to turn metric radii into grid boxes.
    pub fn coord_radius(&self, d: f64, i: usize) -> f64 {
        match self {
            Metric::Euclidean => d,
            Metric::Snowflake { exponents } => {
                let e = exponents[i];
                if e == 1.0 {
                    d
                } else {
                    d.max(0.0).powf(1.0 / e)
                }
            }
        }
    }

    /// Smallest distance two points can have when they differ by at least
    /// `delta` along axis `i`.
    pub fn axis_lower_bound(&self, delta: f64, i: usize) -> f64 {
        match self {
            Metric::Euclidean => delta,
            Metric::Snowflake { exponents } => delta.max(0.0).powf(exponents[i]),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        match self {
            Metric::Euclidean => true,
            Metric::Snowflake { exponents } => exponents.iter().all(|&e| e == 1.0),
        }
    }

    pub fn validate(&self, dim: usize) -> crate::Result<()> {
        if let Metric::Snowflake { exponents } = self {
            if exponents.len() != dim {
                return Err(crate::Error::InvalidInput(format!(
                    "snowflake metric has {} exponents for dimension {dim}",
                    exponents.len()
                )));
            }
            if exponents.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
                return Err(crate::Error::InvalidInput(
                    "snowflake exponents must lie in (0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn euclidean_distance() {
        assert_eq!(Metric::Euclidean.dist(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }

    #[test]
    fn snowflake_with_unit_exponents_is_euclidean() {
        let m = Metric::Snowflake { exponents: vec![1.0, 1.0] };
        assert!(m.is_euclidean());
        assert!((m.dist(&[0.0, 0.0], &[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn coord_radius_inverts_axis_bound() {
        let m = Metric::Snowflake { exponents: vec![1.0, 0.5] };
        let d = 0.3;
        let r = m.coord_radius(d, 1);
        assert!((m.axis_lower_bound(r, 1) - d).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn snowflake_is_a_metric(
            p in prop::collection::vec(-2.0f64..2.0, 6),
            e in prop::collection::vec(0.05f64..=1.0, 2),
        ) {
            let m = Metric::Snowflake { exponents: e };
            let (x, y, z) = (&p[0..2], &p[2..4], &p[4..6]);
            prop_assert!((m.dist(x, y) - m.dist(y, x)).abs() < 1e-15);
            prop_assert_eq!(m.dist(x, x), 0.0);
            if x != y {
                prop_assert!(m.dist(x, y) > 0.0);
            }
            prop_assert!(m.dist(x, z) <= m.dist(x, y) + m.dist(y, z) + 1e-12);
        }
    }
}
