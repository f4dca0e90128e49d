//! Named example systems with their exact oracles and reference constants.

use std::f64::consts::PI;

use serde::Serialize;

use crate::arc::{snowflake_ifs, DiamondSpec};
use crate::carpets::{sponge_ifs, sponge_ifs_lifted, SpongeSpec};
use crate::ifs::{homothety, plane_similarity, IfsSystem};
use crate::metric::Metric;
use crate::oracle::{AdjacencyOracle, ExactRule};

/// Maps `x -> L_i x + offset_i` on the line with offsets packed left to right.
pub fn line_system(lips: &[f64]) -> IfsSystem {
    let mut offset = 0.0;
    let mut maps = Vec::new();
    for &l in lips {
        maps.push((homothety(l, &[offset]), Some(l)));
        offset += l;
    }
    IfsSystem::new(1, maps, Metric::Euclidean).expect("line maps are contractions")
}

/// `[0,1] x {0}` as two halves.
pub fn segment() -> IfsSystem {
    let maps = vec![(homothety(0.5, &[0.0, 0.0]), Some(0.5)), (homothety(0.5, &[0.5, 0.0]), Some(0.5))];
    IfsSystem::new(2, maps, Metric::Euclidean).unwrap()
}

/// `{0.3x, 0.3x + 0.7}`: a Cantor set with gap 0.4 at the first level.
pub fn cantor_pair() -> IfsSystem {
    let maps = vec![(homothety(0.3, &[0.0]), Some(0.3)), (homothety(0.3, &[0.7]), Some(0.3))];
    IfsSystem::new(1, maps, Metric::Euclidean).unwrap()
}

/// Lips `{0.5, 0.25, 0.25}` tiling `[0,1]`; deliberately not sorted.
pub fn mixed() -> IfsSystem {
    line_system(&[0.5, 0.25, 0.25])
}

pub fn koch() -> IfsSystem {
    let h = 3f64.sqrt() / 6.0;
    let t = 1.0 / 3.0;
    let maps = vec![
        (plane_similarity(t, 0.0, [0.0, 0.0]), Some(t)),
        (plane_similarity(t, PI / 3.0, [t, 0.0]), Some(t)),
        (plane_similarity(t, -PI / 3.0, [0.5, h]), Some(t)),
        (plane_similarity(t, 0.0, [2.0 * t, 0.0]), Some(t)),
    ];
    IfsSystem::new(2, maps, Metric::Euclidean).unwrap()
}

pub fn gasket() -> IfsSystem {
    let maps = vec![
        (homothety(0.5, &[0.0, 0.0]), Some(0.5)),
        (homothety(0.5, &[0.5, 0.0]), Some(0.5)),
        (homothety(0.5, &[0.25, 3f64.sqrt() / 4.0]), Some(0.5)),
    ];
    IfsSystem::new(2, maps, Metric::Euclidean).unwrap()
}

pub fn gasket_oracle() -> AdjacencyOracle {
    AdjacencyOracle::exact(ExactRule::VertexSwap)
}

pub fn carpet_oracle(spec: &SpongeSpec) -> AdjacencyOracle {
    AdjacencyOracle::exact(spec.exact_rule())
}

fn grid(n1: u32, n2: u32, keep: impl Fn(u32, u32) -> bool) -> Vec<Vec<u32>> {
    (1..=n1).flat_map(|i| (1..=n2).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).map(|(i, j)| vec![i, j]).collect()
}

/// Unit square as four quarters.
pub fn square_spec() -> SpongeSpec {
    SpongeSpec::new(vec![2, 2], grid(2, 2, |_, _| true)).unwrap()
}

pub fn square() -> IfsSystem {
    sponge_ifs(&square_spec())
}

pub fn sierpinski_spec() -> SpongeSpec {
    SpongeSpec::new(vec![3, 3], grid(3, 3, |i, j| (i, j) != (2, 2))).unwrap()
}

pub fn sierpinski_carpet() -> IfsSystem {
    sponge_ifs(&sierpinski_spec())
}

/// Five of the six cells of the 2 x 3 grid (the middle of the right column
/// is dropped); similarity dimension `log_2 5 > 2`.
pub fn fig2_spec() -> SpongeSpec {
    SpongeSpec::new(vec![2, 3], grid(2, 3, |i, j| (i, j) != (2, 2))).unwrap()
}

/// Under the snowflake metric, where the maps are similarities.
pub fn fig2_carpet() -> IfsSystem {
    sponge_ifs_lifted(&fig2_spec())
}

/// Two full outer columns of the 3 x 6 grid joined by the bottom and top
/// cells of the middle column.
pub fn fig4_spec() -> SpongeSpec {
    SpongeSpec::new(vec![3, 6], grid(3, 6, |i, j| i != 2 || j == 1 || j == 6)).unwrap()
}

pub fn fig4_carpet() -> IfsSystem {
    sponge_ifs_lifted(&fig4_spec())
}

/// Bases `(2,3,5)`, cells with `i_2 = 1` or `i_3 = 1`.
pub fn sponge_235_spec() -> SpongeSpec {
    let mut cells = Vec::new();
    for i in 1..=2 {
        for j in 1..=3 {
            for k in 1..=5 {
                if j == 1 || k == 1 {
                    cells.push(vec![i, j, k]);
                }
            }
        }
    }
    SpongeSpec::new(vec![2, 3, 5], cells).unwrap()
}

pub fn sponge_235() -> IfsSystem {
    sponge_ifs_lifted(&sponge_235_spec())
}

/// A Z-shaped three-segment generator with total squared length above 1,
/// so the similarity dimension exceeds 2.
pub fn fig3_diamonds() -> DiamondSpec {
    DiamondSpec {
        vertices: vec![[0.0, 0.0], [0.7, 0.05], [0.086, -0.036], [1.0, 0.0]],
        apertures: vec![0.02, 0.02, 0.02],
    }
}

pub fn fig3_snowflake() -> IfsSystem {
    snowflake_ifs(&fig3_diamonds()).expect("gallery diamonds are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form value, e.g. `log k / log(1/L)`.
    ClosedForm,
    /// Value stated in the literature for this example.
    Published,
    /// Obtained by direct enumeration or evaluation.
    Computed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constant {
    pub name: &'static str,
    pub value: f64,
    pub provenance: Provenance,
    pub source: &'static str,
}

#[derive(Clone, Debug)]
pub enum GallerySystem {
    Ifs(IfsSystem),
    Sponge(SpongeSpec),
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub system: GallerySystem,
    pub exact_oracle: Option<AdjacencyOracle>,
    pub constants: Vec<Constant>,
}

impl GalleryEntry {
    /// The IFS: sponges use the lifted (snowflake) metric.
    pub fn ifs(&self) -> IfsSystem {
        match &self.system {
            GallerySystem::Ifs(s) => s.clone(),
            GallerySystem::Sponge(spec) => sponge_ifs_lifted(spec),
        }
    }

    pub fn sponge(&self) -> Option<&SpongeSpec> {
        match &self.system {
            GallerySystem::Sponge(spec) => Some(spec),
            GallerySystem::Ifs(_) => None,
        }
    }

    /// The exact oracle when registered, otherwise an approximate one.
    pub fn oracle(&self) -> AdjacencyOracle {
        self.exact_oracle.clone().unwrap_or_else(|| AdjacencyOracle::approximate(4))
    }
}

fn sdim(name: &'static str, value: f64, provenance: Provenance, source: &'static str) -> Constant {
    Constant { name, value, provenance, source }
}

pub const NAMES: [&str; 11] = [
    "segment",
    "cantor-pair",
    "mixed",
    "koch",
    "gasket",
    "square",
    "sierpinski-carpet",
    "fig2-carpet",
    "fig4-carpet",
    "fig3-snowflake",
    "sponge-235",
];

/// Short aliases: `fig2`, `fig3`, `fig4`, `sierpinski`, `cantor`.
fn canonical(name: &str) -> &str {
    match name {
        "fig2" => "fig2-carpet",
        "fig3" => "fig3-snowflake",
        "fig4" => "fig4-carpet",
        "sierpinski" => "sierpinski-carpet",
        "cantor" => "cantor-pair",
        other => other,
    }
}

pub fn entry(name: &str) -> Option<GalleryEntry> {
    use Provenance::*;
    let name = canonical(name);
    let e = |name, system, exact_oracle, constants| Some(GalleryEntry { name, system, exact_oracle, constants });
    let sponge = |spec: SpongeSpec| {
        let o = carpet_oracle(&spec);
        (GallerySystem::Sponge(spec), Some(o))
    };
    match name {
        "segment" => e(
            "segment",
            GallerySystem::Ifs(segment()),
            Some(AdjacencyOracle::exact(ExactRule::ArcChain)),
            vec![sdim("s", 1.0, ClosedForm, "2 * (1/2)^s = 1")],
        ),
        "cantor-pair" => e(
            "cantor-pair",
            GallerySystem::Ifs(cantor_pair()),
            None,
            vec![
                sdim("s", 0.5f64.ln() / 0.3f64.ln(), ClosedForm, "2 * 0.3^s = 1"),
                sdim("first_level_gap", 0.4, Computed, "0.7 - 0.3"),
            ],
        ),
        "mixed" => e(
            "mixed",
            GallerySystem::Ifs(mixed()),
            Some(AdjacencyOracle::exact(ExactRule::ArcChain)),
            vec![sdim("s", 1.0, ClosedForm, "0.5 + 0.25 + 0.25 = 1")],
        ),
        "koch" => e(
            "koch",
            GallerySystem::Ifs(koch()),
            Some(AdjacencyOracle::exact(ExactRule::ArcChain)),
            vec![sdim("s", 4f64.ln() / 3f64.ln(), ClosedForm, "4 * (1/3)^s = 1")],
        ),
        "gasket" => e(
            "gasket",
            GallerySystem::Ifs(gasket()),
            Some(gasket_oracle()),
            vec![sdim("s", 3f64.ln() / 2f64.ln(), ClosedForm, "3 * (1/2)^s = 1")],
        ),
        "square" => {
            let (s, o) = sponge(square_spec());
            e("square", s, o, vec![sdim("s", 2.0, ClosedForm, "4 * (1/2)^s = 1")])
        }
        "sierpinski-carpet" => {
            let (s, o) = sponge(sierpinski_spec());
            e("sierpinski-carpet", s, o, vec![sdim("s", 8f64.ln() / 3f64.ln(), ClosedForm, "8 * (1/3)^s = 1")])
        }
        "fig2-carpet" => {
            let (s, o) = sponge(fig2_spec());
            e(
                "fig2-carpet",
                s,
                o,
                vec![sdim("s", 5f64.ln() / 2f64.ln(), Published, "sharp parameterization exponent of the (2,3) carpet is 1/log_2 5")],
            )
        }
        "fig4-carpet" => {
            let (s, o) = sponge(fig4_spec());
            e(
                "fig4-carpet",
                s,
                o,
                vec![
                    sdim("s", 14f64.ln() / 3f64.ln(), ClosedForm, "log_3 14"),
                    sdim("hausdorff", 1.838, Computed, "log_3(3 + 2^(log_6 3) + 3)"),
                    sdim("minkowski", 1.0 + (14.0f64 / 3.0).ln() / 6f64.ln(), ClosedForm, "1 + log_6(14/3)"),
                    sdim("assouad", 2.0, ClosedForm, "log_3 3 + log_6 6"),
                ],
            )
        }
        "fig3-snowflake" => {
            e(
                "fig3-snowflake",
                GallerySystem::Ifs(fig3_snowflake()),
                Some(AdjacencyOracle::exact(ExactRule::ArcChain)),
                vec![sdim("sum_sq_lengths_above_one", 1.0, Computed, "sum |l_i|^2 > 1 forces s > 2")],
            )
        }
        "sponge-235" => {
            let (s, o) = sponge(sponge_235_spec());
            e("sponge-235", s, o, vec![sdim("s", 14f64.ln() / 2f64.ln(), ClosedForm, "log_2 14")])
        }
        _ => None,
    }
}

pub fn entries() -> Vec<GalleryEntry> {
    NAMES.iter().filter_map(|n| entry(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::similarity_dimension;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            let e = entry(name).unwrap();
            assert_eq!(e.name, name);
            assert!(!e.constants.is_empty());
            assert!(!e.ifs().is_empty());
        }
        assert!(entry("nope").is_none());
        assert_eq!(entry("fig2").unwrap().name, "fig2-carpet");
    }

    #[test]
    fn documented_dimensions_hold() {
        for e in entries() {
            if let Some(c) = e.constants.iter().find(|c| c.name == "s") {
                let s = similarity_dimension(&e.ifs(), 1e-13);
                assert!((s - c.value).abs() < 1e-9, "{}: {s} vs {}", e.name, c.value);
            }
        }
    }

    #[test]
    fn fig3_is_above_dimension_two() {
        let lips = fig3_snowflake().lips();
        assert!(lips.iter().map(|l| l * l).sum::<f64>() > 1.0);
        assert!(similarity_dimension(&fig3_snowflake(), 1e-12) > 2.0);
    }

    #[test]
    fn koch_pieces_chain() {
        let k = koch();
        let ends = [[0.0, 0.0], [1.0, 0.0]];
        for i in 0..3 {
            let a = k.maps()[i].apply(&ends[1]);
            let b = k.maps()[i + 1].apply(&ends[0]);
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
    }
}
