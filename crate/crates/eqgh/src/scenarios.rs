//! Named scenarios: each builds its spaces, actions and maps and serialises
//! them as one JSON bundle.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use eqgh_core::action::FiniteAction;
use eqgh_core::linalg::IntMatrix2;
use eqgh_core::metric::{MetricSpace, PointMap};
use eqgh_core::systems::{
    example_family, example_isometry_family, full_shift, rotation_action, toral_matrix_action, two_group_example,
    CircleGrid, ExampleDynamics, SystemSpec, TorusGrid,
};
use serde::{Deserialize, Serialize};

pub const BUNDLE_SCHEMA: &str = "eqgh.scenario/1";

/// Spaces up to this size also store their distance matrix.
pub const MATRIX_EXPORT_LIMIT: usize = 512;

pub const CAT_MAP: IntMatrix2 = IntMatrix2([[2, 1], [1, 1]]);

/// Generator of the single-matrix action in the two-group example.
pub const TWO_GROUP_A: IntMatrix2 = IntMatrix2([[1, 2], [3, 4]]);

/// A matrix commuting with [`TWO_GROUP_A`], used for the second `Z²`
/// generator.
pub const TWO_GROUP_C: IntMatrix2 = IntMatrix2([[2, 2], [3, 5]]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub n: usize,
    pub mesh: usize,
    pub window: usize,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams { n: 4, mesh: 32, window: 6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceEntry {
    pub id: String,
    pub points: usize,
    pub diameter: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system: Option<SystemSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapEntry {
    pub id: String,
    pub source: String,
    pub target: String,
    pub image: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub schema: String,
    pub scenario: String,
    pub params: ScenarioParams,
    pub spaces: Vec<SpaceEntry>,
    pub actions: Vec<crate::io::ActionFile>,
    pub maps: Vec<MapEntry>,
    pub bounds: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Bundle {
    fn new(name: &str, params: ScenarioParams) -> Self {
        Bundle {
            schema: BUNDLE_SCHEMA.into(),
            scenario: name.into(),
            params,
            spaces: Vec::new(),
            actions: Vec::new(),
            maps: Vec::new(),
            bounds: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn space<M: MetricSpace + ?Sized>(&mut self, id: &str, space: &M, system: Option<SystemSpec>) {
        let matrix = (space.len() <= MATRIX_EXPORT_LIMIT)
            .then(|| (0..space.len()).map(|i| (0..space.len()).map(|j| space.dist(i, j)).collect()).collect());
        self.spaces.push(SpaceEntry { id: id.into(), points: space.len(), diameter: space.diameter(), system, matrix });
    }

    fn action<S: MetricSpace>(&mut self, id: &str, space: &str, a: &FiniteAction<S>) {
        self.actions.push(crate::io::ActionFile::from_action(id, space, a));
    }

    fn map(&mut self, id: &str, source: &str, target: &str, m: &PointMap) {
        self.maps.push(MapEntry {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            image: m.image().to_vec(),
        });
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`; known: {known}", known = NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Core(#[from] eqgh_core::Error),
}

pub const NAMES: &[&str] = &[
    "example_family",
    "example_family_cat",
    "two_group",
    "isometry_family",
    "cat_map",
    "rotation",
    "full_shift",
    "three_point_pair",
];

fn example_y_spec(n: usize, mesh: usize) -> SystemSpec {
    let c = SystemSpec::Circle { radius: 1.0 / n as f64, points: 4 };
    SystemSpec::Product { factors: vec![c.clone(), c, SystemSpec::Torus { mesh }] }
}

/// Builds the named bundle.
pub fn build(name: &str, p: ScenarioParams) -> Result<Bundle, ScenarioError> {
    let mut b = Bundle::new(name, p);
    match name {
        "example_family" | "example_family_cat" => {
            let dynamics =
                if name == "example_family" { ExampleDynamics::paper_pair() } else { ExampleDynamics::cat_map() };
            let e = example_family(p.n, p.mesh, &dynamics)?;
            b.space("X", &e.x, Some(SystemSpec::Torus { mesh: p.mesh }));
            b.space("Y", &e.y, Some(example_y_spec(p.n, p.mesh)));
            b.action("alpha", "X", &e.alpha);
            b.action("beta", "Y", &e.beta);
            b.map("h", "Y", "X", &e.h);
            b.map("f", "X", "Y", &e.f);
            b.bounds.insert("bound".into(), e.bound);
            b.bounds.insert("slack".into(), e.slack);
            b.bounds.insert("lipschitz_slack".into(), e.snap.lipschitz_bound);
            b.bounds.insert("measured_max".into(), e.measured.max());
        }
        "two_group" => {
            let e = two_group_example(p.n, p.mesh, TWO_GROUP_A, TWO_GROUP_C, [(1, 1), (0, 0)])?;
            b.space("X", &e.x, Some(SystemSpec::Torus { mesh: p.mesh }));
            b.space("Y", &e.y, Some(example_y_spec(p.n, p.mesh)));
            b.action("alpha", "X", &e.alpha);
            b.action("beta_bar", "Y", &e.beta_bar);
            b.action("beta_tilde", "Y", &e.beta_tilde);
            b.map("h", "Y", "X", &e.h);
            b.map("f", "X", "Y", &e.f);
            b.bounds.insert("bound".into(), e.bound);
            b.bounds.insert("slack".into(), e.slack);
            b.notes.push(format!("rho: {:?}", e.rho.images()));
            b.notes.push(format!("rho1: {:?}", e.rho1.images()));
        }
        "isometry_family" => {
            let step = coprime_step(p.mesh);
            let e = example_isometry_family(p.n, p.mesh, step)?;
            b.space(
                "X_n",
                &e.x_n,
                Some(SystemSpec::Product {
                    factors: vec![
                        SystemSpec::Circle { radius: 1.0 / p.n as f64, points: p.mesh },
                        SystemSpec::Circle { radius: 1.0, points: p.mesh },
                    ],
                }),
            );
            b.space("X", &e.x, Some(SystemSpec::Circle { radius: 1.0, points: p.mesh }));
            b.action("alpha_n", "X_n", &e.alpha_n);
            b.action("alpha", "X", &e.alpha);
            b.map("h_n", "X_n", "X", &e.h);
            b.map("f_n", "X", "X_n", &e.f);
            b.bounds.insert("bound".into(), e.bound);
            b.notes.push(format!("rotation step {step} of {}", p.mesh));
        }
        "cat_map" => {
            let g = TorusGrid::new(p.mesh)?;
            let (a, snap) = toral_matrix_action(&g, g.clone(), CAT_MAP)?;
            b.space("T", &g, Some(SystemSpec::ToralMatrix { mesh: p.mesh, matrix: CAT_MAP }));
            b.action("cat", "T", &a);
            b.bounds.insert("snap".into(), snap.measured);
        }
        "rotation" => {
            let c = CircleGrid::new(1.0, p.mesh)?;
            let step = coprime_step(p.mesh);
            let angle = 2.0 * PI * step as f64 / p.mesh as f64;
            let (a, snap) = rotation_action(&c, angle)?;
            b.space("S", &c, Some(SystemSpec::Rotation { radius: 1.0, points: p.mesh, angle }));
            b.action("rotation", "S", &a);
            b.bounds.insert("snap".into(), snap.measured);
        }
        "full_shift" => {
            let s = full_shift(2, p.window.max(2), p.seed)?;
            b.space("W", s.action.space(), Some(SystemSpec::FullShift { alphabet: 2, window: p.window.max(2) }));
            b.action("shift", "W", &s.action);
            b.notes.push(format!("boundary-approximate; fill symbol {}", s.fill));
        }
        "three_point_pair" => {
            let (x, y) = crate::fixtures::three_point_pair();
            b.space("X", &x, None);
            b.space("Y", &y, None);
        }
        other => return Err(ScenarioError::Unknown(other.into())),
    }
    Ok(b)
}

/// Smallest step `≥ m/2 − 1` coprime to `m` (5 for `m = 12`); a rational
/// stand-in for an irrational rotation.
pub fn coprime_step(m: usize) -> usize {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let start = (m / 2).saturating_sub(1).max(1);
    (start..m).find(|&k| gcd(k, m) == 1).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps() {
        assert_eq!(coprime_step(12), 5);
        assert_eq!(coprime_step(64), 31);
    }

    #[test]
    fn small_bundles() {
        let p = ScenarioParams { n: 2, mesh: 8, window: 4, seed: 0 };
        for name in NAMES {
            let b = build(name, p).unwrap();
            assert_eq!(b.schema, BUNDLE_SCHEMA);
            assert!(!b.spaces.is_empty());
        }
        assert!(matches!(build("nope", p), Err(ScenarioError::Unknown(_))));
    }
}
