//! Fans of projective bundles over projective space, their blow-ups along
//! torus-invariant centers, and Picard-group bookkeeping.
//!
//! Ray names are stable: `b0..bs` (base), `f0..fr` (fiber), `e` (exceptional).

mod fan;
mod pic;
mod spec;

pub use fan::{Fan, Ray};
pub use pic::{revlex_cmp, revlex_grid, PicBasis, PicClass};
pub use spec::{center_geometry, BundleSpec, CenterGeometry, CenterSpec, Cut};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("invalid bundle spec: {0}")]
    InvalidSpec(String),
    #[error("rays {0:?} do not span a cone of the fan")]
    NotACone(Vec<String>),
    #[error("degenerate center (s' = {s_prime}, r' = {r_prime})")]
    DegenerateCenter { s_prime: i64, r_prime: i64 },
    #[error("unknown ray {0:?}")]
    UnknownRay(String),
    #[error("centers of codimension {0} are not supported (only 2 or 3)")]
    UnsupportedCodimension(usize),
    #[error("ray {0} is not primitive")]
    NotPrimitive(String),
    #[error("cone {0:?} is not unimodular")]
    NotSmooth(Vec<String>),
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("cannot blow up a fan with {0:?} Picard basis")]
    UnsupportedBasis(PicBasis),
}

pub fn build_projective_bundle_fan(spec: &BundleSpec) -> Result<Fan, FanError> {
    Fan::projective_bundle(spec)
}

pub fn star_subdivide(fan: &Fan, center: &CenterSpec) -> Result<Fan, FanError> {
    fan.star_subdivide(center)
}

/// `X`, the center, and the blow-up `X~ = Bl_Y X`, built together.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub spec: BundleSpec,
    pub center: CenterSpec,
    pub geometry: CenterGeometry,
    pub base: Fan,
    pub fan: Fan,
}

impl BlowUp {
    pub fn new(spec: &BundleSpec, center: &CenterSpec) -> Result<Self, FanError> {
        let geometry = CenterGeometry::new(spec, center)?;
        let base = Fan::projective_bundle(spec)?;
        let fan = base.star_subdivide(center)?;
        Ok(Self {
            spec: spec.clone(),
            center: center.clone(),
            geometry,
            base,
            fan,
        })
    }

    pub fn codim(&self) -> usize {
        self.geometry.codim
    }

    /// `(s+1)(r+1) + (c-1)(s'+1)(r'+1)`, the rank of `K_0` of the blow-up.
    pub fn expected_length(&self) -> usize {
        let g = &self.geometry;
        (self.spec.s + 1) * (self.spec.r() + 1) + (g.codim - 1) * (g.s_prime + 1) * (g.r_prime + 1)
    }

    /// `omega_X~ = f^*omega_X (x) O((c-1)E)`.
    pub fn canonical_class(&self) -> PicClass {
        self.fan.canonical_class()
    }
}

/// Every center of codimension `c` (ray sets spanning a cone) of the bundle.
pub fn valid_centers(spec: &BundleSpec, codim: usize) -> Vec<CenterSpec> {
    let fan = Fan::split_bundle(spec.s, &spec.fiber_degrees);
    let n = fan.rays().len();
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(codim);
    fn rec(
        fan: &Fan,
        n: usize,
        codim: usize,
        start: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<CenterSpec>,
    ) {
        if pick.len() == codim {
            if fan.spans_cone(pick) {
                let names: Vec<&str> = pick.iter().map(|&i| fan.rays()[i].name.as_str()).collect();
                out.push(CenterSpec::new(&names));
            }
            return;
        }
        for i in start..n {
            pick.push(i);
            rec(fan, n, codim, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(&fan, n, codim, 0, &mut pick, &mut out);
    out
}

/// All bundle specs with `s + r <= max_dim` and `0 = a_0 <= a_1 <= ... <= a_r <= max_degree`.
pub fn enumerate_specs(max_dim: usize, max_degree: i64) -> Vec<BundleSpec> {
    fn degrees(r: usize, max: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == r + 1 {
            out.push(prefix.clone());
            return;
        }
        let lo = *prefix.last().unwrap();
        for a in lo..=max {
            prefix.push(a);
            degrees(r, max, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for dim in 2..=max_dim {
        for s in 1..dim {
            let r = dim - s;
            let mut ds = Vec::new();
            degrees(r, max_degree, &mut vec![0], &mut ds);
            out.extend(ds.into_iter().map(|d| BundleSpec {
                s,
                fiber_degrees: d,
            }));
        }
    }
    out
}
