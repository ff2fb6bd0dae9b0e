use serde::{Deserialize, Serialize};

use super::fan::Fan;
use super::pic::PicClass;
use super::FanError;

/// `X = P_{P^s}(O + O(a_1) + ... + O(a_r))` with `0 = a_0 <= a_1 <= ... <= a_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleSpec {
    pub s: usize,
    pub fiber_degrees: Vec<i64>,
}

impl BundleSpec {
    pub fn new(s: usize, fiber_degrees: Vec<i64>) -> Result<Self, FanError> {
        let spec = Self { s, fiber_degrees };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FanError> {
        let bad = |msg: String| Err(FanError::InvalidSpec(msg));
        if self.s < 1 {
            return bad("base dimension must be at least 1".into());
        }
        if self.fiber_degrees.len() < 2 {
            return bad("need at least two fiber degrees a0,a1 (fiber dimension r >= 1)".into());
        }
        if self.fiber_degrees[0] != 0 {
            return bad(format!(
                "fiber degrees must start at 0; twist by O({}) and pass {:?}",
                -self.fiber_degrees[0],
                self.normalized()
            ));
        }
        if self.fiber_degrees.iter().any(|&a| a < 0) {
            return bad("fiber degrees must be non-negative".into());
        }
        if self.fiber_degrees.windows(2).any(|w| w[0] > w[1]) {
            return bad(format!(
                "fiber degrees must be non-decreasing; sorted they are {:?}",
                self.normalized()
            ));
        }
        Ok(())
    }

    /// Sorted degrees shifted so the smallest is 0 (the same variety).
    pub fn normalized(&self) -> Vec<i64> {
        let mut d = self.fiber_degrees.clone();
        d.sort_unstable();
        let m = d.first().copied().unwrap_or(0);
        d.iter().map(|x| x - m).collect()
    }

    /// Fiber dimension `r`.
    pub fn r(&self) -> usize {
        self.fiber_degrees.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.s + self.r()
    }

    /// `a = sum a_k`.
    pub fn degree_sum(&self) -> i64 {
        self.fiber_degrees.iter().sum()
    }
}

/// Torus-invariant center: the rays whose divisors cut out `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CenterSpec {
    ray_names: Vec<String>,
}

impl CenterSpec {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let mut ray_names: Vec<String> = names
            .iter()
            .map(|s| s.as_ref().trim().to_string())
            .collect();
        ray_names.sort();
        ray_names.dedup();
        Self { ray_names }
    }

    /// Parses a comma-separated list such as `b1,f1`.
    pub fn parse(s: &str) -> Self {
        let names: Vec<&str> = s.split(',').filter(|x| !x.trim().is_empty()).collect();
        Self::new(&names)
    }

    pub fn ray_names(&self) -> &[String] {
        &self.ray_names
    }

    pub fn codim(&self) -> usize {
        self.ray_names.len()
    }
}

impl std::fmt::Display for CenterSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.ray_names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    Base(usize),
    Fiber(usize),
}

/// The center `Y = P_{P^{s'}}(F)` and its conormal bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterGeometry {
    pub codim: usize,
    pub s_prime: usize,
    pub r_prime: usize,
    /// Fiber summand indices not cut by the center; `F = sum O(a_j)` over these.
    pub fiber_survivors: Vec<usize>,
    pub survivor_degrees: Vec<i64>,
    /// Conormal summands as `(alpha, beta)` on `Y`, one per cutting divisor,
    /// in center-name order.
    pub conormal_summands: Vec<(i64, i64)>,
}

fn parse_ray(name: &str, spec: &BundleSpec) -> Result<Cut, FanError> {
    let unknown = || FanError::UnknownRay(name.to_string());
    let (kind, idx) = name.split_at(1.min(name.len()));
    let idx: usize = idx.parse().map_err(|_| unknown())?;
    match kind {
        "b" if idx <= spec.s => Ok(Cut::Base(idx)),
        "f" if idx <= spec.r() => Ok(Cut::Fiber(idx)),
        _ => Err(unknown()),
    }
}

impl CenterGeometry {
    pub fn new(spec: &BundleSpec, center: &CenterSpec) -> Result<Self, FanError> {
        spec.validate()?;
        let cuts: Vec<Cut> = center
            .ray_names()
            .iter()
            .map(|n| parse_ray(n, spec))
            .collect::<Result<_, _>>()?;
        let c = cuts.len();
        if !(2..=3).contains(&c) {
            return Err(FanError::UnsupportedCodimension(c));
        }
        let base_cuts = cuts.iter().filter(|c| matches!(c, Cut::Base(_))).count();
        let fiber_cuts = c - base_cuts;
        let s_prime = spec.s as i64 - base_cuts as i64;
        let r_prime = spec.r() as i64 - fiber_cuts as i64;
        if s_prime < 0 || r_prime < 0 {
            return Err(FanError::DegenerateCenter { s_prime, r_prime });
        }
        let fan = Fan::split_bundle(spec.s, &spec.fiber_degrees);
        let idx: Vec<usize> = center
            .ray_names()
            .iter()
            .map(|n| fan.ray_index(n))
            .collect::<Result<_, _>>()?;
        if !fan.spans_cone(&idx) {
            return Err(FanError::NotACone(center.ray_names().to_vec()));
        }

        let cut_fibers: Vec<usize> = cuts
            .iter()
            .filter_map(|c| match c {
                Cut::Fiber(j) => Some(*j),
                Cut::Base(_) => None,
            })
            .collect();
        let fiber_survivors: Vec<usize> =
            (0..=spec.r()).filter(|j| !cut_fibers.contains(j)).collect();
        let survivor_degrees = fiber_survivors
            .iter()
            .map(|&j| spec.fiber_degrees[j])
            .collect();
        let conormal_summands = cuts
            .iter()
            .map(|c| match *c {
                Cut::Base(_) => (-1, 0),
                Cut::Fiber(j) => (spec.fiber_degrees[j], -1),
            })
            .collect();

        Ok(Self {
            codim: c,
            s_prime: s_prime as usize,
            r_prime: r_prime as usize,
            fiber_survivors,
            survivor_degrees,
            conormal_summands,
        })
    }

    pub fn dim(&self) -> usize {
        self.s_prime + self.r_prime
    }

    /// Fan of `Y` with its own (possibly collapsed) Picard basis.
    pub fn y_fan(&self) -> Fan {
        Fan::split_bundle(self.s_prime, &self.survivor_degrees)
    }

    /// `q^*O(alpha) (x) O_q(beta)` on `Y`, expressed in the basis of [`Self::y_fan`].
    pub fn y_class(&self, alpha: i64, beta: i64) -> PicClass {
        match (self.s_prime > 0, self.r_prime > 0) {
            (true, true) => PicClass::bundle(alpha, beta),
            (true, false) => PicClass::projective(alpha + beta * self.survivor_degrees[0]),
            (false, true) => PicClass::projective(beta),
            (false, false) => PicClass::point(),
        }
    }
}

/// Parsed center geometry, as a free function.
pub fn center_geometry(spec: &BundleSpec, center: &CenterSpec) -> Result<CenterGeometry, FanError> {
    CenterGeometry::new(spec, center)
}
