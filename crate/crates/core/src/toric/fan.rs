use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use super::pic::{PicBasis, PicClass};
use super::spec::{BundleSpec, CenterSpec};
use super::FanError;
use crate::lattice::{determinant, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub name: String,
    pub vector: Vec<i64>,
}

/// A smooth complete fan together with a declared basis of its Picard group.
///
/// `ray_classes[i]` is the class of the prime divisor of ray `i`;
/// `sections[j]` is a T-divisor whose class is the `j`-th basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Ray>,
    cones: Vec<Vec<usize>>,
    basis: PicBasis,
    ray_classes: Vec<Vec<i64>>,
    sections: Vec<Vec<i64>>,
}

fn unit(dim: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

impl Fan {
    /// Fan of `P_{P^s}(O(d_0) + ... + O(d_r))`.
    ///
    /// Degenerate shapes are allowed: `s = 0` gives `P^r`, `r = 0` gives
    /// `P^s`, both zero gives a point. The Picard basis collapses accordingly.
    pub fn split_bundle(s: usize, degrees: &[i64]) -> Fan {
        assert!(
            !degrees.is_empty(),
            "a projective bundle needs at least one summand"
        );
        let r = degrees.len() - 1;
        let dim = s + r;
        let d0 = degrees[0];

        let mut rays = Vec::new();
        if s > 0 {
            let mut b0 = vec![0; dim];
            for x in b0.iter_mut().take(s) {
                *x = -1;
            }
            for j in 1..=r {
                b0[s + j - 1] = degrees[j] - d0;
            }
            rays.push(Ray {
                name: "b0".into(),
                vector: b0,
            });
            for i in 1..=s {
                rays.push(Ray {
                    name: format!("b{i}"),
                    vector: unit(dim, i - 1),
                });
            }
        }
        let fiber_start = rays.len();
        if r > 0 {
            let mut f0 = vec![0; dim];
            for x in f0.iter_mut().skip(s) {
                *x = -1;
            }
            rays.push(Ray {
                name: "f0".into(),
                vector: f0,
            });
            for j in 1..=r {
                rays.push(Ray {
                    name: format!("f{j}"),
                    vector: unit(dim, s + j - 1),
                });
            }
        }

        let base: Vec<usize> = (0..fiber_start).collect();
        let fiber: Vec<usize> = (fiber_start..rays.len()).collect();
        let omit = |v: &[usize]| -> Vec<Vec<usize>> {
            if v.is_empty() {
                vec![vec![]]
            } else {
                (0..v.len())
                    .map(|o| {
                        v.iter()
                            .enumerate()
                            .filter(|&(i, _)| i != o)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect()
            }
        };
        let mut cones = Vec::new();
        for b in omit(&base) {
            for f in omit(&fiber) {
                let mut c: Vec<usize> = b.iter().chain(f.iter()).copied().collect();
                c.sort_unstable();
                cones.push(c);
            }
        }

        let n = rays.len();
        let (basis, ray_classes, sections) = match (s > 0, r > 0) {
            (true, true) => {
                let mut classes = vec![vec![1, 0]; fiber_start];
                classes.extend((0..=r).map(|j| vec![-degrees[j], 1]));
                let mut alpha = vec![0; n];
                alpha[0] = 1;
                let mut beta = vec![0; n];
                beta[fiber_start] = 1;
                beta[0] = d0;
                (PicBasis::Bundle, classes, vec![alpha, beta])
            }
            (true, false) | (false, true) => {
                let mut sec = vec![0; n];
                sec[0] = 1;
                (PicBasis::Projective, vec![vec![1]; n], vec![sec])
            }
            (false, false) => (PicBasis::Point, vec![], vec![]),
        };

        Fan {
            dim,
            rays,
            cones,
            basis,
            ray_classes,
            sections,
        }
    }

    /// Fan of the projective bundle described by a validated [`BundleSpec`].
    pub fn projective_bundle(spec: &BundleSpec) -> Result<Fan, FanError> {
        spec.validate()?;
        let fan = Fan::split_bundle(spec.s, &spec.fiber_degrees);
        fan.validate()?;
        Ok(fan)
    }

    pub fn projective_space(n: usize) -> Fan {
        Fan::split_bundle(n, &[0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn basis(&self) -> PicBasis {
        self.basis
    }

    pub fn ray_index(&self, name: &str) -> Result<usize, FanError> {
        self.rays
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| FanError::UnknownRay(name.to_string()))
    }

    /// `dim x rays` matrix whose columns are the ray generators.
    pub fn ray_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.dim, self.rays.len());
        for (j, ray) in self.rays.iter().enumerate() {
            for (i, &x) in ray.vector.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Whether the given ray indices lie in a common maximal cone.
    pub fn spans_cone(&self, rays: &[usize]) -> bool {
        self.cones
            .iter()
            .any(|c| rays.iter().all(|r| c.contains(r)))
    }

    /// Checks primitivity, smoothness and completeness.
    pub fn validate(&self) -> Result<(), FanError> {
        for ray in &self.rays {
            let g = ray.vector.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g != 1 {
                return Err(FanError::NotPrimitive(ray.name.clone()));
            }
        }
        for cone in &self.cones {
            if cone.len() != self.dim {
                return Err(FanError::NotSmooth(self.names(cone)));
            }
            let rows: Vec<Vec<i64>> = cone.iter().map(|&i| self.rays[i].vector.clone()).collect();
            let det = if self.dim == 0 {
                BigInt::one()
            } else {
                determinant(&IntMatrix::from_rows(&rows))
            };
            if !det.abs().is_one() {
                return Err(FanError::NotSmooth(self.names(cone)));
            }
        }
        self.check_complete()
    }

    fn check_complete(&self) -> Result<(), FanError> {
        if self.cones.is_empty() {
            return Err(FanError::NotComplete("no maximal cones".into()));
        }
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.cones.iter().enumerate() {
            for drop in 0..cone.len() {
                let f: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &x)| x)
                    .collect();
                facets.entry(f).or_default().push(ci);
            }
        }
        for (facet, owners) in &facets {
            if owners.len() != 2 {
                return Err(FanError::NotComplete(format!(
                    "facet {:?} lies in {} maximal cones",
                    self.names(facet),
                    owners.len()
                )));
            }
        }
        // connectivity of the facet graph
        let mut seen = vec![false; self.cones.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for owners in facets.values() {
                if owners.contains(&c) {
                    for &o in owners {
                        if !seen[o] {
                            seen[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(FanError::NotComplete("facet graph is disconnected".into()));
        }
        Ok(())
    }

    fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.rays[i].name.clone()).collect()
    }

    /// Blow-up along the orbit closure of the cone spanned by `center`.
    ///
    /// Adds the ray `e` (sum of the center's generators) and replaces every
    /// maximal cone containing the center by its star subdivision. A bundle
    /// basis `(alpha, beta)` is extended to `(alpha, beta, k)`.
    pub fn star_subdivide(&self, center: &CenterSpec) -> Result<Fan, FanError> {
        if self.basis != PicBasis::Bundle {
            return Err(FanError::UnsupportedBasis(self.basis));
        }
        let sigma: Vec<usize> = center
            .ray_names()
            .iter()
            .map(|n| self.ray_index(n))
            .collect::<Result<_, _>>()?;
        if sigma.len() < 2 || !self.spans_cone(&sigma) {
            return Err(FanError::NotACone(center.ray_names().to_vec()));
        }
        let mut e = vec![0i64; self.dim];
        for &i in &sigma {
            for (x, y) in e.iter_mut().zip(&self.rays[i].vector) {
                *x += y;
            }
        }
        if e.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
            return Err(FanError::NotPrimitive("e".into()));
        }
        let e_idx = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(Ray {
            name: "e".into(),
            vector: e,
        });

        let mut cones = Vec::new();
        for cone in &self.cones {
            if sigma.iter().all(|r| cone.contains(r)) {
                for &drop in &sigma {
                    let mut c: Vec<usize> = cone.iter().copied().filter(|&x| x != drop).collect();
                    c.push(e_idx);
                    c.sort_unstable();
                    cones.push(c);
                }
            } else {
                cones.push(cone.clone());
            }
        }

        // strict transform of D_rho is f^*D_rho - E for rho in the center
        let mut ray_classes: Vec<Vec<i64>> = self
            .ray_classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut c = c.clone();
                c.push(if sigma.contains(&i) { -1 } else { 0 });
                c
            })
            .collect();
        ray_classes.push(vec![0, 0, 1]);

        let mut sections: Vec<Vec<i64>> = self
            .sections
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.push(sigma.iter().map(|&i| s[i]).sum());
                s
            })
            .collect();
        let mut ek = vec![0; rays.len()];
        ek[e_idx] = 1;
        sections.push(ek);

        let fan = Fan {
            dim: self.dim,
            rays,
            cones,
            basis: PicBasis::BlowUp,
            ray_classes,
            sections,
        };
        fan.validate()?;
        Ok(fan)
    }

    /// Class of the prime torus-invariant divisor of a ray.
    pub fn divisor_class(&self, ray: &str) -> Result<PicClass, FanError> {
        let i = self.ray_index(ray)?;
        Ok(PicClass::new(self.basis, self.ray_classes[i].clone()))
    }

    /// Class of the T-divisor `sum coeffs[i] D_i`.
    pub fn class_of_divisor(&self, coeffs: &[i64]) -> PicClass {
        assert_eq!(coeffs.len(), self.rays.len());
        let mut out = vec![0; self.basis.rank()];
        for (c, cls) in coeffs.iter().zip(&self.ray_classes) {
            for (o, x) in out.iter_mut().zip(cls) {
                *o += c * x;
            }
        }
        PicClass::new(self.basis, out)
    }

    /// `-sum D_rho`.
    pub fn canonical_class(&self) -> PicClass {
        self.class_of_divisor(&vec![-1; self.rays.len()])
    }

    /// A T-divisor whose class is `cls`, as coefficients per ray.
    pub fn tdivisor_lift(&self, cls: &PicClass) -> Vec<i64> {
        assert_eq!(
            cls.basis, self.basis,
            "class is not in this fan's Picard basis"
        );
        let mut out = vec![0; self.rays.len()];
        for (c, sec) in cls.coords.iter().zip(&self.sections) {
            for (o, x) in out.iter_mut().zip(sec) {
                *o += c * x;
            }
        }
        out
    }

    /// Class coordinates of every ray (the matrix of the class map).
    pub fn class_matrix(&self) -> IntMatrix {
        let rank = self.basis.rank();
        let mut m = IntMatrix::zeros(rank, self.rays.len());
        for (j, cls) in self.ray_classes.iter().enumerate() {
            for (i, &x) in cls.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Canonical JSON: rays sorted by name, cones as sorted name lists in
    /// sorted order, keys sorted. Two fans with the same canonical JSON have
    /// identical cohomology tables.
    pub fn canonical_json(&self) -> String {
        let mut rays: Vec<Value> = self
            .rays
            .iter()
            .zip(&self.ray_classes)
            .map(|(r, c)| json!({ "name": r.name, "vector": r.vector, "class": c }))
            .collect();
        rays.sort_by(|a, b| a["name"].as_str().cmp(&b["name"].as_str()));
        let cones: BTreeSet<Vec<String>> = self
            .cones
            .iter()
            .map(|c| {
                let mut n = self.names(c);
                n.sort();
                n
            })
            .collect();
        json!({
            "dim": self.dim,
            "basis": self.basis.name(),
            "rays": rays,
            "cones": cones,
        })
        .to_string()
    }
}
