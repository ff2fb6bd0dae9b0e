//! Exact dimensions of line bundle cohomology on smooth complete toric
//! varieties.
//!
//! For a T-divisor `D = sum a_rho D_rho` and a character `u`, let
//! `V(u) = { rho : <u, v_rho> < -a_rho }`. Then
//! `h^i(D) = sum_u rank H~^{i-1}(complex on V(u))`, where the complex
//! consists of the subsets of `V(u)` lying in a maximal cone. Only finitely
//! many `u` contribute; they lie in the bounding box of the vertices of the
//! hyperplane arrangement `<u, v_rho> = -a_rho`. We scan that box inflated
//! by one unit and require the inflated boundary to contribute nothing.

mod cache;
mod complex;

pub use cache::{DiskCache, CACHE_ENV, DEFAULT_CACHE_DIR};
pub use complex::{reduced_cohomology_ranks, SupportComplex};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{solve_rational, IntMatrix};
use crate::toric::{Fan, PicClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("character {u:?} on the search boundary contributes {ranks:?}; the fan is not complete or the search region is wrong")]
    UnboundedContribution { u: Vec<i64>, ranks: Vec<u64> },
    #[error("class {0:?} is not in the fan's Picard basis")]
    BasisMismatch(PicClass),
}

/// Cohomology dimensions `h^0, ..., h^n`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HVector(pub Vec<u64>);

impl HVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// One-dimensional, concentrated in `degree`.
    pub fn unit(len: usize, degree: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[degree] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// `sum (-1)^i h^i`.
    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &h)| if i % 2 == 0 { h as i64 } else { -(h as i64) })
            .sum()
    }

    /// Vanishing outside degree 0.
    pub fn is_acyclic(&self) -> bool {
        self.0.iter().skip(1).all(|&x| x == 0)
    }

    /// Adds `other` shifted up by `shift` degrees, growing if needed.
    pub fn add_shifted(&mut self, other: &HVector, shift: usize) {
        if self.0.len() < other.0.len() + shift {
            self.0.resize(other.0.len() + shift, 0);
        }
        for (i, &x) in other.0.iter().enumerate() {
            self.0[i + shift] += x;
        }
    }

    pub fn padded(mut self, len: usize) -> Self {
        assert!(
            self.0[len.min(self.0.len())..].iter().all(|&x| x == 0),
            "truncating nonzero cohomology"
        );
        self.0.resize(len, 0);
        self
    }
}

impl fmt::Debug for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

struct Prepared {
    dim: usize,
    rays: Vec<Vec<i64>>,
    cone_masks: Vec<u64>,
}

impl Prepared {
    fn new(fan: &Fan) -> Self {
        assert!(fan.rays().len() <= 64);
        Self {
            dim: fan.dim(),
            rays: fan.rays().iter().map(|r| r.vector.clone()).collect(),
            cone_masks: fan
                .cones()
                .iter()
                .map(|c| c.iter().fold(0u64, |m, &i| m | (1 << i)))
                .collect(),
        }
    }

    fn ranks(&self, mask: u64) -> Vec<u64> {
        reduced_cohomology_ranks(
            &SupportComplex::new(mask, &self.cone_masks),
            self.dim.saturating_sub(1),
        )
    }

    /// Integer box `[lo, hi]` containing every arrangement vertex, inflated by one.
    fn search_box(&self, coeffs: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let n = self.dim;
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        let mut pick = Vec::with_capacity(n);
        fn rec(
            p: &Prepared,
            coeffs: &[i64],
            start: usize,
            pick: &mut Vec<usize>,
            lo: &mut [i64],
            hi: &mut [i64],
        ) {
            if pick.len() == p.dim {
                let rows: Vec<Vec<i64>> = pick.iter().map(|&i| p.rays[i].clone()).collect();
                let rhs: Vec<BigInt> = pick.iter().map(|&i| BigInt::from(-coeffs[i])).collect();
                if let Some(x) = solve_rational(&IntMatrix::from_rows(&rows), &rhs) {
                    for (k, q) in x.iter().enumerate() {
                        let f = q
                            .numer()
                            .div_floor(q.denom())
                            .to_i64()
                            .expect("vertex fits in i64");
                        let c = q
                            .numer()
                            .div_ceil(q.denom())
                            .to_i64()
                            .expect("vertex fits in i64");
                        lo[k] = lo[k].min(f);
                        hi[k] = hi[k].max(c);
                    }
                }
                return;
            }
            for i in start..p.rays.len() {
                pick.push(i);
                rec(p, coeffs, i + 1, pick, lo, hi);
                pick.pop();
            }
        }
        rec(self, coeffs, 0, &mut pick, &mut lo, &mut hi);
        for k in 0..n {
            assert!(lo[k] <= hi[k], "ray generators do not span the lattice");
            lo[k] -= 1;
            hi[k] += 1;
        }
        (lo, hi)
    }

    fn cohomology(
        &self,
        coeffs: &[i64],
        ranks: &mut dyn FnMut(u64) -> Arc<Vec<u64>>,
    ) -> Result<HVector, OracleError> {
        let n = self.dim;
        let mut h = HVector::zeros(n + 1);
        if n == 0 {
            let r = ranks(0);
            h.0[0] = r[0];
            return Ok(h);
        }
        let (lo, hi) = self.search_box(coeffs);
        let mut u = lo.clone();
        let mut dots: Vec<i64> = self
            .rays
            .iter()
            .map(|v| v.iter().zip(&u).map(|(a, b)| a * b).sum())
            .collect();
        let mut local: HashMap<u64, Arc<Vec<u64>>> = HashMap::new();
        loop {
            let mut mask = 0u64;
            for (i, (&d, &a)) in dots.iter().zip(coeffs).enumerate() {
                if d < -a {
                    mask |= 1 << i;
                }
            }
            let r = local.entry(mask).or_insert_with(|| ranks(mask)).clone();
            if r.iter().any(|&x| x != 0) {
                let boundary = u
                    .iter()
                    .zip(lo.iter().zip(&hi))
                    .any(|(x, (l, h))| x == l || x == h);
                if boundary {
                    return Err(OracleError::UnboundedContribution {
                        u: u.clone(),
                        ranks: r.to_vec(),
                    });
                }
                for (i, &x) in r.iter().enumerate() {
                    h.0[i] += x;
                }
            }
            // odometer step, keeping the dot products in sync
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(h);
                }
                if u[k] < hi[k] {
                    u[k] += 1;
                    for (d, v) in dots.iter_mut().zip(&self.rays) {
                        *d += v[k];
                    }
                    break;
                }
                let span = u[k] - lo[k];
                u[k] = lo[k];
                for (d, v) in dots.iter_mut().zip(&self.rays) {
                    *d -= v[k] * span;
                }
                k += 1;
            }
        }
    }
}

/// `h^i(fan, cls)` for all `i`, computed from scratch.
pub fn cohomology_dims(fan: &Fan, cls: &PicClass) -> Result<HVector, OracleError> {
    if cls.basis != fan.basis() {
        return Err(OracleError::BasisMismatch(cls.clone()));
    }
    let p = Prepared::new(fan);
    let coeffs = fan.tdivisor_lift(cls);
    p.cohomology(&coeffs, &mut |m| Arc::new(p.ranks(m)))
}

/// Cohomology of an explicit T-divisor, bypassing the Picard basis.
pub fn cohomology_of_divisor(fan: &Fan, coeffs: &[i64]) -> Result<HVector, OracleError> {
    let p = Prepared::new(fan);
    p.cohomology(coeffs, &mut |m| Arc::new(p.ranks(m)))
}

/// `chi(a, b) = sum (-1)^i dim Ext^i(a, b) = chi(b - a)`.
pub fn euler_pairing(fan: &Fan, a: &PicClass, b: &PicClass) -> Result<i64, OracleError> {
    Ok(cohomology_dims(fan, &(b - a))?.euler())
}

/// Memoizing cohomology oracle bound to one fan.
///
/// Safe to share across threads; the support-complex ranks and the class
/// table are cached behind mutexes, optionally backed by a [`DiskCache`].
pub struct Oracle {
    fan: Fan,
    fan_json: String,
    prepared: Prepared,
    masks: Mutex<HashMap<u64, Arc<Vec<u64>>>>,
    classes: Mutex<HashMap<Vec<i64>, HVector>>,
    disk: Option<DiskCache>,
}

impl Oracle {
    pub fn new(fan: Fan) -> Self {
        Self {
            fan_json: fan.canonical_json(),
            prepared: Prepared::new(&fan),
            fan,
            masks: Mutex::new(HashMap::new()),
            classes: Mutex::new(HashMap::new()),
            disk: None,
        }
    }

    pub fn with_disk_cache(mut self, disk: Option<DiskCache>) -> Self {
        self.disk = disk;
        self
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn cohomology(&self, cls: &PicClass) -> Result<HVector, OracleError> {
        if cls.basis != self.fan.basis() {
            return Err(OracleError::BasisMismatch(cls.clone()));
        }
        if let Some(h) = self.classes.lock().unwrap().get(&cls.coords) {
            return Ok(h.clone());
        }
        let key = self
            .disk
            .as_ref()
            .map(|_| DiskCache::key(&self.fan_json, cls));
        if let (Some(disk), Some(key)) = (&self.disk, &key) {
            if let Some(h) = disk.get(key).filter(|h| h.len() == self.fan.dim() + 1) {
                self.classes
                    .lock()
                    .unwrap()
                    .insert(cls.coords.clone(), h.clone());
                return Ok(h);
            }
        }
        let coeffs = self.fan.tdivisor_lift(cls);
        let h = self.prepared.cohomology(&coeffs, &mut |m| {
            if let Some(r) = self.masks.lock().unwrap().get(&m) {
                return r.clone();
            }
            let r = Arc::new(self.prepared.ranks(m));
            self.masks.lock().unwrap().insert(m, r.clone());
            r
        })?;
        if let (Some(disk), Some(key)) = (&self.disk, &key) {
            // best effort; a failed write only costs a recomputation later
            let _ = disk.put(key, &h);
        }
        self.classes
            .lock()
            .unwrap()
            .insert(cls.coords.clone(), h.clone());
        Ok(h)
    }

    /// `Ext^*(O(a), O(b)) = H^*(b - a)`.
    pub fn ext(&self, a: &PicClass, b: &PicClass) -> Result<HVector, OracleError> {
        self.cohomology(&(b - a))
    }

    pub fn euler(&self, a: &PicClass, b: &PicClass) -> Result<i64, OracleError> {
        Ok(self.ext(a, b)?.euler())
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("fan", &self.fan)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests;
