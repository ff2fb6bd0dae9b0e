//! Ordered collections of sheaves on a blow-up and the rewrite rules that
//! turn the initial semiorthogonal decomposition into a collection of line
//! bundles.
//!
//! Only three rules exist: transposition of a completely orthogonal pair,
//! rotation by the Serre functor, and the two mutations that trade a
//! pushforward object for an `O(+-E)` twist. Every rule checks its
//! hypothesis against computed Ext dimensions before it fires.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{ext_line_to_push, ext_push_to_line, CalculusError};
use crate::oracle::{DiskCache, HVector, Oracle, OracleError};
use crate::toric::{revlex_grid, BlowUp, BundleSpec, CenterSpec, FanError, PicClass};

/// A line bundle `f^*O(alpha, beta) (x) O(kE)`, or a pushforward
/// `i_*pi^*O_Y(alpha, beta) (x) O(kE)` from the exceptional divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SheafObject {
    Line { alpha: i64, beta: i64, k: i64 },
    Push { alpha: i64, beta: i64, k: i64 },
}

impl SheafObject {
    pub fn line(alpha: i64, beta: i64, k: i64) -> Self {
        SheafObject::Line { alpha, beta, k }
    }

    pub fn push(alpha: i64, beta: i64, k: i64) -> Self {
        SheafObject::Push { alpha, beta, k }
    }

    pub fn alpha_beta(&self) -> (i64, i64) {
        match *self {
            SheafObject::Line { alpha, beta, .. } | SheafObject::Push { alpha, beta, .. } => {
                (alpha, beta)
            }
        }
    }

    pub fn k(&self) -> i64 {
        match *self {
            SheafObject::Line { k, .. } | SheafObject::Push { k, .. } => k,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, SheafObject::Line { .. })
    }

    /// Class on the blow-up, for line bundles.
    pub fn class(&self) -> Option<PicClass> {
        match *self {
            SheafObject::Line { alpha, beta, k } => Some(PicClass::blow_up(alpha, beta, k)),
            SheafObject::Push { .. } => None,
        }
    }
}

impl fmt::Display for SheafObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SheafObject::Line { alpha, beta, k } => {
                let mark = match k {
                    0 => String::new(),
                    1 => "'".into(),
                    -1 => "''".into(),
                    _ => format!("({k}E)"),
                };
                write!(f, "L{mark}_{{{alpha},{beta}}}")
            }
            SheafObject::Push { alpha, beta, k } => {
                let mark = match k {
                    1 => String::new(),
                    0 => "'".into(),
                    _ => format!("({k}E)"),
                };
                write!(f, "M{mark}_{{{alpha},{beta}}}")
            }
        }
    }
}

/// `obj (x) f^*O(alpha, beta) (x) O(jE)`, by the projection formula.
pub fn tensor_object(obj: SheafObject, t: (i64, i64, i64)) -> SheafObject {
    match obj {
        SheafObject::Line { alpha, beta, k } => SheafObject::line(alpha + t.0, beta + t.1, k + t.2),
        SheafObject::Push { alpha, beta, k } => SheafObject::push(alpha + t.0, beta + t.1, k + t.2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Transpose,
    RightMutation,
    LeftMutation,
    SerreForward,
    SerreBackward,
}

/// One applied rule. `before` and `after` are the objects at
/// `index..index + before.len()` (for rotations, the moved object only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub rule: Rule,
    pub index: usize,
    pub before: Vec<SheafObject>,
    pub after: Vec<SheafObject>,
    /// `Ext^*(object index, object index + 1)` for mutations and transpositions.
    pub evidence: Option<HVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// An ordered list of objects on a fixed blow-up, with its history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub base_dim: usize,
    pub fiber_degrees: Vec<i64>,
    pub center: Vec<String>,
    pub codim: usize,
    pub objects: Vec<SheafObject>,
    #[serde(default)]
    pub log: Vec<LogEntry>,
}

impl Collection {
    pub fn spec(&self) -> Result<BundleSpec, FanError> {
        BundleSpec::new(self.base_dim, self.fiber_degrees.clone())
    }

    pub fn center_spec(&self) -> CenterSpec {
        CenterSpec::new(&self.center)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn only_lines(&self) -> bool {
        self.objects.iter().all(SheafObject::is_line)
    }

    /// Pretty form, e.g. `[L_{0,0}, L'_{0,0}, L_{1,0}]`.
    pub fn labels(&self) -> String {
        let parts: Vec<String> = self.objects.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(", "))
    }

    /// JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("collection serializes");
        serde_json::to_string_pretty(&v).expect("json value serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("positions {0} and {0}+1 are not both in the collection")]
    IndexOutOfRange(usize),
    #[error("Ext^*({left}, {right}) = {ext:?} is not zero; cannot transpose at {index}")]
    NotOrthogonal {
        index: usize,
        left: SheafObject,
        right: SheafObject,
        ext: HVector,
    },
    #[error("hypothesis failed at {index}: {reason}")]
    HypothesisFailed {
        index: usize,
        reason: String,
        ext: Option<HVector>,
    },
    #[error("no Ext formula between {0} and {1}")]
    UnsupportedPair(SheafObject, SheafObject),
    #[error("script for codimension {0} requested on a codimension {1} center")]
    WrongCodimension(usize, usize),
    #[error("object {0} expected but not found")]
    Missing(SheafObject),
    #[error("log entry {step} does not replay: {reason}")]
    AuditMismatch { step: usize, reason: String },
}

/// A failed script: the error and the collection as far as it got.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct ScriptFailure {
    pub error: MutationError,
    pub partial: Option<Collection>,
}

impl From<MutationError> for ScriptFailure {
    fn from(error: MutationError) -> Self {
        Self {
            error,
            partial: None,
        }
    }
}

/// Everything needed to evaluate Ext between objects on one blow-up.
pub struct Engine {
    pub blow: BlowUp,
    pub oracle: Oracle,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("blow", &self.blow)
            .finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(spec: &BundleSpec, center: &CenterSpec) -> Result<Self, MutationError> {
        Self::with_cache(spec, center, None)
    }

    pub fn with_cache(
        spec: &BundleSpec,
        center: &CenterSpec,
        cache: Option<DiskCache>,
    ) -> Result<Self, MutationError> {
        let blow = BlowUp::new(spec, center)?;
        let oracle = Oracle::new(blow.fan.clone()).with_disk_cache(cache);
        Ok(Self { blow, oracle })
    }

    pub fn for_collection(
        col: &Collection,
        cache: Option<DiskCache>,
    ) -> Result<Self, MutationError> {
        Self::with_cache(&col.spec()?, &col.center_spec(), cache)
    }

    pub fn dim(&self) -> usize {
        self.blow.fan.dim()
    }

    /// `Ext^*(a, b)` on the blow-up, degrees `0..=dim`.
    pub fn ext(&self, a: &SheafObject, b: &SheafObject) -> Result<HVector, MutationError> {
        let g = &self.blow.geometry;
        match (*a, *b) {
            (SheafObject::Line { .. }, SheafObject::Line { .. }) => {
                Ok(self.oracle.ext(&a.class().unwrap(), &b.class().unwrap())?)
            }
            (SheafObject::Line { k: j, .. }, SheafObject::Push { k, .. }) => {
                Ok(ext_line_to_push(g, a.alpha_beta(), j, b.alpha_beta(), k))
            }
            (SheafObject::Push { k, .. }, SheafObject::Line { k: j, .. }) => {
                Ok(ext_push_to_line(g, a.alpha_beta(), k, b.alpha_beta(), j))
            }
            (SheafObject::Push { .. }, SheafObject::Push { .. }) => {
                Err(MutationError::UnsupportedPair(*a, *b))
            }
        }
    }

    /// `omega^{-1}` of the blow-up as a twist `(alpha, beta, k)`.
    pub fn anticanonical_twist(&self) -> (i64, i64, i64) {
        let k = self.blow.canonical_class();
        (-k.coords[0], -k.coords[1], -k.coords[2])
    }

    fn empty_collection(&self) -> Collection {
        Collection {
            base_dim: self.blow.spec.s,
            fiber_degrees: self.blow.spec.fiber_degrees.clone(),
            center: self.blow.center.ray_names().to_vec(),
            codim: self.blow.codim(),
            objects: Vec::new(),
            log: Vec::new(),
        }
    }

    /// The Orlov decomposition filled with line-bundle collections:
    /// pushforward blocks (highest `k` first), then `f^*D(X)`.
    pub fn initial_collection(&self) -> Result<Collection, MutationError> {
        let g = &self.blow.geometry;
        let (s, r) = (self.blow.spec.s as i64, self.blow.spec.r() as i64);
        let (sp, rp) = (g.s_prime as i64, g.r_prime as i64);
        let y_grid = revlex_grid(0..=sp, 0..=rp);
        let mut objects = Vec::new();
        match g.codim {
            2 => {}
            3 => {
                let a = self.blow.spec.degree_sum();
                for (al, be) in revlex_grid((-sp - 1 + a)..=(-1 + a), (-rp - 1)..=-1) {
                    objects.push(SheafObject::push(al, be, 2));
                }
            }
            c => return Err(FanError::UnsupportedCodimension(c).into()),
        }
        objects.extend(y_grid.iter().map(|&(al, be)| SheafObject::push(al, be, 1)));
        objects.extend(
            revlex_grid(0..=s, 0..=r)
                .into_iter()
                .map(|(al, be)| SheafObject::line(al, be, 0)),
        );
        let mut col = self.empty_collection();
        col.objects = objects;
        Ok(col)
    }

    /// Moves the first object to the end twisted by `omega^{-1}`, or the
    /// last to the front twisted by `omega`.
    pub fn serre_rotate(&self, col: &Collection, direction: Direction) -> Collection {
        let mut out = col.clone();
        if out.objects.is_empty() {
            return out;
        }
        let t = self.anticanonical_twist();
        let (entry, index) = match direction {
            Direction::Forward => {
                let first = out.objects.remove(0);
                let moved = tensor_object(first, t);
                out.objects.push(moved);
                ((Rule::SerreForward, first, moved), 0)
            }
            Direction::Backward => {
                let last = out.objects.pop().unwrap();
                let moved = tensor_object(last, (-t.0, -t.1, -t.2));
                out.objects.insert(0, moved);
                ((Rule::SerreBackward, last, moved), out.objects.len() - 1)
            }
        };
        out.log.push(LogEntry {
            rule: entry.0,
            index,
            before: vec![entry.1],
            after: vec![entry.2],
            evidence: None,
        });
        out
    }

    fn pair(
        &self,
        col: &Collection,
        i: usize,
    ) -> Result<(SheafObject, SheafObject), MutationError> {
        if i + 1 >= col.objects.len() {
            return Err(MutationError::IndexOutOfRange(i));
        }
        Ok((col.objects[i], col.objects[i + 1]))
    }

    /// Swaps positions `i` and `i+1` if `Ext^*(object i, object i+1) = 0`.
    pub fn transpose_if_orthogonal(
        &self,
        col: &Collection,
        i: usize,
    ) -> Result<Collection, MutationError> {
        let (a, b) = self.pair(col, i)?;
        let ext = self.ext(&a, &b)?;
        if !ext.is_zero() {
            return Err(MutationError::NotOrthogonal {
                index: i,
                left: a,
                right: b,
                ext,
            });
        }
        let mut out = col.clone();
        out.objects.swap(i, i + 1);
        out.log.push(LogEntry {
            rule: Rule::Transpose,
            index: i,
            before: vec![a, b],
            after: vec![b, a],
            evidence: Some(ext),
        });
        Ok(out)
    }

    /// `(M_k, L_{k-1})` with `M = L|_Y` and `Ext^* = C[-1]` becomes `(L_{k-1}, L_k)`.
    pub fn right_mutation_e_twist(
        &self,
        col: &Collection,
        i: usize,
    ) -> Result<Collection, MutationError> {
        let (a, b) = self.pair(col, i)?;
        let fail = |reason: String, ext: Option<HVector>| MutationError::HypothesisFailed {
            index: i,
            reason,
            ext,
        };
        let (SheafObject::Push { k, .. }, SheafObject::Line { k: j, .. }) = (a, b) else {
            return Err(fail(
                format!("expected (pushforward, line bundle), found ({a}, {b})"),
                None,
            ));
        };
        if k < 1 || j != k - 1 {
            return Err(fail(format!("twists do not match: {a} then {b}"), None));
        }
        if a.alpha_beta() != b.alpha_beta() {
            return Err(fail(
                format!("{b} does not restrict to the sheaf pushed forward in {a}"),
                None,
            ));
        }
        let ext = self.ext(&a, &b)?;
        if ext != HVector::unit(self.dim() + 1, 1) {
            return Err(fail(
                format!("Ext^*({a}, {b}) = {ext:?}, expected one-dimensional in degree 1"),
                Some(ext),
            ));
        }
        let (al, be) = b.alpha_beta();
        let new = [b, SheafObject::line(al, be, k)];
        let mut out = col.clone();
        out.objects[i] = new[0];
        out.objects[i + 1] = new[1];
        out.log.push(LogEntry {
            rule: Rule::RightMutation,
            index: i,
            before: vec![a, b],
            after: new.to_vec(),
            evidence: Some(ext),
        });
        Ok(out)
    }

    /// `(L_0, M'_0)` with `M = L|_Y` and `Ext^* = C` becomes `(L_{-1}, L_0)`.
    pub fn left_mutation_e_twist(
        &self,
        col: &Collection,
        i: usize,
    ) -> Result<Collection, MutationError> {
        let (a, b) = self.pair(col, i)?;
        let fail = |reason: String, ext: Option<HVector>| MutationError::HypothesisFailed {
            index: i,
            reason,
            ext,
        };
        let (SheafObject::Line { k: 0, .. }, SheafObject::Push { k: 0, .. }) = (a, b) else {
            return Err(fail(
                format!("expected (L_0, M'_0), found ({a}, {b})"),
                None,
            ));
        };
        if a.alpha_beta() != b.alpha_beta() {
            return Err(fail(
                format!("{a} does not restrict to the sheaf pushed forward in {b}"),
                None,
            ));
        }
        let ext = self.ext(&a, &b)?;
        if ext != HVector::unit(self.dim() + 1, 0) {
            return Err(fail(
                format!("Ext^*({a}, {b}) = {ext:?}, expected one-dimensional in degree 0"),
                Some(ext),
            ));
        }
        let (al, be) = a.alpha_beta();
        let new = [SheafObject::line(al, be, -1), a];
        let mut out = col.clone();
        out.objects[i] = new[0];
        out.objects[i + 1] = new[1];
        out.log.push(LogEntry {
            rule: Rule::LeftMutation,
            index: i,
            before: vec![a, b],
            after: new.to_vec(),
            evidence: Some(ext),
        });
        Ok(out)
    }

    fn position(col: &Collection, obj: SheafObject) -> Result<usize, MutationError> {
        col.objects
            .iter()
            .position(|o| *o == obj)
            .ok_or(MutationError::Missing(obj))
    }

    /// For each `M_{a,b}` from the largest index down: transpose it right
    /// until it meets `L_{a,b}`, then mutate the pair into `(L, L (x) O(E))`.
    fn run_right_script(&self, mut col: Collection) -> Result<Collection, ScriptFailure> {
        let g = &self.blow.geometry;
        let grid = revlex_grid(0..=g.s_prime as i64, 0..=g.r_prime as i64);
        for &(al, be) in grid.iter().rev() {
            let step = |col: &mut Collection| -> Result<(), MutationError> {
                let m = SheafObject::push(al, be, 1);
                let target = SheafObject::line(al, be, 0);
                let mut i = Self::position(col, m)?;
                while col.objects.get(i + 1) != Some(&target) {
                    *col = self.transpose_if_orthogonal(col, i)?;
                    i += 1;
                }
                *col = self.right_mutation_e_twist(col, i)?;
                Ok(())
            };
            if let Err(error) = step(&mut col) {
                return Err(ScriptFailure {
                    error,
                    partial: Some(col),
                });
            }
        }
        Ok(col)
    }

    pub fn construct_codim2(&self) -> Result<Collection, ScriptFailure> {
        let c = self.blow.codim();
        if c != 2 {
            return Err(MutationError::WrongCodimension(2, c).into());
        }
        let col = self.initial_collection()?;
        self.run_right_script(col)
    }

    pub fn construct_codim3(&self) -> Result<Collection, ScriptFailure> {
        let c = self.blow.codim();
        if c != 3 {
            return Err(MutationError::WrongCodimension(3, c).into());
        }
        let g = &self.blow.geometry;
        let mut col = self.initial_collection()?;
        let block = (g.s_prime + 1) * (g.r_prime + 1);
        for _ in 0..block {
            col = self.serre_rotate(&col, Direction::Forward);
        }
        let mut col = self.run_right_script(col)?;

        let (s, r) = (self.blow.spec.s as i64, self.blow.spec.r() as i64);
        let (sp, rp) = (g.s_prime as i64, g.r_prime as i64);
        for (al, be) in revlex_grid((s - sp)..=s, (r - rp)..=r) {
            let step = |col: &mut Collection| -> Result<(), MutationError> {
                let m = SheafObject::push(al, be, 0);
                let target = SheafObject::line(al, be, 0);
                let mut i = Self::position(col, m)?;
                while i > 0 && col.objects[i - 1] != target {
                    *col = self.transpose_if_orthogonal(col, i - 1)?;
                    i -= 1;
                }
                if i == 0 {
                    return Err(MutationError::Missing(target));
                }
                *col = self.left_mutation_e_twist(col, i - 1)?;
                Ok(())
            };
            if let Err(error) = step(&mut col) {
                return Err(ScriptFailure {
                    error,
                    partial: Some(col),
                });
            }
        }
        Ok(col)
    }

    /// Runs the script for the center's codimension.
    pub fn construct(&self) -> Result<Collection, ScriptFailure> {
        match self.blow.codim() {
            2 => self.construct_codim2(),
            _ => self.construct_codim3(),
        }
    }

    /// Replays the log from the initial collection, recomputing every
    /// hypothesis, and checks that it lands on `col.objects`.
    pub fn audit(&self, col: &Collection) -> Result<(), MutationError> {
        let mut cur = self.initial_collection()?;
        for (step, entry) in col.log.iter().enumerate() {
            let mismatch = |reason: String| MutationError::AuditMismatch { step, reason };
            let next = match entry.rule {
                Rule::Transpose => self.transpose_if_orthogonal(&cur, entry.index),
                Rule::RightMutation => self.right_mutation_e_twist(&cur, entry.index),
                Rule::LeftMutation => self.left_mutation_e_twist(&cur, entry.index),
                Rule::SerreForward => Ok(self.serre_rotate(&cur, Direction::Forward)),
                Rule::SerreBackward => Ok(self.serre_rotate(&cur, Direction::Backward)),
            }
            .map_err(|e| mismatch(e.to_string()))?;
            let replayed = next.log.last().expect("every rule logs");
            if replayed != entry {
                return Err(mismatch(format!(
                    "recomputed {replayed:?}, logged {entry:?}"
                )));
            }
            cur = next;
        }
        if cur.objects != col.objects {
            return Err(MutationError::AuditMismatch {
                step: col.log.len(),
                reason: "replayed objects differ from the stored ones".into(),
            });
        }
        Ok(())
    }
}

/// Builds the line-bundle collection for `spec` blown up along `center`.
pub fn construct(
    spec: &BundleSpec,
    center: &CenterSpec,
    cache: Option<DiskCache>,
) -> Result<Collection, ScriptFailure> {
    Engine::with_cache(spec, center, cache)?.construct()
}
