use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Coordinate system of a Picard group.
///
/// * `Point` - the trivial group.
/// * `Projective` - `(d)`, multiples of the hyperplane class.
/// * `Bundle` - `(alpha, beta)` for `p^*O(alpha) (x) O_p(beta)` on a projective
///   bundle over projective space, with `p_* O_p(beta) = Sym^beta`.
/// * `BlowUp` - `(alpha, beta, k)` for `f^*(p^*O(alpha) (x) O_p(beta)) (x) O(kE)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicBasis {
    Point,
    Projective,
    Bundle,
    BlowUp,
}

impl PicBasis {
    pub fn rank(self) -> usize {
        match self {
            PicBasis::Point => 0,
            PicBasis::Projective => 1,
            PicBasis::Bundle => 2,
            PicBasis::BlowUp => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PicBasis::Point => "point",
            PicBasis::Projective => "projective",
            PicBasis::Bundle => "bundle",
            PicBasis::BlowUp => "blow_up",
        }
    }
}

/// A line bundle class, written in the coordinates of a declared basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PicClass {
    pub basis: PicBasis,
    pub coords: Vec<i64>,
}

impl PicClass {
    pub fn new(basis: PicBasis, coords: Vec<i64>) -> Self {
        assert_eq!(
            coords.len(),
            basis.rank(),
            "{} classes have {} coordinates",
            basis.name(),
            basis.rank()
        );
        Self { basis, coords }
    }

    pub fn point() -> Self {
        Self::new(PicBasis::Point, vec![])
    }

    pub fn projective(d: i64) -> Self {
        Self::new(PicBasis::Projective, vec![d])
    }

    pub fn bundle(alpha: i64, beta: i64) -> Self {
        Self::new(PicBasis::Bundle, vec![alpha, beta])
    }

    pub fn blow_up(alpha: i64, beta: i64, k: i64) -> Self {
        Self::new(PicBasis::BlowUp, vec![alpha, beta, k])
    }

    pub fn zero(basis: PicBasis) -> Self {
        Self::new(basis, vec![0; basis.rank()])
    }

    pub fn scale(&self, m: i64) -> Self {
        Self::new(self.basis, self.coords.iter().map(|c| c * m).collect())
    }

    /// `(alpha, beta)` part of a bundle or blow-up class.
    pub fn alpha_beta(&self) -> Option<(i64, i64)> {
        match self.basis {
            PicBasis::Bundle | PicBasis::BlowUp => Some((self.coords[0], self.coords[1])),
            _ => None,
        }
    }

    /// Exceptional coefficient of a blow-up class.
    pub fn k(&self) -> Option<i64> {
        (self.basis == PicBasis::BlowUp).then(|| self.coords[2])
    }
}

impl fmt::Debug for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.basis.name(), self.coords)
    }
}

fn zip_with(a: &PicClass, b: &PicClass, op: impl Fn(i64, i64) -> i64) -> PicClass {
    assert_eq!(a.basis, b.basis, "mixing Picard bases");
    PicClass {
        basis: a.basis,
        coords: a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| op(x, y))
            .collect(),
    }
}

impl Add for &PicClass {
    type Output = PicClass;
    fn add(self, rhs: &PicClass) -> PicClass {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &PicClass {
    type Output = PicClass;
    fn sub(self, rhs: &PicClass) -> PicClass {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &PicClass {
    type Output = PicClass;
    fn neg(self) -> PicClass {
        self.scale(-1)
    }
}

impl Add for PicClass {
    type Output = PicClass;
    fn add(self, rhs: PicClass) -> PicClass {
        &self + &rhs
    }
}

impl Sub for PicClass {
    type Output = PicClass;
    fn sub(self, rhs: PicClass) -> PicClass {
        &self - &rhs
    }
}

/// Reverse lexicographic order on index pairs: compare `beta` first, then `alpha`.
pub fn revlex_cmp(a: (i64, i64), b: (i64, i64)) -> std::cmp::Ordering {
    (a.1, a.0).cmp(&(b.1, b.0))
}

/// All `(alpha, beta)` with `0 <= alpha <= s`, `0 <= beta <= r`, in reverse
/// lexicographic order.
pub fn revlex_grid(
    alpha: std::ops::RangeInclusive<i64>,
    beta: std::ops::RangeInclusive<i64>,
) -> Vec<(i64, i64)> {
    beta.flat_map(|b| alpha.clone().map(move |a| (a, b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn revlex_compares_beta_first() {
        assert_eq!(revlex_cmp((5, 0), (0, 1)), Ordering::Less);
        assert_eq!(revlex_cmp((0, 1), (1, 1)), Ordering::Less);
        assert_eq!(revlex_cmp((2, 3), (2, 3)), Ordering::Equal);
    }

    #[test]
    fn grid_is_sorted() {
        let g = revlex_grid(0..=2, 0..=1);
        assert_eq!(g, vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]);
        assert!(g
            .windows(2)
            .all(|w| revlex_cmp(w[0], w[1]) == Ordering::Less));
    }

    #[test]
    fn arithmetic() {
        let a = PicClass::blow_up(1, 2, 1);
        let b = PicClass::blow_up(0, 1, -1);
        assert_eq!(&a - &b, PicClass::blow_up(1, 1, 2));
        assert_eq!(-&a, PicClass::blow_up(-1, -2, -1));
        assert_eq!(a.k(), Some(1));
        assert_eq!(PicClass::projective(3).alpha_beta(), None);
    }

    #[test]
    #[should_panic(expected = "mixing Picard bases")]
    fn mixing_bases_panics() {
        let _ = &PicClass::bundle(0, 0) + &PicClass::projective(1);
    }
}
