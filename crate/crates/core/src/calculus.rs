//! Closed-form cohomology for split projective bundles over projective
//! space, and the Ext formulas for objects supported on the exceptional
//! divisor of a blow-up.
//!
//! Conventions: on `P(E) -> P^s` with `E = sum O(d_j)`, `p_*O_p(b) = Sym^b E`.
//! The exceptional divisor is `E = P(N) -> Y` with `pi_*O_pi(m) = Sym^m N*`
//! and `O(E)|_E = O_pi(-1)`. A pushforward object `(M, k)` stands for
//! `i_*(pi^*M (x) O_pi(-k)) = i_*pi^*M (x) O(kE)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::oracle::{HVector, Oracle, OracleError};
use crate::toric::{CenterGeometry, PicClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("twist k = {k} outside the allowed range {lo}..={hi}")]
    KOutOfRange { k: i64, lo: i64, hi: i64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn binom(n: i64, k: usize) -> u64 {
    if n < k as i64 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as i64 {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// `h^i(P^s, O(d))`.
pub fn bott_dims(s: usize, d: i64) -> HVector {
    let mut h = HVector::zeros(s + 1);
    if d >= 0 {
        h.0[0] = binom(d + s as i64, s);
    } else if d <= -(s as i64) - 1 {
        h.0[s] = binom(-d - 1, s);
    }
    h
}

/// Non-decreasing index sequences of length `m` over `0..n`.
pub fn multisets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 && m > 0 {
        return out;
    }
    rec(n, m, 0, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Degrees of the line-bundle summands of `Sym^m` of `sum O(d_j)`.
pub fn sym_degrees(degrees: &[i64], m: usize) -> Vec<i64> {
    multisets(degrees.len(), m)
        .into_iter()
        .map(|ms| ms.iter().map(|&i| degrees[i]).sum())
        .collect()
}

/// Classes of the summands of `Sym^m` of a split bundle of `(alpha, beta)` classes.
pub fn sym_classes(summands: &[(i64, i64)], m: usize) -> Vec<(i64, i64)> {
    multisets(summands.len(), m)
        .into_iter()
        .map(|ms| {
            ms.iter()
                .fold((0, 0), |(a, b), &i| (a + summands[i].0, b + summands[i].1))
        })
        .collect()
}

/// `R^q p_* O_p(beta)` for `p : P(sum O(d_j)) -> P^s`, as degrees of line
/// bundles on `P^s`, keyed by the level `q`. Empty levels are omitted.
pub fn pushforward_levels(degrees: &[i64], beta: i64) -> BTreeMap<usize, Vec<i64>> {
    let r = degrees.len() as i64 - 1;
    let mut out = BTreeMap::new();
    if beta >= 0 {
        out.insert(0, sym_degrees(degrees, beta as usize));
    } else if beta <= -r - 1 {
        let total: i64 = degrees.iter().sum();
        let dual = sym_degrees(degrees, (-beta - r - 1) as usize)
            .into_iter()
            .map(|d| -total - d)
            .collect();
        out.insert(r as usize, dual);
    }
    out
}

/// `h^i` of `(alpha, beta)` on `P_{P^s}(sum O(d_j))`, via the degenerate
/// Leray spectral sequence.
pub fn cohomology_on_bundle(s: usize, degrees: &[i64], alpha: i64, beta: i64) -> HVector {
    let n = s + degrees.len() - 1;
    let mut h = HVector::zeros(n + 1);
    for (level, ds) in pushforward_levels(degrees, beta) {
        for d in ds {
            h.add_shifted(&bott_dims(s, alpha + d), level);
        }
    }
    h
}

/// `h^i(Y, (alpha, beta))` for the center `Y`.
pub fn cohomology_on_center(geom: &CenterGeometry, class: (i64, i64)) -> HVector {
    cohomology_on_bundle(geom.s_prime, &geom.survivor_degrees, class.0, class.1)
}

fn add(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 - b.0, a.1 - b.1)
}

/// `det N*` as a class on `Y`.
pub fn conormal_determinant(geom: &CenterGeometry) -> (i64, i64) {
    geom.conormal_summands
        .iter()
        .fold((0, 0), |acc, &t| add(acc, t))
}

/// `h^i(E, pi^*A (x) O_pi(m))` on the exceptional divisor, `i = 0..dim E`.
pub fn exceptional_divisor_cohomology(geom: &CenterGeometry, a: (i64, i64), m: i64) -> HVector {
    let c = geom.codim as i64;
    let dim_e = geom.dim() + geom.codim - 1;
    let mut h = HVector::zeros(dim_e + 1);
    if m >= 0 {
        for t in sym_classes(&geom.conormal_summands, m as usize) {
            h.add_shifted(&cohomology_on_center(geom, add(a, t)), 0);
        }
    } else if m <= -c {
        let det = conormal_determinant(geom);
        for t in sym_classes(&geom.conormal_summands, (-m - c) as usize) {
            h.add_shifted(
                &cohomology_on_center(geom, sub(sub(a, t), det)),
                geom.codim - 1,
            );
        }
    }
    h
}

/// `Ext^*(f^*L (x) O(jE), i_*pi^*M (x) O(kE))`, degrees `0..=dim X~`.
pub fn ext_line_to_push(
    geom: &CenterGeometry,
    l: (i64, i64),
    j: i64,
    m: (i64, i64),
    k: i64,
) -> HVector {
    let n = geom.dim() + geom.codim;
    exceptional_divisor_cohomology(geom, sub(m, l), j - k).padded(n + 1)
}

/// `Ext^*(i_*pi^*M (x) O(kE), f^*L (x) O(jE))`, degrees `0..=dim X~`.
///
/// Grothendieck duality for the divisor: `i^! = i^*( - ) (x) O_E(E) [-1]`.
pub fn ext_push_to_line(
    geom: &CenterGeometry,
    m: (i64, i64),
    k: i64,
    l: (i64, i64),
    j: i64,
) -> HVector {
    let n = geom.dim() + geom.codim;
    let mut h = HVector::zeros(n + 1);
    h.add_shifted(
        &exceptional_divisor_cohomology(geom, sub(l, m), k - j - 1),
        1,
    );
    h
}

/// `Ext^i(i_*pi^*M (x) O(kE), f^*L) = sum_t h^{i-1}(Y, L|_Y + t - M)` over
/// the summands `t` of `Sym^{k-1} N*`, valid for `1 <= k <= c-1`.
pub fn ext_twist_reduction(
    geom: &CenterGeometry,
    m: (i64, i64),
    k: i64,
    l: (i64, i64),
) -> Result<HVector, CalculusError> {
    let hi = geom.codim as i64 - 1;
    if !(1..=hi).contains(&k) {
        return Err(CalculusError::KOutOfRange { k, lo: 1, hi });
    }
    let n = geom.dim() + geom.codim;
    let mut h = HVector::zeros(n + 1);
    for t in sym_classes(&geom.conormal_summands, (k - 1) as usize) {
        h.add_shifted(&cohomology_on_center(geom, sub(add(l, t), m)), 1);
    }
    Ok(h)
}

/// `Ext^*(f^*L (x) O(jE), i_*pi^*M)` for `j` in `{0, 1}`:
/// `h^*(Y, M - L|_Y)` for `j = 0`, `sum_t h^*(Y, M - L|_Y + t)` over the
/// conormal summands for `j = 1`.
pub fn ext_line_to_pushforward(
    geom: &CenterGeometry,
    j: i64,
    l: (i64, i64),
    m: (i64, i64),
) -> Result<HVector, CalculusError> {
    if !(0..=1).contains(&j) {
        return Err(CalculusError::KOutOfRange { k: j, lo: 0, hi: 1 });
    }
    let n = geom.dim() + geom.codim;
    let mut h = HVector::zeros(n + 1);
    if j == 0 {
        h.add_shifted(&cohomology_on_center(geom, sub(m, l)), 0);
    } else {
        for &t in &geom.conormal_summands {
            h.add_shifted(&cohomology_on_center(geom, add(sub(m, l), t)), 0);
        }
    }
    Ok(h)
}

/// Whether `f^*L (x) O(kE)` has no higher cohomology on the blow-up.
pub fn is_acyclic_twist(
    oracle: &Oracle,
    codim: usize,
    l: (i64, i64),
    k: i64,
) -> Result<bool, CalculusError> {
    let hi = codim as i64 - 1;
    if !(0..=hi).contains(&k) {
        return Err(CalculusError::KOutOfRange { k, lo: 0, hi });
    }
    Ok(oracle
        .cohomology(&PicClass::blow_up(l.0, l.1, k))?
        .is_acyclic())
}

/// Which half of the vanishing statement for the codimension-3 mutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingPart {
    /// `Ext^*(L_{a1,b1}, M'_{a2,b2})`, line bundles with `j = 0`.
    A,
    /// `Ext^*(L'_{a1,b1}, M'_{a2,b2})`, line bundles with `j = 1`.
    B,
}

/// Index pairs `((a1, b1), (a2, b2))` on which the vanishing statement claims
/// `Ext^*(L, M') = 0`.
///
/// With `literal = true` the stated ranges are taken word for word; the
/// second clause of part A then leaves `a2` and `b2` unconstrained except
/// through `a2 < a1` (we take `a2 >= 0` and `b1 = b2` in `0..=r`). With
/// `literal = false` every index is also confined to the grid of objects
/// that actually occur in the collection (`M'` in `[s-s', s] x [r-r', r]`).
pub fn vanishing_pairs(
    s: usize,
    r: usize,
    geom: &CenterGeometry,
    part: VanishingPart,
    literal: bool,
) -> Vec<((i64, i64), (i64, i64))> {
    let (s, r) = (s as i64, r as i64);
    let (sp, rp) = (geom.s_prime as i64, geom.r_prime as i64);
    let (l_a, l_b) = match part {
        VanishingPart::A => (s, r),
        VanishingPart::B => (sp, rp),
    };
    let mut out = Vec::new();
    for b1 in 0..=l_b {
        for a1 in 0..=l_a {
            // first clause
            for b2 in (r - rp)..=r {
                for a2 in (s - sp)..=s {
                    if b2 < b1 {
                        out.push(((a1, b1), (a2, b2)));
                    }
                }
            }
            // second clause
            let b2 = b1;
            let in_m_grid = |a2: i64| (s - sp..=s).contains(&a2) && (r - rp..=r).contains(&b2);
            match part {
                VanishingPart::A => {
                    for a2 in 0..a1 {
                        if literal || in_m_grid(a2) {
                            out.push(((a1, b1), (a2, b2)));
                        }
                    }
                }
                VanishingPart::B => {
                    for a2 in (s - sp)..=a1 {
                        if literal || in_m_grid(a2) {
                            out.push(((a1, b1), (a2, b2)));
                        }
                    }
                }
            }
        }
    }
    out
}
