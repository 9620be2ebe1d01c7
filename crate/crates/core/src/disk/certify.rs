//! Certified bounds over the closed unit disk and its boundary circle.
//!
//! Every routine is a branch-and-bound over cells (boundary arcs or squares
//! covering the disk). A cell is enclosed in a ball of arguments, the element
//! is enclosed over that ball, and cells whose enclosure cannot improve the
//! answer are discarded; the rest are split.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::certify::{CertKind, Certificate};
use crate::error::{Error, Result};
use crate::scalar::{guarded, C64};

use super::element::{DiskElement, DiskTuple};
use super::enclosure::Ball;
use super::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskBudget {
    /// Cells evaluated per search before it reports what it has.
    pub max_cells: usize,
    /// A minimum search stops once its lower bound is within this relative
    /// distance of the smallest sampled value.
    pub rel_tol: f64,
    /// Absolute gap at which a sup-norm search stops.
    pub sup_tol: f64,
}

impl Default for DiskBudget {
    fn default() -> Self {
        DiskBudget { max_cells: 400_000, rel_tol: 1e-3, sup_tol: 1e-8 }
    }
}

const MAX_DEPTH: u32 = 60;

trait Cell: Sized {
    fn ball(&self) -> Ball;
    /// Lower and upper bounds of `|t|` over the cell.
    fn range(&self, t: &[DiskElement]) -> (f64, f64);
    fn sample(&self) -> C64;
    fn split(&self) -> Vec<Self>;
    fn depth(&self) -> u32;
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    t0: f64,
    t1: f64,
    depth: u32,
}

impl Cell for Arc {
    fn ball(&self) -> Ball {
        // the chord to the midpoint is 2 sin(h/4) <= h/2
        Ball::new(self.sample(), 0.5 * (self.t1 - self.t0) * (1.0 + 1e-12))
    }
    fn range(&self, t: &[DiskElement]) -> (f64, f64) {
        let (lo1, hi1) = magnitude_range(t, self.ball());
        let (lo2, hi2) = arc_range(t, self);
        (lo1.max(lo2), hi1.min(hi2))
    }
    fn sample(&self) -> C64 {
        C64::from_polar(1.0, 0.5 * (self.t0 + self.t1))
    }
    fn split(&self) -> Vec<Self> {
        let m = 0.5 * (self.t0 + self.t1);
        let d = self.depth + 1;
        vec![Arc { t0: self.t0, t1: m, depth: d }, Arc { t0: m, t1: self.t1, depth: d }]
    }
    fn depth(&self) -> u32 {
        self.depth
    }
}

fn arcs(n: usize) -> Vec<Arc> {
    (0..n)
        .map(|k| Arc { t0: TAU * k as f64 / n as f64, t1: TAU * (k + 1) as f64 / n as f64, depth: 0 })
        .collect()
}

#[derive(Clone, Copy, Debug)]
struct Square {
    cx: f64,
    cy: f64,
    half: f64,
    depth: u32,
}

impl Square {
    fn meets_disk(&self) -> bool {
        let dx = (self.cx.abs() - self.half).max(0.0);
        let dy = (self.cy.abs() - self.half).max(0.0);
        dx * dx + dy * dy <= 1.0
    }
}

impl Cell for Square {
    fn ball(&self) -> Ball {
        Ball::new(C64::new(self.cx, self.cy), self.half * std::f64::consts::SQRT_2 * (1.0 + 1e-12))
    }
    fn range(&self, t: &[DiskElement]) -> (f64, f64) {
        magnitude_range(t, self.ball())
    }
    fn sample(&self) -> C64 {
        let c = C64::new(self.cx, self.cy);
        if c.norm() <= 1.0 {
            c
        } else {
            c / c.norm()
        }
    }
    fn split(&self) -> Vec<Self> {
        let h = 0.5 * self.half;
        let d = self.depth + 1;
        [(-h, -h), (h, -h), (-h, h), (h, h)]
            .into_iter()
            .map(|(dx, dy)| Square { cx: self.cx + dx, cy: self.cy + dy, half: h, depth: d })
            .filter(Square::meets_disk)
            .collect()
    }
    fn depth(&self) -> u32 {
        self.depth
    }
}

fn squares(n: usize) -> Vec<Square> {
    let half = 1.0 / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = Square { cx: -1.0 + (2 * i + 1) as f64 * half, cy: -1.0 + (2 * j + 1) as f64 * half, half, depth: 0 };
            if s.meets_disk() {
                out.push(s);
            }
        }
    }
    out
}

/// Lower and upper bounds of `|t|` over a ball.
fn magnitude_range(t: &[DiskElement], z: Ball) -> (f64, f64) {
    let mut mid2 = 0.0;
    let mut rad2 = 0.0;
    for e in t {
        match e.enclose(z) {
            Some(b) => {
                mid2 += b.mid.norm_sqr();
                rad2 += b.rad * b.rad;
            }
            None => return (0.0, f64::INFINITY),
        }
    }
    let (m, r) = (mid2.sqrt(), rad2.sqrt());
    ((m - r).max(0.0), m + r)
}

/// Second-order bounds of `|t|` along an arc, in the angle `s` about the
/// arc's midpoint: `t(s) = t0 + s t1 + R` with `|R| <= s^2/2 max|t''|`, where
/// `d/ds = i z d/dz` gives `|t''| <= |t'(z)| + |t''(z)|` on the circle. The
/// affine part is a quadratic under the square root, extremal in closed form.
fn arc_range(t: &[DiskElement], a: &Arc) -> (f64, f64) {
    let zc = a.sample();
    let h = 0.5 * (a.t1 - a.t0);
    let wide = Ball::new(zc, h * (1.0 + 1e-12));
    let (mut qa, mut qb, mut qc) = (0.0, 0.0, 0.0);
    let (mut e0, mut e1, mut m2) = (0.0, 0.0, 0.0);
    for e in t {
        let (Some(p), Some(b)) = (e.jet(Ball::point(zc)), e.jet(wide)) else {
            return (0.0, f64::INFINITY);
        };
        let v = p.v.mid;
        let v1 = C64::new(0.0, 1.0) * zc * p.d1.mid;
        qa += v.norm_sqr();
        qb += (v.conj() * v1).re;
        qc += v1.norm_sqr();
        e0 += p.v.rad * p.v.rad;
        e1 += p.d1.rad * p.d1.rad;
        let bound = b.d1.upper_abs() + b.d2.upper_abs();
        m2 += bound * bound;
    }
    let q = |s: f64| (qa + 2.0 * qb * s + qc * s * s).max(0.0);
    let smin = if qc > 0.0 { (-qb / qc).clamp(-h, h) } else if qb > 0.0 { -h } else { h };
    let err = e0.sqrt() + h * e1.sqrt() + 0.5 * h * h * m2.sqrt();
    let err = err + 1e-15 * qa.sqrt();
    ((q(smin).sqrt() - err).max(0.0), q(-h).max(q(h)).sqrt() + err)
}

fn magnitude(t: &[DiskElement], z: C64) -> f64 {
    t.iter().map(|e| e.eval(z).norm_sqr()).sum::<f64>().sqrt()
}

struct Keyed<C> {
    key: f64,
    cell: C,
}

impl<C> PartialEq for Keyed<C> {
    fn eq(&self, o: &Self) -> bool {
        self.key.total_cmp(&o.key) == Ordering::Equal
    }
}
impl<C> Eq for Keyed<C> {}
impl<C> PartialOrd for Keyed<C> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<C> Ord for Keyed<C> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key.total_cmp(&o.key)
    }
}

/// Result of a certified minimum search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinBound {
    /// Certified lower bound of the minimum.
    pub lower: f64,
    /// Smallest sampled value, an upper bound of the minimum.
    pub sampled: f64,
    pub argmin: C64,
    pub cells: usize,
    /// True when the search stopped on its budget rather than its tolerance.
    pub exhausted: bool,
}

fn minimize<C: Cell>(t: &[DiskElement], init: Vec<C>, budget: &DiskBudget) -> MinBound {
    let mut heap = BinaryHeap::new();
    let mut best = f64::INFINITY;
    let mut argmin = C64::new(1.0, 0.0);
    let mut cells = 0;
    let push = |c: C, heap: &mut BinaryHeap<Keyed<C>>, best: &mut f64, argmin: &mut C64| {
        let z = c.sample();
        let v = magnitude(t, z);
        if v < *best {
            *best = v;
            *argmin = z;
        }
        let (lo, _) = c.range(t);
        heap.push(Keyed { key: -lo, cell: c });
    };
    for c in init {
        cells += 1;
        push(c, &mut heap, &mut best, &mut argmin);
    }
    while let Some(Keyed { key, cell }) = heap.pop() {
        let lower = -key;
        let done = lower >= best * (1.0 - budget.rel_tol);
        let stuck = cells >= budget.max_cells || cell.depth() >= MAX_DEPTH;
        if done || stuck {
            return MinBound { lower: lower.min(best), sampled: best, argmin, cells, exhausted: !done };
        }
        for child in cell.split() {
            cells += 1;
            push(child, &mut heap, &mut best, &mut argmin);
        }
    }
    MinBound { lower: best, sampled: best, argmin, cells, exhausted: false }
}

/// Certified minimum of `|t|` over the boundary circle.
pub fn boundary_min(t: &[DiskElement], budget: &DiskBudget) -> MinBound {
    minimize(t, arcs(256), budget)
}

/// Certified minimum of `|t|` over the closed disk.
pub fn disk_min(t: &[DiskElement], budget: &DiskBudget) -> MinBound {
    minimize(t, squares(16), budget)
}

/// Bounds of the sup-norm, which for a disk-algebra element is attained on
/// the boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBound {
    pub upper: f64,
    /// Largest sampled modulus.
    pub lower: f64,
    pub argmax: C64,
    pub cells: usize,
}

pub fn sup_norm_bounds(h: &DiskElement, budget: &DiskBudget) -> SupBound {
    let t = std::slice::from_ref(h);
    let mut heap = BinaryHeap::new();
    let mut best = 0.0f64;
    let mut argmax = C64::new(1.0, 0.0);
    let mut cells = 0;
    let push = |c: Arc, heap: &mut BinaryHeap<Keyed<Arc>>, best: &mut f64, argmax: &mut C64| {
        let z = c.sample();
        let v = magnitude(t, z);
        if v > *best {
            *best = v;
            *argmax = z;
        }
        let (_, hi) = c.range(t);
        heap.push(Keyed { key: hi, cell: c });
    };
    for c in arcs(256) {
        cells += 1;
        push(c, &mut heap, &mut best, &mut argmax);
    }
    while let Some(Keyed { key: upper, cell }) = heap.pop() {
        let done = upper <= best + budget.sup_tol * best.max(1.0);
        if done || cells >= budget.max_cells || cell.depth() >= MAX_DEPTH {
            return SupBound { upper: upper.max(best), lower: best, argmax, cells };
        }
        for child in cell.split() {
            cells += 1;
            push(child, &mut heap, &mut best, &mut argmax);
        }
    }
    SupBound { upper: best, lower: best, argmax, cells }
}

/// `(upper, lower)` bounds of the sup-norm.
///
/// ```
/// use stablerank::disk::{disk_sup_norm, DiskBudget, DiskElement};
/// use stablerank::C64;
/// let h = DiskElement::z().shift(C64::new(1.0, 0.0)).scale(C64::new(0.5, 0.0));
/// let (upper, lower) = disk_sup_norm(&h, &DiskBudget::default());
/// assert!(lower <= 1.0 && upper >= 1.0 - 1e-12 && upper - lower < 1e-6);
/// ```
pub fn disk_sup_norm(h: &DiskElement, budget: &DiskBudget) -> (f64, f64) {
    let s = sup_norm_bounds(h, budget);
    (s.upper, s.lower)
}

/// Boundary winding number of a scalar element, certified arc by arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub count: i64,
    /// Lower bound of `|h|` on the circle implied by the accepted arcs.
    pub boundary_lower: f64,
    pub arcs: usize,
}

/// Each accepted arc has its image inside a ball of radius at most half the
/// distance of its center from zero, so the argument moves by less than
/// `pi/6` along the arc and the principal increment between the endpoints
/// is the true one. `None` when some arc cannot be resolved within budget.
pub fn winding_number(h: &DiskElement, budget: &DiskBudget) -> Option<Winding> {
    let mut stack: Vec<Arc> = arcs(64).into_iter().rev().collect();
    let mut total = 0.0;
    let mut lower = f64::INFINITY;
    let mut seen = 0;
    while let Some(a) = stack.pop() {
        seen += 1;
        if seen > budget.max_cells {
            return None;
        }
        let ok = h.enclose(a.ball()).filter(|b| b.rad <= 0.5 * b.mid.norm());
        match ok {
            Some(b) => {
                lower = lower.min(b.lower_abs());
                let v0 = h.eval(C64::from_polar(1.0, a.t0));
                let v1 = h.eval(C64::from_polar(1.0, a.t1));
                total += (v1 / v0).arg();
            }
            None => {
                if a.depth >= MAX_DEPTH {
                    return None;
                }
                let mut kids = a.split();
                kids.reverse();
                stack.extend(kids);
            }
        }
    }
    let turns = total / TAU;
    let count = turns.round();
    if (turns - count).abs() > 1e-6 || !(lower > 0.0) {
        return None;
    }
    Some(Winding { count: count as i64, boundary_lower: lower, arcs: seen })
}

/// Certified lower bound of `|p|` on the closed disk, or an error when `p`
/// may vanish there. With no zero inside (winding zero), the minimum of
/// `|p|` is attained on the circle.
pub fn denominator_bound(p: &Poly) -> Result<f64> {
    if p.degree() == 0 {
        let v = p.coeffs().first().map_or(0.0, |c| c.norm());
        return if v > 0.0 { Ok(v) } else { Err(Error::InvalidParameter("zero denominator".into())) };
    }
    let e = DiskElement::polynomial(p.clone());
    let budget = DiskBudget { rel_tol: 1e-9, ..DiskBudget::default() };
    match winding_number(&e, &budget) {
        Some(w) if w.count == 0 => {}
        Some(w) => {
            return Err(Error::InvalidParameter(format!(
                "denominator has {} zero(s) inside the unit disk",
                w.count
            )))
        }
        None => return Err(Error::InvalidParameter("denominator may vanish on the unit circle".into())),
    }
    let m = boundary_min(std::slice::from_ref(&e), &budget);
    let lb = guarded(m.lower);
    if lb > 0.0 {
        Ok(lb)
    } else {
        Err(Error::InvalidParameter("denominator bound is not positive".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Invertible,
    NotInvertible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityCheck {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

impl InvertibilityCheck {
    pub fn is_invertible(&self) -> bool {
        self.verdict == Verdict::Invertible
    }
}

/// Decides membership of a tuple in `U_n(A(D))`.
///
/// A single element is invertible exactly when it has no zero on the circle
/// and winding number zero; its minimum modulus is then attained on the
/// circle. Longer tuples get a certified minimum of `|t|` over the whole
/// disk.
///
/// ```
/// use stablerank::disk::{disk_check_invertible, DiskBudget, DiskElement, DiskTuple, Verdict};
/// use stablerank::C64;
/// let z = DiskElement::z();
/// let b = DiskBudget::default();
/// assert_eq!(disk_check_invertible(&DiskTuple::single(z.clone()), &b).verdict, Verdict::NotInvertible);
/// let shifted = z.shift(C64::new(-2.0, 0.0));
/// assert_eq!(disk_check_invertible(&DiskTuple::single(shifted), &b).verdict, Verdict::Invertible);
/// ```
pub fn disk_check_invertible(t: &DiskTuple, budget: &DiskBudget) -> InvertibilityCheck {
    if t.len() == 1 {
        let h = t.component(0);
        let Some(w) = winding_number(h, budget) else {
            let cert = Certificate::new(CertKind::ArgumentPrinciple, 0.0, 0.0, "|h|")
                .with_note("boundary argument could not be resolved");
            return InvertibilityCheck { verdict: Verdict::Inconclusive, certificate: cert };
        };
        if w.count != 0 {
            let cert = Certificate::new(CertKind::ArgumentPrinciple, 0.0, 0.0, "|h|")
                .with_note(format!("winding number {} counts zeros inside the disk", w.count));
            return InvertibilityCheck { verdict: Verdict::NotInvertible, certificate: cert };
        }
        let m = boundary_min(t.components(), budget);
        let lb = guarded(m.lower.max(w.boundary_lower));
        let cert = Certificate::new(CertKind::ArgumentPrinciple, m.sampled, lb, "|h|")
            .with_note(format!("winding number 0 over {} arcs; minimum on the circle", w.arcs));
        let verdict = if lb > 0.0 { Verdict::Invertible } else { Verdict::Inconclusive };
        return InvertibilityCheck { verdict, certificate: cert };
    }
    let m = disk_min(t.components(), budget);
    let lb = guarded(m.lower);
    let cert = Certificate::new(CertKind::DiskEnclosure, m.sampled, lb, "|t|")
        .with_note(format!("{} cells, sampled minimum at {} + {}i", m.cells, m.argmin.re, m.argmin.im));
    let verdict = if lb > 0.0 {
        Verdict::Invertible
    } else if m.sampled == 0.0 {
        Verdict::NotInvertible
    } else {
        Verdict::Inconclusive
    };
    InvertibilityCheck { verdict, certificate: cert }
}

/// Angle in `[0, 2 pi)` of a point on the circle.
pub fn angle_of(z: C64) -> f64 {
    let t = z.arg();
    if t < 0.0 {
        t + TAU
    } else if t >= TAU {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_one_has_unit_sup_norm() {
        let (u, l) = disk_sup_norm(&DiskElement::constant(c(1.0, 0.0)), &DiskBudget::default());
        assert!((u - 1.0).abs() < 1e-12 && (l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn powers_of_z_have_unit_sup_norm() {
        let h = DiskElement::z().pow(5);
        let (u, l) = disk_sup_norm(&h, &DiskBudget::default());
        assert!((u - 1.0).abs() < 1e-6 && (l - 1.0).abs() < 1e-6);
    }

    #[test]
    fn winding_counts_zeros() {
        let b = DiskBudget::default();
        let p = DiskElement::polynomial(Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        assert_eq!(winding_number(&p, &b).unwrap().count, 2);
        let q = DiskElement::z().shift(c(-2.0, 0.0));
        assert_eq!(winding_number(&q, &b).unwrap().count, 0);
    }

    #[test]
    fn pair_with_disjoint_zeros_is_invertible() {
        let z = DiskElement::z();
        let w = z.scale(c(-2.0, 0.0)).shift(c(1.0, 0.0));
        let t = DiskTuple::new(vec![z, w]).unwrap();
        let check = disk_check_invertible(&t, &DiskBudget::default());
        assert!(check.is_invertible());
        // min of |z|^2 + |1-2z|^2 is 1/5 at z = 2/5
        let exact = 0.2f64.sqrt();
        assert!(check.certificate.lower_bound <= exact);
        assert!(check.certificate.lower_bound > exact * (1.0 - 2e-3));
    }

    #[test]
    fn boundary_min_of_shifted_z() {
        let h = DiskElement::z().shift(c(-2.0, 0.0));
        let m = boundary_min(std::slice::from_ref(&h), &DiskBudget::default());
        assert!(m.lower <= 1.0 && m.lower > 0.999);
        assert!((m.argmin - c(1.0, 0.0)).norm() < 3e-2);
    }
}
