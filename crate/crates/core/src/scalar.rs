//! Scalar field tags and complex helpers shared by every module.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// The scalar field `K` of the algebra `C(X, K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Whether `z` is a legal scalar of this field.
    pub fn admits(self, z: C64) -> bool {
        match self {
            Field::Real => z.im == 0.0 && z.re.is_finite(),
            Field::Complex => z.re.is_finite() && z.im.is_finite(),
        }
    }

    /// Draws a scalar uniformly from the closed ball of the given radius.
    pub fn sample_ball<R: Rng + ?Sized>(self, rng: &mut R, radius: f64) -> C64 {
        match self {
            Field::Real => C64::new(radius * (2.0 * rng.gen::<f64>() - 1.0), 0.0),
            Field::Complex => {
                let r = radius * rng.gen::<f64>().sqrt();
                let t = std::f64::consts::TAU * rng.gen::<f64>();
                C64::from_polar(r, t)
            }
        }
    }
}

/// Relative guard applied to every certified lower bound.
pub const GUARD: f64 = 1e-8;

/// Shrinks a nonnegative bound by the relative guard.
pub fn guarded(bound: f64) -> f64 {
    if bound > 0.0 {
        bound * (1.0 - GUARD)
    } else {
        0.0
    }
}

/// Returns a representable scalar close to `z / |z|` whose computed modulus is
/// exactly `1.0`.
///
/// Plain division leaves the modulus within an ulp or two of one; the sup-norm
/// is the vertex maximum of `norm()`, so exactness has to hold for that exact
/// expression. Nearby ulp neighbours are searched until one lands on `1.0`.
pub fn unit_normalize(z: C64) -> Option<C64> {
    let r = z.norm();
    if !(r > 0.0) || !r.is_finite() {
        return None;
    }
    let w = z / r;
    if w.norm() == 1.0 {
        return Some(w);
    }
    let steps = |x: f64, k: i32| {
        let mut y = x;
        if k > 0 {
            for _ in 0..k {
                y = y.next_up();
            }
        } else {
            for _ in 0..(-k) {
                y = y.next_down();
            }
        }
        y
    };
    let mut best: Option<(f64, C64)> = None;
    for dr in -6i32..=6 {
        for di in -6i32..=6 {
            let cand = C64::new(steps(w.re, dr), steps(w.im, di));
            if cand.norm() == 1.0 {
                let d = (cand - w).norm();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, cand));
                }
            }
        }
    }
    Some(match best {
        Some((_, c)) => c,
        // Fall back to the nearest axis point; only reachable in contrived cases.
        None => {
            if w.re.abs() >= w.im.abs() {
                C64::new(w.re.signum(), 0.0)
            } else {
                C64::new(0.0, w.im.signum())
            }
        }
    })
}

/// Shrinks `z` towards the origin until its computed modulus is at most one.
pub fn clamp_to_unit(z: C64) -> C64 {
    let mut w = z;
    let r = w.norm();
    if r > 1.0 {
        w /= r;
    }
    while w.norm() > 1.0 {
        w = C64::new(w.re.next_down_towards_zero(), w.im.next_down_towards_zero());
    }
    w
}

trait TowardsZero {
    fn next_down_towards_zero(self) -> Self;
}

impl TowardsZero for f64 {
    fn next_down_towards_zero(self) -> f64 {
        if self > 0.0 {
            self.next_down()
        } else if self < 0.0 {
            self.next_up()
        } else {
            self
        }
    }
}

/// `[re, im]` pair used by the JSON formats.
pub fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}
