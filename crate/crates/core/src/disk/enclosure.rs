//! Midpoint-radius complex enclosures.
//!
//! A [`Ball`] `(mid, rad)` stands for every complex number within `rad` of
//! `mid`. Each operation returns a ball containing all results of applying it
//! to members of its operands, widened by a small relative slack that absorbs
//! floating-point rounding.

use crate::scalar::C64;

use super::poly::Poly;

/// Relative widening applied after every operation; a few ulps of the
/// magnitude involved.
const SLACK: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub mid: C64,
    pub rad: f64,
}

impl Ball {
    pub fn new(mid: C64, rad: f64) -> Self {
        Ball { mid, rad }
    }

    pub fn point(z: C64) -> Self {
        Ball { mid: z, rad: 0.0 }
    }

    fn widened(mid: C64, rad: f64) -> Self {
        Ball { mid, rad: rad + SLACK * (mid.norm() + rad) }
    }

    pub fn lower_abs(&self) -> f64 {
        (self.mid.norm() - self.rad).max(0.0)
    }

    pub fn upper_abs(&self) -> f64 {
        self.mid.norm() + self.rad
    }

    pub fn add(&self, o: &Ball) -> Ball {
        Ball::widened(self.mid + o.mid, self.rad + o.rad)
    }

    pub fn shift(&self, c: C64) -> Ball {
        Ball::widened(self.mid + c, self.rad)
    }

    pub fn scale(&self, s: C64) -> Ball {
        Ball::widened(self.mid * s, self.rad * s.norm())
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let rad = self.mid.norm() * o.rad + o.mid.norm() * self.rad + self.rad * o.rad;
        Ball::widened(self.mid * o.mid, rad)
    }

    /// `self^k`, using `|(m+e)^k - m^k| <= (|m|+|e|)^k - |m|^k`.
    pub fn powi(&self, k: u32) -> Ball {
        let m = self.mid.powu(k);
        if self.rad == 0.0 {
            return Ball::widened(m, 0.0);
        }
        let a = self.mid.norm();
        let rad = (a + self.rad).powi(k as i32) - a.powi(k as i32);
        Ball::widened(m, rad)
    }

    /// `1/self`, or `None` when the ball touches zero.
    pub fn recip(&self) -> Option<Ball> {
        let a = self.mid.norm();
        if !(a > self.rad) {
            return None;
        }
        Some(Ball::widened(self.mid.inv(), self.rad / (a * (a - self.rad))))
    }

    pub fn div(&self, o: &Ball) -> Option<Ball> {
        if o.rad == 0.0 {
            if o.mid.norm() == 0.0 {
                return None;
            }
            let inv = o.mid.inv();
            return Some(Ball::widened(self.mid * inv, self.rad * inv.norm()));
        }
        Some(self.mul(&o.recip()?))
    }
}

/// Enclosure of `p` over a ball, from the Taylor expansion at the center:
/// `p(c + w) = sum b_k w^k`, so `|p(c+w) - b_0| <= sum_{k>=1} |b_k| r^k`.
pub fn poly_ball(p: &Poly, z: Ball) -> Ball {
    let a = p.coeffs();
    if a.is_empty() {
        return Ball::point(C64::new(0.0, 0.0));
    }
    if z.rad == 0.0 {
        let d = a.len();
        let v = p.eval(z.mid);
        let err = 4.0 * d as f64 * f64::EPSILON * p.abs_eval(z.mid.norm());
        return Ball::new(v, err);
    }
    let d = a.len() - 1;
    let c = z.mid;
    let b = taylor_shift(p, c);
    let r = z.rad;
    let tail = b[1..].iter().rev().fold(0.0, |acc, bk| acc * r + bk.norm()) * r;
    let err = 4.0 * (d + 1) as f64 * (d + 1) as f64 * f64::EPSILON * p.abs_eval(c.norm() + r);
    finite_or_unbounded(Ball::new(b[0], tail + err))
}

/// Value, first and second derivative enclosed over a common ball of
/// arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Ball,
    pub d1: Ball,
    pub d2: Ball,
}

impl Jet {
    pub fn constant(c: C64) -> Self {
        let zero = Ball::point(C64::new(0.0, 0.0));
        Jet { v: Ball::point(c), d1: zero, d2: zero }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet { v: self.v.add(&o.v), d1: self.d1.add(&o.d1), d2: self.d2.add(&o.d2) }
    }

    pub fn shift(&self, c: C64) -> Jet {
        Jet { v: self.v.shift(c), ..*self }
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { v: self.v.scale(s), d1: self.d1.scale(s), d2: self.d2.scale(s) }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let two = C64::new(2.0, 0.0);
        Jet {
            v: self.v.mul(&o.v),
            d1: self.d1.mul(&o.v).add(&self.v.mul(&o.d1)),
            d2: self.d2.mul(&o.v).add(&self.d1.mul(&o.d1).scale(two)).add(&self.v.mul(&o.d2)),
        }
    }

    /// `(1/u)' = -u'/u^2`, `(1/u)'' = 2u'^2/u^3 - u''/u^2`.
    pub fn recip(&self) -> Option<Jet> {
        let r = self.v.recip()?;
        let r2 = r.mul(&r);
        let r3 = r2.mul(&r);
        let d1 = self.d1.mul(&r2).scale(C64::new(-1.0, 0.0));
        let d2 = self.d1.mul(&self.d1).mul(&r3).scale(C64::new(2.0, 0.0)).add(&self.d2.mul(&r2).scale(C64::new(-1.0, 0.0)));
        Some(Jet { v: r, d1, d2 })
    }

    pub fn div(&self, o: &Jet) -> Option<Jet> {
        Some(self.mul(&o.recip()?))
    }

    pub fn powi(&self, k: u32) -> Jet {
        match k {
            0 => Jet::constant(C64::new(1.0, 0.0)),
            1 => *self,
            _ => {
                let kf = C64::new(k as f64, 0.0);
                let p2 = self.v.powi(k - 2);
                let p1 = p2.mul(&self.v);
                Jet {
                    v: p1.mul(&self.v),
                    d1: p1.mul(&self.d1).scale(kf),
                    d2: p2
                        .mul(&self.d1)
                        .mul(&self.d1)
                        .scale(C64::new((k * (k - 1)) as f64, 0.0))
                        .add(&p1.mul(&self.d2).scale(kf)),
                }
            }
        }
    }
}

/// Taylor coefficients of `p` at `c`: `p(c + w) = sum b_k w^k`.
fn taylor_shift(p: &Poly, c: C64) -> Vec<C64> {
    let mut b = p.coeffs().to_vec();
    let d = b.len().saturating_sub(1);
    for i in 0..d {
        for j in (i..d).rev() {
            let t = c * b[j + 1];
            b[j] += t;
        }
    }
    b
}

/// Jet of `p` over a ball, from the Taylor coefficients at its center.
pub fn poly_jet(p: &Poly, z: Ball) -> Jet {
    if p.is_zero() {
        return Jet::constant(C64::new(0.0, 0.0));
    }
    let b = taylor_shift(p, z.mid);
    let d = b.len();
    let r = z.rad;
    let err = 4.0 * (d * d) as f64 * f64::EPSILON * p.abs_eval(z.mid.norm() + r);
    // enclosure of the j-th derivative: j! b_j + sum_{k>j} k!/(k-j)! b_k w^(k-j)
    let part = |j: usize| {
        let fall = |k: usize| ((k - j + 1)..=k).map(|x| x as f64).product::<f64>();
        let mid = b.get(j).copied().unwrap_or_default() * fall(j);
        let mut tail = 0.0;
        let mut rp = r;
        for (k, bk) in b.iter().enumerate().skip(j + 1) {
            tail += fall(k) * bk.norm() * rp;
            rp *= r;
        }
        let scale = if j == 0 { 1.0 } else { (d * d) as f64 };
        Ball::new(mid, tail + err * scale)
    };
    Jet { v: finite_or_unbounded(part(0)), d1: finite_or_unbounded(part(1)), d2: finite_or_unbounded(part(2)) }
}

/// Overflowing Taylor coefficients leave no usable information.
fn finite_or_unbounded(b: Ball) -> Ball {
    if b.mid.re.is_finite() && b.mid.im.is_finite() && b.rad.is_finite() {
        b
    } else {
        Ball::new(C64::new(0.0, 0.0), f64::INFINITY)
    }
}
