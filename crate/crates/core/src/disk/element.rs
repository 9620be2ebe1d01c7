use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::C64;

use super::certify::{denominator_bound, sup_norm_bounds, DiskBudget};
use super::enclosure::{poly_ball, poly_jet, Ball, Jet};
use super::poly::Poly;

/// Construction history of an element, kept alongside the expanded rational
/// form. Enclosures evaluated through the history are local: a power of a
/// small base stays small, where the expanded coefficients would not show it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskExpr {
    Poly(Poly),
    Add(Arc<DiskExpr>, Arc<DiskExpr>),
    Mul(Arc<DiskExpr>, Arc<DiskExpr>),
    Div(Arc<DiskExpr>, Arc<DiskExpr>),
    Scale(C64, Arc<DiskExpr>),
    Shift(C64, Arc<DiskExpr>),
    Pow(Arc<DiskExpr>, u32),
    /// `L_a(x) = (x - a)/(1 - a x)` applied to the inner expression.
    Mobius(f64, Arc<DiskExpr>),
}

impl DiskExpr {
    pub fn eval(&self, z: C64) -> C64 {
        match self {
            DiskExpr::Poly(p) => p.eval(z),
            DiskExpr::Add(a, b) => a.eval(z) + b.eval(z),
            DiskExpr::Mul(a, b) => a.eval(z) * b.eval(z),
            DiskExpr::Div(a, b) => a.eval(z) / b.eval(z),
            DiskExpr::Scale(s, a) => s * a.eval(z),
            DiskExpr::Shift(c, a) => c + a.eval(z),
            DiskExpr::Pow(a, k) => a.eval(z).powu(*k),
            DiskExpr::Mobius(t, a) => {
                let x = a.eval(z);
                (x - t) / (1.0 - t * x)
            }
        }
    }

    /// Enclosure over a ball of arguments; `None` if a denominator ball
    /// touches zero.
    pub fn enclose(&self, z: Ball) -> Option<Ball> {
        Some(match self {
            DiskExpr::Poly(p) => poly_ball(p, z),
            DiskExpr::Add(a, b) => a.enclose(z)?.add(&b.enclose(z)?),
            DiskExpr::Mul(a, b) => a.enclose(z)?.mul(&b.enclose(z)?),
            DiskExpr::Div(a, b) => a.enclose(z)?.div(&b.enclose(z)?)?,
            DiskExpr::Scale(s, a) => a.enclose(z)?.scale(*s),
            DiskExpr::Shift(c, a) => a.enclose(z)?.shift(*c),
            DiskExpr::Pow(a, k) => a.enclose(z)?.powi(*k),
            DiskExpr::Mobius(t, a) => {
                // (x - t)/(1 - t x) = -1/t + (1/t - t)/(1 - t x): one occurrence of x
                let x = a.enclose(z)?;
                let den = x.scale(C64::new(-t, 0.0)).shift(C64::new(1.0, 0.0));
                den.recip()?.scale(C64::new(1.0 / t - t, 0.0)).shift(C64::new(-1.0 / t, 0.0))
            }
        })
    }

    /// Value and first two derivatives enclosed over a ball of arguments.
    pub fn jet(&self, z: Ball) -> Option<Jet> {
        Some(match self {
            DiskExpr::Poly(p) => poly_jet(p, z),
            DiskExpr::Add(a, b) => a.jet(z)?.add(&b.jet(z)?),
            DiskExpr::Mul(a, b) => a.jet(z)?.mul(&b.jet(z)?),
            DiskExpr::Div(a, b) => a.jet(z)?.div(&b.jet(z)?)?,
            DiskExpr::Scale(s, a) => a.jet(z)?.scale(*s),
            DiskExpr::Shift(c, a) => a.jet(z)?.shift(*c),
            DiskExpr::Pow(a, k) => a.jet(z)?.powi(*k),
            DiskExpr::Mobius(t, a) => {
                let x = a.jet(z)?;
                let den = x.scale(C64::new(-t, 0.0)).shift(C64::new(1.0, 0.0));
                den.recip()?.scale(C64::new(1.0 / t - t, 0.0)).shift(C64::new(-1.0 / t, 0.0))
            }
        })
    }
}

/// An element of the disk algebra: a quotient of polynomials whose
/// denominator has a certified positive lower bound on the closed disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "RawElement", try_from = "RawElement")]
pub struct DiskElement {
    numerator: Poly,
    denominator: Poly,
    denom_certificate: f64,
    expr: Arc<DiskExpr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawElement {
    numerator: Poly,
    denominator: Poly,
    denom_certificate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expr: Option<Arc<DiskExpr>>,
}

impl From<DiskElement> for RawElement {
    fn from(e: DiskElement) -> Self {
        let expr = match &*e.expr {
            DiskExpr::Poly(_) => None,
            DiskExpr::Div(a, b) if matches!((&**a, &**b), (DiskExpr::Poly(_), DiskExpr::Poly(_))) => None,
            _ => Some(e.expr.clone()),
        };
        RawElement { numerator: e.numerator, denominator: e.denominator, denom_certificate: e.denom_certificate, expr }
    }
}

impl TryFrom<RawElement> for DiskElement {
    type Error = Error;

    /// With a construction history the element is rebuilt by replaying it, and
    /// the stored quotient must agree with the rebuilt one. Without it the
    /// denominator is certified afresh. A stored certificate is kept only if
    /// the recomputation confirms it.
    fn try_from(raw: RawElement) -> Result<Self> {
        let mut e = match &raw.expr {
            Some(expr) => {
                let e = DiskElement::replay(expr)?;
                if !close(&e.numerator, &raw.numerator) || !close(&e.denominator, &raw.denominator) {
                    return Err(Error::InvalidParameter(
                        "stored quotient disagrees with its construction history".into(),
                    ));
                }
                e
            }
            None => DiskElement::rational(raw.numerator, raw.denominator)?,
        };
        if raw.denom_certificate > 0.0 && e.denom_certificate >= raw.denom_certificate * (1.0 - 1e-6) {
            e.denom_certificate = raw.denom_certificate;
        }
        Ok(e)
    }
}

fn close(a: &Poly, b: &Poly) -> bool {
    let tol = 1e-9 * (1.0 + a.abs_eval(1.0).max(b.abs_eval(1.0)));
    a.sub(b).abs_eval(1.0) <= tol
}

/// Rounding allowance for a denominator bound after expanding coefficients.
fn shrink(bound: f64, den: &Poly) -> f64 {
    (bound * (1.0 - 1e-12) - 1e-15 * den.abs_eval(1.0)).max(0.0)
}

impl DiskElement {
    pub fn polynomial(p: Poly) -> Self {
        let expr = Arc::new(DiskExpr::Poly(p.clone()));
        DiskElement { numerator: p, denominator: Poly::one(), denom_certificate: 1.0, expr }
    }

    pub fn constant(c: C64) -> Self {
        DiskElement::polynomial(Poly::constant(c))
    }

    pub fn z() -> Self {
        DiskElement::polynomial(Poly::z())
    }

    /// `num/den`, certifying that `den` has no zero on the closed disk.
    pub fn rational(numerator: Poly, denominator: Poly) -> Result<Self> {
        for c in numerator.coeffs().iter().chain(denominator.coeffs()) {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
        }
        if denominator.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if denominator.degree() == 0 {
            let inv = denominator.coeffs()[0].inv();
            return Ok(DiskElement::polynomial(numerator.scale(inv)));
        }
        let lb = denominator_bound(&denominator)?;
        let expr = Arc::new(DiskExpr::Div(
            Arc::new(DiskExpr::Poly(numerator.clone())),
            Arc::new(DiskExpr::Poly(denominator.clone())),
        ));
        Ok(DiskElement { numerator, denominator, denom_certificate: lb, expr })
    }

    /// Rebuilds an element by repeating the operations of a construction
    /// history. Quotients are accepted only of two polynomials.
    pub fn replay(expr: &DiskExpr) -> Result<Self> {
        Ok(match expr {
            DiskExpr::Poly(p) => DiskElement::polynomial(p.clone()),
            DiskExpr::Add(a, b) => DiskElement::replay(a)?.add(&DiskElement::replay(b)?),
            DiskExpr::Mul(a, b) => DiskElement::replay(a)?.mul(&DiskElement::replay(b)?),
            DiskExpr::Div(a, b) => match (&**a, &**b) {
                (DiskExpr::Poly(n), DiskExpr::Poly(d)) => DiskElement::rational(n.clone(), d.clone())?,
                _ => return Err(Error::Unsupported("quotient of composite expressions".into())),
            },
            DiskExpr::Scale(s, a) => DiskElement::replay(a)?.scale(*s),
            DiskExpr::Shift(c, a) => DiskElement::replay(a)?.shift(*c),
            DiskExpr::Pow(a, k) => DiskElement::replay(a)?.pow(*k),
            DiskExpr::Mobius(t, a) => DiskElement::replay(a)?.compose_mobius(*t)?,
        })
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// Certified lower bound of `|denominator|` on the closed disk.
    pub fn denom_certificate(&self) -> f64 {
        self.denom_certificate
    }

    pub fn expr(&self) -> &DiskExpr {
        &self.expr
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.degree() == 0
    }

    /// Value at `z`, evaluated through the construction history.
    pub fn eval(&self, z: C64) -> C64 {
        self.expr.eval(z)
    }

    /// Value of the expanded quotient at `z`.
    pub fn eval_rational(&self, z: C64) -> C64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    pub fn enclose(&self, z: Ball) -> Option<Ball> {
        self.expr.enclose(z)
    }

    pub fn jet(&self, z: Ball) -> Option<Jet> {
        self.expr.jet(z)
    }

    pub fn add(&self, o: &DiskElement) -> DiskElement {
        let expr = Arc::new(DiskExpr::Add(self.expr.clone(), o.expr.clone()));
        if self.denominator == o.denominator {
            return DiskElement {
                numerator: self.numerator.add(&o.numerator),
                denominator: self.denominator.clone(),
                denom_certificate: self.denom_certificate,
                expr,
            };
        }
        let den = self.denominator.mul(&o.denominator);
        DiskElement {
            numerator: self.numerator.mul(&o.denominator).add(&o.numerator.mul(&self.denominator)),
            denom_certificate: shrink(self.denom_certificate * o.denom_certificate, &den),
            denominator: den,
            expr,
        }
    }

    pub fn sub(&self, o: &DiskElement) -> DiskElement {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, o: &DiskElement) -> DiskElement {
        let den = self.denominator.mul(&o.denominator);
        DiskElement {
            numerator: self.numerator.mul(&o.numerator),
            denom_certificate: shrink(self.denom_certificate * o.denom_certificate, &den),
            denominator: den,
            expr: Arc::new(DiskExpr::Mul(self.expr.clone(), o.expr.clone())),
        }
    }

    pub fn scale(&self, s: C64) -> DiskElement {
        DiskElement {
            numerator: self.numerator.scale(s),
            denominator: self.denominator.clone(),
            denom_certificate: self.denom_certificate,
            expr: Arc::new(DiskExpr::Scale(s, self.expr.clone())),
        }
    }

    /// `c + self`.
    pub fn shift(&self, c: C64) -> DiskElement {
        DiskElement {
            numerator: self.numerator.add(&self.denominator.scale(c)),
            denominator: self.denominator.clone(),
            denom_certificate: self.denom_certificate,
            expr: Arc::new(DiskExpr::Shift(c, self.expr.clone())),
        }
    }

    pub fn pow(&self, k: u32) -> DiskElement {
        let den = self.denominator.pow(k);
        DiskElement {
            numerator: self.numerator.pow(k),
            denom_certificate: shrink(self.denom_certificate.powi(k as i32), &den),
            denominator: den,
            expr: Arc::new(DiskExpr::Pow(self.expr.clone(), k)),
        }
    }

    /// Upper bound of the sup-norm: the coefficient sum for polynomials, the
    /// boundary enclosure otherwise.
    pub fn sup_upper(&self) -> f64 {
        let coeff = self.numerator.abs_eval(1.0) / self.denom_certificate;
        if self.is_polynomial() {
            return coeff * (1.0 + 1e-15);
        }
        coeff.min(sup_norm_bounds(self, &DiskBudget::default()).upper)
    }

    /// `L_a(self) = (self - a)/(1 - a self)` for real `a` in `(0, 1)`.
    ///
    /// The new denominator `D - a N` is bounded below by
    /// `|D| (1 - a |self|) >= d (1 - a S)` with `S` a sup-norm bound, which
    /// must satisfy `a S < 1`.
    pub fn compose_mobius(&self, a: f64) -> Result<DiskElement> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("Mobius parameter must lie in (0, 1), got {a}")));
        }
        let s = self.sup_upper();
        if !(a * s < 1.0) {
            return Err(Error::Unsupported(format!(
                "pole 1/a = {} is not outside the range bound {s}",
                1.0 / a
            )));
        }
        let ac = C64::new(a, 0.0);
        let den = self.denominator.sub(&self.numerator.scale(ac));
        Ok(DiskElement {
            numerator: self.numerator.sub(&self.denominator.scale(ac)),
            denom_certificate: shrink(self.denom_certificate * (1.0 - a * s), &den),
            denominator: den,
            expr: Arc::new(DiskExpr::Mobius(a, self.expr.clone())),
        })
    }
}

/// A tuple of disk-algebra elements.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiskTuple {
    components: Vec<DiskElement>,
}

impl DiskTuple {
    pub fn new(components: Vec<DiskElement>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("a disk tuple needs at least one component".into()));
        }
        Ok(DiskTuple { components })
    }

    pub fn single(e: DiskElement) -> Self {
        DiskTuple { components: vec![e] }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        DiskTuple::new(vec![DiskElement::constant(C64::new(0.0, 0.0)); n])
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[DiskElement] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &DiskElement {
        &self.components[j]
    }

    pub fn eval(&self, z: C64) -> Vec<C64> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    /// Euclidean magnitude `|t(z)|`.
    pub fn magnitude_at(&self, z: C64) -> f64 {
        self.components.iter().map(|c| c.eval(z).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `f + v*g` componentwise.
    pub fn reduced(f: &DiskTuple, v: &DiskTuple, g: &DiskElement) -> Result<DiskTuple> {
        if f.len() != v.len() {
            return Err(Error::InvalidParameter(format!("lengths differ: {} and {}", f.len(), v.len())));
        }
        DiskTuple::new(f.components.iter().zip(&v.components).map(|(fj, vj)| fj.add(&vj.mul(g))).collect())
    }

    /// The tuple with `g` appended.
    pub fn with(&self, g: &DiskElement) -> DiskTuple {
        let mut components = self.components.clone();
        components.push(g.clone());
        DiskTuple { components }
    }
}
