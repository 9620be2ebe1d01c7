//! Piecewise-linear functions on a [`SimplicialMesh`]: the working model of
//! `C(X, K)`.
//!
//! A [`PlFunction`] is determined by one scalar per vertex; on every top
//! simplex it is the barycentric interpolant of those values. Two facts make
//! this model useful for certification:
//!
//! * the modulus is convex on each simplex, so the sup-norm is the largest
//!   vertex modulus, exactly;
//! * refinement and affine operations are exact, while nonlinear constructions
//!   (division, normalisation, Urysohn functions) are applied vertex-wise and
//!   the result is re-certified as the genuine continuous function it is.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{MeshPoint, SimplicialMesh, TransferMap};
use crate::scalar::{clamp_to_unit, unit_normalize, Field, C64};

#[derive(Clone, Debug)]
pub struct PlFunction {
    mesh: Arc<SimplicialMesh>,
    field: Field,
    values: Vec<C64>,
}

fn same_mesh(a: &Arc<SimplicialMesh>, b: &Arc<SimplicialMesh>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PlFunction {
    pub fn new(mesh: Arc<SimplicialMesh>, field: Field, values: Vec<C64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::ValueCount {
                expected: mesh.num_vertices(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().position(|&z| !field.admits(z)) {
            return Err(Error::FieldMismatch(format!(
                "vertex {v} value {} is not a finite {field:?} scalar",
                values[v]
            )));
        }
        Ok(PlFunction { mesh, field, values })
    }

    pub fn constant(mesh: Arc<SimplicialMesh>, field: Field, c: C64) -> Result<Self> {
        let n = mesh.num_vertices();
        Self::new(mesh, field, vec![c; n])
    }

    pub fn zero(mesh: Arc<SimplicialMesh>, field: Field) -> Self {
        let n = mesh.num_vertices();
        PlFunction {
            mesh,
            field,
            values: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Interpolant of `f` evaluated at the vertex coordinates.
    pub fn from_fn(mesh: Arc<SimplicialMesh>, field: Field, f: impl Fn(&[f64]) -> C64) -> Result<Self> {
        let values = mesh.vertices().iter().map(|p| f(p)).collect();
        Self::new(mesh, field, values)
    }

    pub fn mesh(&self) -> &Arc<SimplicialMesh> {
        &self.mesh
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, vertex: usize) -> C64 {
        self.values[vertex]
    }

    /// Value at a point of the complex.
    pub fn eval(&self, p: &MeshPoint) -> C64 {
        self.mesh.simplices()[p.simplex]
            .iter()
            .zip(&p.bary)
            .map(|(&v, &w)| self.values[v] * w)
            .sum()
    }

    /// Exact sup-norm: the largest vertex modulus.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Index of a vertex attaining the sup-norm (smallest index on ties).
    pub fn argmax_vertex(&self) -> usize {
        let mut best = 0;
        for (k, z) in self.values.iter().enumerate() {
            if z.norm() > self.values[best].norm() {
                best = k;
            }
        }
        best
    }

    /// Same function on a refined mesh.
    pub fn transfer(&self, map: &TransferMap) -> PlFunction {
        PlFunction {
            mesh: map.target().clone(),
            field: self.field,
            values: map.transfer_values(&self.values),
        }
    }

    pub fn conj(&self) -> PlFunction {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, c: C64) -> Result<PlFunction> {
        let out = self.map(|z| z * c);
        Self::new(out.mesh, self.field, out.values)
    }

    pub fn add(&self, other: &PlFunction) -> Result<PlFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PlFunction) -> Result<PlFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Vertex-wise product (the interpolant of the pointwise product).
    pub fn mul_vertexwise(&self, other: &PlFunction) -> Result<PlFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> PlFunction {
        PlFunction {
            mesh: self.mesh.clone(),
            field: self.field,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip_with(&self, other: &PlFunction, f: impl Fn(C64, C64) -> C64) -> Result<PlFunction> {
        check_compatible(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        PlFunction::new(self.mesh.clone(), self.field, values)
    }

    pub(crate) fn with_values(&self, values: Vec<C64>) -> Result<PlFunction> {
        PlFunction::new(self.mesh.clone(), self.field, values)
    }
}

pub(crate) fn check_compatible(a: &PlFunction, b: &PlFunction) -> Result<()> {
    if !same_mesh(&a.mesh, &b.mesh) {
        return Err(Error::MeshMismatch);
    }
    if a.field != b.field {
        return Err(Error::FieldMismatch(format!("{:?} vs {:?}", a.field, b.field)));
    }
    Ok(())
}

/// An ordered tuple `(f_1, ..., f_n)` of functions over one mesh and field.
#[derive(Clone, Debug)]
pub struct PlTuple {
    components: Vec<PlFunction>,
}

impl PlTuple {
    pub fn new(components: Vec<PlFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("a tuple needs at least one component".into()))?;
        for c in &components[1..] {
            check_compatible(first, c)?;
        }
        Ok(PlTuple { components })
    }

    pub fn single(f: PlFunction) -> Self {
        PlTuple { components: vec![f] }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[PlFunction] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &PlFunction {
        &self.components[j]
    }

    pub fn mesh(&self) -> &Arc<SimplicialMesh> {
        self.components[0].mesh()
    }

    pub fn field(&self) -> Field {
        self.components[0].field()
    }

    /// `(f_1, ..., f_n, g)`.
    pub fn with(&self, g: &PlFunction) -> Result<PlTuple> {
        let mut c = self.components.clone();
        c.push(g.clone());
        PlTuple::new(c)
    }

    /// Subtuple with the given component indices, in order.
    pub fn select(&self, indices: &[usize]) -> Result<PlTuple> {
        PlTuple::new(indices.iter().map(|&j| self.components[j].clone()).collect())
    }

    /// Values of all components at one vertex.
    pub fn vertex(&self, v: usize) -> Vec<C64> {
        self.components.iter().map(|c| c.values[v]).collect()
    }

    /// Pointwise Euclidean magnitude `sqrt(sum |f_j(p)|^2)`.
    pub fn magnitude_at(&self, p: &MeshPoint) -> f64 {
        self.components.iter().map(|c| c.eval(p).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn transfer(&self, map: &TransferMap) -> PlTuple {
        PlTuple {
            components: self.components.iter().map(|c| c.transfer(map)).collect(),
        }
    }

    /// Largest component sup-norm.
    pub fn max_sup_norm(&self) -> f64 {
        self.components.iter().map(|c| c.sup_norm()).fold(0.0, f64::max)
    }

    /// Aggregate norm `sqrt(sum ||f_j||^2)`.
    pub fn aggregate_norm(&self) -> f64 {
        self.components.iter().map(|c| c.sup_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &PlTuple) -> Result<PlTuple> {
        tuple_len_check(self, other)?;
        PlTuple::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect::<Result<_>>()?,
        )
    }

    /// Applies a vertex-wise recipe to every vertex. The closure receives the
    /// tuple's values at the vertex and the vertex index and returns the output
    /// values there.
    pub fn map_vertices<F>(&self, out_len: usize, recipe: F) -> Result<PlTuple>
    where
        F: Fn(&[C64], usize) -> Result<Vec<C64>>,
    {
        let mesh = self.mesh().clone();
        let nv = mesh.num_vertices();
        let mut outs = vec![Vec::with_capacity(nv); out_len];
        for v in 0..nv {
            let vals = self.vertex(v);
            let res = recipe(&vals, v)?;
            if res.len() != out_len {
                return Err(Error::InvalidParameter(format!(
                    "recipe returned {} values, expected {out_len}",
                    res.len()
                )));
            }
            for (o, z) in outs.iter_mut().zip(res) {
                o.push(z);
            }
        }
        PlTuple::new(
            outs.into_iter()
                .map(|vals| PlFunction::new(mesh.clone(), self.field(), vals))
                .collect::<Result<_>>()?,
        )
    }
}

fn tuple_len_check(a: &PlTuple, b: &PlTuple) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!("tuple lengths {} and {} differ", a.len(), b.len())));
    }
    Ok(())
}

/// `f / g` component-wise at the vertices.
pub fn divide(f: &PlTuple, g: &PlFunction) -> Result<PlTuple> {
    let joint = f.with(g)?;
    let n = f.len();
    joint.map_vertices(n, |vals, v| {
        let d = vals[n];
        if d.norm() == 0.0 {
            return Err(Error::DivisionByZero { vertex: v });
        }
        Ok(vals[..n].iter().map(|&z| z / d).collect())
    })
}

/// `u / |u|` with the Euclidean magnitude of the whole tuple, vertex-wise.
///
/// For a scalar function every output vertex has modulus exactly one.
pub fn normalize(u: &PlTuple) -> Result<PlTuple> {
    let n = u.len();
    u.map_vertices(n, |vals, v| {
        if n == 1 {
            return unit_normalize(vals[0]).map(|w| vec![w]).ok_or(Error::DivisionByZero { vertex: v });
        }
        let r = vals.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::DivisionByZero { vertex: v });
        }
        Ok(vals.iter().map(|&z| clamp_to_unit(z / r)).collect())
    })
}

/// Canonical Bezout coefficients of `(f, g)`:
/// `x_j = conj(f_j) / S`, `y = conj(g) / S` with `S = sum |f_k|^2 + |g|^2`.
/// At every vertex `sum x_j f_j + y g = 1`.
pub fn bezout_coefficients(f: &PlTuple, g: &PlFunction) -> Result<(PlTuple, PlFunction)> {
    let joint = f.with(g)?;
    let n = f.len();
    let all = joint.map_vertices(n + 1, |vals, v| {
        let s: f64 = vals.iter().map(|z| z.norm_sqr()).sum();
        if s == 0.0 {
            return Err(Error::DivisionByZero { vertex: v });
        }
        Ok(vals.iter().map(|z| z.conj() / s).collect())
    })?;
    let mut comps = all.components;
    let y = comps.pop().expect("n + 1 >= 1");
    Ok((PlTuple { components: comps }, y))
}

/// `psi + y_j (1 - psi)` for each component of `y`, vertex-wise.
pub fn blend(psi: &PlFunction, y: &PlTuple) -> Result<PlTuple> {
    let joint = y.with(psi)?;
    let n = y.len();
    joint.map_vertices(n, |vals, _| {
        let p = vals[n].re;
        Ok(vals[..n].iter().map(|&yj| C64::new(p, 0.0) + yj * (1.0 - p)).collect())
    })
}

/// Urysohn-type function from the sublevel sets of `|g|`: vertex value
/// `clamp((t_out - |g|) / (t_out - t_in), 0, 1)`. Equals one where
/// `|g| <= t_in` and zero where `|g| >= t_out` (at vertices).
pub fn urysohn_from_levels(g: &PlFunction, t_in: f64, t_out: f64) -> Result<PlFunction> {
    if !(t_in > 0.0 && t_in < t_out && t_out.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t_in < t_out, got t_in = {t_in}, t_out = {t_out}"
        )));
    }
    let values = g
        .values()
        .iter()
        .map(|z| {
            let r = z.norm();
            let s = if r <= t_in {
                1.0
            } else if r >= t_out {
                0.0
            } else {
                ((t_out - r) / (t_out - t_in)).clamp(0.0, 1.0)
            };
            C64::new(s, 0.0)
        })
        .collect();
    PlFunction::new(g.mesh().clone(), g.field(), values)
}
