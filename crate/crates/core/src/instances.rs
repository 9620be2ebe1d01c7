//! Deterministic random test instances.
//!
//! Functions are smooth: a few low Fourier modes of the vertex coordinates,
//! so that PL interpolants are faithful at modest resolution. Zeros are placed
//! at chosen vertices by subtracting the value there.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;

use crate::certify::min_modulus_pl;
use crate::error::Result;
use crate::mesh::SimplicialMesh;
use crate::pl::{PlFunction, PlTuple};
use crate::reduce::stream_rng;
use crate::scalar::{Field, C64};

/// Smooth random function with values of order one.
pub fn smooth_random(mesh: &Arc<SimplicialMesh>, field: Field, seed: u64, stream: &str) -> PlFunction {
    let mut rng = stream_rng(seed, stream, 0);
    let dim = mesh.vertices()[0].len();
    let modes: Vec<(Vec<f64>, C64, f64)> = (0..4)
        .map(|_| {
            let omega: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5) * TAU / 2.0).collect();
            let amp = Field::Complex.sample_ball(&mut rng, 0.6);
            let phase = rng.gen_range(0.0..TAU);
            (omega, amp, phase)
        })
        .collect();
    let offset = field.sample_ball(&mut rng, 0.5);
    PlFunction::from_fn(mesh.clone(), field, |p| {
        let mut z = offset;
        for (omega, amp, phase) in &modes {
            let t: f64 = omega.iter().zip(p).map(|(w, x)| w * x).sum::<f64>() + phase;
            z += match field {
                Field::Complex => amp * C64::from_polar(1.0, t),
                Field::Real => C64::new(amp.norm() * t.cos(), 0.0),
            };
        }
        z
    })
    .expect("smooth samples are finite")
}

/// `f - f(vertex)`, which vanishes at `vertex`.
pub fn vanish_at(f: &PlFunction, vertex: usize) -> PlFunction {
    let z = f.value(vertex);
    f.with_values(f.values().iter().map(|&w| w - z).collect()).expect("same shape")
}

fn certified(f: &PlTuple, g: &PlFunction) -> bool {
    min_modulus_pl(&f.with(g).expect("same mesh")).1.lower_bound > 1e-3
}

/// A pair `(f, g)` with no common zero; `shape` decides which functions get a
/// forced vertex zero. Draws are repeated (deterministically) until the pair
/// is certified with a margin.
pub fn random_pair(
    mesh: &Arc<SimplicialMesh>,
    field: Field,
    n: usize,
    seed: u64,
    zero_in_f: bool,
    zero_in_g: bool,
) -> Result<(PlTuple, PlFunction)> {
    let nv = mesh.num_vertices();
    for redraw in 0u64.. {
        let s = seed.wrapping_mul(1000).wrapping_add(redraw);
        let mut rng = stream_rng(s, "pair-zeros", 0);
        let mut g = smooth_random(mesh, field, s, "g");
        if zero_in_g {
            g = vanish_at(&g, rng.gen_range(0..nv));
        }
        let comps: Vec<PlFunction> = (0..n)
            .map(|j| {
                let f = smooth_random(mesh, field, s, &format!("f{j}"));
                if zero_in_f {
                    vanish_at(&f, rng.gen_range(0..nv))
                } else {
                    f
                }
            })
            .collect();
        let f = PlTuple::new(comps)?;
        if certified(&f, &g) {
            return Ok((f, g));
        }
    }
    unreachable!()
}

/// `(a, b)` with `a + b` vanishing at a vertex, so the all-ones multiplier
/// does not reduce it.
pub fn unitary_pair(mesh: &Arc<SimplicialMesh>, n: usize, seed: u64) -> Result<(PlTuple, PlFunction)> {
    let nv = mesh.num_vertices();
    for redraw in 0u64.. {
        let s = seed.wrapping_mul(1000).wrapping_add(redraw);
        let mut rng = stream_rng(s, "unitary-zero", 0);
        let k = rng.gen_range(0..nv);
        let b0 = smooth_random(mesh, Field::Complex, s, "b");
        let a = PlTuple::new((0..n).map(|j| smooth_random(mesh, Field::Complex, s, &format!("a{j}"))).collect())?;
        let shift = a.component(0).value(k) + b0.value(k);
        let b = b0.with_values(b0.values().iter().map(|&w| w - shift).collect())?;
        if certified(&a, &b) {
            return Ok((a, b));
        }
    }
    unreachable!()
}

/// Triple `(f_1, f_2, g)` on a torus with `g` close to one.
pub fn torus_triple(mesh: &Arc<SimplicialMesh>, seed: u64) -> Result<(PlTuple, PlFunction)> {
    let nv = mesh.num_vertices();
    for redraw in 0u64.. {
        let s = seed.wrapping_mul(1000).wrapping_add(redraw);
        let mut rng = stream_rng(s, "torus", 0);
        let noise = smooth_random(mesh, Field::Complex, s, "g");
        let g = noise.with_values(noise.values().iter().map(|&w| C64::new(1.0, 0.0) + w * 0.2).collect())?;
        let comps = (0..2)
            .map(|j| vanish_at(&smooth_random(mesh, Field::Complex, s, &format!("f{j}")), rng.gen_range(0..nv)))
            .collect();
        let f = PlTuple::new(comps)?;
        if certified(&f, &g) {
            return Ok((f, g));
        }
    }
    unreachable!()
}
