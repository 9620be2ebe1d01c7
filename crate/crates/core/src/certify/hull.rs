//! Distance from the origin to the convex hull of a handful of points.
//!
//! The image of a simplex under an affine map is the convex hull of the
//! vertex images, so the minimum of `|t|` over a simplex is this distance.
//! The program `min |sum w_i p_i|` over the probability simplex is solved
//! exactly by enumerating faces: the optimum lies in the relative interior of
//! some face, where it is the projection of the origin onto that face's affine
//! hull.

/// Solution of one per-simplex program.
#[derive(Clone, Debug, PartialEq)]
pub struct HullDistance {
    /// Distance from the origin to the computed closest point.
    pub distance: f64,
    /// Dual bound `max(0, min_i <p_i, x> / |x|)` with `x` the closest point.
    /// Every point of the hull has norm at least this.
    pub lower_bound: f64,
    /// Barycentric weights of the closest point.
    pub weights: Vec<f64>,
}

impl HullDistance {
    pub fn gap(&self) -> f64 {
        self.distance - self.lower_bound
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
/// Returns `None` for numerically singular systems.
pub(crate) fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
    if scale == 0.0 {
        return if n == 0 { Some(vec![]) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(r);
                for (x, &y) in bottom[0][col..n].iter_mut().zip(&top[col][col..n]) {
                    *x -= f * y;
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

/// Closest point of the affine hull of `pts[idx]` to the origin, as weights,
/// or `None` when the face is degenerate or the projection leaves the face.
fn face_projection(pts: &[Vec<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let p0 = &pts[idx[0]];
    let s = idx.len();
    if s == 1 {
        return Some(vec![1.0]);
    }
    let e: Vec<Vec<f64>> = idx[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let gram: Vec<Vec<f64>> = e.iter().map(|a| e.iter().map(|b| dot(a, b)).collect()).collect();
    let rhs: Vec<f64> = e.iter().map(|a| -dot(a, p0)).collect();
    let mu = solve_dense(gram, rhs)?;
    let mut w = Vec::with_capacity(s);
    w.push(1.0 - mu.iter().sum::<f64>());
    w.extend(mu);
    if w.iter().any(|&x| x < -1e-12) {
        return None;
    }
    for x in &mut w {
        *x = x.max(0.0);
    }
    let t: f64 = w.iter().sum();
    for x in &mut w {
        *x /= t;
    }
    Some(w)
}

/// Exact distance from the origin to `conv(pts)`, with a rigorous dual bound.
///
/// When the hull contains the origin up to rounding the result is distance
/// zero, bound zero, and the witnessing weights.
///
/// ```
/// use stablerank::certify::hull::origin_distance;
/// // the chord from 1 to i, as points of the plane
/// let d = origin_distance(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
/// assert!((d.distance - 0.5f64.sqrt()).abs() < 1e-15);
/// assert!(d.lower_bound <= d.distance && d.gap() < 1e-15);
/// ```
pub fn origin_distance(pts: &[Vec<f64>]) -> HullDistance {
    let k = pts.len();
    assert!(k > 0 && k < 16, "hull program needs 1 to 15 points");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let Some(w) = face_projection(pts, &idx) else { continue };
        let x = combine(pts, &idx, &w);
        let d = norm(&x);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            let mut full = vec![0.0; k];
            for (&i, &wi) in idx.iter().zip(&w) {
                full[i] = wi;
            }
            best = Some((d, full));
        }
    }
    let (distance, weights) = best.expect("singleton faces are always feasible");
    let all: Vec<usize> = (0..k).collect();
    let x = combine(pts, &all, &weights);
    let xn = norm(&x);
    let lower_bound = if xn > 0.0 {
        let m = pts.iter().map(|p| dot(p, &x) / xn).fold(f64::INFINITY, f64::min);
        m.clamp(0.0, distance)
    } else {
        0.0
    };
    if lower_bound == 0.0 && distance <= 1e-15 * pts.iter().map(|p| norm(p)).fold(0.0, f64::max) {
        return HullDistance { distance: 0.0, lower_bound: 0.0, weights };
    }
    HullDistance { distance, lower_bound, weights }
}

fn combine(pts: &[Vec<f64>], idx: &[usize], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; pts[0].len()];
    for (&i, &wi) in idx.iter().zip(w) {
        for (xc, pc) in x.iter_mut().zip(&pts[i]) {
            *xc += wi * pc;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: dense barycentric grid.
    fn grid_min(pts: &[Vec<f64>], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        match pts.len() {
            1 => best = norm(&pts[0]),
            2 => {
                for i in 0..=steps {
                    let t = i as f64 / steps as f64;
                    best = best.min(norm(&combine(pts, &[0, 1], &[1.0 - t, t])));
                }
            }
            3 => {
                for i in 0..=steps {
                    for j in 0..=steps - i {
                        let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                        best = best.min(norm(&combine(pts, &[0, 1, 2], &[a, b, 1.0 - a - b])));
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }

    #[test]
    fn segment_through_origin() {
        let d = origin_distance(&[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(d.distance, 0.0);
        assert_eq!(d.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn triangle_containing_origin_gives_zero() {
        let d = origin_distance(&[vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]);
        assert_eq!(d.distance, 0.0);
        assert_eq!(d.lower_bound, 0.0);
    }

    #[test]
    fn vertex_is_closest() {
        let d = origin_distance(&[vec![2.0, 1.0], vec![3.0, 0.0], vec![2.0, 3.0]]);
        assert!((d.distance - 5f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn matches_grid_oracle(raw in proptest::collection::vec(-2.0f64..2.0, 12), k in 1usize..=3) {
            let pts: Vec<Vec<f64>> = raw.chunks(4).take(k).map(|c| c.to_vec()).collect();
            let d = origin_distance(&pts);
            let g = grid_min(&pts, 300);
            prop_assert!(d.lower_bound <= d.distance);
            prop_assert!(d.distance <= g + 1e-12);
            prop_assert!(g - d.distance < 0.05);
            prop_assert!(d.gap() <= 1e-10);
        }
    }
}
