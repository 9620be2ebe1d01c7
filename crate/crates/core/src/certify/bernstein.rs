//! Bernstein enclosures of `|p|^2` for degree-two tuple expressions.
//!
//! On a simplex each component is `l^T B l` in barycentric coordinates `l`.
//! The squared magnitude is a degree-four form whose Bernstein coefficients
//! are averages of `B_ij conj(B_kl)` over the orderings of each multi-index.
//! The smallest coefficient bounds `|p|^2` from below on the simplex, and the
//! corner coefficients are the exact corner values. Subdividing a piece maps
//! `B` to `Q^T B Q`, where the columns of `Q` are the child corners in the
//! parent's barycentric coordinates.

use std::sync::OnceLock;

use crate::scalar::C64;

use super::expr::QuadForm;
use super::hull::origin_distance;

/// Degree-four multi-indices of `d + 1` variables with the ordered index
/// quadruples realizing each.
struct Quartic {
    classes: Vec<Vec<[usize; 4]>>,
    corner: Vec<Option<usize>>,
}

fn build_quartic(k: usize) -> Quartic {
    let mut classes: Vec<(Vec<usize>, Vec<[usize; 4]>)> = Vec::new();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                for d in 0..k {
                    let mut key = vec![0usize; k];
                    for &i in &[a, b, c, d] {
                        key[i] += 1;
                    }
                    match classes.iter_mut().find(|(kk, _)| *kk == key) {
                        Some((_, v)) => v.push([a, b, c, d]),
                        None => classes.push((key, vec![[a, b, c, d]])),
                    }
                }
            }
        }
    }
    let corner = classes.iter().map(|(key, _)| key.iter().position(|&x| x == 4)).collect();
    Quartic { classes: classes.into_iter().map(|(_, v)| v).collect(), corner }
}

fn quartic(k: usize) -> &'static Quartic {
    static TABLES: [OnceLock<Quartic>; 5] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((1..=5).contains(&k), "Bernstein tables cover simplices of dimension at most 4");
    TABLES[k - 1].get_or_init(|| build_quartic(k))
}

/// Lower bound data for `|p|^2` on one piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PieceBound {
    /// Smallest Bernstein coefficient of `|p|^2` (may be negative).
    pub min_coefficient: f64,
    /// Smallest corner value of `|p|^2`; an upper bound for its minimum.
    pub min_corner: f64,
    /// Dual lower bound for the distance from the origin to the convex hull of
    /// the degree-two control points, which contains the image of the piece.
    pub net_distance: f64,
}

impl PieceBound {
    /// Certified lower bound for `|p|` on the piece: the better of the two
    /// enclosures.
    pub fn magnitude_lower(&self) -> f64 {
        self.min_coefficient.max(0.0).sqrt().max(self.net_distance)
    }
}

/// Control points `B_ij`, `i <= j`, flattened to real coordinates.
fn control_net(forms: &[QuadForm]) -> Vec<Vec<f64>> {
    let k = forms[0].len();
    let mut pts = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            pts.push(forms.iter().flat_map(|b| [b[i][j].re, b[i][j].im]).collect());
        }
    }
    pts
}

/// Bernstein bound of `sum_c |l^T B_c l|^2` over the simplex.
pub fn piece_bound(forms: &[QuadForm]) -> PieceBound {
    let k = forms[0].len();
    let q = quartic(k);
    let mut min_coefficient = f64::INFINITY;
    let mut min_corner = f64::INFINITY;
    for (cls, corner) in q.classes.iter().zip(&q.corner) {
        let mut s = 0.0;
        #[cfg(feature = "strict-rounding")]
        let mut abs = 0.0;
        for b in forms {
            for &[i, j, l, m] in cls {
                let t = b[i][j] * b[l][m].conj();
                s += t.re;
                #[cfg(feature = "strict-rounding")]
                {
                    abs += b[i][j].norm() * b[l][m].norm();
                }
            }
        }
        let c = s / cls.len() as f64;
        // a priori bound for the products and the sum above
        #[cfg(feature = "strict-rounding")]
        let c = c - ((forms.len() * cls.len()) as f64 + 8.0) * 2.0 * f64::EPSILON * abs / cls.len() as f64;
        if corner.is_some() {
            min_corner = min_corner.min(c.max(0.0));
        }
        min_coefficient = min_coefficient.min(c);
    }
    let net_distance = if k <= 3 { origin_distance(&control_net(forms)).lower_bound } else { 0.0 };
    #[cfg(feature = "strict-rounding")]
    let net_distance = (net_distance - 16.0 * f64::EPSILON * control_net(forms).iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()))).max(0.0);
    PieceBound { min_coefficient, min_corner, net_distance }
}

/// Child pieces of a simplex with `k` corners, each as a list of corner
/// weight vectors in the parent's barycentric coordinates.
pub fn child_corners(k: usize) -> Vec<Vec<Vec<f64>>> {
    let e = |i: usize| {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        v
    };
    let mid = |i: usize, j: usize| {
        let mut v = vec![0.0; k];
        v[i] = 0.5;
        v[j] = 0.5;
        v
    };
    match k {
        2 => vec![vec![e(0), mid(0, 1)], vec![mid(0, 1), e(1)]],
        3 => vec![
            vec![e(0), mid(0, 1), mid(0, 2)],
            vec![mid(0, 1), e(1), mid(1, 2)],
            vec![mid(0, 2), mid(1, 2), e(2)],
            vec![mid(0, 1), mid(1, 2), mid(0, 2)],
        ],
        _ => {
            // bisect the edge (0, k-1); cycling the corners of each child keeps
            // successive bisections on different edges
            let m = mid(0, k - 1);
            let mut a: Vec<Vec<f64>> = (0..k - 1).map(e).collect();
            a.push(m.clone());
            let mut b: Vec<Vec<f64>> = vec![m];
            b.extend((1..k).map(e));
            a.rotate_left(1);
            b.rotate_left(1);
            vec![a, b]
        }
    }
}

/// `Q^T B Q` for a child with corner weights `q` (rows are corners).
pub fn subdivide_form(b: &QuadForm, q: &[Vec<f64>]) -> QuadForm {
    let k = q.len();
    // bq[i][l] = sum_j B[i][j] q[l][j]
    let bq: Vec<Vec<C64>> = (0..k)
        .map(|i| (0..k).map(|l| (0..k).map(|j| b[i][j] * q[l][j]).sum()).collect())
        .collect();
    (0..k)
        .map(|kk| (0..k).map(|l| (0..k).map(|i| bq[i][l] * q[kk][i]).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(b: &QuadForm, l: &[f64]) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..l.len() {
            for j in 0..l.len() {
                s += b[i][j] * l[i] * l[j];
            }
        }
        s
    }

    #[test]
    fn table_sizes() {
        // number of degree-4 monomials in k variables is C(k+3, 4)
        assert_eq!(quartic(2).classes.len(), 5);
        assert_eq!(quartic(3).classes.len(), 15);
        assert_eq!(quartic(4).classes.len(), 35);
        assert_eq!(quartic(3).classes.iter().map(|c| c.len()).sum::<usize>(), 81);
    }

    #[test]
    fn parabola_bound_and_corners() {
        // x (1 - x) with x = l_1: B = [[0, 1/2], [1/2, 0]]
        let b = vec![vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)], vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0)]];
        let pb = piece_bound(&[b]);
        assert_eq!(pb.min_corner, 0.0);
        assert_eq!(pb.min_coefficient, 0.0);
        assert_eq!(pb.magnitude_lower(), 0.0);
    }

    #[test]
    fn subdivision_preserves_values() {
        let b: QuadForm = vec![
            vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.2), C64::new(0.7, 0.0)],
            vec![C64::new(-0.3, 0.2), C64::new(0.1, -1.0), C64::new(0.4, 0.4)],
            vec![C64::new(0.7, 0.0), C64::new(0.4, 0.4), C64::new(-2.0, 0.3)],
        ];
        for child in child_corners(3) {
            let c = subdivide_form(&b, &child);
            let mu = [0.2, 0.3, 0.5];
            let l: Vec<f64> = (0..3).map(|j| (0..3).map(|kk| mu[kk] * child[kk][j]).sum()).collect();
            assert!((eval(&c, &mu) - eval(&b, &l)).norm() < 1e-14);
        }
    }

    #[test]
    fn bisection_children_cover_tetrahedron() {
        let ch = child_corners(4);
        assert_eq!(ch.len(), 2);
        for c in &ch {
            assert_eq!(c.len(), 4);
            for row in c {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
        }
    }
}
