//! Finite simplicial complexes used as desk-scale models of a compact space.
//!
//! A [`SimplicialMesh`] is a pure complex: every top simplex has
//! `dimension + 1` vertices. Builders cover the interval, circle, unit square,
//! flat torus and icosahedral sphere. Refinement is midpoint subdivision
//! (red refinement, with green closure when only some triangles are refined)
//! and comes with a [`TransferMap`] that moves piecewise-linear data to the
//! finer mesh without changing its values anywhere.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeTag {
    Interval,
    Circle,
    Rectangle,
    Torus,
    Sphere,
    Custom,
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShapeTag::Interval => "interval",
            ShapeTag::Circle => "circle",
            ShapeTag::Rectangle => "rectangle",
            ShapeTag::Torus => "torus",
            ShapeTag::Sphere => "sphere",
            ShapeTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for ShapeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interval" => ShapeTag::Interval,
            "circle" => ShapeTag::Circle,
            "rectangle" => ShapeTag::Rectangle,
            "torus" => ShapeTag::Torus,
            "sphere" => ShapeTag::Sphere,
            "custom" => ShapeTag::Custom,
            other => return Err(Error::UnsupportedShape(other.to_string())),
        })
    }
}

/// A point of the complex, given by a top simplex and barycentric weights.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshPoint {
    pub simplex: usize,
    pub bary: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMesh")]
pub struct SimplicialMesh {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    shape: ShapeTag,
    resolution: usize,
}

#[derive(Deserialize)]
struct RawMesh {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    shape: ShapeTag,
    resolution: usize,
}

impl TryFrom<RawMesh> for SimplicialMesh {
    type Error = Error;

    fn try_from(r: RawMesh) -> Result<Self> {
        let mesh = SimplicialMesh {
            dimension: r.dimension,
            vertices: r.vertices,
            simplices: r.simplices,
            shape: r.shape,
            resolution: r.resolution,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

impl SimplicialMesh {
    /// Validates and wraps a custom complex.
    pub fn new(dimension: usize, vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let mesh = SimplicialMesh {
            dimension,
            vertices,
            simplices,
            shape: ShapeTag::Custom,
            resolution: 1,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        if self.simplices.is_empty() {
            return Err(Error::InvalidMesh("no simplices".into()));
        }
        if let Some(first) = self.vertices.first() {
            let ambient = first.len();
            if self.vertices.iter().any(|v| v.len() != ambient) {
                return Err(Error::InvalidMesh("vertices differ in ambient dimension".into()));
            }
            if self.vertices.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
            }
        }
        let mut used = vec![false; self.vertices.len()];
        let mut seen = BTreeSet::new();
        for (k, s) in self.simplices.iter().enumerate() {
            if s.len() != self.dimension + 1 {
                return Err(Error::InvalidMesh(format!(
                    "simplex {k} has {} vertices, expected {}",
                    s.len(),
                    self.dimension + 1
                )));
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::InvalidMesh(format!("simplex {k} repeats a vertex")));
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= self.vertices.len()) {
                return Err(Error::InvalidMesh(format!("simplex {k} references vertex {bad}")));
            }
            if !seen.insert(sorted) {
                return Err(Error::InvalidMesh(format!("simplex {k} is duplicated")));
            }
            for &v in s {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} belongs to no simplex")));
        }
        Ok(())
    }

    /// Builds one of the supported shapes.
    pub fn build(shape: ShapeTag, resolution: usize) -> Result<Self> {
        match shape {
            ShapeTag::Interval => Self::interval(resolution),
            ShapeTag::Circle => Self::circle(resolution),
            ShapeTag::Rectangle => Self::rectangle(resolution),
            ShapeTag::Torus => Self::torus(resolution),
            ShapeTag::Sphere => Self::sphere(resolution),
            ShapeTag::Custom => Err(Error::UnsupportedShape("custom has no builder".into())),
        }
    }

    /// `[0, 1]` cut into `n` equal segments.
    pub fn interval(n: usize) -> Result<Self> {
        check_resolution(n, 1)?;
        let vertices = (0..=n).map(|i| vec![i as f64 / n as f64]).collect();
        let simplices = (0..n).map(|i| vec![i, i + 1]).collect();
        Ok(SimplicialMesh {
            dimension: 1,
            vertices,
            simplices,
            shape: ShapeTag::Interval,
            resolution: n,
        })
    }

    /// Regular `n`-gon on the unit circle. Needs `n >= 3` to be a simplicial circle.
    pub fn circle(n: usize) -> Result<Self> {
        check_resolution(n, 3)?;
        let vertices = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let simplices = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        Ok(SimplicialMesh {
            dimension: 1,
            vertices,
            simplices,
            shape: ShapeTag::Circle,
            resolution: n,
        })
    }

    /// `[0, 1]^2` with an `n x n` grid, each cell split along its diagonal.
    pub fn rectangle(n: usize) -> Result<Self> {
        check_resolution(n, 1)?;
        let idx = |i: usize, j: usize| i + j * (n + 1);
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(vec![i as f64 / n as f64, j as f64 / n as f64]);
            }
        }
        let mut simplices = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                simplices.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                simplices.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Ok(SimplicialMesh {
            dimension: 2,
            vertices,
            simplices,
            shape: ShapeTag::Rectangle,
            resolution: n,
        })
    }

    /// The square grid with opposite sides identified, embedded as a ring torus
    /// in R^3. Needs `n >= 3`.
    pub fn torus(n: usize) -> Result<Self> {
        check_resolution(n, 3)?;
        let idx = |i: usize, j: usize| (i % n) + (j % n) * n;
        let (major, minor) = (2.0, 1.0);
        let mut vertices = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let u = std::f64::consts::TAU * i as f64 / n as f64;
                let v = std::f64::consts::TAU * j as f64 / n as f64;
                vertices.push(vec![
                    (major + minor * v.cos()) * u.cos(),
                    (major + minor * v.cos()) * u.sin(),
                    minor * v.sin(),
                ]);
            }
        }
        let mut simplices = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                simplices.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                simplices.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Ok(SimplicialMesh {
            dimension: 2,
            vertices,
            simplices,
            shape: ShapeTag::Torus,
            resolution: n,
        })
    }

    /// Icosahedron subdivided `n` times, vertices projected to the unit sphere.
    pub fn sphere(n: usize) -> Result<Self> {
        check_resolution(n, 1)?;
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec<f64>> = [
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ]
        .iter()
        .map(|p| project_unit(p.to_vec()))
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..n {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec<f64>>| -> usize {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    let p = vertices[a].iter().zip(&vertices[b]).map(|(x, y)| 0.5 * (x + y)).collect();
                    vertices.push(project_unit(p));
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for &[a, b, c] in &faces {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.push([a, ab, ca]);
                next.push([ab, b, bc]);
                next.push([ca, bc, c]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        Ok(SimplicialMesh {
            dimension: 2,
            vertices,
            simplices: faces.into_iter().map(|f| f.to_vec()).collect(),
            shape: ShapeTag::Sphere,
            resolution: n,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn shape(&self) -> ShapeTag {
        self.shape
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    /// Sorted, deduplicated list of edges of all top simplices.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut set = BTreeSet::new();
        for s in &self.simplices {
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    set.insert([s[a].min(s[b]), s[a].max(s[b])]);
                }
            }
        }
        set.into_iter().collect()
    }

    /// For 1- and 2-dimensional meshes: no oriented codimension-one face
    /// appears twice with the same orientation.
    pub fn is_consistently_oriented(&self) -> bool {
        match self.dimension {
            1 => {
                let mut starts = HashMap::new();
                let mut ends = HashMap::new();
                for s in &self.simplices {
                    *starts.entry(s[0]).or_insert(0) += 1;
                    *ends.entry(s[1]).or_insert(0) += 1;
                }
                starts.values().all(|&c| c <= 1) && ends.values().all(|&c| c <= 1)
            }
            2 => {
                let mut directed = BTreeSet::new();
                for s in &self.simplices {
                    for k in 0..3 {
                        if !directed.insert((s[k], s[(k + 1) % 3])) {
                            return false;
                        }
                    }
                }
                true
            }
            _ => true,
        }
    }

    /// Ambient coordinates of a point.
    pub fn point_coords(&self, p: &MeshPoint) -> Vec<f64> {
        let s = &self.simplices[p.simplex];
        let dim = self.vertices.first().map_or(0, |v| v.len());
        let mut out = vec![0.0; dim];
        for (&v, &w) in s.iter().zip(&p.bary) {
            for (o, x) in out.iter_mut().zip(&self.vertices[v]) {
                *o += w * x;
            }
        }
        out
    }

    /// Random point: uniform top simplex, then uniform barycentric weights.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> MeshPoint {
        let simplex = rng.gen_range(0..self.simplices.len());
        let mut bary: Vec<f64> = (0..=self.dimension)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = bary.iter().sum();
        for b in &mut bary {
            *b /= total;
        }
        MeshPoint { simplex, bary }
    }

    /// Midpoint subdivision of all or some top simplices.
    ///
    /// Returns the finer mesh together with the map carrying piecewise-linear
    /// data across. Subset refinement of triangles adds green bisections around
    /// the refined region so the result stays conforming.
    pub fn refine(&self, strategy: &Refinement) -> Result<(Arc<SimplicialMesh>, TransferMap)> {
        let selected: Vec<bool> = match strategy {
            Refinement::Global => vec![true; self.simplices.len()],
            Refinement::Subset(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidParameter("empty simplex subset".into()));
                }
                let mut sel = vec![false; self.simplices.len()];
                for &k in list {
                    if k >= sel.len() {
                        return Err(Error::InvalidParameter(format!("simplex {k} out of range")));
                    }
                    sel[k] = true;
                }
                sel
            }
        };
        let mut builder = RefineBuilder::new(self);
        match self.dimension {
            0 => {
                for k in 0..self.simplices.len() {
                    builder.keep(k);
                }
            }
            1 => {
                for (k, &sel) in selected.iter().enumerate() {
                    if sel {
                        builder.split_segment(k);
                    } else {
                        builder.keep(k);
                    }
                }
            }
            2 => {
                let mut marked: BTreeSet<[usize; 2]> = BTreeSet::new();
                let edge = |a: usize, b: usize| [a.min(b), a.max(b)];
                for (k, &sel) in selected.iter().enumerate() {
                    if sel {
                        let s = &self.simplices[k];
                        for i in 0..3 {
                            marked.insert(edge(s[i], s[(i + 1) % 3]));
                        }
                    }
                }
                // Close: a triangle with two split edges is split fully.
                loop {
                    let mut changed = false;
                    for s in &self.simplices {
                        let count = (0..3).filter(|&i| marked.contains(&edge(s[i], s[(i + 1) % 3]))).count();
                        if count == 2 {
                            for i in 0..3 {
                                changed |= marked.insert(edge(s[i], s[(i + 1) % 3]));
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                for k in 0..self.simplices.len() {
                    let s = &self.simplices[k];
                    let split: Vec<usize> = (0..3)
                        .filter(|&i| marked.contains(&edge(s[i], s[(i + 1) % 3])))
                        .collect();
                    match split.len() {
                        0 => builder.keep(k),
                        1 => builder.bisect_triangle(k, split[0]),
                        _ => builder.split_triangle(k),
                    }
                }
            }
            d => {
                return Err(Error::Unsupported(format!("refinement of {d}-dimensional meshes")));
            }
        }
        let resolution = match strategy {
            Refinement::Global => self.resolution * 2,
            Refinement::Subset(_) => self.resolution,
        };
        let mesh = Arc::new(SimplicialMesh {
            dimension: self.dimension,
            vertices: builder.vertices,
            simplices: builder.simplices,
            shape: self.shape,
            resolution,
        });
        let mut children_of = vec![Vec::new(); self.simplices.len()];
        for (c, child) in builder.children.iter().enumerate() {
            children_of[child.parent].push(c);
        }
        Ok((
            mesh.clone(),
            TransferMap {
                target: mesh,
                sources: builder.sources,
                children: builder.children,
                children_of,
            },
        ))
    }
}

fn check_resolution(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidResolution { min, got: n })
    } else {
        Ok(())
    }
}

fn project_unit(p: Vec<f64>) -> Vec<f64> {
    let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    p.into_iter().map(|x| x / r).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    Global,
    Subset(Vec<usize>),
}

/// A child simplex of the refined mesh and where its corners sit in the parent.
#[derive(Clone, Debug)]
pub struct ChildSimplex {
    pub parent: usize,
    /// Barycentric coordinates (w.r.t. the parent) of each child corner.
    pub corners: Vec<Vec<f64>>,
}

/// Carries vertex data from a mesh to its refinement.
#[derive(Clone, Debug)]
pub struct TransferMap {
    target: Arc<SimplicialMesh>,
    /// Each new vertex as a convex combination of old vertices.
    sources: Vec<Vec<(usize, f64)>>,
    children: Vec<ChildSimplex>,
    children_of: Vec<Vec<usize>>,
}

impl TransferMap {
    pub fn target(&self) -> &Arc<SimplicialMesh> {
        &self.target
    }

    pub fn children(&self) -> &[ChildSimplex] {
        &self.children
    }

    /// Interpolates old vertex values onto the new vertices.
    pub fn transfer_values<T>(&self, old: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        self.sources
            .iter()
            .map(|src| {
                let (v0, w0) = src[0];
                src[1..].iter().fold(old[v0] * w0, |acc, &(v, w)| acc + old[v] * w)
            })
            .collect()
    }

    /// Expresses a point of the old mesh as a point of the refined mesh.
    pub fn locate(&self, p: &MeshPoint) -> MeshPoint {
        let mut best: Option<(f64, MeshPoint)> = None;
        for &c in &self.children_of[p.simplex] {
            let corners = &self.children[c].corners;
            let lambda = solve_bary(corners, &p.bary);
            let worst = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|(w, _)| worst > *w) {
                best = Some((worst, MeshPoint { simplex: c, bary: lambda }));
            }
        }
        let (_, mut point) = best.expect("every parent has a child");
        for b in &mut point.bary {
            *b = b.max(0.0);
        }
        let total: f64 = point.bary.iter().sum();
        for b in &mut point.bary {
            *b /= total;
        }
        point
    }
}

/// Solves `sum_i lambda_i corners[i] = target` with Gaussian elimination.
fn solve_bary(corners: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = corners.len();
    // rows: barycentric component r, columns: corner i
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row: Vec<f64> = corners.iter().map(|c| c[r]).collect();
            row.push(target[r]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        for row in 0..n {
            if row != col {
                let factor = a[row][col] / p;
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, y) in a[row][col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                        *x -= factor * y;
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

struct RefineBuilder<'a> {
    parent: &'a SimplicialMesh,
    vertices: Vec<Vec<f64>>,
    sources: Vec<Vec<(usize, f64)>>,
    simplices: Vec<Vec<usize>>,
    children: Vec<ChildSimplex>,
    midpoints: HashMap<(usize, usize), usize>,
}

impl<'a> RefineBuilder<'a> {
    fn new(parent: &'a SimplicialMesh) -> Self {
        RefineBuilder {
            parent,
            vertices: parent.vertices.clone(),
            sources: (0..parent.vertices.len()).map(|v| vec![(v, 1.0)]).collect(),
            simplices: Vec::new(),
            children: Vec::new(),
            midpoints: HashMap::new(),
        }
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let p = self.parent.vertices[a]
            .iter()
            .zip(&self.parent.vertices[b])
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        self.vertices.push(p);
        self.sources.push(vec![(a, 0.5), (b, 0.5)]);
        let m = self.vertices.len() - 1;
        self.midpoints.insert(key, m);
        m
    }

    fn unit(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.parent.dimension + 1];
        e[i] = 1.0;
        e
    }

    fn half(&self, i: usize, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.parent.dimension + 1];
        e[i] = 0.5;
        e[j] = 0.5;
        e
    }

    fn push(&mut self, parent: usize, verts: Vec<usize>, corners: Vec<Vec<f64>>) {
        self.simplices.push(verts);
        self.children.push(ChildSimplex { parent, corners });
    }

    fn keep(&mut self, k: usize) {
        let s = self.parent.simplices[k].clone();
        let corners = (0..s.len()).map(|i| self.unit(i)).collect();
        self.push(k, s, corners);
    }

    fn split_segment(&mut self, k: usize) {
        let s = self.parent.simplices[k].clone();
        let m = self.midpoint(s[0], s[1]);
        let (e0, e1, h) = (self.unit(0), self.unit(1), self.half(0, 1));
        self.push(k, vec![s[0], m], vec![e0, h.clone()]);
        self.push(k, vec![m, s[1]], vec![h, e1]);
    }

    fn split_triangle(&mut self, k: usize) {
        let s = self.parent.simplices[k].clone();
        let (a, b, c) = (s[0], s[1], s[2]);
        let ab = self.midpoint(a, b);
        let bc = self.midpoint(b, c);
        let ca = self.midpoint(c, a);
        let (ea, eb, ec) = (self.unit(0), self.unit(1), self.unit(2));
        let (hab, hbc, hca) = (self.half(0, 1), self.half(1, 2), self.half(2, 0));
        self.push(k, vec![a, ab, ca], vec![ea, hab.clone(), hca.clone()]);
        self.push(k, vec![ab, b, bc], vec![hab.clone(), eb, hbc.clone()]);
        self.push(k, vec![ca, bc, c], vec![hca.clone(), hbc.clone(), ec]);
        self.push(k, vec![ab, bc, ca], vec![hab, hbc, hca]);
    }

    /// Splits the edge starting at local corner `i` and joins its midpoint to
    /// the opposite corner.
    fn bisect_triangle(&mut self, k: usize, i: usize) {
        let s = self.parent.simplices[k].clone();
        let (i0, i1, i2) = (i, (i + 1) % 3, (i + 2) % 3);
        let m = self.midpoint(s[i0], s[i1]);
        let h = self.half(i0, i1);
        let (e0, e1, e2) = (self.unit(i0), self.unit(i1), self.unit(i2));
        self.push(k, vec![s[i0], m, s[i2]], vec![e0, h.clone(), e2.clone()]);
        self.push(k, vec![m, s[i1], s[i2]], vec![h, e1, e2]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interval_counts() {
        let m = SimplicialMesh::interval(4).unwrap();
        assert_eq!(m.num_vertices(), 5);
        assert_eq!(m.num_simplices(), 4);
        assert_eq!(m.dimension(), 1);
    }

    #[test]
    fn circle_counts() {
        let m = SimplicialMesh::circle(3).unwrap();
        assert_eq!(m.num_vertices(), 3);
        assert_eq!(m.num_simplices(), 3);
        let mut degree = [0; 3];
        for s in m.simplices() {
            for &v in s {
                degree[v] += 1;
            }
        }
        assert!(degree.iter().all(|&d| d == 2));
        assert!(m.is_consistently_oriented());
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(matches!(SimplicialMesh::interval(0), Err(Error::InvalidResolution { .. })));
        assert!(matches!(SimplicialMesh::circle(2), Err(Error::InvalidResolution { .. })));
        assert!("klein".parse::<ShapeTag>().is_err());
        assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![1.0]], vec![vec![0, 0]]).is_err());
        assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![1.0]], vec![vec![0, 2]]).is_err());
        assert!(SimplicialMesh::new(1, vec![vec![0.0], vec![1.0], vec![2.0]], vec![vec![0, 1]]).is_err());
        assert!(SimplicialMesh::new(2, vec![vec![0.0], vec![1.0]], vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn builders_are_oriented() {
        for m in [
            SimplicialMesh::rectangle(3).unwrap(),
            SimplicialMesh::torus(4).unwrap(),
            SimplicialMesh::sphere(2).unwrap(),
        ] {
            assert!(m.is_consistently_oriented(), "{}", m.shape());
        }
    }

    #[test]
    fn single_triangle_splits_in_four() {
        let m = SimplicialMesh::new(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let (fine, map) = m.refine(&Refinement::Global).unwrap();
        assert_eq!(fine.num_simplices(), 4);
        assert_eq!(fine.num_vertices(), 6);
        assert!(map.children().iter().all(|c| c.parent == 0));
        // children areas add up to the parent area
        let area = |s: &Vec<usize>| {
            let p: Vec<&Vec<f64>> = s.iter().map(|&v| &fine.vertices()[v]).collect();
            0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
        };
        let total: f64 = fine.simplices().iter().map(area).sum();
        assert!((total - 0.5).abs() < 1e-15);
        assert!(fine.simplices().iter().all(|s| area(s) > 0.0));
    }

    #[test]
    fn subset_refinement_stays_conforming() {
        let m = SimplicialMesh::rectangle(4).unwrap();
        let (fine, _) = m.refine(&Refinement::Subset(vec![5, 12])).unwrap();
        // conforming: every interior edge is shared by exactly two triangles
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for s in fine.simplices() {
            for i in 0..3 {
                let (a, b) = (s[i], s[(i + 1) % 3]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        assert!(count.values().all(|&c| c <= 2));
        // a hanging node would be a vertex lying strictly inside some edge
        for (v, p) in fine.vertices().iter().enumerate() {
            for [a, b] in count.keys() {
                if *a == v || *b == v {
                    continue;
                }
                let (pa, pb) = (&fine.vertices()[*a], &fine.vertices()[*b]);
                let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
                assert!(
                    (mid[0] - p[0]).abs() > 1e-12 || (mid[1] - p[1]).abs() > 1e-12,
                    "hanging vertex {v}"
                );
            }
        }
        assert!(fine.is_consistently_oriented());
        assert!(m.refine(&Refinement::Subset(vec![])).is_err());
    }

    #[test]
    fn locate_round_trips_coordinates() {
        let m = SimplicialMesh::rectangle(3).unwrap();
        let (fine, map) = m.refine(&Refinement::Subset(vec![0, 7])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = m.sample_point(&mut rng);
            let q = map.locate(&p);
            let (a, b) = (m.point_coords(&p), fine.point_coords(&q));
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }
}
