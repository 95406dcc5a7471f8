//! Rectangular quad grids and discrete calculus on them.
//!
//! Vertices are index pairs `(m, n)` with `0 <= m < rows` and `0 <= n < cols`.
//! Edges in the `m` direction are called horizontal and carry the labels
//! `alpha[m]`; edges in the `n` direction are vertical and carry `beta[n]`.
//! Every face is the counterclockwise quad
//! `(i, j, k, l) = ((m,n), (m+1,n), (m+1,n+1), (m,n+1))`, so `(ij)` is
//! horizontal and `(jk)` is vertical.
//!
//! Vertex functions are stored with `m` running fastest: the linear index of
//! `(m, n)` is `n * rows + m`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub m: usize,
    pub n: usize,
}

impl Vertex {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Step in `m`; labelled by `alpha`.
    Horizontal,
    /// Step in `n`; labelled by `beta`.
    Vertical,
}

/// Oriented edge between lattice neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
}

impl Edge {
    pub const fn new(from: Vertex, to: Vertex) -> Self {
        Self { from, to }
    }

    pub fn horizontal(m: usize, n: usize) -> Self {
        Self::new(Vertex::new(m, n), Vertex::new(m + 1, n))
    }

    pub fn vertical(m: usize, n: usize) -> Self {
        Self::new(Vertex::new(m, n), Vertex::new(m, n + 1))
    }

    pub fn reversed(self) -> Self {
        Self::new(self.to, self.from)
    }

    pub fn direction(&self) -> Direction {
        if self.from.n == self.to.n {
            Direction::Horizontal
        } else {
            Direction::Vertical
        }
    }

    /// True when the edge points towards increasing `m` or `n`.
    pub fn is_forward(&self) -> bool {
        self.to.m > self.from.m || self.to.n > self.from.n
    }

    /// The same edge with forward orientation.
    pub fn canonical(self) -> Self {
        if self.is_forward() {
            self
        } else {
            self.reversed()
        }
    }

    fn is_lattice_step(&self) -> bool {
        let dm = self.from.m.abs_diff(self.to.m);
        let dn = self.from.n.abs_diff(self.to.n);
        dm + dn == 1
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// A face, named by its corner with the smallest indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub m: usize,
    pub n: usize,
}

impl Face {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    /// `[i, j, k, l]` in counterclockwise order.
    pub fn vertices(&self) -> [Vertex; 4] {
        let (m, n) = (self.m, self.n);
        [
            Vertex::new(m, n),
            Vertex::new(m + 1, n),
            Vertex::new(m + 1, n + 1),
            Vertex::new(m, n + 1),
        ]
    }

    /// `[(ij), (jk), (kl), (li)]`.
    pub fn edges(&self) -> [Edge; 4] {
        let [i, j, k, l] = self.vertices();
        [Edge::new(i, j), Edge::new(j, k), Edge::new(k, l), Edge::new(l, i)]
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.m, self.n)
    }
}

/// A simply connected rectangular grid of `rows x cols` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadGrid {
    rows: usize,
    cols: usize,
}

impl QuadGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::GridTooSmall { rows, cols });
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn face_count(&self) -> usize {
        (self.rows - 1) * (self.cols - 1)
    }

    pub fn edge_count(&self) -> usize {
        (self.rows - 1) * self.cols + self.rows * (self.cols - 1)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.m < self.rows && v.n < self.cols
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.contains(e.from) && self.contains(e.to) && e.is_lattice_step()
    }

    pub fn index(&self, v: Vertex) -> usize {
        debug_assert!(self.contains(v), "vertex {v} outside {}x{}", self.rows, self.cols);
        v.n * self.rows + v.m
    }

    /// Index of the unoriented edge among [`edges`](Self::edges).
    pub fn edge_index(&self, e: Edge) -> usize {
        let c = e.canonical();
        match c.direction() {
            Direction::Horizontal => c.from.n * (self.rows - 1) + c.from.m,
            Direction::Vertical => (self.rows - 1) * self.cols + c.from.n * self.rows + c.from.m,
        }
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::new(index % self.rows, index / self.rows)
    }

    pub fn far_corner(&self) -> Vertex {
        Vertex::new(self.rows - 1, self.cols - 1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(|i| self.vertex(i))
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        let rows = self.rows;
        (0..self.cols - 1).flat_map(move |n| (0..rows - 1).map(move |m| Face::new(m, n)))
    }

    /// All edges with forward orientation: horizontal edges first, then vertical.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let (rows, cols) = (self.rows, self.cols);
        let h = (0..cols).flat_map(move |n| (0..rows - 1).map(move |m| Edge::horizontal(m, n)));
        let v = (0..cols - 1).flat_map(move |n| (0..rows).map(move |m| Edge::vertical(m, n)));
        h.chain(v)
    }

    /// Faces containing the given vertex.
    pub fn faces_around(&self, v: Vertex) -> Vec<Face> {
        let mut out = Vec::with_capacity(4);
        for dm in 0..2 {
            for dn in 0..2 {
                if v.m >= dm && v.n >= dn && v.m - dm < self.rows - 1 && v.n - dn < self.cols - 1 {
                    out.push(Face::new(v.m - dm, v.n - dn));
                }
            }
        }
        out
    }

    /// Faces bordering the given (unoriented) edge.
    pub fn faces_of_edge(&self, e: Edge) -> Vec<Face> {
        let e = e.canonical();
        let (m, n) = (e.from.m, e.from.n);
        let mut out = Vec::with_capacity(2);
        match e.direction() {
            Direction::Horizontal => {
                if n + 1 < self.cols {
                    out.push(Face::new(m, n));
                }
                if n > 0 {
                    out.push(Face::new(m, n - 1));
                }
            }
            Direction::Vertical => {
                if m + 1 < self.rows {
                    out.push(Face::new(m, n));
                }
                if m > 0 {
                    out.push(Face::new(m - 1, n));
                }
            }
        }
        out
    }

    /// Spanning tree rooted at `root`, as edges oriented away from the root
    /// and listed so that every edge starts at an already reached vertex.
    ///
    /// The tree first runs along the root's `n`-line in both `m` directions,
    /// then up and down every `m`-column from there.
    pub fn spanning_tree(&self, root: Vertex) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.vertex_count() - 1);
        let n0 = root.n;
        for m in (root.m + 1)..self.rows {
            out.push(Edge::horizontal(m - 1, n0));
        }
        for m in (0..root.m).rev() {
            out.push(Edge::horizontal(m, n0).reversed());
        }
        for m in 0..self.rows {
            for n in (n0 + 1)..self.cols {
                out.push(Edge::vertical(m, n - 1));
            }
            for n in (0..n0).rev() {
                out.push(Edge::vertical(m, n).reversed());
            }
        }
        out
    }

    /// Forward edges not used by [`spanning_tree`](Self::spanning_tree).
    pub fn non_tree_edges(&self, root: Vertex) -> Vec<Edge> {
        (0..self.cols)
            .filter(|&n| n != root.n)
            .flat_map(|n| (0..self.rows - 1).map(move |m| Edge::horizontal(m, n)))
            .collect()
    }

    /// A monotone lattice path from `from` to `to`, moving along `m` first
    /// when `m_first` is set.
    pub fn monotone_path(&self, from: Vertex, to: Vertex, m_first: bool) -> Vec<Edge> {
        let mut path = Vec::new();
        let mut cur = from;
        let step_m = |cur: &mut Vertex, path: &mut Vec<Edge>| {
            while cur.m != to.m {
                let next = if to.m > cur.m {
                    Vertex::new(cur.m + 1, cur.n)
                } else {
                    Vertex::new(cur.m - 1, cur.n)
                };
                path.push(Edge::new(*cur, next));
                *cur = next;
            }
        };
        let step_n = |cur: &mut Vertex, path: &mut Vec<Edge>| {
            while cur.n != to.n {
                let next = if to.n > cur.n {
                    Vertex::new(cur.m, cur.n + 1)
                } else {
                    Vertex::new(cur.m, cur.n - 1)
                };
                path.push(Edge::new(*cur, next));
                *cur = next;
            }
        };
        if m_first {
            step_m(&mut cur, &mut path);
            step_n(&mut cur, &mut path);
        } else {
            step_n(&mut cur, &mut path);
            step_m(&mut cur, &mut path);
        }
        path
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }
}

/// A value attached to every vertex of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexField<T> {
    grid: QuadGrid,
    values: Vec<T>,
}

impl<T> VertexField<T> {
    pub fn from_fn(grid: QuadGrid, mut f: impl FnMut(Vertex) -> T) -> Self {
        let values = grid.vertices().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_vec(grid: QuadGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.vertex_count() {
            return Err(Error::LengthMismatch {
                what: "vertex values",
                expected: grid.vertex_count(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> QuadGrid {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.grid.vertex(i), v))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> VertexField<U> {
        VertexField {
            grid: self.grid,
            values: self.values.iter().map(&mut f).collect(),
        }
    }
}

impl<T> Index<Vertex> for VertexField<T> {
    type Output = T;
    fn index(&self, v: Vertex) -> &T {
        &self.values[self.grid.index(v)]
    }
}

impl<T> IndexMut<Vertex> for VertexField<T> {
    fn index_mut(&mut self, v: Vertex) -> &mut T {
        let i = self.grid.index(v);
        &mut self.values[i]
    }
}

/// A real edge-labelling, constant across opposite edges of each face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLabelling {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl EdgeLabelling {
    pub fn new(grid: QuadGrid, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        check_labels("alpha", &alpha, grid.rows() - 1)?;
        check_labels("beta", &beta, grid.cols() - 1)?;
        Ok(Self { alpha, beta })
    }

    pub fn uniform(grid: QuadGrid, horizontal: f64, vertical: f64) -> Result<Self> {
        Self::new(
            grid,
            vec![horizontal; grid.rows() - 1],
            vec![vertical; grid.cols() - 1],
        )
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Label of an edge, independent of orientation.
    pub fn label(&self, e: Edge) -> f64 {
        let e = e.canonical();
        match e.direction() {
            Direction::Horizontal => self.alpha[e.from.m],
            Direction::Vertical => self.beta[e.from.n],
        }
    }

    /// Applies `f` to every label.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            alpha: self.alpha.iter().map(|&a| f(a)).collect(),
            beta: self.beta.iter().map(|&b| f(b)).collect(),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = f64> + '_ {
        self.alpha.iter().chain(self.beta.iter()).copied()
    }

    pub fn fits(&self, grid: QuadGrid) -> bool {
        self.alpha.len() + 1 == grid.rows() && self.beta.len() + 1 == grid.cols()
    }
}

fn check_labels(which: &'static str, labels: &[f64], expected: usize) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::LengthMismatch {
            what: which,
            expected,
            actual: labels.len(),
        });
    }
    if let Some((index, &value)) = labels
        .iter()
        .enumerate()
        .find(|(_, v)| **v == 0.0 || !v.is_finite())
    {
        return Err(Error::BadLabel { which, index, value });
    }
    Ok(())
}

/// Values that can live on oriented edges.
pub trait EdgeValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl EdgeValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl EdgeValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// A discrete 1-form: `omega(ji) = -omega(ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeForm<V> {
    grid: QuadGrid,
    horizontal: Vec<V>,
    vertical: Vec<V>,
}

impl<V: EdgeValue> EdgeForm<V> {
    /// Builds a form from its values on forward-oriented edges.
    pub fn from_fn(grid: QuadGrid, mut f: impl FnMut(Edge) -> V) -> Self {
        let (rows, cols) = (grid.rows(), grid.cols());
        let mut horizontal = Vec::with_capacity((rows - 1) * cols);
        for n in 0..cols {
            for m in 0..rows - 1 {
                horizontal.push(f(Edge::horizontal(m, n)));
            }
        }
        let mut vertical = Vec::with_capacity(rows * (cols - 1));
        for n in 0..cols - 1 {
            for m in 0..rows {
                vertical.push(f(Edge::vertical(m, n)));
            }
        }
        Self {
            grid,
            horizontal,
            vertical,
        }
    }

    pub fn grid(&self) -> QuadGrid {
        self.grid
    }

    pub fn get(&self, e: Edge) -> V {
        let c = e.canonical();
        let rows = self.grid.rows();
        let value = match c.direction() {
            Direction::Horizontal => self.horizontal[c.from.n * (rows - 1) + c.from.m],
            Direction::Vertical => self.vertical[c.from.n * rows + c.from.m],
        };
        if c == e {
            value
        } else {
            -value
        }
    }

    /// Oriented sum `omega(ij) + omega(jk) + omega(kl) + omega(li)`.
    pub fn face_sum(&self, face: Face) -> V {
        face.edges()
            .iter()
            .fold(V::zero(), |acc, &e| acc + self.get(e))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .map(|v| v.magnitude())
            .fold(0.0, f64::max)
    }

    /// Worst face sum as `(face, |sum|)`.
    pub fn closedness(&self) -> (Face, f64) {
        self.grid
            .faces()
            .map(|f| (f, self.face_sum(f).magnitude()))
            .fold((Face::new(0, 0), 0.0), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Default closedness tolerance: `1e-10 * max(max |omega|, 1)`.
    pub fn default_tolerance(&self) -> f64 {
        CLOSED_REL_TOL * self.max_magnitude().max(1.0)
    }
}

pub const CLOSED_REL_TOL: f64 = 1e-10;

/// `(f_i + f_j) / 2`.
pub fn derived<T>(f: &VertexField<T>, e: Edge) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    (f[e.from] + f[e.to]) * 0.5
}

/// `f_j - f_i`.
pub fn derivative<T>(f: &VertexField<T>, e: Edge) -> T
where
    T: Copy + Sub<Output = T>,
{
    f[e.to] - f[e.from]
}

/// The exact 1-form `df`.
pub fn differential<V: EdgeValue>(f: &VertexField<V>) -> EdgeForm<V> {
    EdgeForm::from_fn(f.grid(), |e| derivative(f, e))
}

/// Integrates a closed 1-form from `root`, using the default scale-relative
/// tolerance for the closedness check.
pub fn integrate_edge_form<V: EdgeValue>(
    omega: &EdgeForm<V>,
    root: Vertex,
    root_value: V,
) -> Result<VertexField<V>> {
    integrate_edge_form_with(omega, root, root_value, omega.default_tolerance())
}

pub fn integrate_edge_form_with<V: EdgeValue>(
    omega: &EdgeForm<V>,
    root: Vertex,
    root_value: V,
    tolerance: f64,
) -> Result<VertexField<V>> {
    let grid = omega.grid();
    grid.check_vertex(root)?;
    let (face, residual) = omega.closedness();
    if residual > tolerance {
        return Err(Error::NotClosed { face, residual });
    }
    let mut values = vec![V::zero(); grid.vertex_count()];
    values[grid.index(root)] = root_value;
    for e in grid.spanning_tree(root) {
        values[grid.index(e.to)] = values[grid.index(e.from)] + omega.get(e);
    }
    VertexField::from_vec(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn edge_field(a: f64, b: f64) -> (VertexField<f64>, Edge) {
        let grid = QuadGrid::new(2, 2).unwrap();
        let f = VertexField::from_fn(grid, |v| match (v.m, v.n) {
            (0, 0) => a,
            (1, 0) => b,
            _ => 0.0,
        });
        (f, Edge::horizontal(0, 0))
    }

    #[test]
    fn derived_is_midpoint() {
        let (f, e) = edge_field(0.0, 2.0);
        assert_eq!(derived(&f, e), 1.0);
        assert_eq!(derived(&f, e.reversed()), 1.0);
        let (f, e) = edge_field(3.5, 3.5);
        assert_eq!(derived(&f, e), 3.5);

        let grid = QuadGrid::new(2, 2).unwrap();
        let g = VertexField::from_fn(grid, |v| if v.m == 0 { c(1.0, 0.0) } else { c(0.0, 1.0) });
        assert_eq!(derived(&g, Edge::horizontal(0, 0)), c(0.5, 0.5));
    }

    #[test]
    fn derivative_is_antisymmetric() {
        let (f, e) = edge_field(1.0, 3.0);
        assert_eq!(derivative(&f, e), 2.0);
        assert_eq!(derivative(&f, e.reversed()), -2.0);
        let (f, e) = edge_field(4.0, 4.0);
        assert_eq!(derivative(&f, e), 0.0);
    }

    #[test]
    fn leibniz_rule() {
        let (g, e) = edge_field(1.0, 2.0);
        let (h, _) = edge_field(3.0, 5.0);
        let gh = VertexField::from_fn(g.grid(), |v| g[v] * h[v]);
        let lhs = derivative(&gh, e);
        let rhs = derivative(&g, e) * derived(&h, e) + derived(&g, e) * derivative(&h, e);
        assert_eq!(lhs, 7.0);
        assert_eq!(rhs, 7.0);
    }

    #[test]
    fn grid_combinatorics() {
        let grid = QuadGrid::new(4, 3).unwrap();
        assert_eq!(grid.faces().count(), 6);
        assert_eq!(grid.edges().count(), grid.edge_count());
        assert_eq!(grid.edge_count(), 3 * 3 + 4 * 2);
        for i in 0..grid.vertex_count() {
            assert_eq!(grid.index(grid.vertex(i)), i);
        }
        assert!(QuadGrid::new(1, 5).is_err());
        // Every interior edge borders two faces, with opposite induced orientations.
        for (i, e) in grid.edges().enumerate() {
            assert_eq!(grid.edge_index(e), i);
            assert_eq!(grid.edge_index(e.reversed()), i);
            let faces = grid.faces_of_edge(e);
            let mut signs = Vec::new();
            for f in &faces {
                let fe = f.edges();
                if fe.contains(&e) {
                    signs.push(1);
                } else {
                    assert!(fe.contains(&e.reversed()));
                    signs.push(-1);
                }
            }
            if faces.len() == 2 {
                assert_eq!(signs.iter().sum::<i32>(), 0, "edge {e}");
            }
        }
    }

    #[test]
    fn spanning_tree_reaches_everything() {
        let grid = QuadGrid::new(5, 4).unwrap();
        for root in [Vertex::new(0, 0), Vertex::new(2, 1), Vertex::new(4, 3)] {
            let tree = grid.spanning_tree(root);
            assert_eq!(tree.len(), grid.vertex_count() - 1);
            let mut seen = vec![false; grid.vertex_count()];
            seen[grid.index(root)] = true;
            for e in tree {
                assert!(seen[grid.index(e.from)], "edge {e} starts unreached");
                assert!(!seen[grid.index(e.to)], "edge {e} revisits");
                seen[grid.index(e.to)] = true;
            }
            assert!(seen.iter().all(|&s| s));
            let extra = grid.non_tree_edges(root).len();
            assert_eq!(extra + grid.vertex_count() - 1, grid.edge_count());
        }
    }

    #[test]
    fn monotone_paths_end_at_target() {
        let grid = QuadGrid::new(4, 4).unwrap();
        let from = Vertex::new(3, 0);
        let to = Vertex::new(0, 3);
        for m_first in [true, false] {
            let p = grid.monotone_path(from, to, m_first);
            assert_eq!(p.len(), 6);
            assert_eq!(p.first().unwrap().from, from);
            assert_eq!(p.last().unwrap().to, to);
            assert!(p.iter().all(|e| grid.contains_edge(*e)));
        }
    }

    #[test]
    fn labelling_rejects_bad_input() {
        let grid = QuadGrid::new(3, 3).unwrap();
        assert!(EdgeLabelling::new(grid, vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(EdgeLabelling::new(grid, vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        let a = EdgeLabelling::new(grid, vec![1.0, 2.0], vec![-3.0, 4.0]).unwrap();
        assert_eq!(a.label(Edge::horizontal(1, 2)), 2.0);
        assert_eq!(a.label(Edge::horizontal(1, 2).reversed()), 2.0);
        assert_eq!(a.label(Edge::vertical(2, 0)), -3.0);
    }

    #[test]
    fn integrate_zero_form_is_constant() {
        let grid = QuadGrid::new(3, 4).unwrap();
        let omega = EdgeForm::from_fn(grid, |_| c(0.0, 0.0));
        let f = integrate_edge_form(&omega, Vertex::new(1, 1), c(2.0, -1.0)).unwrap();
        assert!(f.values().iter().all(|&z| z == c(2.0, -1.0)));
    }

    #[test]
    fn integrate_rejects_non_closed_form() {
        let grid = QuadGrid::new(3, 3).unwrap();
        let omega = EdgeForm::from_fn(grid, |e| {
            if e == Edge::horizontal(1, 1) {
                1.0
            } else {
                0.0
            }
        });
        match integrate_edge_form(&omega, Vertex::new(0, 0), 0.0) {
            Err(Error::NotClosed { residual, .. }) => assert_eq!(residual, 1.0),
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn integrate_inverts_derivative(
            rows in 2usize..7,
            cols in 2usize..7,
            seed in proptest::collection::vec(-50.0f64..50.0, 72),
            root_m in 0usize..7,
            root_n in 0usize..7,
        ) {
            let grid = QuadGrid::new(rows, cols).unwrap();
            let f = VertexField::from_fn(grid, |v| {
                let i = grid.index(v);
                c(seed[i % 72], seed[(i * 7 + 3) % 72])
            });
            let omega = differential(&f);
            for face in grid.faces() {
                prop_assert!(omega.face_sum(face).norm() <= 1e-13 * omega.max_magnitude().max(1.0));
            }
            let root = Vertex::new(root_m % rows, root_n % cols);
            let g = integrate_edge_form(&omega, root, f[root]).unwrap();
            let scale = f.values().iter().map(|z| z.norm()).fold(1.0, f64::max);
            for v in grid.vertices() {
                prop_assert!((g[v] - f[v]).norm() <= 1e-14 * scale);
            }
            for e in grid.edges() {
                prop_assert_eq!(omega.get(e.reversed()), -omega.get(e));
            }
        }
    }
}
