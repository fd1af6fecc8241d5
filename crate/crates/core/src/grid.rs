//! The grid graph `Γ_{p,q}`, the square complex `Puz_{p,q}` it spans, and the
//! unordered discrete configuration complex of `n` hard squares on it.
//!
//! A configuration cell is a set of closed cells of `Puz_{p,q}` (vertices,
//! edges and unit squares) whose closures are pairwise disjoint. Cells are
//! value objects: they are kept in canonical form (ingredients sorted by their
//! vertex lists) and looked up by key.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::matrix::IntegerMatrix;

/// A lattice point `(x, y)` with `1 ≤ x ≤ p`, `1 ≤ y ≤ q`.
///
/// Points compare lexicographically, `x` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A closed cell of `Puz_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    Vertex(Point),
    /// Unit edge, endpoints stored smaller first.
    Edge(Point, Point),
    /// Unit square given by its lower-left corner.
    Square(Point),
}

impl Piece {
    pub fn edge(a: Point, b: Point) -> Piece {
        if a <= b {
            Piece::Edge(a, b)
        } else {
            Piece::Edge(b, a)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Piece::Vertex(_) => 0,
            Piece::Edge(..) => 1,
            Piece::Square(_) => 2,
        }
    }

    /// Vertices of the closure, sorted.
    pub fn vertices(&self) -> Vec<Point> {
        match *self {
            Piece::Vertex(v) => vec![v],
            Piece::Edge(a, b) => vec![a, b],
            Piece::Square(c) => vec![
                c,
                Point::new(c.x, c.y + 1),
                Point::new(c.x + 1, c.y),
                Point::new(c.x + 1, c.y + 1),
            ],
        }
    }

    /// Codimension-one faces with their incidence signs.
    ///
    /// Edges run from the smaller endpoint (tail, `-`) to the larger one
    /// (head, `+`). A square `[x,x+1]×[y,y+1]` is the product of its bottom
    /// and left edges, so `∂ = right − left − top + bottom`.
    pub fn faces(&self) -> Vec<(Piece, i8)> {
        match *self {
            Piece::Vertex(_) => Vec::new(),
            Piece::Edge(a, b) => vec![(Piece::Vertex(b), 1), (Piece::Vertex(a), -1)],
            Piece::Square(c) => {
                let (x, y) = (c.x, c.y);
                vec![
                    (Piece::edge(Point::new(x + 1, y), Point::new(x + 1, y + 1)), 1),
                    (Piece::edge(Point::new(x, y), Point::new(x, y + 1)), -1),
                    (Piece::edge(Point::new(x, y + 1), Point::new(x + 1, y + 1)), -1),
                    (Piece::edge(Point::new(x, y), Point::new(x + 1, y)), 1),
                ]
            }
        }
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices().cmp(&other.vertices())
    }
}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Vertex(v) => write!(f, "{v}"),
            Piece::Edge(a, b) => write!(f, "{a}-{b}"),
            Piece::Square(c) => write!(f, "[]{c}"),
        }
    }
}

/// The grid graph `Γ_{p,q}` together with the unit squares of `Puz_{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridGraph {
    pub p: u32,
    pub q: u32,
    /// Row-major: `y` outer, `x` inner.
    pub vertices: Vec<Point>,
    /// Row-major by smaller endpoint; horizontal edge before vertical.
    pub edges: Vec<(Point, Point)>,
    /// Lower-left corners, row-major.
    pub squares: Vec<Point>,
}

/// Builds `Γ_{p,q}` and the squares of `Puz_{p,q}`.
pub fn build_grid(p: u32, q: u32) -> Result<GridGraph> {
    if p < 2 || q < 2 {
        return domain(format!("grid needs p >= 2 and q >= 2, got p={p}, q={q}"));
    }
    if (p as usize) * (q as usize) > 128 {
        return domain(format!("grid {p}x{q} exceeds 128 lattice points"));
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut squares = Vec::new();
    for y in 1..=q {
        for x in 1..=p {
            let v = Point::new(x, y);
            vertices.push(v);
            if x < p {
                edges.push((v, Point::new(x + 1, y)));
            }
            if y < q {
                edges.push((v, Point::new(x, y + 1)));
            }
            if x < p && y < q {
                squares.push(v);
            }
        }
    }
    Ok(GridGraph {
        p,
        q,
        vertices,
        edges,
        squares,
    })
}

impl GridGraph {
    pub fn contains(&self, v: Point) -> bool {
        (1..=self.p).contains(&v.x) && (1..=self.q).contains(&v.y)
    }

    /// Dense index compatible with the point order.
    pub fn index_of(&self, v: Point) -> usize {
        ((v.x - 1) * self.q + (v.y - 1)) as usize
    }

    pub fn point_at(&self, idx: usize) -> Point {
        let idx = idx as u32;
        Point::new(idx / self.q + 1, idx % self.q + 1)
    }

    pub fn num_points(&self) -> usize {
        (self.p * self.q) as usize
    }

    pub fn neighbours(&self, v: Point) -> Vec<Point> {
        let mut out = Vec::with_capacity(4);
        if v.x > 1 {
            out.push(Point::new(v.x - 1, v.y));
        }
        if v.y > 1 {
            out.push(Point::new(v.x, v.y - 1));
        }
        if v.y < self.q {
            out.push(Point::new(v.x, v.y + 1));
        }
        if v.x < self.p {
            out.push(Point::new(v.x + 1, v.y));
        }
        out
    }

    /// Every edge and square as a piece, in piece order.
    fn higher_pieces(&self) -> Vec<Piece> {
        let mut pieces: Vec<Piece> = self
            .edges
            .iter()
            .map(|&(a, b)| Piece::edge(a, b))
            .chain(self.squares.iter().map(|&c| Piece::Square(c)))
            .collect();
        pieces.sort();
        pieces
    }

    fn mask(&self, piece: &Piece) -> u128 {
        piece
            .vertices()
            .iter()
            .fold(0u128, |m, v| m | (1u128 << self.index_of(*v)))
    }
}

/// An unordered configuration: closed cells of `Puz_{p,q}` with pairwise
/// disjoint closures, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeCell {
    pieces: Vec<Piece>,
}

impl CubeCell {
    /// Canonicalizes an arbitrary ingredient list. Closure-disjointness is
    /// not checked here; see [`CubeCell::is_admissible`].
    pub fn new(mut pieces: Vec<Piece>) -> Self {
        pieces.sort();
        CubeCell { pieces }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces.iter().map(Piece::dim).sum()
    }

    /// Number of ingredients, i.e. the number of squares `n`.
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0] < w[1])
    }

    /// True when no two ingredients share a lattice point.
    pub fn is_admissible(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.pieces
            .iter()
            .flat_map(|p| p.vertices())
            .all(|v| seen.insert(v))
    }

    pub fn canonicalize(&self) -> CubeCell {
        CubeCell::new(self.pieces.clone())
    }

    /// Lattice points covered by the closures of the ingredients.
    pub fn occupied(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self.pieces.iter().flat_map(|p| p.vertices()).collect();
        pts.sort();
        pts
    }

    /// Codimension-one faces with incidence signs.
    ///
    /// The face replacing an ingredient carries `(-1)^d` where `d` is the
    /// total dimension of the ingredients before it, times the ingredient's
    /// own face sign, times the sign of re-sorting the odd-dimensional
    /// ingredients of the face into canonical order.
    pub fn faces(&self) -> Vec<(CubeCell, i8)> {
        let mut out = Vec::new();
        let mut preceding = 0usize;
        for (i, piece) in self.pieces.iter().enumerate() {
            for (face, local) in piece.faces() {
                let mut inherited = self.pieces.clone();
                inherited[i] = face;
                let reorder = odd_permutation_sign(&inherited);
                let prefix = if preceding.is_multiple_of(2) { 1 } else { -1 };
                out.push((CubeCell::new(inherited), prefix * local * reorder));
            }
            preceding += piece.dim();
        }
        out
    }
}

/// Sign of sorting `pieces`, where only transpositions of two odd-dimensional
/// ingredients count.
fn odd_permutation_sign(pieces: &[Piece]) -> i8 {
    let odd: Vec<&Piece> = pieces.iter().filter(|p| p.dim() % 2 == 1).collect();
    let mut inversions = 0usize;
    for i in 0..odd.len() {
        for j in i + 1..odd.len() {
            if odd[i] > odd[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Display for CubeCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// The unordered discrete configuration complex `UDConf(Puz_{p,q}, n)`.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    pub grid: GridGraph,
    pub n: usize,
    cells: Vec<Vec<CubeCell>>,
    index: Vec<HashMap<CubeCell, usize>>,
    /// `faces[k][i]`: faces of the `i`-th `k`-cell as `(index, sign)` into
    /// the `(k-1)`-cells.
    faces: Vec<Vec<Vec<(usize, i8)>>>,
}

/// Enumerates every cell of `UDConf(Puz_{p,q}, n)` in canonical form.
///
/// Subsets of edge and square ingredients are visited first, in
/// lexicographic order, and each is completed with vertex ingredients, again
/// in lexicographic order.
pub fn enumerate_cells(grid: &GridGraph, n: usize) -> Result<CubeComplex> {
    let total = grid.num_points();
    if n == 0 || n > total {
        return domain(format!(
            "number of squares must lie in 1..={total} for a {}x{} grid, got {n}",
            grid.p, grid.q
        ));
    }
    let higher = grid.higher_pieces();
    let masks: Vec<u128> = higher.iter().map(|p| grid.mask(p)).collect();

    let mut by_dim: Vec<Vec<CubeCell>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    enumerate_subsets(
        grid,
        n,
        &higher,
        &masks,
        0,
        0u128,
        &mut chosen,
        &mut by_dim,
    );

    let mut cells = by_dim;
    while cells.last().is_some_and(|v| v.is_empty()) {
        cells.pop();
    }
    let index: Vec<HashMap<CubeCell, usize>> = cells
        .iter()
        .map(|list| list.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect())
        .collect();

    let mut faces = vec![Vec::new()];
    faces[0] = vec![Vec::new(); cells.first().map_or(0, Vec::len)];
    for k in 1..cells.len() {
        let lower = &index[k - 1];
        let mut per_cell = Vec::with_capacity(cells[k].len());
        for cell in &cells[k] {
            let mut fs = Vec::new();
            for (face, sign) in cell.faces() {
                let j = *lower.get(&face).ok_or_else(|| {
                    crate::Error::Internal(format!("face {face} of {cell} missing from complex"))
                })?;
                fs.push((j, sign));
            }
            per_cell.push(fs);
        }
        faces.push(per_cell);
    }

    Ok(CubeComplex {
        grid: grid.clone(),
        n,
        cells,
        index,
        faces,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_subsets(
    grid: &GridGraph,
    n: usize,
    higher: &[Piece],
    masks: &[u128],
    start: usize,
    occupied: u128,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<CubeCell>>,
) {
    let total = grid.num_points();
    let free = total - occupied.count_ones() as usize;
    let need = n - chosen.len();
    if need > free {
        return;
    }
    // complete with vertices
    let free_points: Vec<usize> = (0..total).filter(|i| occupied & (1u128 << i) == 0).collect();
    let base: Vec<Piece> = chosen.iter().map(|&i| higher[i]).collect();
    let dim: usize = base.iter().map(Piece::dim).sum();
    while out.len() <= dim {
        out.push(Vec::new());
    }
    for combo in Combinations::new(free_points.len(), need) {
        let mut pieces = base.clone();
        pieces.extend(combo.iter().map(|&k| Piece::Vertex(grid.point_at(free_points[k]))));
        out[dim].push(CubeCell::new(pieces));
    }

    if chosen.len() == n {
        return;
    }
    for i in start..higher.len() {
        if masks[i] & occupied != 0 {
            continue;
        }
        chosen.push(i);
        enumerate_subsets(grid, n, higher, masks, i + 1, occupied | masks[i], chosen, out);
        chosen.pop();
    }
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

impl CubeComplex {
    /// Top dimension, or `0` for a complex of vertices only.
    pub fn top_dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cells(&self, k: usize) -> &[CubeCell] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, cell: &CubeCell) -> Option<usize> {
        self.index.get(cell.dim())?.get(cell).copied()
    }

    /// Faces of the `i`-th `k`-cell as `(index into (k-1)-cells, sign)`.
    pub fn faces_of(&self, k: usize, i: usize) -> &[(usize, i8)] {
        &self.faces[k][i]
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// `∂_k` with rows indexed by `(k-1)`-cells and columns by `k`-cells.
    pub fn boundary_matrix(&self, k: usize) -> Result<IntegerMatrix> {
        if k == 0 || k > self.top_dim() {
            return domain(format!(
                "boundary index must lie in 1..={}, got {k}",
                self.top_dim()
            ));
        }
        let mut m = IntegerMatrix::zeros(self.cells[k - 1].len(), self.cells[k].len());
        for (col, fs) in self.faces[k].iter().enumerate() {
            for &(row, sign) in fs {
                m.add_to(row, col, &BigInt::from(sign));
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_edges_by_brute_force(p: u32, q: u32) -> usize {
        let pts: Vec<Point> = (1..=p)
            .flat_map(|x| (1..=q).map(move |y| Point::new(x, y)))
            .collect();
        let mut count = 0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let dx = a.x.abs_diff(b.x);
                let dy = a.y.abs_diff(b.y);
                if dx + dy == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn grid_counts() {
        let g = build_grid(6, 4).unwrap();
        assert_eq!((g.vertices.len(), g.edges.len(), g.squares.len()), (24, 38, 15));
        let g = build_grid(2, 2).unwrap();
        assert_eq!((g.vertices.len(), g.edges.len(), g.squares.len()), (4, 4, 1));
        let g = build_grid(4, 3).unwrap();
        assert_eq!((g.vertices.len(), g.edges.len(), g.squares.len()), (12, 17, 6));
        assert_eq!(count_edges_by_brute_force(4, 3), 17);
    }

    #[test]
    fn grid_rejects_degenerate() {
        assert!(build_grid(1, 3).is_err());
        assert!(build_grid(3, 1).is_err());
    }

    #[test]
    fn grid_is_closed() {
        let g = build_grid(5, 3).unwrap();
        for &(a, b) in &g.edges {
            assert!(g.contains(a) && g.contains(b));
        }
        let edges: std::collections::HashSet<Piece> =
            g.edges.iter().map(|&(a, b)| Piece::edge(a, b)).collect();
        for &c in &g.squares {
            for (face, _) in Piece::Square(c).faces() {
                assert!(edges.contains(&face));
            }
        }
    }

    #[test]
    fn full_occupancy_is_a_point() {
        let g = build_grid(3, 3).unwrap();
        let c = enumerate_cells(&g, 9).unwrap();
        assert_eq!(c.f_vector(), vec![1]);
    }

    #[test]
    fn small_f_vectors() {
        let g = build_grid(3, 3).unwrap();
        let c = enumerate_cells(&g, 8).unwrap();
        assert_eq!(c.f_vector(), vec![9, 12]);
        assert_eq!(c.euler_characteristic(), -3);
        let c = enumerate_cells(&g, 7).unwrap();
        assert_eq!(c.f_vector(), vec![36, 84, 44]);
        assert_eq!(c.euler_characteristic(), -4);
    }

    #[test]
    fn out_of_range_n() {
        let g = build_grid(3, 3).unwrap();
        assert!(enumerate_cells(&g, 0).is_err());
        assert!(enumerate_cells(&g, 10).is_err());
    }

    #[test]
    fn square_ingredients_appear_for_small_n() {
        let g = build_grid(3, 3).unwrap();
        let c = enumerate_cells(&g, 2).unwrap();
        assert_eq!(c.top_dim(), 3);
        assert!(c
            .cells(2)
            .iter()
            .any(|cell| cell.pieces().iter().any(|p| matches!(p, Piece::Square(_)))));
    }

    #[test]
    fn boundary_shapes() {
        let g = build_grid(3, 3).unwrap();
        let c = enumerate_cells(&g, 8).unwrap();
        let d1 = c.boundary_matrix(1).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (9, 12));
        for col in 0..d1.cols() {
            let mut entries: Vec<i64> = d1.column(col).map(|(_, v)| i64::try_from(v).unwrap()).collect();
            entries.sort();
            assert_eq!(entries, vec![-1, 1]);
        }
        assert!(c.boundary_matrix(2).is_err());
        assert!(c.boundary_matrix(0).is_err());

        let g = build_grid(4, 3).unwrap();
        let c = enumerate_cells(&g, 10).unwrap();
        let d2 = c.boundary_matrix(2).unwrap();
        assert_eq!((d2.rows(), d2.cols()), (170, 102));
        for col in 0..d2.cols() {
            assert_eq!(d2.column(col).count(), 4);
        }
    }

    #[test]
    fn boundary_squares_to_zero_with_square_ingredients() {
        let g = build_grid(3, 3).unwrap();
        for n in 1..=4 {
            let c = enumerate_cells(&g, n).unwrap();
            for k in 2..=c.top_dim() {
                let prod = c.boundary_matrix(k - 1).unwrap().mul(&c.boundary_matrix(k).unwrap());
                assert!(prod.is_zero(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn canonical_is_idempotent() {
        let g = build_grid(4, 3).unwrap();
        let c = enumerate_cells(&g, 10).unwrap();
        for k in 0..=c.top_dim() {
            for cell in c.cells(k) {
                assert!(cell.is_canonical());
                assert!(cell.is_admissible());
                assert_eq!(&cell.canonicalize(), cell);
            }
        }
    }

    #[test]
    fn combinations_enumerate_binomial() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        let first: Vec<Vec<usize>> = Combinations::new(4, 2).take(3).collect();
        assert_eq!(first, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
    }
}
