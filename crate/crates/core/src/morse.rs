//! Discrete gradient fields on configuration complexes built from a maximal
//! tree of the grid graph, in the style of Farley and Sabalka.
//!
//! Tokens are the vertex ingredients of a cell. A vertex token is unblocked
//! when it is not the root and the position of its tree parent is free. An
//! edge ingredient is order-respecting when it is a tree edge and no vertex
//! token sitting on a sibling branch lies strictly between its endpoints in
//! the tree order. The smallest unblocked token or order-respecting edge
//! (compared by the order of the token, or of the edge's child endpoint)
//! decides the pairing: a token slides up to its parent edge, an edge
//! collapses to its child endpoint. Cells with neither are critical.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::{CubeCell, CubeComplex, GridGraph, Piece, Point};
use crate::homology::{homology_from_boundaries, HomologySummary};
use crate::matrix::IntegerMatrix;

/// Shapes of maximal trees of the grid graph, all rooted at `(1,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// Row `y = 1` plus every vertical edge; column-major order.
    Comb,
    /// Column `x = 1` plus every horizontal edge; row-major order.
    RowComb,
    /// Hamiltonian path up column 1, down column 2, and so on.
    ColumnSnake,
    /// Hamiltonian path right along row 1, left along row 2, and so on.
    RowSnake,
}

impl TreeKind {
    pub const ALL: [TreeKind; 4] = [
        TreeKind::Comb,
        TreeKind::RowComb,
        TreeKind::ColumnSnake,
        TreeKind::RowSnake,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeKind::Comb => "comb",
            TreeKind::RowComb => "row_comb",
            TreeKind::ColumnSnake => "column_snake",
            TreeKind::RowSnake => "row_snake",
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rooted maximal tree of the grid graph with a total order on vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub kind: TreeKind,
    pub root: Point,
    /// Parent by grid index; `None` only at the root.
    parent: Vec<Option<usize>>,
    /// Position of each vertex (by grid index) in the tree order.
    order: Vec<usize>,
    pub tree_edges: Vec<(Point, Point)>,
    pub deleted_edges: Vec<(Point, Point)>,
    grid: GridGraph,
}

/// The comb tree.
pub fn build_tree(g: &GridGraph) -> Result<SpanningTree> {
    build_tree_of_kind(g, TreeKind::Comb)
}

/// Builds a maximal tree of the requested shape.
pub fn build_tree_of_kind(g: &GridGraph, kind: TreeKind) -> Result<SpanningTree> {
    if g.p < g.q {
        return domain(format!(
            "trees assume p >= q; transpose the {}x{} grid to {}x{}",
            g.p, g.q, g.q, g.p
        ));
    }
    let (p, q) = (g.p, g.q);
    // sequence of vertices in tree order, each with its parent
    let mut seq: Vec<(Point, Option<Point>)> = Vec::with_capacity(g.num_points());
    match kind {
        TreeKind::Comb => {
            for x in 1..=p {
                for y in 1..=q {
                    let parent = match (x, y) {
                        (1, 1) => None,
                        (_, 1) => Some(Point::new(x - 1, 1)),
                        _ => Some(Point::new(x, y - 1)),
                    };
                    seq.push((Point::new(x, y), parent));
                }
            }
        }
        TreeKind::RowComb => {
            for y in 1..=q {
                for x in 1..=p {
                    let parent = match (x, y) {
                        (1, 1) => None,
                        (1, _) => Some(Point::new(1, y - 1)),
                        _ => Some(Point::new(x - 1, y)),
                    };
                    seq.push((Point::new(x, y), parent));
                }
            }
        }
        TreeKind::ColumnSnake => {
            let mut prev = None;
            for x in 1..=p {
                let ys: Vec<u32> = if x % 2 == 1 { (1..=q).collect() } else { (1..=q).rev().collect() };
                for y in ys {
                    let v = Point::new(x, y);
                    seq.push((v, prev));
                    prev = Some(v);
                }
            }
        }
        TreeKind::RowSnake => {
            let mut prev = None;
            for y in 1..=q {
                let xs: Vec<u32> = if y % 2 == 1 { (1..=p).collect() } else { (1..=p).rev().collect() };
                for x in xs {
                    let v = Point::new(x, y);
                    seq.push((v, prev));
                    prev = Some(v);
                }
            }
        }
    }
    let mut parent = vec![None; g.num_points()];
    let mut order = vec![0; g.num_points()];
    let mut tree_set = std::collections::HashSet::new();
    let mut tree_edges = Vec::new();
    for (pos, &(v, par)) in seq.iter().enumerate() {
        let i = g.index_of(v);
        order[i] = pos;
        if let Some(pv) = par {
            parent[i] = Some(g.index_of(pv));
            let e = if pv < v { (pv, v) } else { (v, pv) };
            tree_set.insert(e);
            tree_edges.push(e);
        }
    }
    tree_edges.sort();
    let deleted_edges = g.edges.iter().copied().filter(|e| !tree_set.contains(e)).collect();
    Ok(SpanningTree {
        kind,
        root: Point::new(1, 1),
        parent,
        order,
        tree_edges,
        deleted_edges,
        grid: g.clone(),
    })
}

impl SpanningTree {
    pub fn parent(&self, v: Point) -> Option<Point> {
        self.parent[self.grid.index_of(v)].map(|i| self.grid.point_at(i))
    }

    pub fn order_of(&self, v: Point) -> usize {
        self.order[self.grid.index_of(v)]
    }

    /// Vertices in tree order.
    pub fn ordered_vertices(&self) -> Vec<Point> {
        let mut vs = self.grid.vertices.clone();
        vs.sort_by_key(|&v| self.order_of(v));
        vs
    }

    pub fn is_tree_edge(&self, a: Point, b: Point) -> bool {
        self.parent(a) == Some(b) || self.parent(b) == Some(a)
    }

    /// Checks spanning, acyclicity and the edge counts.
    pub fn is_valid(&self) -> bool {
        let n = self.grid.num_points();
        if self.tree_edges.len() + 1 != n {
            return false;
        }
        let expected_deleted = ((self.grid.p - 1) * (self.grid.q - 1)) as usize;
        if self.deleted_edges.len() != expected_deleted {
            return false;
        }
        // every vertex reaches the root by parents with decreasing order
        (0..n).all(|start| {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                if self.order[p] >= self.order[cur] || steps > n {
                    return false;
                }
                let (a, b) = (self.grid.point_at(cur), self.grid.point_at(p));
                if a.x.abs_diff(b.x) + a.y.abs_diff(b.y) != 1 {
                    return false;
                }
                cur = p;
                steps += 1;
            }
            self.grid.point_at(cur) == self.root
        })
    }
}

/// Verdicts of the structural checks run on every field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldChecks {
    /// Every proposed pairing was reciprocated.
    pub consistent: bool,
    /// Each pair is a face incidence with coefficient `±1`.
    pub face_incidence: bool,
    pub acyclic: bool,
    /// Alternating critical count equals the Euler characteristic.
    pub euler: bool,
}

impl FieldChecks {
    pub fn all(&self) -> bool {
        self.consistent && self.face_incidence && self.acyclic && self.euler
    }
}

/// A discrete gradient field on a configuration complex.
#[derive(Clone, Debug)]
pub struct GradientField {
    pub tree: SpanningTree,
    /// `up[k][i]`: the `(k+1)`-cell paired with the `i`-th `k`-cell.
    up: Vec<Vec<Option<usize>>>,
    /// `down[k][i]`: the `(k-1)`-cell paired with the `i`-th `k`-cell.
    down: Vec<Vec<Option<usize>>>,
    critical: Vec<Vec<usize>>,
    /// `(k, i)` pairs whose own pairing was not reciprocated.
    pub unreciprocated: Vec<(usize, usize)>,
    pub checks: FieldChecks,
}

enum Proposal {
    Up(CubeCell),
    Down(CubeCell),
    None,
}

fn propose(cell: &CubeCell, tree: &SpanningTree) -> Proposal {
    let occupied = cell.occupied();
    let is_occupied = |v: Point| occupied.binary_search(&v).is_ok();
    let tokens: Vec<Point> = cell
        .pieces()
        .iter()
        .filter_map(|p| match p {
            Piece::Vertex(v) => Some(*v),
            _ => None,
        })
        .collect();

    let mut best: Option<(usize, usize)> = None; // (order key, piece position)
    for (pos, piece) in cell.pieces().iter().enumerate() {
        let key = match *piece {
            Piece::Vertex(v) => match tree.parent(v) {
                Some(par) if !is_occupied(par) => Some(tree.order_of(v)),
                _ => None,
            },
            Piece::Edge(a, b) => {
                if !tree.is_tree_edge(a, b) {
                    None
                } else {
                    let (child, par) = if tree.parent(a) == Some(b) { (a, b) } else { (b, a) };
                    let (lo, hi) = (tree.order_of(par), tree.order_of(child));
                    let blocked = tokens.iter().any(|&w| {
                        let o = tree.order_of(w);
                        tree.parent(w) == Some(par) && lo < o && o < hi
                    });
                    if blocked {
                        None
                    } else {
                        Some(hi)
                    }
                }
            }
            Piece::Square(_) => None,
        };
        if let Some(k) = key {
            if best.is_none_or(|(bk, _)| k < bk) {
                best = Some((k, pos));
            }
        }
    }
    let Some((_, pos)) = best else {
        return Proposal::None;
    };
    let mut pieces = cell.pieces().to_vec();
    match pieces[pos] {
        Piece::Vertex(v) => {
            let par = tree.parent(v).expect("unblocked token has a parent");
            pieces[pos] = Piece::edge(v, par);
            Proposal::Up(CubeCell::new(pieces))
        }
        Piece::Edge(a, b) => {
            let child = if tree.parent(a) == Some(b) { a } else { b };
            pieces[pos] = Piece::Vertex(child);
            Proposal::Down(CubeCell::new(pieces))
        }
        Piece::Square(_) => unreachable!("squares are never chosen"),
    }
}

/// Builds the gradient field of `tree` on `c` and checks it.
///
/// Complexes containing square ingredients are rejected.
pub fn gradient_field(c: &CubeComplex, tree: &SpanningTree) -> Result<GradientField> {
    if c.grid != tree.grid {
        return domain("tree and complex come from different grids");
    }
    if c.cells(c.top_dim()).iter().chain(c.cells(2)).any(|cell| {
        cell.pieces().iter().any(|p| matches!(p, Piece::Square(_)))
    }) {
        return domain(format!(
            "gradient fields need a complex without square ingredients (n = {} is too small)",
            c.n
        ));
    }
    let dims = c.top_dim() + 1;
    let mut proposals: Vec<Vec<Option<(bool, usize)>>> = Vec::with_capacity(dims);
    for k in 0..dims {
        let mut row = Vec::with_capacity(c.cells(k).len());
        for cell in c.cells(k) {
            let prop = match propose(cell, tree) {
                Proposal::Up(other) => Some((true, lookup(c, &other)?)),
                Proposal::Down(other) => Some((false, lookup(c, &other)?)),
                Proposal::None => None,
            };
            row.push(prop);
        }
        proposals.push(row);
    }

    let mut up = vec![Vec::new(); dims];
    let mut down = vec![Vec::new(); dims];
    let mut critical = vec![Vec::new(); dims];
    let mut unreciprocated = Vec::new();
    for k in 0..dims {
        up[k] = vec![None; c.cells(k).len()];
        down[k] = vec![None; c.cells(k).len()];
    }
    for k in 0..dims {
        for i in 0..c.cells(k).len() {
            match proposals[k][i] {
                Some((true, j)) => {
                    if proposals[k + 1][j] == Some((false, i)) {
                        up[k][i] = Some(j);
                    } else {
                        unreciprocated.push((k, i));
                    }
                }
                Some((false, j)) => {
                    if proposals[k - 1][j] == Some((true, i)) {
                        down[k][i] = Some(j);
                    } else {
                        unreciprocated.push((k, i));
                    }
                }
                None => {}
            }
            if up[k][i].is_none() && down[k][i].is_none() {
                critical[k].push(i);
            }
        }
    }

    let face_incidence = (0..dims).all(|k| {
        up[k].iter().enumerate().all(|(i, partner)| match partner {
            Some(j) => incidence(c, k + 1, *j, i).is_some_and(|s| s.abs() == 1),
            None => true,
        })
    });
    let mut field = GradientField {
        tree: tree.clone(),
        up,
        down,
        critical,
        unreciprocated,
        checks: FieldChecks {
            consistent: false,
            face_incidence,
            acyclic: false,
            euler: false,
        },
    };
    field.checks.consistent = field.unreciprocated.is_empty();
    field.checks.acyclic = (0..dims.saturating_sub(1)).all(|k| field.topological_order(c, k).is_some());
    let alt: i64 = field
        .census()
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum();
    field.checks.euler = alt == c.euler_characteristic();
    Ok(field)
}

fn lookup(c: &CubeComplex, cell: &CubeCell) -> Result<usize> {
    c.index_of(cell)
        .ok_or_else(|| Error::Internal(format!("paired cell {cell} is not in the complex")))
}

/// Coefficient of the `face`-th `(k-1)`-cell in the boundary of the `cell`-th `k`-cell.
fn incidence(c: &CubeComplex, k: usize, cell: usize, face: usize) -> Option<i64> {
    let s: i64 = c
        .faces_of(k, cell)
        .iter()
        .filter(|(f, _)| *f == face)
        .map(|(_, s)| *s as i64)
        .sum();
    (s != 0).then_some(s)
}

impl GradientField {
    /// Number of critical cells per dimension.
    pub fn census(&self) -> Vec<usize> {
        self.critical.iter().map(Vec::len).collect()
    }

    pub fn critical(&self, k: usize) -> &[usize] {
        self.critical.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn up(&self, k: usize, i: usize) -> Option<usize> {
        self.up[k][i]
    }

    pub fn down(&self, k: usize, i: usize) -> Option<usize> {
        self.down[k][i]
    }

    pub fn is_valid(&self) -> bool {
        self.checks.all()
    }

    /// Order of the `k`-cells in which every cell comes after all cells it
    /// flows to, or `None` if a closed gradient path exists.
    ///
    /// A `k`-cell `τ` paired up with `σ` flows to every other `k`-face of `σ`.
    fn topological_order(&self, c: &CubeComplex, k: usize) -> Option<Vec<usize>> {
        let n = self.up[k].len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (t, partner) in self.up[k].iter().enumerate() {
            if let Some(s) = partner {
                for &(f, _) in c.faces_of(k + 1, *s) {
                    if f != t {
                        succ[t].push(f);
                        indeg[f] += 1;
                    }
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(t) = queue.pop_front() {
            out.push(t);
            for &f in &succ[t] {
                indeg[f] -= 1;
                if indeg[f] == 0 {
                    queue.push_back(f);
                }
            }
        }
        if out.len() != n {
            return None;
        }
        out.reverse();
        Some(out)
    }

    /// Boundary matrices of the Morse complex: `result[k]` maps critical
    /// `(k+1)`-cells to critical `k`-cells.
    pub fn morse_boundaries(&self, c: &CubeComplex) -> Result<Vec<IntegerMatrix>> {
        if !self.checks.acyclic || !self.checks.consistent {
            return domain("Morse complex needs a consistent acyclic field");
        }
        let dims = self.critical.len();
        let mut out = Vec::new();
        for k in 0..dims.saturating_sub(1) {
            let crit_pos: BTreeMap<usize, usize> =
                self.critical[k].iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
            let order = self
                .topological_order(c, k)
                .ok_or_else(|| Error::Internal("cycle in gradient paths".into()))?;
            // flow[i]: critical k-cells reached from k-cell i, with signed path weights
            let mut flow: Vec<Option<BTreeMap<usize, BigInt>>> = vec![None; self.up[k].len()];
            for &t in &order {
                let value = if let Some(&pos) = crit_pos.get(&t) {
                    BTreeMap::from([(pos, BigInt::one())])
                } else if let Some(s) = self.up[k][t] {
                    let faces = c.faces_of(k + 1, s);
                    let eps: i64 = faces.iter().filter(|(f, _)| *f == t).map(|(_, e)| *e as i64).sum();
                    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for &(f, sign) in faces {
                        if f == t {
                            continue;
                        }
                        let sub = flow[f].as_ref().expect("successor flows are computed first");
                        for (pos, w) in sub {
                            *acc.entry(*pos).or_default() -= BigInt::from(eps * sign as i64) * w;
                        }
                    }
                    acc.retain(|_, v| !v.is_zero());
                    acc
                } else {
                    BTreeMap::new()
                };
                flow[t] = Some(value);
            }
            let mut m = IntegerMatrix::zeros(self.critical[k].len(), self.critical[k + 1].len());
            for (col, &s) in self.critical[k + 1].iter().enumerate() {
                for &(f, sign) in c.faces_of(k + 1, s) {
                    for (pos, w) in flow[f].as_ref().expect("all flows computed") {
                        m.add_to(*pos, col, &(BigInt::from(sign) * w));
                    }
                }
            }
            out.push(m);
        }
        Ok(out)
    }
}

/// Morse inequalities `c_k ≥ b_k` against a homology computation.
pub fn satisfies_morse_inequalities(f: &GradientField, h: &HomologySummary) -> bool {
    let census = f.census();
    h.betti
        .iter()
        .enumerate()
        .all(|(k, &b)| census.get(k).copied().unwrap_or(0) >= b)
}

/// Homology of the Morse complex of `f`.
pub fn morse_homology(f: &GradientField, c: &CubeComplex) -> Result<HomologySummary> {
    let boundaries = f.morse_boundaries(c)?;
    homology_from_boundaries(&f.census(), &boundaries)
}

/// Critical-cell counts `(c₀, c₁, c₂)` expected at `n = pq − 2`.
pub fn predict_critical(p: u32, q: u32) -> Result<(i64, i64, i64)> {
    if q < 3 || p < q {
        return domain(format!("closed forms need p >= q >= 3, got p={p}, q={q}"));
    }
    let (pi, qi) = (p as i64, q as i64);
    let m = (pi - 1) * (qi - 1);
    let c1 = 3 * m - 2;
    let c2 = m * (m - 1) / 2 - (pi - 2) * (qi - 2);
    let (b1, b2) = crate::homology::predict_betti(p, q)?;
    if 1 - c1 + c2 != 1 - b1 + b2 {
        return Err(Error::Internal(format!(
            "critical counts disagree with Betti numbers at ({p},{q})"
        )));
    }
    Ok((1, c1, c2))
}

/// One tree tried during [`select_tree`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeAttempt {
    pub kind: TreeKind,
    pub census: Vec<usize>,
    pub valid: bool,
    pub matches_prediction: bool,
}

/// Outcome of trying tree shapes in a fixed order until the critical census
/// matches the closed form.
#[derive(Clone, Debug)]
pub struct TreeSelection {
    pub predicted: Vec<usize>,
    pub attempts: Vec<TreeAttempt>,
    /// The first matching field, if any.
    pub chosen: Option<GradientField>,
}

impl TreeSelection {
    /// Attempts that did not match, in the order tried.
    pub fn mismatches(&self) -> Vec<&TreeAttempt> {
        self.attempts.iter().filter(|a| !a.matches_prediction).collect()
    }
}

/// Tries [`TreeKind::ALL`] in order on the complex of `pq − 2` squares and
/// keeps the first valid field whose census matches [`predict_critical`].
/// Every earlier mismatch stays in the returned attempts.
pub fn select_tree(c: &CubeComplex) -> Result<TreeSelection> {
    let (p, q) = (c.grid.p, c.grid.q);
    if c.n + 2 != c.grid.num_points() {
        return domain(format!("tree selection runs at n = pq - 2, got n = {}", c.n));
    }
    let (c0, c1, c2) = predict_critical(p, q)?;
    let predicted = vec![c0 as usize, c1 as usize, c2 as usize];
    let mut attempts = Vec::new();
    let mut chosen = None;
    for kind in TreeKind::ALL {
        let tree = build_tree_of_kind(&c.grid, kind)?;
        let field = gradient_field(c, &tree)?;
        let mut census = field.census();
        census.resize(3, 0);
        let matches_prediction = census == predicted && field.is_valid();
        attempts.push(TreeAttempt {
            kind,
            census,
            valid: field.is_valid(),
            matches_prediction,
        });
        if matches_prediction {
            chosen = Some(field);
            break;
        }
    }
    Ok(TreeSelection {
        predicted,
        attempts,
        chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, enumerate_cells};
    use crate::homology::homology;

    fn complex(p: u32, q: u32, n: usize) -> CubeComplex {
        enumerate_cells(&build_grid(p, q).unwrap(), n).unwrap()
    }

    #[test]
    fn tree_counts() {
        for kind in TreeKind::ALL {
            let t = build_tree_of_kind(&build_grid(3, 3).unwrap(), kind).unwrap();
            assert!(t.is_valid(), "{kind}");
            assert_eq!((t.tree_edges.len(), t.deleted_edges.len()), (8, 4));
            let t = build_tree_of_kind(&build_grid(6, 4).unwrap(), kind).unwrap();
            assert!(t.is_valid());
            assert_eq!((t.tree_edges.len(), t.deleted_edges.len()), (23, 15));
        }
    }

    #[test]
    fn comb_deletes_upper_horizontals() {
        let t = build_tree(&build_grid(4, 3).unwrap()).unwrap();
        assert_eq!(t.deleted_edges.len(), 6);
        assert!(t.deleted_edges.iter().all(|(a, b)| a.y == b.y && a.y >= 2));
    }

    #[test]
    fn tree_needs_p_at_least_q() {
        assert!(build_tree(&build_grid(3, 4).unwrap()).is_err());
    }

    #[test]
    fn predictions() {
        assert_eq!(predict_critical(3, 3).unwrap(), (1, 10, 5));
        assert_eq!(predict_critical(4, 3).unwrap(), (1, 16, 13));
        assert_eq!(predict_critical(5, 4).unwrap(), (1, 34, 60));
        assert!(predict_critical(2, 2).is_err());
    }

    #[test]
    fn comb_field_is_valid_but_census_differs() {
        let c = complex(3, 3, 7);
        let f = gradient_field(&c, &build_tree(&c.grid).unwrap()).unwrap();
        assert!(f.is_valid());
        assert_eq!(f.census(), vec![6, 19, 9]);
    }

    #[test]
    fn selection_reports_comb_and_finds_snake() {
        let c = complex(4, 3, 10);
        let sel = select_tree(&c).unwrap();
        assert_eq!(sel.attempts[0].kind, TreeKind::Comb);
        assert!(!sel.attempts[0].matches_prediction);
        let f = sel.chosen.expect("a matching tree");
        assert_eq!(f.census(), vec![1, 16, 13]);
        assert_eq!(f.tree.kind, TreeKind::ColumnSnake);
    }

    #[test]
    fn morse_homology_matches_snf() {
        for (p, q, n) in [(3, 3, 7), (3, 3, 8), (4, 3, 10), (4, 3, 11)] {
            let c = complex(p, q, n);
            for kind in TreeKind::ALL {
                let f = gradient_field(&c, &build_tree_of_kind(&c.grid, kind).unwrap()).unwrap();
                assert!(f.is_valid());
                let h = homology(&c).unwrap();
                let m = morse_homology(&f, &c).unwrap();
                assert_eq!(m.betti, h.betti, "{p}x{q} n={n} {kind}");
                assert_eq!(m.torsion, h.torsion);
                assert!(satisfies_morse_inequalities(&f, &h));
            }
        }
    }

    #[test]
    fn rejects_square_ingredients() {
        let c = complex(3, 3, 3);
        assert!(gradient_field(&c, &build_tree(&c.grid).unwrap()).is_err());
    }
}
