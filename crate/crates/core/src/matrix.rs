//! Sparse integer matrices and Smith normal form.
//!
//! Elimination runs on `i64` with checked arithmetic and restarts on
//! arbitrary-precision integers the first time an operation would overflow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// A sparse matrix of arbitrary-precision integers. Zero entries are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    /// Keyed by `(column, row)` so that columns are contiguous.
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntegerMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(c, r)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(c, r));
        } else {
            self.entries.insert((c, r), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    /// Nonzero entries of column `c` as `(row, value)`, rows ascending.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, &BigInt)> + '_ {
        self.entries
            .range((c, 0)..(c + 1, 0))
            .map(|(&(_, r), v)| (r, v))
    }

    /// Nonzero entries as `(row, column, value)`, column-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.entries.iter().map(|(&(c, r), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.entries.insert((r, c), v.clone());
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (k, b) in other.column(j) {
                for (i, a) in self.column(k) {
                    *acc.entry(i).or_default() += a * b;
                }
            }
            for (i, v) in acc {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::default(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            d[r][c] = v.clone();
        }
        d
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Result of [`smith_normal_form`]: the nonzero diagonal entries
/// `d_1 | d_2 | … | d_r`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    /// True when the elimination had to leave `i64`.
    pub used_bigint: bool,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Diagonal entries greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal
            .iter()
            .filter(|d| **d > BigInt::from(1))
            .cloned()
            .collect()
    }
}

/// Computes the Smith normal form diagonal of `m`.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let small: Option<Vec<i64>> = Work::<i64>::load(m).and_then(|w| w.eliminate());
    match small {
        Some(pivots) => SmithForm {
            diagonal: normalize(pivots.into_iter().map(BigInt::from).collect()),
            used_bigint: false,
        },
        None => smith_normal_form_bigint(m),
    }
}

/// Smith normal form computed on arbitrary-precision integers throughout.
pub fn smith_normal_form_bigint(m: &IntegerMatrix) -> SmithForm {
    let pivots = Work::<BigInt>::load(m)
        .and_then(|w| w.eliminate())
        .expect("arbitrary precision elimination cannot overflow");
    SmithForm {
        diagonal: normalize(pivots),
        used_bigint: true,
    }
}

/// Rewrites a diagonal into a divisibility chain with the same product
/// structure.
fn normalize(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for v in d.iter_mut() {
        *v = v.abs();
    }
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Scalar arithmetic the elimination needs. Operations return `None` on
/// overflow.
trait Scalar: Clone + fmt::Debug {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn zero_value() -> Self;
    fn is_nil(&self) -> bool;
    fn abs_key(&self) -> Option<Self>;
    fn lt(&self, other: &Self) -> bool;
    fn quot(&self, d: &Self) -> Option<Self>;
    /// `self - q * x`
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
}

impl Scalar for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn zero_value() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn abs_key(&self) -> Option<Self> {
        self.checked_abs()
    }
    fn lt(&self, other: &Self) -> bool {
        self < other
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*x)?)
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn zero_value() -> Self {
        BigInt::default()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_key(&self) -> Option<Self> {
        Some(self.abs())
    }
    fn lt(&self, other: &Self) -> bool {
        self < other
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
}

/// Working copy: row maps plus column occupancy sets.
struct Work<T> {
    rows: Vec<BTreeMap<usize, T>>,
    cols: Vec<BTreeSet<usize>>,
}

impl<T: Scalar> Work<T> {
    fn load(m: &IntegerMatrix) -> Option<Self> {
        let mut rows = vec![BTreeMap::new(); m.rows()];
        let mut cols = vec![BTreeSet::new(); m.cols()];
        for (r, c, v) in m.iter() {
            rows[r].insert(c, T::from_big(v)?);
            cols[c].insert(r);
        }
        Some(Work { rows, cols })
    }

    fn get(&self, r: usize, c: usize) -> &T {
        &self.rows[r][&c]
    }

    fn store(&mut self, r: usize, c: usize, v: T) {
        if v.is_nil() {
            self.rows[r].remove(&c);
            self.cols[c].remove(&r);
        } else {
            self.rows[r].insert(c, v);
            self.cols[c].insert(r);
        }
    }

    /// Entry of least absolute value; ties go to the smaller Markowitz
    /// cost, then to the smaller `(row, column)`.
    fn choose_pivot(&self) -> Option<Option<(usize, usize)>> {
        let mut best: Option<(T, usize, (usize, usize))> = None;
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, v) in row {
                let a = v.abs_key()?;
                let cost = (row.len() - 1) * (self.cols[c].len() - 1);
                let better = match &best {
                    None => true,
                    Some((ba, bcost, bpos)) => {
                        a.lt(ba) || (!ba.lt(&a) && (cost, (r, c)) < (*bcost, *bpos))
                    }
                };
                if better {
                    best = Some((a, cost, (r, c)));
                }
            }
        }
        Some(best.map(|(_, _, pos)| pos))
    }

    /// `row_i -= q * row_p`
    fn row_op(&mut self, i: usize, p: usize, q: &T) -> Option<()> {
        let src: Vec<(usize, T)> = self.rows[p].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in src {
            let cur = self.rows[i].get(&c).cloned();
            let new = cur.unwrap_or_else(T::zero_value).sub_mul(q, &v)?;
            self.store(i, c, new);
        }
        Some(())
    }

    /// `col_j -= q * col_p`
    fn col_op(&mut self, j: usize, p: usize, q: &T) -> Option<()> {
        let src: Vec<usize> = self.cols[p].iter().copied().collect();
        for r in src {
            let v = self.get(r, p).clone();
            let cur = self.rows[r].get(&j).cloned().unwrap_or_else(T::zero_value);
            let new = cur.sub_mul(q, &v)?;
            self.store(r, j, new);
        }
        Some(())
    }

    fn eliminate(mut self) -> Option<Vec<T>> {
        let mut pivots = Vec::new();
        while let Some((mut r, mut c)) = self.choose_pivot()? {
            loop {
                let mut dirty = false;
                let a = self.get(r, c).clone();
                let others: Vec<usize> = self.cols[c].iter().copied().filter(|&i| i != r).collect();
                for i in others {
                    let q = self.get(i, c).quot(&a)?;
                    if !q.is_nil() {
                        self.row_op(i, r, &q)?;
                    }
                    if self.rows[i].contains_key(&c) {
                        dirty = true;
                    }
                }
                if dirty {
                    (r, c) = self.smallest_in_col(c)?;
                    continue;
                }
                let others: Vec<usize> = self.rows[r].keys().copied().filter(|&j| j != c).collect();
                for j in others {
                    let q = self.get(r, j).quot(&a)?;
                    if !q.is_nil() {
                        self.col_op(j, c, &q)?;
                    }
                    if self.rows[r].contains_key(&j) {
                        dirty = true;
                    }
                }
                if dirty {
                    (r, c) = self.smallest_in_row(r)?;
                    continue;
                }
                break;
            }
            let a = self.get(r, c).clone();
            pivots.push(a.abs_key()?);
            self.store(r, c, T::zero_value());
        }
        Some(pivots)
    }

    fn smallest_in_col(&self, c: usize) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize)> = None;
        for &i in &self.cols[c] {
            let a = self.get(i, c).abs_key()?;
            if best.as_ref().is_none_or(|(b, _)| a.lt(b)) {
                best = Some((a, i));
            }
        }
        best.map(|(_, i)| (i, c))
    }

    fn smallest_in_row(&self, r: usize) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize)> = None;
        for (&j, v) in &self.rows[r] {
            let a = v.abs_key()?;
            if best.as_ref().is_none_or(|(b, _)| a.lt(b)) {
                best = Some((a, j));
            }
        }
        best.map(|(_, j)| (r, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_forms() {
        let m = IntegerMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec![2.into(), 6.into(), 12.into()]);

        let m = IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&m).diagonal, vec![1.into(), 6.into()]);

        let m = IntegerMatrix::zeros(3, 4);
        assert_eq!(smith_normal_form(&m).rank(), 0);

        let m = IntegerMatrix::from_rows(&[vec![1, 1], vec![1, -1]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec![1.into(), 2.into()]);
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2)]);
    }

    #[test]
    fn falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let m = IntegerMatrix::from_rows(&[vec![big, 1], vec![1, big]]);
        let s = smith_normal_form(&m);
        assert!(s.used_bigint);
        assert_eq!(s, SmithForm { used_bigint: true, ..smith_normal_form_bigint(&m) });
        let det: BigInt = BigInt::from(big) * BigInt::from(big) - 1;
        let prod: BigInt = s.diagonal.iter().product();
        assert_eq!(prod, det.abs());
    }

    #[test]
    fn product_and_transpose() {
        let a = IntegerMatrix::from_rows(&[vec![1, 2], vec![0, -1]]);
        let b = IntegerMatrix::from_rows(&[vec![3], vec![4]]);
        assert_eq!(a.mul(&b), IntegerMatrix::from_rows(&[vec![11], vec![-4]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.nnz(), 3);
    }
}
