//! Independent oracles shared by the property and acceptance suites. None of
//! these call into the code they check beyond building inputs.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use squarebraid::grid::CubeComplex;
use squarebraid::matrix::IntegerMatrix;
use squarebraid::raag::RaagGraph;
use squarebraid::word::{GenSym, Letter, Word};

pub fn dense(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense()
}

/// `∂_{k-1} ∘ ∂_k` is zero for every `k`.
pub fn boundary_squares_to_zero(c: &CubeComplex) -> bool {
    (2..=c.top_dim()).all(|k| {
        let a = c.boundary_matrix(k - 1).unwrap();
        let b = c.boundary_matrix(k).unwrap();
        a.mul(&b).is_zero()
    })
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64, density: f64) -> IntegerMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-bound..=bound) } else { 0 })
                .collect()
        })
        .collect();
    IntegerMatrix::from_rows(&data)
}

pub fn permuted(m: &IntegerMatrix, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.iter() {
        out.set(rows[r], cols[c], v.clone());
    }
    out
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Fraction-free determinant.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from gcds of minors: `d_k / d_{k-1}`. Only for small
/// matrices.
pub fn invariant_factors_by_minors(m: &IntegerMatrix) -> Vec<BigInt> {
    let a = dense(m);
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = BigInt::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let minor: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c].clone()).collect()).collect();
                g = g.gcd(&bareiss_det(minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(m: &IntegerMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = dense(m)
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pivot_row = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn abs_nonzero(v: &[BigInt]) -> Vec<BigInt> {
    v.iter().filter(|x| !x.is_zero()).map(|x| x.abs()).collect()
}

/// Graph on plain vertices `a, b, c, …` with edges given as index pairs.
pub fn small_graph(n: usize, edges: &[(usize, usize)]) -> RaagGraph {
    let names: Vec<GenSym> = (0..n).map(|i| GenSym::plain(&((b'a' + i as u8) as char).to_string())).collect();
    let e: Vec<(GenSym, GenSym)> = edges.iter().map(|&(i, j)| (names[i].clone(), names[j].clone())).collect();
    RaagGraph::new(names, &e).unwrap()
}

/// One representative per isomorphism class of graphs on `n ≤ 4` vertices,
/// as edge lists.
pub fn graphs_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = all_perms(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u32;
                for &(i, j) in &edges {
                    let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                    m |= 1 << pairs.iter().position(|&e| e == (a, b)).unwrap();
                }
                m
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(edges);
        }
    }
    out
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Letters coded as `2·gen + inv`, so code order is letter order for
/// generators named in alphabetical order.
pub type Code = u8;

/// Shortest lexicographically least word reachable by swapping adjacent
/// commuting letters and deleting adjacent inverse pairs.
pub fn brute_normal_form(adj: &[Vec<bool>], w: &[Code]) -> Vec<Code> {
    let mut seen: HashSet<Vec<Code>> = HashSet::new();
    let mut stack = vec![w.to_vec()];
    seen.insert(w.to_vec());
    let mut best = w.to_vec();
    while let Some(cur) = stack.pop() {
        if cur.len() < best.len() || (cur.len() == best.len() && cur < best) {
            best = cur.clone();
        }
        for i in 0..cur.len().saturating_sub(1) {
            let (x, y) = (cur[i], cur[i + 1]);
            let (gx, gy) = ((x / 2) as usize, (y / 2) as usize);
            let next = if gx == gy && x != y {
                let mut n = cur.clone();
                n.drain(i..i + 2);
                n
            } else if gx != gy && adj[gx][gy] {
                let mut n = cur.clone();
                n.swap(i, i + 1);
                n
            } else {
                continue;
            };
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    best
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    adj
}

pub fn decode(g: &RaagGraph, w: &[Code]) -> Word {
    Word::from_letters(
        w.iter()
            .map(|&c| Letter {
                gen: g.vertices()[(c / 2) as usize].clone(),
                inv: c % 2 == 1,
            })
            .collect(),
    )
}

/// All words of length exactly `len` over `letters` codes.
pub fn words_of_length(letters: usize, len: usize) -> Vec<Vec<Code>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..letters as Code).map(move |c| {
                    let mut n = w.clone();
                    n.push(c);
                    n
                })
            })
            .collect();
    }
    out
}

/// Brute normal forms of every word of length at most `max_len`, indexed
/// per length. A word's form is the brute form of its prefix's form with the
/// last letter appended; the search then runs once per distinct key instead
/// of once per word.
pub fn brute_forms_by_length(adj: &[Vec<bool>], letters: usize, max_len: usize) -> Vec<HashMap<Vec<Code>, Vec<Code>>> {
    use rayon::prelude::*;
    let mut levels: Vec<HashMap<Vec<Code>, Vec<Code>>> = vec![HashMap::from([(vec![], vec![])])];
    for len in 1..=max_len {
        let prev = &levels[len - 1];
        let words = words_of_length(letters, len);
        let key_of = |w: &Vec<Code>| {
            let mut k = prev[&w[..len - 1]].clone();
            k.push(w[len - 1]);
            k
        };
        let keys: HashSet<Vec<Code>> = words.iter().map(key_of).collect();
        let keys: Vec<Vec<Code>> = keys.into_iter().collect();
        let solved: HashMap<Vec<Code>, Vec<Code>> = keys.par_iter().map(|k| (k.clone(), brute_normal_form(adj, k))).collect();
        let level = words.iter().map(|w| (w.clone(), solved[&key_of(w)].clone())).collect();
        levels.push(level);
    }
    levels
}

/// Checks `normal_form` and `is_identity` against the brute oracle on every
/// word of length at most `max_len`, for every graph on at most `max_n`
/// vertices up to isomorphism. Returns the number of words checked and the
/// first disagreement.
pub fn raag_exhaustive(max_n: usize, max_len: usize) -> (usize, Option<String>) {
    use rayon::prelude::*;
    let mut checked = 0;
    for n in 1..=max_n {
        for edges in graphs_up_to_iso(n) {
            let g = small_graph(n, &edges);
            let adj = adjacency(n, &edges);
            let levels = brute_forms_by_length(&adj, 2 * n, max_len);
            for level in &levels {
                checked += level.len();
                let entries: Vec<(&Vec<Code>, &Vec<Code>)> = level.iter().collect();
                let bad = entries.par_iter().find_map_any(|&(w, want)| {
                    let word = decode(&g, w);
                    let got = g.normal_form(&word).unwrap();
                    let trivial = g.is_identity(&word).unwrap();
                    if got != decode(&g, want) || trivial != want.is_empty() {
                        Some(format!("graph {edges:?}, word {word}: got {got}, want {}", decode(&g, want)))
                    } else {
                        None
                    }
                });
                if bad.is_some() {
                    return (checked, bad);
                }
            }
        }
    }
    (checked, None)
}

/// Membership in special subgroups against a search over words in the
/// subgroup generators: `w ∈ ⟨S⟩` iff some word over `S` of length at most
/// `|w|` has the same brute normal form.
pub fn special_membership_exhaustive(max_n: usize, max_len: usize) -> (usize, Option<String>) {
    let mut checked = 0;
    for n in 1..=max_n {
        for edges in graphs_up_to_iso(n) {
            let g = small_graph(n, &edges);
            let adj = adjacency(n, &edges);
            let mut forms: HashMap<Vec<Code>, Vec<Code>> = HashMap::new();
            let mut all = Vec::new();
            for len in 0..=max_len {
                for w in words_of_length(2 * n, len) {
                    forms.insert(w.clone(), brute_normal_form(&adj, &w));
                    all.push(w);
                }
            }
            for mask in 0u32..(1 << n) {
                let subset: BTreeSet<GenSym> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| g.vertices()[i].clone()).collect();
                let reachable: HashSet<&Vec<Code>> = all
                    .iter()
                    .filter(|w| w.iter().all(|&c| mask >> (c / 2) & 1 == 1))
                    .map(|w| &forms[w])
                    .collect();
                for w in &all {
                    checked += 1;
                    let want = reachable.contains(&forms[w]);
                    let got = g.in_special_subgroup(&decode(&g, w), &subset).unwrap();
                    if got != want {
                        return (checked, Some(format!("graph {edges:?}, subset {mask:b}, word {}", decode(&g, w))));
                    }
                }
            }
        }
    }
    (checked, None)
}

/// Random word over the base vertices and the stable letter. Pieces of the
/// form `t g t⁻¹` with `g` in the domain (or the mirror) are mixed in so that
/// pinches actually occur.
pub fn random_hnn_word(rng: &mut impl Rng, h: &squarebraid::hnn::HnnGroup, pieces: usize) -> Word {
    let verts = h.base.vertices();
    let dom: Vec<&GenSym> = h.domain.iter().collect();
    let cod: Vec<&GenSym> = h.codomain.iter().collect();
    let letter = |g: &GenSym, inv: bool| Letter { gen: g.clone(), inv };
    let mut out = Vec::new();
    for _ in 0..pieces {
        match rng.gen_range(0..4) {
            0 => out.push(letter(&verts[rng.gen_range(0..verts.len())], rng.gen_bool(0.5))),
            1 => out.push(letter(&h.stable, rng.gen_bool(0.5))),
            k => {
                let (set, inv) = if k == 2 { (&dom, false) } else { (&cod, true) };
                if set.is_empty() {
                    out.push(letter(&h.stable, inv));
                    continue;
                }
                out.push(letter(&h.stable, inv));
                for _ in 0..rng.gen_range(0..4) {
                    out.push(letter(set[rng.gen_range(0..set.len())], rng.gen_bool(0.5)));
                }
                out.push(letter(&h.stable, !inv));
            }
        }
    }
    Word::from_letters(out)
}

/// Pinch-freeness after reduction, idempotence, `w·w⁻¹ = 1`, and triviality
/// verdicts unchanged by conjugation, on `count` random words.
pub fn britton_suite(p: u32, count: usize, seed: u64) -> Result<(), String> {
    use rand::SeedableRng;
    let h = squarebraid::hnn::build_hp(p).map_err(|e| e.to_string())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let pieces = rng.gen_range(1..12);
        let w = random_hnn_word(&mut rng, &h, pieces);
        let r = h.britton_reduce(&w).map_err(|e| e.to_string())?;
        if h.has_pinch(&r).map_err(|e| e.to_string())? {
            return Err(format!("p={p}: {w} reduces to {r}, which still has a pinch"));
        }
        if h.britton_reduce(&r).map_err(|e| e.to_string())? != r {
            return Err(format!("p={p}: reduction of {w} is not idempotent"));
        }
        let ww = Word::product(&[&w, &w.inverse()]);
        if !h.is_identity(&ww).map_err(|e| e.to_string())? {
            return Err(format!("p={p}: {w} times its inverse is not trivial"));
        }
        let c = random_hnn_word(&mut rng, &h, 3);
        let conj = Word::product(&[&c, &w, &c.inverse()]);
        if h.is_identity(&conj).map_err(|e| e.to_string())? != h.is_identity(&w).map_err(|e| e.to_string())? {
            return Err(format!("p={p}: triviality of {w} changes under conjugation by {c}"));
        }
    }
    Ok(())
}
