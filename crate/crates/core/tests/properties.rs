mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use squarebraid::grid::{build_grid, enumerate_cells};
use squarebraid::hnn::build_hp;
use squarebraid::matrix::{smith_normal_form, smith_normal_form_bigint, IntegerMatrix};
use squarebraid::raag::RaagGraph;
use squarebraid::word::{GenSym, Letter, Word};

use common::*;

#[test]
fn boundary_of_boundary_small_grids_every_n() {
    for (p, q) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)] {
        let g = build_grid(p, q).unwrap();
        for n in 1..=(p * q) as usize {
            let c = enumerate_cells(&g, n).unwrap();
            assert!(boundary_squares_to_zero(&c), "{p}x{q}, n={n}");
        }
    }
}

#[test]
fn snf_agrees_with_minors_and_rational_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (r, c) = (rng_range(&mut rng, 1, 5), rng_range(&mut rng, 1, 5));
        let m = random_matrix(&mut rng, r, c, 6, 0.6);
        let snf = smith_normal_form(&m);
        assert_eq!(abs_nonzero(&snf.diagonal), invariant_factors_by_minors(&m), "{:?}", dense(&m));
        assert_eq!(snf.rank(), rational_rank(&m));
        assert_eq!(smith_normal_form_bigint(&m).diagonal, snf.diagonal);
    }
}

fn rng_range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    use rand::Rng;
    rng.gen_range(lo..=hi)
}

#[test]
fn snf_invariant_under_permutations_of_boundary_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = enumerate_cells(&build_grid(4, 3).unwrap(), 10).unwrap();
    for k in 1..=c.top_dim() {
        let m = c.boundary_matrix(k).unwrap();
        let base = smith_normal_form(&m).diagonal;
        for _ in 0..100 {
            let rows = random_permutation(&mut rng, m.rows());
            let cols = random_permutation(&mut rng, m.cols());
            assert_eq!(smith_normal_form(&permuted(&m, &rows, &cols)).diagonal, base);
        }
    }
}

#[test]
fn raag_normal_form_matches_brute_force_exhaustively() {
    let (checked, bad) = raag_exhaustive(4, 6);
    assert!(bad.is_none(), "{bad:?}");
    assert!(checked > 1_000_000);
}

#[test]
fn special_subgroup_membership_matches_search() {
    let (checked, bad) = special_membership_exhaustive(4, 4);
    assert!(bad.is_none(), "{bad:?}");
    assert!(checked > 0);
}

#[test]
fn britton_random_words() {
    for p in 5..=8 {
        britton_suite(p, 1000, p as u64).unwrap();
    }
}

#[test]
fn britton_kills_defining_relators() {
    let h = build_hp(7).unwrap();
    let t = h.stable.word();
    for d in &h.domain {
        let img = h.phi(d).unwrap().word();
        let rel = Word::product(&[&t, &d.word(), &t.inverse(), &img.inverse()]);
        assert!(h.is_identity(&rel).unwrap(), "{rel}");
        let conj = Word::product(&[&h.base.vertices()[0].word(), &rel, &h.base.vertices()[0].word().inverse()]);
        assert!(h.is_identity(&conj).unwrap());
    }
    for (a, b) in h.base.edges() {
        let rel = Word::commutator(&a.word(), &b.word());
        let conj = Word::product(&[&t, &rel, &t.inverse()]);
        assert!(h.is_identity(&conj).unwrap());
    }
}

fn graph_strategy() -> impl Strategy<Value = RaagGraph> {
    (1usize..=5).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len())
            .prop_map(move |mask| {
                let edges: Vec<(usize, usize)> = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(&e, _)| e).collect();
                small_graph(n, &edges)
            })
    })
}

fn word_over(g: &RaagGraph, codes: &[(usize, bool)]) -> Word {
    let n = g.len();
    Word::from_letters(
        codes
            .iter()
            .map(|&(i, inv)| Letter {
                gen: g.vertices()[i % n].clone(),
                inv,
            })
            .collect(),
    )
}

fn codes() -> impl Strategy<Value = Vec<(usize, bool)>> {
    proptest::collection::vec((0usize..5, any::<bool>()), 0..14)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn raag_normal_form_laws(g in graph_strategy(), a in codes(), b in codes(), pos in 0usize..14) {
        let x = word_over(&g, &a);
        let y = word_over(&g, &b);
        let nx = g.normal_form(&x).unwrap();
        prop_assert_eq!(g.normal_form(&nx).unwrap(), nx.clone());
        prop_assert!(nx.len() <= x.len());
        prop_assert!(g.is_identity(&Word::product(&[&x, &x.inverse()])).unwrap());
        let xy = Word::product(&[&x, &y]);
        let nxy = Word::product(&[&nx, &g.normal_form(&y).unwrap()]);
        prop_assert_eq!(g.normal_form(&xy).unwrap(), g.normal_form(&nxy).unwrap());
        // inserting a cancelling pair anywhere changes nothing
        let mut letters = x.letters().to_vec();
        let k = pos % (letters.len() + 1);
        let l = Letter { gen: g.vertices()[pos % g.len()].clone(), inv: false };
        letters.insert(k, l.inverse());
        letters.insert(k, l);
        prop_assert_eq!(g.normal_form(&Word::from_letters(letters)).unwrap(), nx.clone());
        prop_assert_eq!(g.equal(&x, &y).unwrap(), g.equal(&y, &x).unwrap());
    }

    #[test]
    fn raag_special_subgroups_closed(g in graph_strategy(), a in codes(), mask in 0u32..32) {
        let subset: BTreeSet<GenSym> = g.vertices().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let inside: Vec<(usize, bool)> = a.iter().copied().filter(|&(i, _)| mask >> (i % g.len()) & 1 == 1).collect();
        let w = word_over(&g, &inside);
        prop_assert!(g.in_special_subgroup(&w, &subset).unwrap());
        prop_assert!(g.in_special_subgroup(&w.inverse(), &subset).unwrap());
    }

    #[test]
    fn free_reduction_laws(a in codes(), k in 0usize..20) {
        let g = small_graph(5, &[]);
        let w = word_over(&g, &a);
        let r = w.free_reduce();
        prop_assert!(r.is_freely_reduced());
        prop_assert_eq!(r.free_reduce(), r.clone());
        prop_assert!(Word::product(&[&w, &w.inverse()]).free_reduce().is_empty());
        let c = w.cyclic_reduce();
        if !c.is_empty() {
            prop_assert!(c.rotate(k % c.len()).cyclically_equivalent(&c));
        }
        prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w.clone());
        // free-group word problem agrees with the RAAG on the edgeless graph
        prop_assert_eq!(g.is_identity(&w).unwrap(), r.is_empty());
    }

    #[test]
    fn snf_matches_minors(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: IntegerMatrix = random_matrix(&mut rng, rows, cols, 9, 0.7);
        let snf = smith_normal_form(&m);
        prop_assert_eq!(abs_nonzero(&snf.diagonal), invariant_factors_by_minors(&m));
        prop_assert_eq!(snf.rank(), rational_rank(&m));
    }

    #[test]
    fn boundary_of_boundary(p in 2u32..5, q in 2u32..4, n in 1usize..12) {
        let g = build_grid(p, q).unwrap();
        prop_assume!(n <= (p * q) as usize);
        let c = enumerate_cells(&g, n).unwrap();
        prop_assert!(boundary_squares_to_zero(&c));
    }
}
