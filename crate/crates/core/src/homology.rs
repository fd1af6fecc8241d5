//! Integer homology of chain complexes given by boundary matrices, and the
//! closed-form Betti numbers of the hard-square complexes at `n = pq − 2`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::grid::CubeComplex;
use crate::matrix::{smith_normal_form, IntegerMatrix, SmithForm};

/// Betti numbers, torsion and Euler characteristic of a finite chain complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub betti: Vec<usize>,
    /// Invariant factors greater than one, per degree.
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<Vec<BigInt>>,
    pub euler: i64,
    /// Largest degree carrying free or torsion homology.
    pub hdim_observed: Option<usize>,
    /// Rank of `∂_k` for `k = 1, 2, …`.
    pub boundary_ranks: Vec<usize>,
}

impl HomologySummary {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }

    /// Betti numbers padded with zeros to length `len`.
    pub fn betti_padded(&self, len: usize) -> Vec<usize> {
        let mut b = self.betti.clone();
        b.resize(len.max(b.len()), 0);
        b
    }
}

fn serialize_torsion<S: Serializer>(t: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let as_json: Vec<Vec<serde_json::Value>> = t.iter().map(|row| row.iter().map(bigint_json).collect()).collect();
    as_json.serialize(s)
}

/// JSON integer when it fits in `u64`, decimal string otherwise.
pub fn bigint_json(v: &BigInt) -> serde_json::Value {
    match u64::try_from(v) {
        Ok(x) => serde_json::Value::from(x),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

/// Homology of the chain complex with `f[k]` generators in degree `k` and
/// `boundaries[k] = ∂_{k+1}: C_{k+1} → C_k`.
pub fn homology_from_boundaries(f: &[usize], boundaries: &[IntegerMatrix]) -> Result<HomologySummary> {
    if boundaries.len() + 1 != f.len().max(1) {
        return domain(format!(
            "{} chain groups need {} boundary maps, got {}",
            f.len(),
            f.len().saturating_sub(1),
            boundaries.len()
        ));
    }
    for (k, d) in boundaries.iter().enumerate() {
        if d.rows() != f[k] || d.cols() != f[k + 1] {
            return domain(format!(
                "boundary {} is {}x{}, expected {}x{}",
                k + 1,
                d.rows(),
                d.cols(),
                f[k],
                f[k + 1]
            ));
        }
    }
    let forms: Vec<SmithForm> = boundaries.par_iter().map(smith_normal_form).collect();
    let rank = |k: usize| -> usize {
        if k == 0 || k > forms.len() {
            0
        } else {
            forms[k - 1].rank()
        }
    };
    let mut betti = Vec::with_capacity(f.len());
    let mut torsion = Vec::with_capacity(f.len());
    for (k, &fk) in f.iter().enumerate() {
        betti.push(fk - rank(k) - rank(k + 1));
        torsion.push(forms.get(k).map(SmithForm::invariant_factors).unwrap_or_default());
    }
    let euler = f
        .iter()
        .enumerate()
        .map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
        .sum();
    let hdim_observed = (0..f.len()).rev().find(|&k| betti[k] != 0 || !torsion[k].is_empty());
    Ok(HomologySummary {
        betti,
        torsion,
        euler,
        hdim_observed,
        boundary_ranks: forms.iter().map(SmithForm::rank).collect(),
    })
}

/// Homology of a configuration complex.
pub fn homology(c: &CubeComplex) -> Result<HomologySummary> {
    let f = c.f_vector();
    let boundaries = (1..f.len())
        .map(|k| c.boundary_matrix(k))
        .collect::<Result<Vec<_>>>()?;
    homology_from_boundaries(&f, &boundaries)
}

fn check_range(p: u32, q: u32) -> Result<(i64, i64)> {
    if q < 3 || p < q {
        return domain(format!("closed forms need p >= q >= 3, got p={p}, q={q}"));
    }
    Ok((p as i64, q as i64))
}

/// `(β₁, β₂)` of the complex of `pq − 2` squares on a `p × q` grid.
///
/// Both the factored and the expanded form of `β₂` are evaluated; they must
/// agree.
pub fn predict_betti(p: u32, q: u32) -> Result<(i64, i64)> {
    let (p, q) = check_range(p, q)?;
    let beta1 = (p - 1) * (q - 1) + 1;
    let twice = (p * p + 1) * (q * q + 1) - p * q * (2 * p + 2 * q + 3) + 7 * (p + q - 1);
    let expanded = p * p * q * q + p * p + q * q - 2 * p * q * q - 2 * p * p * q - 3 * p * q + 7 * p + 7 * q - 6;
    if twice != expanded || twice % 2 != 0 {
        return Err(crate::Error::Internal(format!(
            "second Betti number forms disagree: {twice} vs {expanded}"
        )));
    }
    Ok((beta1, twice / 2))
}

/// Homotopy dimension: `1` for the `3 × 3` grid, `2` otherwise.
pub fn predict_hdim(p: u32, q: u32) -> Result<usize> {
    check_range(p, q)?;
    Ok(if p == 3 && q == 3 { 1 } else { 2 })
}
