//! Finite group presentations, their text format, abelianization, and the
//! raw presentation of the hard-square braid group `B_{pq-2}(p×q)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::matrix::{smith_normal_form, IntegerMatrix};
use crate::word::{parse_tokens, GenSym, Word};

/// Where a presentation sits in the simplification pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    S1,
    S2,
    S3,
    Final,
    /// Final presentation of a `p × 3` grid rewritten over `u`, `v`, `w`.
    Q3,
    Abcd,
    Hp,
    /// Parsed from text or assembled by hand.
    Unlabelled,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::S1 => "s1",
            Stage::S2 => "s2",
            Stage::S3 => "s3",
            Stage::Final => "final",
            Stage::Q3 => "q3",
            Stage::Abcd => "abcd",
            Stage::Hp => "hp",
            Stage::Unlabelled => "unlabelled",
        }
    }

    pub fn from_name(s: &str) -> Option<Stage> {
        [
            Stage::Raw,
            Stage::S1,
            Stage::S2,
            Stage::S3,
            Stage::Final,
            Stage::Q3,
            Stage::Abcd,
            Stage::Hp,
            Stage::Unlabelled,
        ]
        .into_iter()
        .find(|st| st.name() == s)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A relator in canonical cyclic form, tagged with the family it belongs to
/// and the indices it was generated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    pub word: Word,
    pub family: String,
    pub indices: Vec<u32>,
}

/// Generators and relators. Relators are kept cyclically reduced in
/// canonical rotation and are never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<GenSym>,
    relators: Vec<Relator>,
    pub stage: Stage,
}

/// Free rank and torsion of the abelianization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abelianization {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Presentation {
    pub fn new(generators: Vec<GenSym>, stage: Stage) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g) {
                return domain(format!("generator {g} listed twice"));
            }
        }
        Ok(Presentation {
            generators,
            relators: Vec::new(),
            stage,
        })
    }

    pub fn generators(&self) -> &[GenSym] {
        &self.generators
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn relator(&self, i: usize) -> Option<&Relator> {
        self.relators.get(i)
    }

    pub fn has_generator(&self, g: &GenSym) -> bool {
        self.generators.contains(g)
    }

    /// Adds a relator after canonicalizing it. Empty relators and unknown
    /// generators are rejected.
    pub fn add_relator(&mut self, word: &Word, family: &str, indices: &[u32]) -> Result<usize> {
        let canon = word.cyclic_reduce();
        if canon.is_empty() {
            return domain(format!("relator {word} of family {family} is trivial"));
        }
        self.check_generators(&canon)?;
        self.relators.push(Relator {
            word: canon,
            family: family.to_string(),
            indices: indices.to_vec(),
        });
        Ok(self.relators.len() - 1)
    }

    pub(crate) fn check_generators(&self, w: &Word) -> Result<()> {
        for g in w.generators() {
            if !self.has_generator(&g) {
                return domain(format!("relator mentions unlisted generator {g}"));
            }
        }
        Ok(())
    }

    pub(crate) fn push_generator(&mut self, g: GenSym) -> Result<()> {
        if self.has_generator(&g) {
            return domain(format!("generator {g} already present"));
        }
        self.generators.push(g);
        Ok(())
    }

    pub(crate) fn remove_generator(&mut self, g: &GenSym) {
        self.generators.retain(|h| h != g);
    }

    pub(crate) fn remove_relator(&mut self, i: usize) -> Relator {
        self.relators.remove(i)
    }

    pub(crate) fn relators_mut(&mut self) -> &mut Vec<Relator> {
        &mut self.relators
    }

    /// Text form: `gens: …` followed by one `rel: …` line per relator.
    pub fn render(&self) -> String {
        let mut out = String::from("gens:");
        for g in &self.generators {
            out.push(' ');
            out.push_str(&g.to_string());
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str("rel: ");
            out.push_str(&r.word.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Families are left blank and the stage is
    /// [`Stage::Unlabelled`].
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing gens line".into(),
        })?;
        let rest = first.strip_prefix("gens:").ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "expected `gens:`".into(),
        })?;
        let gens_word = parse_tokens(rest, 1, 6)?;
        if gens_word.letters().iter().any(|l| l.inv) {
            return Err(Error::Parse {
                line: 1,
                column: 6,
                message: "generator list cannot contain inverses".into(),
            });
        }
        let gens: Vec<GenSym> = gens_word.letters().iter().map(|l| l.gen.clone()).collect();
        let mut pr = Presentation::new(gens, Stage::Unlabelled).map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: e.to_string(),
        })?;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let body = line.strip_prefix("rel:").ok_or_else(|| Error::Parse {
                line: lineno,
                column: 1,
                message: "expected `rel:`".into(),
            })?;
            let w = parse_tokens(body, lineno, 5)?;
            pr.add_relator(&w, "", &[]).map_err(|e| Error::Parse {
                line: lineno,
                column: 5,
                message: e.to_string(),
            })?;
        }
        Ok(pr)
    }

    /// First 16 hex digits of the SHA-256 of the text form.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.render().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Relators × generators matrix of exponent sums.
    pub fn exponent_matrix(&self) -> IntegerMatrix {
        let pos: BTreeMap<&GenSym, usize> = self.generators.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = IntegerMatrix::zeros(self.relators.len(), self.generators.len());
        for (r, rel) in self.relators.iter().enumerate() {
            for l in rel.word.letters() {
                m.add_to(r, pos[&l.gen], &BigInt::from(l.exponent()));
            }
        }
        m
    }

    pub fn abelianization(&self) -> Abelianization {
        let snf = smith_normal_form(&self.exponent_matrix());
        Abelianization {
            rank: self.generators.len() - snf.rank(),
            torsion: snf.invariant_factors(),
        }
    }

    pub fn family_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for r in &self.relators {
            *out.entry(r.family.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn family_words(&self, family: &str) -> Vec<Word> {
        let mut ws: Vec<Word> = self
            .relators
            .iter()
            .filter(|r| r.family == family)
            .map(|r| r.word.clone())
            .collect();
        ws.sort();
        ws
    }

    pub fn find_relator(&self, family: &str, indices: &[u32]) -> Option<usize> {
        self.relators
            .iter()
            .position(|r| r.family == family && r.indices == indices)
    }

    /// Same generators and relator words, ignoring families and stage.
    pub fn same_data(&self, other: &Presentation) -> bool {
        self.generators == other.generators
            && self.relators.len() == other.relators.len()
            && self.relators.iter().zip(&other.relators).all(|(a, b)| a.word == b.word)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub(crate) fn check_pq(p: u32, q: u32) -> Result<()> {
    if q < 3 || p < q {
        return domain(format!("presentations need p >= q >= 3, got p={p}, q={q}"));
    }
    if p > 64 {
        return domain(format!("p={p} is beyond the supported range"));
    }
    Ok(())
}

/// Generators `a_{ℓ,i}`, `b_{ℓ,i}`, `c_{ℓ,i}` for `1 ≤ ℓ ≤ q−1`,
/// `1 ≤ i ≤ p−1`, and the five relator families:
///
/// * `"2"`: `a_{1,1}` and `c_{q−1,1}`;
/// * `"3"`: `b_{ℓ,i} a_{ℓ,j} b_{ℓ,i}⁻¹ c_{ℓ,j}⁻¹` for `i < j`;
/// * `"4"`: `c_{ℓ,i} a_{ℓ+1,j} b_{ℓ,i}⁻¹ b_{ℓ+1,j}⁻¹` for `ℓ ≤ q−2`, `j ≤ p−i`;
/// * `"4a"`: `[c_{ℓ,i}, a_{ℓ+1,j}]` for `ℓ ≤ q−2`, `3 ≤ i,j`, `i+j ≥ p+2`;
/// * `"4b"`: `[c_{ℓ,i}, a_{λ,j}]` for `ℓ+1 < λ ≤ q−1`.
pub fn raw_presentation(p: u32, q: u32) -> Result<Presentation> {
    check_pq(p, q)?;
    let mut gens = Vec::new();
    for make in [GenSym::a, GenSym::b, GenSym::c] {
        for l in 1..q {
            for i in 1..p {
                gens.push(make(l, i));
            }
        }
    }
    let mut pr = Presentation::new(gens, Stage::Raw)?;
    let a = |l, i| GenSym::a(l, i).word();
    let b = |l, i| GenSym::b(l, i).word();
    let c = |l, i| GenSym::c(l, i).word();

    pr.add_relator(&a(1, 1), "2", &[1])?;
    pr.add_relator(&c(q - 1, 1), "2", &[2])?;
    for l in 1..q {
        for i in 1..p {
            for j in i + 1..p {
                let w = Word::product(&[&b(l, i), &a(l, j), &b(l, i).inverse(), &c(l, j).inverse()]);
                pr.add_relator(&w, "3", &[l, i, j])?;
            }
        }
    }
    for l in 1..q - 1 {
        for i in 1..p {
            for j in 1..=p - i {
                let w = Word::product(&[&c(l, i), &a(l + 1, j), &b(l, i).inverse(), &b(l + 1, j).inverse()]);
                pr.add_relator(&w, "4", &[l, i, j])?;
            }
        }
    }
    for l in 1..q - 1 {
        for i in 3..p {
            for j in 3..p {
                if i + j >= p + 2 {
                    pr.add_relator(&Word::commutator(&c(l, i), &a(l + 1, j)), "4a", &[l, i, j])?;
                }
            }
        }
    }
    for l in 1..q {
        for lambda in l + 2..q {
            for i in 1..p {
                for j in 1..p {
                    pr.add_relator(&Word::commutator(&c(l, i), &a(lambda, j)), "4b", &[l, lambda, i, j])?;
                }
            }
        }
    }
    Ok(pr)
}
