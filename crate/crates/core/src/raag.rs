//! Right-angled Artin groups: defining graphs, reduced words, a canonical
//! normal form, special subgroups, and graph isomorphism.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::presentation::{Presentation, Stage};
use crate::word::{GenSym, Letter, Word};

/// A finite simple graph whose vertices are generators. Adjacent
/// generators commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaagGraph {
    vertices: Vec<GenSym>,
    index: HashMap<GenSym, usize>,
    adj: Vec<Vec<bool>>,
    /// Position of each vertex in sorted generator order, so letter codes
    /// compare like letters.
    rank: Vec<usize>,
}

/// A letter as `(vertex index, inverted)`.
type Code = (usize, bool);

impl RaagGraph {
    pub fn new(vertices: Vec<GenSym>, edges: &[(GenSym, GenSym)]) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), k).is_some() {
                return domain(format!("vertex {v} listed twice"));
            }
        }
        let n = vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        let mut rank = vec![0; n];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r;
        }
        let mut g = RaagGraph {
            vertices,
            index,
            adj: vec![vec![false; n]; n],
            rank,
        };
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    fn add_edge(&mut self, a: &GenSym, b: &GenSym) -> Result<()> {
        let (Some(&i), Some(&j)) = (self.index.get(a), self.index.get(b)) else {
            return domain(format!("edge {a}-{b} uses an unknown vertex"));
        };
        if i == j {
            return domain(format!("loop at {a}"));
        }
        self.adj[i][j] = true;
        self.adj[j][i] = true;
        Ok(())
    }

    pub fn vertices(&self) -> &[GenSym] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, g: &GenSym) -> bool {
        self.index.contains_key(g)
    }

    pub fn position(&self, g: &GenSym) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn adjacent(&self, a: &GenSym, b: &GenSym) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.adj[i][j],
            _ => false,
        }
    }

    /// Edges as vertex pairs, each once, in vertex order.
    pub fn edges(&self) -> Vec<(GenSym, GenSym)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.adj[i][j] {
                    out.push((self.vertices[i].clone(), self.vertices[j].clone()));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&x| x).count()).sum::<usize>() / 2
    }

    pub fn degree(&self, g: &GenSym) -> usize {
        self.index
            .get(g)
            .map_or(0, |&i| self.adj[i].iter().filter(|&&x| x).count())
    }

    /// Subgraph induced on `subset`, keeping the order of `subset`.
    pub fn induced(&self, subset: &[GenSym]) -> Result<RaagGraph> {
        let edges: Vec<(GenSym, GenSym)> = self
            .edges()
            .into_iter()
            .filter(|(a, b)| subset.contains(a) && subset.contains(b))
            .collect();
        RaagGraph::new(subset.to_vec(), &edges)
    }

    fn encode(&self, w: &Word) -> Result<Vec<Code>> {
        w.letters()
            .iter()
            .map(|l| match self.index.get(&l.gen) {
                Some(&i) => Ok((i, l.inv)),
                None => domain(format!("generator {} is not a vertex", l.gen)),
            })
            .collect()
    }

    fn decode(&self, codes: &[Code]) -> Word {
        Word::from_letters(
            codes
                .iter()
                .map(|&(i, inv)| Letter {
                    gen: self.vertices[i].clone(),
                    inv,
                })
                .collect(),
        )
    }

    fn commute(&self, a: Code, b: Code) -> bool {
        a.0 == b.0 || self.adj[a.0][b.0]
    }

    fn reduce_codes(&self, w: &[Code]) -> Vec<Code> {
        let mut out: Vec<Code> = Vec::with_capacity(w.len());
        for &l in w {
            // scan back over letters commuting with l for an inverse
            let mut hit = None;
            for k in (0..out.len()).rev() {
                if out[k].0 == l.0 && out[k].1 != l.1 {
                    hit = Some(k);
                    break;
                }
                if !self.commute(out[k], l) {
                    break;
                }
            }
            match hit {
                Some(k) => {
                    out.remove(k);
                }
                None => out.push(l),
            }
        }
        out
    }

    /// Cancels pairs `s … s⁻¹` whose intermediate letters all commute with
    /// `s`, until none is left. The result is a shortest word for the
    /// element.
    pub fn reduce(&self, w: &Word) -> Result<Word> {
        Ok(self.decode(&self.reduce_codes(&self.encode(w)?)))
    }

    /// Lexicographically least shortest word for the element: reduce, then
    /// repeatedly take the smallest letter that can be shuffled to the
    /// front.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let mut rest = self.reduce_codes(&self.encode(w)?);
        let key = |c: Code| (self.rank[c.0], c.1);
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for k in 0..rest.len() {
                let free = (0..k).all(|m| rest[m].0 != rest[k].0 && self.adj[rest[m].0][rest[k].0]);
                if free && best.is_none_or(|b| key(rest[k]) < key(rest[b])) {
                    best = Some(k);
                }
            }
            let k = best.ok_or_else(|| Error::Internal("no letter can lead".into()))?;
            out.push(rest.remove(k));
        }
        Ok(self.decode(&out))
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        Ok(self.reduce_codes(&self.encode(w)?).is_empty())
    }

    pub fn equal(&self, x: &Word, y: &Word) -> Result<bool> {
        Ok(self.normal_form(x)? == self.normal_form(y)?)
    }

    /// Whether `w` lies in the subgroup generated by `subset`. A shortest
    /// word of an element of a special subgroup only uses its generators.
    pub fn in_special_subgroup(&self, w: &Word, subset: &BTreeSet<GenSym>) -> Result<bool> {
        Ok(self
            .reduce_codes(&self.encode(w)?)
            .iter()
            .all(|&(i, _)| subset.contains(&self.vertices[i])))
    }

    /// Presentation with one commutator relator per edge.
    pub fn presentation(&self) -> Result<Presentation> {
        let mut pr = Presentation::new(self.vertices.clone(), Stage::Unlabelled)?;
        for (a, b) in self.edges() {
            pr.add_relator(&Word::commutator(&a.word(), &b.word()), "edge", &[])?;
        }
        Ok(pr)
    }

    /// Reads the defining graph off a presentation whose relators are all
    /// commutators of two generators. `None` if some relator is not.
    pub fn from_presentation(pr: &Presentation) -> Option<RaagGraph> {
        let mut edges = Vec::new();
        for r in pr.relators() {
            let l = r.word.letters();
            if l.len() != 4 || l[0].gen == l[1].gen {
                return None;
            }
            let expected = Word::commutator(&Word::from_letters(vec![l[0].clone()]), &Word::from_letters(vec![l[1].clone()]));
            if expected != r.word {
                return None;
            }
            edges.push((l[0].gen.clone(), l[1].gen.clone()));
        }
        RaagGraph::new(pr.generators().to_vec(), &edges).ok()
    }

    /// A vertex bijection `map[i] = j` from `self` onto `other` preserving
    /// adjacency, found by backtracking with degree pruning.
    pub fn isomorphism(&self, other: &RaagGraph) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() || self.num_edges() != other.num_edges() {
            return None;
        }
        let deg = |g: &RaagGraph, i: usize| g.adj[i].iter().filter(|&&x| x).count();
        let da: Vec<usize> = (0..n).map(|i| deg(self, i)).collect();
        let db: Vec<usize> = (0..n).map(|i| deg(other, i)).collect();
        let (mut sa, mut sb) = (da.clone(), db.clone());
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(da[i]));
        let mut search = IsoSearch {
            a: self,
            b: other,
            order,
            da,
            db,
            map: vec![usize::MAX; n],
            used: vec![false; n],
        };
        search.extend(0).then_some(search.map)
    }

    /// Edge-list text: a `vertices:` line, then one `a b` line per edge.
    /// Blank lines and `#` comments are ignored.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("vertices:");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
        for (a, b) in self.edges() {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<RaagGraph> {
        let mut vertices: Option<Vec<GenSym>> = None;
        let mut edges = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let err = |column: usize, message: String| Error::Parse {
                line: n + 1,
                column,
                message,
            };
            if let Some(rest) = line.strip_prefix("vertices:") {
                if vertices.is_some() {
                    return Err(err(1, "second vertices line".into()));
                }
                vertices = Some(rest.split_whitespace().map(|t| t.parse().unwrap_or_else(|_| GenSym::plain(t))).collect());
                continue;
            }
            let Some(vs) = &vertices else {
                return Err(err(1, "edges before the vertices line".into()));
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(err(1, format!("an edge line needs two vertices, got {}", toks.len())));
            }
            let mut ends = Vec::new();
            for t in toks {
                let col = line.find(t).unwrap_or(0) + 1;
                let g: GenSym = t.parse().map_err(|_| err(col, format!("invalid vertex {t:?}")))?;
                if !vs.contains(&g) {
                    return Err(err(col, format!("unknown vertex {t}")));
                }
                ends.push(g);
            }
            if ends[0] == ends[1] {
                return Err(err(1, format!("loop at {}", ends[0])));
            }
            edges.push((ends[0].clone(), ends[1].clone()));
        }
        let vertices = vertices.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing vertices line".into(),
        })?;
        RaagGraph::new(vertices, &edges)
    }
}

/// Backtracking state for [`RaagGraph::isomorphism`].
struct IsoSearch<'g> {
    a: &'g RaagGraph,
    b: &'g RaagGraph,
    order: Vec<usize>,
    da: Vec<usize>,
    db: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn extend(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        let i = self.order[k];
        for j in 0..self.b.len() {
            if self.used[j] || self.da[i] != self.db[j] {
                continue;
            }
            let consistent = self.order[..k].iter().all(|&i2| self.a.adj[i][i2] == self.b.adj[j][self.map[i2]]);
            if !consistent {
                continue;
            }
            self.map[i] = j;
            self.used[j] = true;
            if self.extend(k + 1) {
                return true;
            }
            self.used[j] = false;
            self.map[i] = usize::MAX;
        }
        false
    }
}

impl fmt::Display for RaagGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GenSym {
        GenSym::plain(s)
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn path3() -> RaagGraph {
        RaagGraph::new(vec![g("p"), g("q"), g("r")], &[(g("p"), g("q")), (g("q"), g("r"))]).unwrap()
    }

    #[test]
    fn commuting_letters_cancel() {
        let gr = path3();
        assert!(gr.is_identity(&w("p q p^-1 q^-1")).unwrap());
        assert!(!gr.is_identity(&w("p r p^-1 r^-1")).unwrap());
        assert_eq!(gr.reduce(&w("p q r q^-1 p^-1")).unwrap(), w("p r p^-1"));
        assert_eq!(gr.reduce(&w("r p r^-1")).unwrap(), w("r p r^-1"));
        assert_eq!(gr.reduce(&w("p q q p^-1")).unwrap(), w("q q"));
    }

    #[test]
    fn normal_form_is_lex_least() {
        let gr = path3();
        assert_eq!(gr.normal_form(&w("q p")).unwrap(), w("p q"));
        assert_eq!(gr.normal_form(&w("r p")).unwrap(), w("r p"));
        assert!(gr.equal(&w("q r q^-1 p"), &w("r p")).unwrap());
        assert!(!gr.equal(&w("r p"), &w("p r")).unwrap());
        assert!(gr.normal_form(&w("z")).is_err());
    }

    #[test]
    fn special_subgroups() {
        let gr = path3();
        let s: BTreeSet<GenSym> = [g("p"), g("q")].into_iter().collect();
        assert!(!gr.in_special_subgroup(&w("r p r^-1"), &s).unwrap());
        assert!(gr.in_special_subgroup(&w("q p q^-1"), &s).unwrap());
        assert!(gr.in_special_subgroup(&w("r q r^-1"), &s).unwrap());
        assert!(!gr.in_special_subgroup(&w("r p"), &s).unwrap());
        assert!(gr.in_special_subgroup(&w("r r^-1 p"), &s).unwrap());
    }

    #[test]
    fn isomorphism_search() {
        let a = path3();
        let b = RaagGraph::new(vec![g("x"), g("y"), g("z")], &[(g("x"), g("z")), (g("z"), g("y"))]).unwrap();
        let m = a.isomorphism(&b).unwrap();
        assert_eq!(b.vertices()[m[1]], g("z"));
        let tri = RaagGraph::new(
            vec![g("x"), g("y"), g("z")],
            &[(g("x"), g("z")), (g("z"), g("y")), (g("x"), g("y"))],
        )
        .unwrap();
        assert!(a.isomorphism(&tri).is_none());
    }

    #[test]
    fn edge_list_round_trip() {
        let a = path3();
        let text = a.to_edge_list();
        assert_eq!(RaagGraph::parse_edge_list(&text).unwrap(), a);
        let err = RaagGraph::parse_edge_list("vertices: p q\np s\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 3,
                message: "unknown vertex s".into()
            }
        );
        assert!(RaagGraph::parse_edge_list("p q\n").is_err());
    }

    #[test]
    fn presentation_round_trip() {
        let a = path3();
        let pr = a.presentation().unwrap();
        assert_eq!(RaagGraph::from_presentation(&pr).unwrap(), a);
    }
}
