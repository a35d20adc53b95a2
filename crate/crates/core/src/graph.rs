//! Finite simple graphs, distinct-character words and the combinatorial
//! constructions built on them (labeled subgraphs, joins, supergraphs,
//! isolated-vertex padding).
//!
//! Vertices are 1-indexed in every public signature. Adjacency is stored as
//! packed bit rows so that the counting kernels can intersect neighbourhoods
//! word by word.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Default cap on the number of non-edges enumerated by [`supergraphs`].
pub const SUPERGRAPH_CAP: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    p: usize,
    wpr: usize,
    rows: Vec<u64>,
    m: usize,
}

impl SimpleGraph {
    /// Graph on `[p]` with the given 1-indexed edges. Loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn new(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(p)?;
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Domain(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > p || b > p {
                return Err(Error::Index(format!("edge {{{a},{b}}} outside [{p}]")));
            }
            if g.adj0(a - 1, b - 1) {
                return Err(Error::Domain(format!("duplicate edge {{{a},{b}}}")));
            }
            g.set0(a - 1, b - 1);
        }
        Ok(g)
    }

    pub fn empty(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Size("a graph needs at least one vertex".into()));
        }
        let wpr = p.div_ceil(64);
        Ok(Self { p, wpr, rows: vec![0; p * wpr], m: 0 })
    }

    pub fn complete(p: usize) -> Result<Self> {
        let mut g = Self::empty(p)?;
        for i in 0..p {
            for j in i + 1..p {
                g.set0(i, j);
            }
        }
        Ok(g)
    }

    pub fn path(p: usize) -> Result<Self> {
        let mut g = Self::empty(p)?;
        for i in 1..p {
            g.set0(i - 1, i);
        }
        Ok(g)
    }

    pub fn cycle(p: usize) -> Result<Self> {
        if p < 3 {
            return Err(Error::Size(format!("cycle needs 3 vertices, got {p}")));
        }
        let mut g = Self::path(p)?;
        g.set0(0, p - 1);
        Ok(g)
    }

    /// Builds a graph from packed rows; used by the sampler. Rows must be
    /// symmetric with an empty diagonal.
    pub(crate) fn from_rows(p: usize, rows: Vec<u64>) -> Self {
        let wpr = p.div_ceil(64);
        debug_assert_eq!(rows.len(), p * wpr);
        let twice: usize = rows.iter().map(|w| w.count_ones() as usize).sum();
        Self { p, wpr, rows, m: twice / 2 }
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    /// Bit row of the 0-indexed vertex `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.wpr..(i + 1) * self.wpr]
    }

    #[inline]
    pub fn adj0(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.wpr + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && i <= self.p && j <= self.p && self.adj0(i - 1, j - 1)
    }

    pub fn degree0(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn set0(&mut self, i: usize, j: usize) {
        if !self.adj0(i, j) {
            self.rows[i * self.wpr + j / 64] |= 1 << (j % 64);
            self.rows[j * self.wpr + i / 64] |= 1 << (i % 64);
            self.m += 1;
        }
    }

    /// Normalized (i<j) 1-indexed edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for i in 0..self.p {
            for j in i + 1..self.p {
                if self.adj0(i, j) {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// Non-edges {i,j}, i<j, 1-indexed.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.p {
            for j in i + 1..self.p {
                if !self.adj0(i, j) {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// Relabels vertex `v` as `perm[v-1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.p {
            return Err(Error::Size(format!("permutation of length {} for {} vertices", perm.len(), self.p)));
        }
        Word::new(perm.to_vec())?.check_alphabet(self.p)?;
        let edges: Vec<_> = self.edges().into_iter().map(|(a, b)| (perm[a - 1], perm[b - 1])).collect();
        Self::new(self.p, &edges)
    }

    /// Parses the edge-list format: a header line `p m`, then `m` lines `i j`.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let (p, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
        }
        let edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Self::new(p, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.p, self.m);
        for (a, b) in self.edges() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleGraph(p={}, {:?})", self.p, self.edges())
    }
}

/// Word with pairwise distinct characters (an element of M_n).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(chars: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &c in &chars {
            if c == 0 {
                return Err(Error::Word("characters are 1-indexed".into()));
            }
            if !seen.insert(c) {
                return Err(Error::Word(format!("character {c} repeated in {chars:?}")));
            }
        }
        Ok(Self(chars))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Parses a comma-separated list such as `1,3`; the empty string is the
    /// empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let chars = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad label {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chars)
    }

    pub fn chars(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.contains(&c)
    }

    /// Position (0-indexed) of character `c`.
    pub fn position(&self, c: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == c)
    }

    pub fn check_alphabet(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&c| c > n) {
            Some(c) => Err(Error::Word(format!("character {c} outside [{n}]"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledMotif {
    graph: SimpleGraph,
    labels: Word,
}

impl LabeledMotif {
    pub fn new(graph: SimpleGraph, labels: Word) -> Result<Self> {
        labels.check_alphabet(graph.order())?;
        Ok(Self { graph, labels })
    }

    pub fn unlabeled(graph: SimpleGraph) -> Self {
        Self { graph, labels: Word::empty() }
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn labels(&self) -> &Word {
        &self.labels
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// E(F^{[ℓ]}) as pairs of label positions (0-indexed, a<b).
    pub fn hat_pairs(&self) -> Vec<(usize, usize)> {
        let l = self.labels.chars();
        let mut out = Vec::new();
        for a in 0..l.len() {
            for b in a + 1..l.len() {
                if self.graph.adj0(l[a] - 1, l[b] - 1) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// E(F^{[ℓ]}) as normalized vertex pairs.
    pub fn labeled_subgraph_edges(&self) -> BTreeSet<(usize, usize)> {
        let l = self.labels.chars();
        self.hat_pairs()
            .into_iter()
            .map(|(a, b)| (l[a].min(l[b]), l[a].max(l[b])))
            .collect()
    }

    /// Unlabeled vertices in increasing order.
    pub fn free_vertices(&self) -> Vec<usize> {
        (1..=self.order()).filter(|v| !self.labels.contains(*v)).collect()
    }
}

/// Motifs sharing vertex count, label word and labeled subgraph.
#[derive(Clone, Debug)]
pub struct MotifFamily {
    motifs: Vec<LabeledMotif>,
}

impl MotifFamily {
    pub fn new(motifs: Vec<LabeledMotif>) -> Result<Self> {
        let first = motifs
            .first()
            .ok_or_else(|| Error::Family("empty family".into()))?;
        let hat = first.labeled_subgraph_edges();
        for m in &motifs[1..] {
            if m.order() != first.order() || m.labels() != first.labels() {
                return Err(Error::Family("motifs must share vertex count and labels".into()));
            }
            if m.labeled_subgraph_edges() != hat {
                return Err(Error::Family(
                    "labeled subgraphs differ across the family".into(),
                ));
            }
        }
        Ok(Self { motifs })
    }

    pub fn single(m: LabeledMotif) -> Self {
        Self { motifs: vec![m] }
    }

    pub fn motifs(&self) -> &[LabeledMotif] {
        &self.motifs
    }

    pub fn dim(&self) -> usize {
        self.motifs.len()
    }

    pub fn order(&self) -> usize {
        self.motifs[0].order()
    }

    pub fn k(&self) -> usize {
        self.motifs[0].k()
    }

    pub fn labels(&self) -> &Word {
        self.motifs[0].labels()
    }
}

/// Appends isolated vertices up to `target_p`, labelling the first
/// `extra_labels` of them.
pub fn pad_isolated(motif: &LabeledMotif, target_p: usize, extra_labels: usize) -> Result<LabeledMotif> {
    let p = motif.order();
    if target_p < p {
        return Err(Error::Size(format!("target {target_p} below motif order {p}")));
    }
    if extra_labels > target_p - p {
        return Err(Error::Size(format!("{extra_labels} extra labels but only {} new vertices", target_p - p)));
    }
    let g = SimpleGraph::new(target_p, &motif.graph().edges())?;
    let mut labels = motif.labels().chars().to_vec();
    labels.extend(p + 1..=p + extra_labels);
    LabeledMotif::new(g, Word::new(labels)?)
}

/// (F ⋈ F′)(q,q′): disjoint union with q′ identified to q.
pub fn join(f: &SimpleGraph, g: &SimpleGraph, q: usize, q2: usize) -> Result<SimpleGraph> {
    if q == 0 || q > f.order() {
        return Err(Error::Index(format!("vertex {q} not in [{}]", f.order())));
    }
    if q2 == 0 || q2 > g.order() {
        return Err(Error::Index(format!("vertex {q2} not in [{}]", g.order())));
    }
    let p = f.order();
    // F′ vertices other than q′ are shifted past F, skipping q′.
    let map = |v: usize| -> usize {
        match v.cmp(&q2) {
            std::cmp::Ordering::Equal => q,
            std::cmp::Ordering::Less => p + v,
            std::cmp::Ordering::Greater => p + v - 1,
        }
    };
    let mut out = SimpleGraph::empty(p + g.order() - 1)?;
    for (a, b) in f.edges() {
        out.set0(a - 1, b - 1);
    }
    for (a, b) in g.edges() {
        out.set0(map(a) - 1, map(b) - 1);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Supergraph {
    pub graph: SimpleGraph,
    /// e(F′) − e(F)
    pub extra_edges: usize,
}

pub fn supergraphs(f: &SimpleGraph) -> Result<Vec<Supergraph>> {
    supergraphs_capped(f, SUPERGRAPH_CAP)
}

/// All F′ on V(F) with E(F) ⊆ E(F′), in order of the bitmask over the
/// non-edges of F.
pub fn supergraphs_capped(f: &SimpleGraph, cap: usize) -> Result<Vec<Supergraph>> {
    let missing = f.non_edges();
    if missing.len() > cap {
        return Err(Error::Explosion { count: missing.len() as u64, cap: cap as u64 });
    }
    let mut out = Vec::with_capacity(1 << missing.len());
    for mask in 0u64..1 << missing.len() {
        let mut g = f.clone();
        for (bit, &(a, b)) in missing.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                g.set0(a - 1, b - 1);
            }
        }
        out.push(Supergraph { graph: g, extra_edges: mask.count_ones() as usize });
    }
    Ok(out)
}

/// R_i(word, q): replace the `i`-th (1-indexed) entry. Distinctness is not
/// enforced, so this also acts on real vectors.
pub fn substitute<T: Clone>(word: &[T], i: usize, q: T) -> Result<Vec<T>> {
    if i == 0 || i > word.len() {
        return Err(Error::Index(format!("position {i} outside word of length {}", word.len())));
    }
    let mut out = word.to_vec();
    out[i - 1] = q;
    Ok(out)
}

/// A_n^k = n!/(n−k)!.
pub fn falling(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (n - k + 1..=n).map(|v| v as u128).product()
}

/// Lazy lexicographic iterator over S_{n,k}.
pub fn enumerate_words(n: usize, k: usize) -> Result<Words> {
    if k > n {
        return Err(Error::Domain(format!("no words of length {k} over [{n}]")));
    }
    Ok(Words { n, cur: None, started: false, k })
}

pub struct Words {
    n: usize,
    k: usize,
    cur: Option<Vec<usize>>,
    started: bool,
}

impl Words {
    fn advance(&mut self) -> Option<Vec<usize>> {
        let n = self.n;
        let w = self.cur.as_mut()?;
        let mut used = vec![false; n + 1];
        for &c in w.iter() {
            used[c] = true;
        }
        for i in (0..w.len()).rev() {
            used[w[i]] = false;
            if let Some(next) = (w[i] + 1..=n).find(|&c| !used[c]) {
                w[i] = next;
                used[next] = true;
                let mut c = 1;
                for slot in w.iter_mut().skip(i + 1) {
                    while used[c] {
                        c += 1;
                    }
                    *slot = c;
                    used[c] = true;
                }
                return Some(w.clone());
            }
        }
        None
    }
}

impl Iterator for Words {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            self.cur = Some((1..=self.k).collect());
            return self.cur.clone();
        }
        let next = self.advance();
        if next.is_none() {
            self.cur = None;
        }
        next
    }
}

/// The word of lexicographic rank `r` in S_{n,k}.
pub fn word_from_rank(n: usize, k: usize, mut r: u128) -> Result<Vec<usize>> {
    let total = falling(n, k);
    if r >= total {
        return Err(Error::Index(format!("rank {r} outside |S_{{{n},{k}}}| = {total}")));
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let block = falling(n - i - 1, k - i - 1);
        let idx = (r / block) as usize;
        r %= block;
        out.push(pool.remove(idx));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pad_isolated_examples() {
        let k2 = LabeledMotif::new(SimpleGraph::complete(2).unwrap(), Word::new(vec![1]).unwrap()).unwrap();
        let padded = pad_isolated(&k2, 3, 0).unwrap();
        assert_eq!(padded.order(), 3);
        assert_eq!(padded.graph().edges(), vec![(1, 2)]);
        assert_eq!(padded.labels().chars(), &[1]);
        assert_eq!(pad_isolated(&k2, 2, 0).unwrap(), k2);
        let two = pad_isolated(&k2, 4, 2).unwrap();
        assert_eq!(two.labels().chars(), &[1, 3, 4]);
        assert!(matches!(pad_isolated(&k2, 1, 0), Err(Error::Size(_))));
        assert!(matches!(pad_isolated(&k2, 3, 2), Err(Error::Size(_))));
    }

    #[test]
    fn join_examples() {
        let k2 = SimpleGraph::complete(2).unwrap();
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(join(&k2, &k2, 1, 1).unwrap().edges(), vec![(1, 2), (1, 3)]);
        let j = join(&k2, &k2, 2, 2).unwrap();
        assert_eq!(j.order(), 3);
        assert_eq!(j.edges(), vec![(1, 2), (2, 3)]);
        let t = join(&k3, &k2, 1, 1).unwrap();
        assert_eq!((t.order(), t.num_edges()), (4, 4));
        assert!(matches!(join(&k2, &k2, 3, 1), Err(Error::Index(_))));
        assert!(matches!(join(&k2, &k2, 1, 0), Err(Error::Index(_))));
    }

    #[test]
    fn join_collapses_nothing_on_single_identification() {
        // identifying one vertex cannot create parallel edges
        let c4 = SimpleGraph::cycle(4).unwrap();
        let p3 = SimpleGraph::path(3).unwrap();
        for q in 1..=4 {
            for q2 in 1..=3 {
                let j = join(&c4, &p3, q, q2).unwrap();
                assert_eq!(j.order(), 6);
                assert_eq!(j.num_edges(), 6);
            }
        }
    }

    #[test]
    fn supergraph_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert_eq!(supergraphs(&k3).unwrap().len(), 1);
        let p3 = SimpleGraph::path(3).unwrap();
        let s = supergraphs(&p3).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].graph, p3);
        assert_eq!(s[1].graph, k3);
        assert_eq!(s[1].extra_edges, 1);
        let e3 = SimpleGraph::empty(3).unwrap();
        assert_eq!(supergraphs(&e3).unwrap().len(), 8);
        let e8 = SimpleGraph::empty(8).unwrap();
        assert!(matches!(supergraphs(&e8), Err(Error::Explosion { count: 28, cap: 20 })));
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(substitute(&['a', 'b', 'c'], 1, 'x').unwrap(), vec!['x', 'b', 'c']);
        assert_eq!(substitute(&['a', 'b', 'c'], 3, 'c').unwrap(), vec!['a', 'b', 'c']);
        assert_eq!(substitute(&[0.1, 0.7], 2, 0.4).unwrap(), vec![0.1, 0.4]);
        assert!(matches!(substitute(&[1, 2], 3, 1), Err(Error::Index(_))));
        assert!(matches!(substitute(&[1, 2], 0, 1), Err(Error::Index(_))));
    }

    #[test]
    fn word_examples() {
        let w: Vec<_> = enumerate_words(3, 1).unwrap().collect();
        assert_eq!(w, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(enumerate_words(3, 2).unwrap().count(), 6);
        assert_eq!(enumerate_words(4, 3).unwrap().count(), 24);
        assert_eq!(enumerate_words(3, 0).unwrap().collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert!(matches!(enumerate_words(2, 3), Err(Error::Domain(_))));
        let words: Vec<_> = enumerate_words(5, 3).unwrap().collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        for (r, w) in words.iter().enumerate() {
            assert_eq!(&word_from_rank(5, 3, r as u128).unwrap(), w);
        }
        assert!(Word::new(vec![1, 1]).is_err());
        assert_eq!(Word::parse("2, 5").unwrap().chars(), &[2, 5]);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = SimpleGraph::new(5, &[(1, 2), (4, 2), (3, 5)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "5 3\n1 2\n2 4\n3 5\n");
        assert_eq!(SimpleGraph::parse_edge_list(&text).unwrap(), g);
        assert!(SimpleGraph::parse_edge_list("3 2\n1 2\n").is_err());
        assert!(SimpleGraph::parse_edge_list("3 1\n1 1\n").is_err());
        assert!(SimpleGraph::new(3, &[(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn family_rejects_mixed_hat_subgraphs() {
        let l = Word::new(vec![1, 2]).unwrap();
        let a = LabeledMotif::new(SimpleGraph::path(3).unwrap(), l.clone()).unwrap();
        let b = LabeledMotif::new(SimpleGraph::new(3, &[(2, 3)]).unwrap(), l.clone()).unwrap();
        assert!(matches!(MotifFamily::new(vec![a.clone(), b]), Err(Error::Family(_))));
        let c = LabeledMotif::new(SimpleGraph::complete(3).unwrap(), l).unwrap();
        assert_eq!(MotifFamily::new(vec![a, c]).unwrap().dim(), 2);
    }

    #[test]
    fn wide_rows() {
        let g = SimpleGraph::new(130, &[(1, 130), (65, 66)]).unwrap();
        assert_eq!(g.words_per_row(), 3);
        assert!(g.has_edge(130, 1) && g.has_edge(66, 65));
        assert_eq!(g.degree0(0), 1);
    }
}
