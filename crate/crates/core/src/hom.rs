//! Homomorphism counting on finite hosts.
//!
//! Motif vertices are placed one at a time; the candidate set for the next
//! vertex is the intersection of the host rows of its already-placed
//! neighbours (minus their rows for induced non-edges, minus used vertices
//! for injective maps), so the innermost level is a popcount.

use crate::graph::{falling, LabeledMotif, SimpleGraph, Word};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Hom,
    Inj,
    Ind,
}

struct Plan {
    order: Vec<usize>,
    /// per depth: earlier depths that must be adjacent
    adj: Vec<Vec<usize>>,
    /// per depth: earlier depths that must be non-adjacent (induced only)
    non: Vec<Vec<usize>>,
}

fn plan(f: &SimpleGraph, pinned: &[usize], mode: Mode, skip_pinned_pairs: bool) -> Plan {
    let p = f.order();
    let mut order: Vec<usize> = pinned.to_vec();
    let mut placed = vec![false; p];
    for &v in pinned {
        placed[v] = true;
    }
    while order.len() < p {
        let v = (0..p)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back = order.iter().filter(|&&u| f.adj0(u, v)).count();
                (back, f.degree0(v), std::cmp::Reverse(v))
            })
            .unwrap();
        placed[v] = true;
        order.push(v);
    }
    let npin = pinned.len();
    let mut adj = vec![Vec::new(); p];
    let mut non = vec![Vec::new(); p];
    for d in 0..p {
        for e in 0..d {
            if skip_pinned_pairs && d < npin {
                continue;
            }
            if f.adj0(order[d], order[e]) {
                adj[d].push(e);
            } else if mode == Mode::Ind {
                non[d].push(e);
            }
        }
    }
    Plan { order, adj, non }
}

struct Search<'a> {
    g: &'a SimpleGraph,
    plan: Plan,
    mode: Mode,
    image: Vec<usize>,
    cand: Vec<Vec<u64>>,
    used: Vec<u64>,
    full: Vec<u64>,
}

impl<'a> Search<'a> {
    fn new(g: &'a SimpleGraph, plan: Plan, mode: Mode) -> Self {
        let n = g.order();
        let wpr = g.words_per_row();
        let mut full = vec![u64::MAX; wpr];
        if !n.is_multiple_of(64) {
            full[wpr - 1] = (1u64 << (n % 64)) - 1;
        }
        let p = plan.order.len();
        Self { g, plan, mode, image: vec![0; p], cand: vec![vec![0; wpr]; p], used: vec![0; wpr], full }
    }

    fn fits(&self, d: usize, x: usize) -> bool {
        if self.mode != Mode::Hom && self.used[x / 64] >> (x % 64) & 1 == 1 {
            return false;
        }
        self.plan.adj[d].iter().all(|&e| self.g.adj0(self.image[e], x))
            && self.plan.non[d].iter().all(|&e| !self.g.adj0(self.image[e], x))
    }

    fn place(&mut self, d: usize, x: usize) {
        self.image[d] = x;
        self.used[x / 64] |= 1 << (x % 64);
    }

    fn unplace(&mut self, x: usize) {
        self.used[x / 64] &= !(1 << (x % 64));
    }

    fn fill_candidates(&mut self, d: usize) {
        let mut c = std::mem::take(&mut self.cand[d]);
        c.copy_from_slice(&self.full);
        for &e in &self.plan.adj[d] {
            for (w, r) in c.iter_mut().zip(self.g.row(self.image[e])) {
                *w &= r;
            }
        }
        for &e in &self.plan.non[d] {
            for (w, r) in c.iter_mut().zip(self.g.row(self.image[e])) {
                *w &= !r;
            }
        }
        if self.mode != Mode::Hom {
            for (w, u) in c.iter_mut().zip(&self.used) {
                *w &= !u;
            }
        }
        self.cand[d] = c;
    }

    fn run(&mut self, d: usize) -> u128 {
        let p = self.plan.order.len();
        if d == p {
            return 1;
        }
        self.fill_candidates(d);
        if d + 1 == p {
            return self.cand[d].iter().map(|w| w.count_ones() as u128).sum();
        }
        let mut total = 0;
        for wi in 0..self.cand[d].len() {
            let mut word = self.cand[d][wi];
            while word != 0 {
                let x = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                self.place(d, x);
                total += self.run(d + 1);
                if self.mode != Mode::Hom {
                    self.unplace(x);
                }
            }
        }
        total
    }
}

/// Number of maps of the given mode with `pins` (0-indexed motif vertex,
/// 0-indexed host vertex) imposed. With `skip_pinned_pairs`, constraints
/// between two pinned vertices are ignored.
pub fn count_pinned(f: &SimpleGraph, g: &SimpleGraph, mode: Mode, pins: &[(usize, usize)], skip_pinned_pairs: bool) -> u128 {
    let pinned: Vec<usize> = pins.iter().map(|&(v, _)| v).collect();
    let plan = plan(f, &pinned, mode, skip_pinned_pairs);
    let mut s = Search::new(g, plan, mode);
    for (d, &(_, x)) in pins.iter().enumerate() {
        if !s.fits(d, x) {
            return 0;
        }
        s.place(d, x);
    }
    s.run(pins.len())
}

pub fn count(f: &SimpleGraph, g: &SimpleGraph, mode: Mode) -> u128 {
    count_pinned(f, g, mode, &[], false)
}

fn check_sizes(f: &SimpleGraph, g: &SimpleGraph) -> Result<()> {
    if g.order() < f.order() {
        return Err(Error::Size(format!("host on {} vertices is smaller than motif on {}", g.order(), f.order())));
    }
    Ok(())
}

/// |Hom(F,G)| / n^p.
pub fn t_hom(f: &SimpleGraph, g: &SimpleGraph) -> f64 {
    count(f, g, Mode::Hom) as f64 / (g.order() as f64).powi(f.order() as i32)
}

/// |Inj(F,G)| / A_n^p.
pub fn t_inj(f: &SimpleGraph, g: &SimpleGraph) -> Result<f64> {
    check_sizes(f, g)?;
    Ok(count(f, g, Mode::Inj) as f64 / falling(g.order(), f.order()) as f64)
}

/// |Ind(F,G)| / A_n^p.
pub fn t_ind(f: &SimpleGraph, g: &SimpleGraph) -> Result<f64> {
    check_sizes(f, g)?;
    Ok(count(f, g, Mode::Ind) as f64 / falling(g.order(), f.order()) as f64)
}

#[derive(Clone, Debug)]
pub struct RootedCount {
    pub motif: LabeledMotif,
    pub root: Word,
    /// |Inj(F^ℓ,G^α)| = hat · tilde_count
    pub inj_count: u128,
    /// injective maps with φ(ℓ)=α preserving the edges outside E(F^{[ℓ]})
    pub tilde_count: u128,
    /// whether α carries every labeled edge
    pub hat: bool,
    /// A_{n−k}^{p−k}
    pub normalizer: u128,
    pub density: f64,
    pub tilde_density: f64,
}

/// Rooted injective count with labeled vertices pinned to α.
pub fn t_inj_rooted(motif: &LabeledMotif, g: &SimpleGraph, alpha: &Word) -> Result<RootedCount> {
    check_sizes(motif.graph(), g)?;
    if alpha.len() != motif.k() {
        return Err(Error::Word(format!("root of length {} for {} labels", alpha.len(), motif.k())));
    }
    alpha.check_alphabet(g.order())?;
    let l = motif.labels().chars();
    let a = alpha.chars();
    let hat = motif.hat_pairs().iter().all(|&(i, j)| g.adj0(a[i] - 1, a[j] - 1));
    let pins: Vec<(usize, usize)> = l.iter().zip(a).map(|(&v, &x)| (v - 1, x - 1)).collect();
    let tilde_count = count_pinned(motif.graph(), g, Mode::Inj, &pins, true);
    let normalizer = falling(g.order() - motif.k(), motif.order() - motif.k());
    let inj_count = if hat { tilde_count } else { 0 };
    Ok(RootedCount {
        motif: motif.clone(),
        root: alpha.clone(),
        inj_count,
        tilde_count,
        hat,
        normalizer,
        density: inj_count as f64 / normalizer as f64,
        tilde_density: tilde_count as f64 / normalizer as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleDensities {
    pub hom_count: u128,
    pub inj_count: u128,
    pub ind_count: u128,
    pub t_hom: f64,
    pub t_inj: f64,
    pub t_ind: f64,
}

const ORACLE_MAX_MOTIF: usize = 5;
const ORACLE_MAX_HOST: usize = 9;

fn oracle_guard(f: &SimpleGraph, g: &SimpleGraph) -> Result<()> {
    if f.order() > ORACLE_MAX_MOTIF || g.order() > ORACLE_MAX_HOST {
        return Err(Error::Explosion {
            count: (g.order() as u64).pow(f.order() as u32),
            cap: (ORACLE_MAX_HOST as u64).pow(ORACLE_MAX_MOTIF as u32),
        });
    }
    Ok(())
}

/// Visits every map V(F) → V(G) as a vector of 0-indexed images.
fn for_each_map(p: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    let mut phi = vec![0usize; p];
    loop {
        visit(&phi);
        let mut d = 0;
        loop {
            if d == p {
                return;
            }
            phi[d] += 1;
            if phi[d] < n {
                break;
            }
            phi[d] = 0;
            d += 1;
        }
    }
}

/// Ground truth by iterating all n^p maps without pruning.
pub fn oracle_densities(f: &SimpleGraph, g: &SimpleGraph) -> Result<OracleDensities> {
    oracle_guard(f, g)?;
    let (p, n) = (f.order(), g.order());
    let edges = f.edges();
    let non = f.non_edges();
    let (mut hom, mut inj, mut ind) = (0u128, 0u128, 0u128);
    for_each_map(p, n, |phi| {
        if !edges.iter().all(|&(a, b)| g.adj0(phi[a - 1], phi[b - 1])) {
            return;
        }
        hom += 1;
        let distinct = (0..p).all(|i| (i + 1..p).all(|j| phi[i] != phi[j]));
        if !distinct {
            return;
        }
        inj += 1;
        if non.iter().all(|&(a, b)| !g.adj0(phi[a - 1], phi[b - 1])) {
            ind += 1;
        }
    });
    let a = falling(n, p) as f64;
    Ok(OracleDensities {
        hom_count: hom,
        inj_count: inj,
        ind_count: ind,
        t_hom: hom as f64 / (n as f64).powi(p as i32),
        t_inj: if a > 0.0 { inj as f64 / a } else { 0.0 },
        t_ind: if a > 0.0 { ind as f64 / a } else { 0.0 },
    })
}

/// |Inj(F^ℓ,G^α)| by full enumeration.
pub fn oracle_rooted(motif: &LabeledMotif, g: &SimpleGraph, alpha: &Word) -> Result<u128> {
    oracle_guard(motif.graph(), g)?;
    let f = motif.graph();
    let (p, n) = (f.order(), g.order());
    let edges = f.edges();
    let l = motif.labels().chars();
    let a = alpha.chars();
    let mut total = 0u128;
    for_each_map(p, n, |phi| {
        let rooted = l.iter().zip(a).all(|(&v, &x)| phi[v - 1] == x - 1);
        let distinct = (0..p).all(|i| (i + 1..p).all(|j| phi[i] != phi[j]));
        if rooted && distinct && edges.iter().all(|&(u, v)| g.adj0(phi[u - 1], phi[v - 1])) {
            total += 1;
        }
    });
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: usize) -> SimpleGraph {
        SimpleGraph::complete(p).unwrap()
    }

    #[test]
    fn spec_examples() {
        let c5 = SimpleGraph::cycle(5).unwrap();
        let p3 = SimpleGraph::path(3).unwrap();
        assert!((t_hom(&k(2), &k(3)) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t_hom(&k(2), &k(2)), 0.5);
        assert_eq!(t_hom(&SimpleGraph::empty(2).unwrap(), &c5), 1.0);
        assert_eq!(t_inj(&k(2), &k(3)).unwrap(), 1.0);
        assert_eq!(t_inj(&k(3), &c5).unwrap(), 0.0);
        assert!((t_inj(&p3, &c5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(oracle_densities(&p3, &c5).unwrap().inj_count, 10);
        assert_eq!(t_ind(&k(2), &k(3)).unwrap(), 1.0);
        assert_eq!(t_ind(&SimpleGraph::empty(2).unwrap(), &k(3)).unwrap(), 0.0);
        assert_eq!(t_ind(&p3, &k(3)).unwrap(), 0.0);
        assert!(matches!(t_inj(&k(4), &k(3)), Err(Error::Size(_))));
    }

    #[test]
    fn oracle_examples() {
        let o = oracle_densities(&k(2), &k(3)).unwrap();
        assert!((o.t_hom - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((o.t_inj, o.t_ind), (1.0, 1.0));
        let o = oracle_densities(&k(3), &k(3)).unwrap();
        assert_eq!(o.hom_count, 6);
        assert!((o.t_hom - 6.0 / 27.0).abs() < 1e-15);
        assert_eq!((o.t_inj, o.t_ind), (1.0, 1.0));
        let o = oracle_densities(&k(2), &SimpleGraph::empty(3).unwrap()).unwrap();
        assert_eq!((o.t_hom, o.t_inj, o.t_ind), (0.0, 0.0, 0.0));
        assert!(matches!(oracle_densities(&k(6), &k(6)), Err(Error::Explosion { .. })));
        assert!(matches!(oracle_densities(&k(2), &k(10)), Err(Error::Explosion { .. })));
    }

    #[test]
    fn rooted_examples() {
        let g = SimpleGraph::new(5, &[(1, 2), (1, 3), (2, 3), (4, 5)]).unwrap();
        let k2 = k(2);
        let one = LabeledMotif::new(k2.clone(), Word::new(vec![1]).unwrap()).unwrap();
        for i in 1..=5 {
            let r = t_inj_rooted(&one, &g, &Word::new(vec![i]).unwrap()).unwrap();
            assert_eq!(r.density, g.degree0(i - 1) as f64 / 4.0);
            assert!(r.hat);
        }
        let both = LabeledMotif::new(k2, Word::new(vec![1, 2]).unwrap()).unwrap();
        let yes = t_inj_rooted(&both, &g, &Word::new(vec![4, 5]).unwrap()).unwrap();
        let no = t_inj_rooted(&both, &g, &Word::new(vec![3, 4]).unwrap()).unwrap();
        assert_eq!((yes.density, no.density), (1.0, 0.0));
        assert_eq!((no.tilde_density, no.hat), (1.0, false));
        let p3 = LabeledMotif::new(SimpleGraph::path(3).unwrap(), Word::new(vec![1, 3]).unwrap()).unwrap();
        assert!(matches!(t_inj_rooted(&p3, &g, &Word::new(vec![1]).unwrap()), Err(Error::Word(_))));
        assert!(matches!(t_inj_rooted(&p3, &g, &Word::new(vec![1, 9]).unwrap()), Err(Error::Word(_))));
    }

    #[test]
    fn hom_counts_with_repeated_images() {
        // star K_{1,3} into K_2: the centre picks a side, leaves are forced
        let star = SimpleGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(count(&star, &k(2), Mode::Hom), 2);
        assert_eq!(count(&SimpleGraph::empty(3).unwrap(), &k(4), Mode::Hom), 64);
    }

    #[test]
    fn wide_hosts_and_u128_counts() {
        let host = k(130);
        assert_eq!(count(&k(3), &host, Mode::Inj), 130 * 129 * 128);
        assert_eq!(count(&SimpleGraph::empty(2).unwrap(), &host, Mode::Ind), 0);
        let e = SimpleGraph::empty(70).unwrap();
        assert_eq!(count(&SimpleGraph::empty(4).unwrap(), &e, Mode::Ind), falling(70, 4));
    }
}
