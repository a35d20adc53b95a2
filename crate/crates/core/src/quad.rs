//! Gauss–Legendre rules on [0,1], adaptive 1-D integration, and exact
//! contraction of pairwise-factor products over a tensor grid.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights mapped to [0,1].
#[derive(Debug)]
pub struct Rule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(a + h * x)).sum::<f64>() * h
    }
}

/// Cached GL rule with `n` nodes on [0,1].
pub fn gl(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(Rule {
                x: pairs.iter().map(|(x, _)| 0.5 * (x + 1.0)).collect(),
                w: pairs.iter().map(|(_, w)| 0.5 * w).collect(),
            })
        })
        .clone()
}

/// Adaptive bisection with a 20-point GL panel; `tol` is absolute.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gl(20);
    let whole = rule.integrate(a, b, f);
    refine(f, &rule, a, b, whole, tol, 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, rule: &Rule, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    if (left + right - whole).abs() <= tol || depth >= 48 {
        return left + right;
    }
    refine(f, rule, a, m, left, 0.5 * tol, depth + 1) + refine(f, rule, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive integration over consecutive panels `[b_i, b_{i+1}]`.
pub fn adaptive_pieces<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let share = tol / pts.len().max(2) as f64;
    pts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| adaptive(f, w[0], w[1], share))
        .sum()
}

/// Product of factors over discrete variables, each ranging over the nodes
/// of one GL rule, summed with the rule's weights.
pub struct FactorGraph {
    nvars: usize,
    n: usize,
    factors: Vec<Factor>,
}

struct Factor {
    vars: Vec<usize>,
    data: Vec<f64>,
}

impl FactorGraph {
    pub fn new(nvars: usize, n: usize) -> Self {
        Self { nvars, n, factors: Vec::new() }
    }

    pub fn unary(&mut self, v: usize, data: Vec<f64>) {
        debug_assert_eq!(data.len(), self.n);
        self.factors.push(Factor { vars: vec![v], data });
    }

    /// `data[a*n+b]` is the factor at (node a of `u`, node b of `v`).
    pub fn pair(&mut self, u: usize, v: usize, data: &[f64]) {
        debug_assert_eq!(data.len(), self.n * self.n);
        debug_assert_ne!(u, v);
        if u < v {
            self.factors.push(Factor { vars: vec![u, v], data: data.to_vec() });
        } else {
            let n = self.n;
            let mut t = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[b * n + a] = data[a * n + b];
                }
            }
            self.factors.push(Factor { vars: vec![v, u], data: t });
        }
    }

    fn neighbours(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.nvars]; self.nvars];
        for f in &self.factors {
            for &a in &f.vars {
                for &b in &f.vars {
                    if a != b {
                        adj[a][b] = true;
                    }
                }
            }
        }
        adj
    }

    /// Greedy min-degree elimination order and its width (largest number
    /// of neighbours met when a variable is summed out).
    pub fn order(&self) -> (Vec<usize>, usize) {
        self.order_keeping(None)
    }

    fn order_keeping(&self, keep: Option<usize>) -> (Vec<usize>, usize) {
        let mut adj = self.neighbours();
        let mut alive = vec![true; self.nvars];
        let mut order = Vec::with_capacity(self.nvars);
        let mut width = 0;
        for _ in 0..self.nvars {
            let deg = |v: usize| (0..self.nvars).filter(|&u| alive[u] && adj[v][u]).count();
            let v = (0..self.nvars)
                .filter(|&v| alive[v])
                .min_by_key(|&v| (Some(v) == keep, deg(v), v))
                .unwrap();
            let nb: Vec<usize> = (0..self.nvars).filter(|&u| alive[u] && adj[v][u]).collect();
            width = width.max(nb.len());
            for &a in &nb {
                for &b in &nb {
                    if a != b {
                        adj[a][b] = true;
                    }
                }
            }
            alive[v] = false;
            order.push(v);
        }
        (order, width)
    }

    pub fn width(&self) -> usize {
        self.order().1
    }

    /// Width of the order that leaves `keep` for last.
    pub fn width_keeping(&self, keep: usize) -> usize {
        self.order_keeping(Some(keep)).1
    }

    /// Σ over all node assignments of Π weights · Π factors.
    pub fn contract(mut self, weights: &[f64]) -> f64 {
        let scalar = self.eliminate(weights, None);
        scalar * self.factors.iter().map(|f| f.data[0]).product::<f64>()
    }

    /// Sums out every variable except `keep`; entry `a` of the result is
    /// the unweighted value with `keep` pinned at node `a`.
    pub fn contract_keep(mut self, weights: &[f64], keep: usize) -> Vec<f64> {
        let scalar = self.eliminate(weights, Some(keep));
        let mut out = vec![scalar; self.n];
        for f in &self.factors {
            for (o, d) in out.iter_mut().zip(&f.data) {
                *o *= d;
            }
        }
        out
    }

    fn eliminate(&mut self, weights: &[f64], keep: Option<usize>) -> f64 {
        let n = self.n;
        let (order, _) = self.order_keeping(keep);
        let mut scalar = 1.0;
        for v in order.into_iter().filter(|&v| Some(v) != keep) {
            let (mine, rest): (Vec<Factor>, Vec<Factor>) =
                std::mem::take(&mut self.factors).into_iter().partition(|f| f.vars.contains(&v));
            self.factors = rest;
            if mine.is_empty() {
                scalar *= weights.iter().sum::<f64>();
                continue;
            }
            let mut nb: Vec<usize> = mine.iter().flat_map(|f| f.vars.iter().copied()).filter(|&u| u != v).collect();
            nb.sort_unstable();
            nb.dedup();
            // strides of every variable inside each factor
            let strides: Vec<Vec<(usize, usize)>> = mine
                .iter()
                .map(|f| {
                    let len = f.vars.len();
                    f.vars.iter().enumerate().map(|(i, &u)| (u, n.pow((len - 1 - i) as u32))).collect()
                })
                .collect();
            let vstride: Vec<usize> = strides.iter().map(|s| s.iter().find(|(u, _)| *u == v).unwrap().1).collect();
            let size = n.pow(nb.len() as u32);
            let mut out = vec![0.0; size];
            let mut idx = vec![0usize; nb.len()];
            let mut base = vec![0usize; mine.len()];
            for cell in out.iter_mut() {
                for (fi, s) in strides.iter().enumerate() {
                    base[fi] = s
                        .iter()
                        .filter(|(u, _)| *u != v)
                        .map(|(u, st)| idx[nb.binary_search(u).unwrap()] * st)
                        .sum();
                }
                let mut acc = 0.0;
                for (t, w) in weights.iter().enumerate() {
                    let mut prod = *w;
                    for (fi, f) in mine.iter().enumerate() {
                        prod *= f.data[base[fi] + t * vstride[fi]];
                    }
                    acc += prod;
                }
                *cell = acc;
                for d in (0..idx.len()).rev() {
                    idx[d] += 1;
                    if idx[d] < n {
                        break;
                    }
                    idx[d] = 0;
                }
            }
            if nb.is_empty() {
                scalar *= out[0];
            } else {
                self.factors.push(Factor { vars: nb, data: out });
            }
        }
        scalar
    }
}
