//! Random measures Γ_n and Γ over labeled motif families, the CLT variance
//! of Γ_n(g), and the covariance kernels of injective and induced densities.

use std::collections::HashSet;
use std::sync::Arc;

use crate::graph::{enumerate_words, falling, join, supergraphs, word_from_rank, LabeledMotif, MotifFamily, SimpleGraph};
use crate::graphon::{Graphon, QuadratureSpec};
use crate::hom::{self, count_pinned, Mode};
use crate::quad;
use crate::rng::{self, Streams, MC_STREAM};
use crate::{Error, Result};

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    C0,
    C1,
    C2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Identity,
    Other,
}

#[derive(Clone)]
pub struct TestFunction {
    value: ValueFn,
    gradient: Option<GradFn>,
    pub smoothness: Smoothness,
    pub dim: usize,
    kind: Kind,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction(dim={}, {:?})", self.dim, self.smoothness)
    }
}

impl TestFunction {
    pub fn custom(dim: usize, value: ValueFn, gradient: Option<GradFn>, smoothness: Smoothness) -> Self {
        Self { value, gradient, smoothness, dim, kind: Kind::Other }
    }

    pub fn identity() -> Self {
        Self {
            value: Arc::new(|x| x[0]),
            gradient: Some(Arc::new(|_| vec![1.0])),
            smoothness: Smoothness::C2,
            dim: 1,
            kind: Kind::Identity,
        }
    }

    /// x ↦ ⟨a, x⟩.
    pub fn linear(a: Vec<f64>) -> Self {
        let dim = a.len();
        let b = a.clone();
        Self::custom(
            dim,
            Arc::new(move |x| a.iter().zip(x).map(|(a, x)| a * x).sum()),
            Some(Arc::new(move |_| b.clone())),
            Smoothness::C2,
        )
    }

    /// Σ c_i t^i on one coordinate.
    pub fn poly(coeffs: Vec<f64>) -> Self {
        let c = coeffs.clone();
        Self::custom(
            1,
            Arc::new(move |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x[0] + c)),
            Some(Arc::new(move |x| {
                let d = c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, c)| acc * x[0] + i as f64 * c);
                vec![d]
            })),
            Smoothness::C2,
        )
    }

    /// t ↦ 1{t ≤ threshold}.
    pub fn indicator(threshold: f64) -> Self {
        Self::custom(1, Arc::new(move |x| if x[0] <= threshold { 1.0 } else { 0.0 }), None, Smoothness::C0)
    }

    pub fn constant(c: f64, dim: usize) -> Self {
        Self::custom(dim, Arc::new(move |_| c), Some(Arc::new(move |_| vec![0.0; dim])), Smoothness::C2)
    }

    /// `id`, `poly:c0,c1,...`, `const:c`, or `indicator:t` (threshold t).
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            rest.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in '{spec}'"))))
                .collect()
        };
        match head.trim() {
            "id" => Ok(Self::identity()),
            "poly" => Ok(Self::poly(nums()?)),
            "const" => Ok(Self::constant(nums()?[0], 1)),
            "indicator" => Ok(Self::indicator(nums()?[0])),
            other => Err(Error::Parse(format!("unknown test function '{other}'"))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Largest gap between the gradient and central differences at 100
    /// seeded points of [0,1]^d; `None` without a gradient.
    pub fn check_gradient(&self, seed: u64) -> Option<f64> {
        let grad = self.gradient.as_ref()?;
        let mut r = Streams::new(seed).stream(0);
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let x: Vec<f64> = (0..self.dim).map(|_| rng::next_unit(&mut r)).collect();
            let g = grad(&x);
            for i in 0..self.dim {
                let (mut a, mut b) = (x.clone(), x.clone());
                a[i] += h;
                b[i] -= h;
                let fd = (self.eval(&a) - self.eval(&b)) / (2.0 * h);
                worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
            }
        }
        Some(worst)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum AlphaBudget {
    Exact,
    /// Exact up to `max_words` words, else that many words drawn without
    /// replacement.
    Sample { max_words: u128, seed: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct GammaEstimate {
    pub value: f64,
    pub exact: bool,
    pub words: u128,
}

fn check_dim(family: &MotifFamily, g: &TestFunction) -> Result<()> {
    if g.dim != family.dim() {
        return Err(Error::Domain(format!("test function of dimension {} for a family of {}", g.dim, family.dim())));
    }
    Ok(())
}

/// Uniform integer below `bound`.
fn below(r: &mut rand_chacha::ChaCha8Rng, bound: u128) -> u128 {
    let bits = 128 - (bound - 1).leading_zeros();
    loop {
        let v = ((rng::next_u64(r) as u128) << 64 | rng::next_u64(r) as u128) >> (128 - bits.max(1));
        if v < bound {
            return v;
        }
    }
}

/// Floyd's sample of `m` distinct ranks below `total`, sorted.
fn sample_ranks(total: u128, m: u128, seed: u64) -> Vec<u128> {
    let mut r = Streams::new(seed).stream(0);
    let mut set = HashSet::new();
    for j in total - m..total {
        let t = below(&mut r, j + 1);
        if !set.insert(t) {
            set.insert(j);
        }
    }
    let mut v: Vec<u128> = set.into_iter().collect();
    v.sort_unstable();
    v
}

/// Γ_n^{F,ℓ}(g) on the host graph.
pub fn gamma_n(family: &MotifFamily, g: &TestFunction, host: &SimpleGraph, budget: AlphaBudget) -> Result<GammaEstimate> {
    check_dim(family, g)?;
    let n = host.order();
    let (p, k) = (family.order(), family.k());
    if n <= p {
        return Err(Error::Size(format!("host on {n} vertices needs more than {p}")));
    }
    let total = falling(n, k);
    let words: Box<dyn Iterator<Item = Vec<usize>>> = match budget {
        AlphaBudget::Sample { max_words, seed } if total > max_words => {
            let ranks = sample_ranks(total, max_words, seed);
            Box::new(ranks.into_iter().map(move |r| word_from_rank(n, k, r).expect("rank in range")))
        }
        _ => Box::new(enumerate_words(n, k)?),
    };
    let exact = !matches!(budget, AlphaBudget::Sample { max_words, .. } if total > max_words);
    let labels = family.labels().chars().to_vec();
    let hat_pairs = family.motifs()[0].hat_pairs();
    let norm = falling(n - k, p - k);
    let g0 = g.eval(&vec![0.0; family.dim()]);
    let integer = exact && g.kind == Kind::Identity;
    let mut count_sum: u128 = 0;
    let mut sum = 0.0;
    let mut used: u128 = 0;
    let mut t = vec![0.0; family.dim()];
    for alpha in words {
        used += 1;
        let hat = hat_pairs.iter().all(|&(i, j)| host.adj0(alpha[i] - 1, alpha[j] - 1));
        if !hat {
            sum += g0;
            continue;
        }
        let pins: Vec<(usize, usize)> = labels.iter().zip(&alpha).map(|(&v, &x)| (v - 1, x - 1)).collect();
        for (m, motif) in family.motifs().iter().enumerate() {
            let c = count_pinned(motif.graph(), host, Mode::Inj, &pins, true);
            if integer {
                count_sum += c;
            }
            t[m] = c as f64 / norm as f64;
        }
        sum += g.eval(&t);
    }
    let value = if integer { count_sum as f64 / falling(n, p) as f64 } else { sum / used as f64 };
    Ok(GammaEstimate { value, exact, words: used })
}

/// Tensor GL rule on [0,1]^k as (points, weights).
fn tensor(k: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rule = quad::gl(n);
    let total = n.pow(k as u32);
    let mut pts = Vec::with_capacity(total);
    let mut wts = Vec::with_capacity(total);
    for idx in 0..total {
        let (mut x, mut w, mut r) = (Vec::with_capacity(k), 1.0, idx);
        for _ in 0..k {
            x.push(rule.x[r % n]);
            w *= rule.w[r % n];
            r /= n;
        }
        pts.push(x);
        wts.push(w);
    }
    (pts, wts)
}

fn fixed_at(motif: &LabeledMotif, x: &[f64]) -> Vec<(usize, f64)> {
    motif.labels().chars().iter().copied().zip(x.iter().copied()).collect()
}

/// (hat, tilde vector) of the family at label positions x.
fn rooted_vec(family: &MotifFamily, w: &Graphon, x: &[f64], q: &QuadratureSpec) -> (f64, Vec<f64>) {
    let mut hat = 1.0;
    let mut tilde = Vec::with_capacity(family.dim());
    for (m, motif) in family.motifs().iter().enumerate() {
        let (h, t) = w.pinned(motif.graph(), &fixed_at(motif, x), false, q);
        if m == 0 {
            hat = h;
        }
        tilde.push(t);
    }
    (hat, tilde)
}

/// Γ^{F,ℓ}(g) = ∫ hat_x g(tilde_x) dx + (1 − hat t) g(0).
pub fn gamma_limit(family: &MotifFamily, g: &TestFunction, w: &Graphon, q: &QuadratureSpec) -> Result<f64> {
    check_dim(family, g)?;
    q.validate()?;
    let k = family.k();
    let g0 = g.eval(&vec![0.0; family.dim()]);
    if k == 0 {
        let (_, t) = rooted_vec(family, w, &[], q);
        return Ok(g.eval(&t));
    }
    let hat_t = w.hat_integral(&family.motifs()[0], q);
    let main = if k == 1 {
        let f = |x: f64| {
            let (h, t) = rooted_vec(family, w, &[x], q);
            h * g.eval(&t)
        };
        quad::adaptive(&f, 0.0, 1.0, q.rel_tol)
    } else {
        let (pts, wts) = tensor(k, q.nodes_per_dim);
        pts.iter()
            .zip(&wts)
            .map(|(x, wt)| {
                let (h, t) = rooted_vec(family, w, x, q);
                wt * h * g.eval(&t)
            })
            .sum()
    };
    Ok(main + (1.0 - hat_t) * g0)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VarianceComponents {
    /// Var of the substitution sum
    pub var_a: f64,
    /// Var of the gradient sum
    pub var_b: f64,
    pub cov_ab: f64,
    pub mean: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct VarianceReport {
    pub sigma2: f64,
    pub mc_error: f64,
    pub components: VarianceComponents,
}

/// Weighted moments of (A, B) samples.
fn report(a: &[f64], b: &[f64], wts: &[f64], mc: bool) -> VarianceReport {
    let tw: f64 = wts.iter().sum();
    let mean = |v: &dyn Fn(usize) -> f64| (0..wts.len()).map(|i| wts[i] * v(i)).sum::<f64>() / tw;
    let ma = mean(&|i| a[i]);
    let mb = mean(&|i| b[i]);
    let var_a = mean(&|i| (a[i] - ma).powi(2));
    let var_b = mean(&|i| (b[i] - mb).powi(2));
    let cov_ab = mean(&|i| (a[i] - ma) * (b[i] - mb));
    let sigma2 = (var_a + var_b + 2.0 * cov_ab).max(0.0);
    let mc_error = if mc {
        let m = (ma + mb, wts.len() as f64);
        let m4 = mean(&|i| (a[i] + b[i] - m.0).powi(4));
        ((m4 - sigma2 * sigma2).max(0.0) / m.1).sqrt()
    } else {
        0.0
    };
    VarianceReport { sigma2, mc_error, components: VarianceComponents { var_a, var_b, cov_ab, mean: ma + mb } }
}

/// σ^{F,ℓ}(g)² = Var(𝒰(U)), 𝒰 = substitution terms + gradient terms.
pub fn sigma2_clt(family: &MotifFamily, g: &TestFunction, w: &Graphon, q: &QuadratureSpec) -> Result<VarianceReport> {
    check_dim(family, g)?;
    q.validate()?;
    if !g.has_gradient() || g.smoothness == Smoothness::C0 {
        return Err(Error::Precondition("the CLT variance needs a C² test function with a gradient".into()));
    }
    let k = family.k();
    let n = q.nodes_per_dim;
    let d = family.dim();
    let g0 = g.eval(&vec![0.0; d]);
    let free = family.motifs()[0].free_vertices();
    let (pts, wts) = tensor(k, n);
    let cache: Vec<(f64, Vec<f64>)> = pts.iter().map(|x| rooted_vec(family, w, x, q)).collect();
    let grads: Vec<Vec<f64>> = cache.iter().map(|(_, t)| g.grad(t).expect("gradient present")).collect();
    let rule = quad::gl(n);

    if !q.outer_mc {
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for (idx, (h, t)) in cache.iter().enumerate() {
            if k > 0 {
                let jump = h * (g.eval(t) - g0);
                let mut r = idx;
                for _ in 0..k {
                    let digit = r % n;
                    r /= n;
                    a[digit] += wts[idx] / rule.w[digit] * jump;
                }
            }
            for (m, motif) in family.motifs().iter().enumerate() {
                if grads[idx][m] == 0.0 {
                    continue;
                }
                for &qv in &free {
                    let prof = w.pinned_profile(motif.graph(), &fixed_at(motif, &pts[idx]), qv, q);
                    for (bb, v) in b.iter_mut().zip(prof) {
                        *bb += wts[idx] * grads[idx][m] * v;
                    }
                }
            }
        }
        return Ok(report(&a, &b, &rule.w, false));
    }

    let tag = 0x5167_6d61_3263_6c74;
    let mut r = Streams::new(rng::derive(q.mc_seed, tag)).stream(MC_STREAM);
    let m = q.outer_mc_samples;
    let (sub_pts, sub_wts) = tensor(k.saturating_sub(1), n);
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    for s in 0..m {
        let u = rng::next_unit(&mut r);
        for i in 0..k {
            for (xs, ws) in sub_pts.iter().zip(&sub_wts) {
                let mut x = xs.clone();
                x.insert(i, u);
                let (h, t) = rooted_vec(family, w, &x, q);
                a[s] += ws * h * (g.eval(&t) - g0);
            }
        }
        for (idx, x) in pts.iter().enumerate() {
            for (mi, motif) in family.motifs().iter().enumerate() {
                if grads[idx][mi] == 0.0 {
                    continue;
                }
                for &qv in &free {
                    let mut fx = fixed_at(motif, x);
                    fx.push((qv, u));
                    let (h, t) = w.pinned(motif.graph(), &fx, false, q);
                    b[s] += wts[idx] * grads[idx][mi] * h * t;
                }
            }
        }
    }
    Ok(report(&a, &b, &vec![1.0; m], true))
}

/// Limit variance 2e²p^{2e−1}(1−p) of n(t_inj(F,G_n) − p^e) for W ≡ p.
pub fn er_scaling_variance(f: &SimpleGraph, p: f64) -> f64 {
    let e = f.num_edges() as f64;
    if e == 0.0 {
        return 0.0;
    }
    2.0 * e * e * p.powf(2.0 * e - 1.0) * (1.0 - p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMethod {
    /// Covariance over U of the summed one-vertex rooted densities
    JointIntegral,
    /// Densities of the joined graphs
    JoinGraph,
}

/// Σ_q t_u(F^q,W) on the GL nodes; induced densities with `induced`.
fn rooted_sum_profile(f: &SimpleGraph, w: &Graphon, induced: bool, q: &QuadratureSpec) -> Vec<f64> {
    let rule = quad::gl(q.nodes_per_dim);
    let mut out = vec![0.0; rule.len()];
    for v in 1..=f.order() {
        if induced {
            for (o, &u) in out.iter_mut().zip(&rule.x) {
                let (h, t) = w.pinned(f, &[(v, u)], true, q);
                *o += h * t;
            }
        } else {
            for (o, p) in out.iter_mut().zip(w.pinned_profile(f, &[], v, q)) {
                *o += p;
            }
        }
    }
    out
}

fn cov_on_rule(a: &[f64], b: &[f64], wts: &[f64]) -> f64 {
    let ea: f64 = a.iter().zip(wts).map(|(x, w)| x * w).sum();
    let eb: f64 = b.iter().zip(wts).map(|(x, w)| x * w).sum();
    let eab: f64 = a.iter().zip(b).zip(wts).map(|((x, y), w)| x * y * w).sum();
    eab - ea * eb
}

/// K_inj(F, F′).
pub fn k_inj(f: &SimpleGraph, f2: &SimpleGraph, w: &Graphon, q: &QuadratureSpec, method: KernelMethod) -> Result<f64> {
    q.validate()?;
    match method {
        KernelMethod::JointIntegral => {
            let rule = quad::gl(q.nodes_per_dim);
            let a = rooted_sum_profile(f, w, false, q);
            let b = rooted_sum_profile(f2, w, false, q);
            Ok(cov_on_rule(&a, &b, &rule.w))
        }
        KernelMethod::JoinGraph => {
            let mut s = 0.0;
            for a in 1..=f.order() {
                for b in 1..=f2.order() {
                    s += w.t_graphon(&join(f, f2, a, b)?, q);
                }
            }
            let pp = (f.order() * f2.order()) as f64;
            Ok(s - pp * w.t_graphon(f, q) * w.t_graphon(f2, q))
        }
    }
}

/// K_ind(F₁, F₂) as the signed sum of K_inj over supergraph pairs.
pub fn k_ind(f1: &SimpleGraph, f2: &SimpleGraph, w: &Graphon, q: &QuadratureSpec) -> Result<f64> {
    let s1 = supergraphs(f1)?;
    let s2 = supergraphs(f2)?;
    let mut total = 0.0;
    for a in &s1 {
        for b in &s2 {
            let sign = if (a.extra_edges + b.extra_edges) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * k_inj(&a.graph, &b.graph, w, q, KernelMethod::JoinGraph)?;
        }
    }
    Ok(total)
}

/// K_ind(F₁, F₂) as the covariance over U of summed induced rooted densities.
pub fn k_ind_cov(f1: &SimpleGraph, f2: &SimpleGraph, w: &Graphon, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    let rule = quad::gl(q.nodes_per_dim);
    let a = rooted_sum_profile(f1, w, true, q);
    let b = rooted_sum_profile(f2, w, true, q);
    Ok(cov_on_rule(&a, &b, &rule.w))
}

pub enum QuantumTarget<'a> {
    Graph(&'a SimpleGraph),
    Graphon(&'a Graphon, &'a QuadratureSpec),
}

/// ⟨a, t_inj(F,G)⟩ or ⟨a, t(F,W)⟩.
pub fn quantum_density(coeffs: &[f64], motifs: &[SimpleGraph], target: QuantumTarget<'_>) -> Result<f64> {
    if coeffs.len() != motifs.len() {
        return Err(Error::Domain(format!("{} coefficients for {} motifs", coeffs.len(), motifs.len())));
    }
    let mut s = 0.0;
    for (a, f) in coeffs.iter().zip(motifs) {
        s += a * match target {
            QuantumTarget::Graph(g) => hom::t_inj(f, g)?,
            QuantumTarget::Graphon(w, q) => w.t_graphon(f, q),
        };
    }
    Ok(s)
}

/// σ(𝔉)² = Σ a_m a_m′ K_inj(F_m, F_m′).
pub fn quantum_variance(coeffs: &[f64], motifs: &[SimpleGraph], w: &Graphon, q: &QuadratureSpec) -> Result<f64> {
    if coeffs.len() != motifs.len() {
        return Err(Error::Domain(format!("{} coefficients for {} motifs", coeffs.len(), motifs.len())));
    }
    let mut s = 0.0;
    for (i, a) in coeffs.iter().enumerate() {
        for (j, b) in coeffs.iter().enumerate() {
            if a * b != 0.0 {
                s += a * b * k_inj(&motifs[i], &motifs[j], w, q, KernelMethod::JoinGraph)?;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Word;
    use crate::sampler;

    fn q() -> QuadratureSpec {
        QuadratureSpec { nodes_per_dim: 16, ..Default::default() }
    }

    fn k2_rooted() -> MotifFamily {
        MotifFamily::single(LabeledMotif::new(SimpleGraph::complete(2).unwrap(), Word::parse("1").unwrap()).unwrap())
    }

    #[test]
    fn gamma_n_examples() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let s = sampler::sample(&w, 40, 3).unwrap();
        let fam = k2_rooted();
        let v = gamma_n(&fam, &TestFunction::identity(), &s.graph, AlphaBudget::Exact).unwrap();
        let k2 = SimpleGraph::complete(2).unwrap();
        assert_eq!(v.value, hom::t_inj(&k2, &s.graph).unwrap());
        let c = gamma_n(&fam, &TestFunction::constant(0.3, 1), &s.graph, AlphaBudget::Exact).unwrap();
        assert!((c.value - 0.3).abs() < 1e-15);
        let y: f64 = 0.4;
        let thr = w.degree(y);
        let ind = gamma_n(&fam, &TestFunction::indicator(thr), &s.graph, AlphaBudget::Exact).unwrap();
        let degs = sampler::degree_sequence(&s.graph).unwrap();
        let pi = degs.iter().filter(|&&d| d <= thr).count() as f64 / 40.0;
        assert!((ind.value - pi).abs() < 1e-15);
    }

    #[test]
    fn gamma_n_subsamples() {
        let w = Graphon::constant(0.5).unwrap();
        let s = sampler::sample(&w, 30, 1).unwrap();
        let fam = MotifFamily::single(
            LabeledMotif::new(SimpleGraph::path(3).unwrap(), Word::parse("1,2").unwrap()).unwrap(),
        );
        let est = gamma_n(&fam, &TestFunction::identity(), &s.graph, AlphaBudget::Sample { max_words: 200, seed: 9 }).unwrap();
        assert!(!est.exact);
        assert_eq!(est.words, 200);
        let ex = gamma_n(&fam, &TestFunction::identity(), &s.graph, AlphaBudget::Exact).unwrap();
        assert!(ex.exact);
        assert!((est.value - ex.value).abs() < 0.1);
        let ranks = sample_ranks(50, 50, 4);
        assert_eq!(ranks, (0..50).collect::<Vec<u128>>());
    }

    #[test]
    fn gamma_limit_examples() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let fam = k2_rooted();
        let v = gamma_limit(&fam, &TestFunction::identity(), &w, &q()).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let ind = gamma_limit(&fam, &TestFunction::indicator(w.degree(0.3)), &w, &q()).unwrap();
        assert!((ind - 0.3).abs() < 1e-9, "{ind}");
        let half = Graphon::constant(0.5).unwrap();
        let k3 = MotifFamily::single(LabeledMotif::new(SimpleGraph::complete(3).unwrap(), Word::parse("1,2,3").unwrap()).unwrap());
        let g = TestFunction::poly(vec![0.2, 1.0, 3.0]);
        let v = gamma_limit(&k3, &g, &half, &q()).unwrap();
        assert!((v - (g.eval(&[1.0]) / 8.0 + 7.0 / 8.0 * g.eval(&[0.0]))).abs() < 1e-12);
    }

    #[test]
    fn sigma2_examples() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let r = sigma2_clt(&k2_rooted(), &TestFunction::identity(), &w, &q()).unwrap();
        assert!((r.sigma2 - 1.0 / 12.0).abs() < 1e-12);
        let full = MotifFamily::single(LabeledMotif::new(SimpleGraph::complete(2).unwrap(), Word::parse("1,2").unwrap()).unwrap());
        let g = TestFunction::poly(vec![0.0, 0.5, 2.0]);
        let r = sigma2_clt(&full, &g, &w, &q()).unwrap();
        let jump = g.eval(&[1.0]) - g.eval(&[0.0]);
        assert!((r.sigma2 - jump * jump / 12.0).abs() < 1e-12);
        let half = Graphon::constant(0.5).unwrap();
        let r = sigma2_clt(&k2_rooted(), &g, &half, &q()).unwrap();
        assert!(r.sigma2.abs() < 1e-14);
        assert!(matches!(
            sigma2_clt(&k2_rooted(), &TestFunction::indicator(0.5), &w, &q()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sigma2_outer_mc() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let qq = QuadratureSpec { outer_mc: true, outer_mc_samples: 4000, ..q() };
        let r = sigma2_clt(&k2_rooted(), &TestFunction::identity(), &w, &qq).unwrap();
        assert!(r.mc_error > 0.0);
        assert!((r.sigma2 - 1.0 / 12.0).abs() < 4.0 * r.mc_error, "{r:?}");
    }

    #[test]
    fn kernels() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let k2 = SimpleGraph::complete(2).unwrap();
        let k3 = SimpleGraph::complete(3).unwrap();
        for m in [KernelMethod::JointIntegral, KernelMethod::JoinGraph] {
            assert!((k_inj(&k2, &k2, &w, &q(), m).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        }
        let c = Graphon::constant(0.3).unwrap();
        assert!(k_inj(&k2, &k2, &c, &q(), KernelMethod::JoinGraph).unwrap().abs() < 1e-14);
        let a = k_inj(&k2, &k3, &w, &q(), KernelMethod::JointIntegral).unwrap();
        let b = k_inj(&k2, &k3, &w, &q(), KernelMethod::JoinGraph).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!(k_ind(&k2, &k2, &c, &q()).unwrap().abs() < 1e-14);
        let p3 = SimpleGraph::path(3).unwrap();
        let x = k_ind(&p3, &k2, &w, &q()).unwrap();
        let y = k_ind_cov(&p3, &k2, &w, &q()).unwrap();
        assert!((x - y).abs() < 1e-10, "{x} {y}");
        assert!((k_ind(&k3, &p3, &w, &q()).unwrap() - k_ind(&p3, &k3, &w, &q()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn er_targets() {
        assert_eq!(er_scaling_variance(&SimpleGraph::complete(2).unwrap(), 0.5), 0.5);
        assert_eq!(er_scaling_variance(&SimpleGraph::complete(3).unwrap(), 0.5), 9.0 / 32.0);
    }

    #[test]
    fn quantum() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let k2 = SimpleGraph::complete(2).unwrap();
        let g = sampler::sample(&w, 20, 2).unwrap().graph;
        let one = quantum_density(&[1.0], std::slice::from_ref(&k2), QuantumTarget::Graph(&g)).unwrap();
        assert_eq!(one, hom::t_inj(&k2, &g).unwrap());
        let zero = quantum_density(&[1.0, -1.0], &[k2.clone(), k2.clone()], QuantumTarget::Graphon(&w, &q())).unwrap();
        assert_eq!(zero, 0.0);
        let v = quantum_variance(&[2.0], std::slice::from_ref(&k2), &w, &q()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        assert!(quantum_density(&[1.0], &[], QuantumTarget::Graph(&g)).is_err());
    }

    #[test]
    fn gradients_match_differences() {
        for g in [TestFunction::identity(), TestFunction::poly(vec![1.0, -2.0, 0.5, 3.0]), TestFunction::linear(vec![0.3, -1.0])] {
            assert!(g.check_gradient(7).unwrap() < 1e-5);
        }
        assert!(TestFunction::indicator(0.2).check_gradient(7).is_none());
        assert!(TestFunction::parse("poly:1,2").is_ok());
        assert!(TestFunction::parse("sin").is_err());
    }
}
