//! Graphons, their degree functions, regularity checks and integral
//! homomorphism densities.
//!
//! Densities are computed by discretizing W on a Gauss–Legendre grid and
//! contracting the resulting pairwise factors vertex by vertex. That is exact
//! for polynomial kernels and costs N^(w+1) for an elimination width w, so it
//! stays cheap for the joined graphs that enter covariance formulas. Motifs
//! whose width exceeds the switch fall back to seeded Monte Carlo.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use exmex::prelude::*;

use crate::graph::{LabeledMotif, SimpleGraph};
use crate::quad::{self, FactorGraph, Rule};
use crate::rng::{self, Streams, MC_STREAM};
use crate::{Error, Result};

pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed forms attached to the built-in families.
#[derive(Clone)]
pub struct Analytic {
    pub d: Fn1,
    pub d1: Fn1,
    pub d2: Fn1,
    pub dinv: Option<Fn1>,
    /// (y,z) ↦ ∫ W(y,x)W(z,x) dx
    pub cross: Kernel,
    /// (y,z) ↦ ∫_0^z W(y,x) dx
    pub row_partial: Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Constant(f64),
    Affine { a: f64, b: f64 },
    Product { eps: f64 },
    Expr,
}

#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub nodes_per_dim: usize,
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Largest elimination width + 1 handled by tensor quadrature.
    pub dim_switch: usize,
    pub rel_tol: f64,
    /// Outer integral over U by Monte Carlo instead of quadrature.
    pub outer_mc: bool,
    pub outer_mc_samples: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_dim: 64,
            mc_samples: 2_000_000,
            mc_seed: 0x5eed,
            dim_switch: 4,
            rel_tol: 1e-10,
            outer_mc: false,
            outer_mc_samples: 100_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_dim < 2 {
            return Err(Error::Domain("nodes_per_dim must be at least 2".into()));
        }
        if self.mc_samples < 1 || self.outer_mc_samples < 2 {
            return Err(Error::Domain("Monte Carlo sample counts must be positive".into()));
        }
        Ok(())
    }
}

/// Kernel values on the tensor grid of one GL rule.
pub struct Grid {
    pub rule: Arc<Rule>,
    pub w: Vec<f64>,
    pub wc: Vec<f64>,
}

pub struct Graphon {
    name: String,
    family: Family,
    kernel: Kernel,
    analytic: Option<Analytic>,
    is_c3: bool,
    epsilon0: Option<f64>,
    grids: Mutex<HashMap<usize, Arc<Grid>>>,
}

impl fmt::Debug for Graphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graphon({})", self.name)
    }
}

impl Clone for Graphon {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            family: self.family,
            kernel: self.kernel.clone(),
            analytic: self.analytic.clone(),
            is_c3: self.is_c3,
            epsilon0: self.epsilon0,
            grids: Mutex::new(HashMap::new()),
        }
    }
}

/// Outcome of the grid-based checks.
#[derive(Clone, Debug)]
pub struct Regularity {
    pub symmetric: bool,
    pub in_range: bool,
    /// `None` when no ε₀ is attached.
    pub condi_w: Option<bool>,
    pub max_asymmetry: f64,
    pub min_degree_slope: f64,
}

/// Triple returned by [`Graphon::t_x_rooted`].
#[derive(Clone, Copy, Debug)]
pub struct RootedIntegral {
    pub t: f64,
    pub hat: f64,
    pub tilde: f64,
}

impl Graphon {
    fn build(name: String, family: Family, kernel: Kernel, analytic: Option<Analytic>, is_c3: bool, epsilon0: Option<f64>) -> Self {
        Self { name, family, kernel, analytic, is_c3, epsilon0, grids: Mutex::new(HashMap::new()) }
    }

    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("constant graphon value {p} outside [0,1]")));
        }
        let analytic = Analytic {
            d: Arc::new(move |_| p),
            d1: Arc::new(|_| 0.0),
            d2: Arc::new(|_| 0.0),
            dinv: None,
            cross: Arc::new(move |_, _| p * p),
            row_partial: Arc::new(move |_, z| p * z),
        };
        Ok(Self::build(format!("constant:{p}"), Family::Constant(p), Arc::new(move |_, _| p), Some(analytic), true, None))
    }

    /// a + b(x+y)/2; the primary test graphon is `affine(0, 1)`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = (a.min(a + b), a.max(a + b));
        if lo < 0.0 || hi > 1.0 {
            return Err(Error::Domain(format!("affine graphon {a}+{b}(x+y)/2 leaves [0,1]")));
        }
        let analytic = Analytic {
            d: Arc::new(move |x| a + b / 4.0 + b * x / 2.0),
            d1: Arc::new(move |_| b / 2.0),
            d2: Arc::new(|_| 0.0),
            dinv: (b != 0.0).then(|| Arc::new(move |d: f64| 2.0 * (d - a - b / 4.0) / b) as Fn1),
            cross: Arc::new(move |y, z| {
                let (al, be) = (a + b * y / 2.0, a + b * z / 2.0);
                al * be + (al + be) * b / 4.0 + b * b / 12.0
            }),
            row_partial: Arc::new(move |y, z| (a + b * y / 2.0) * z + b * z * z / 4.0),
        };
        let epsilon0 = if b > 0.0 {
            let strict = (1.0 - a - b).min(a + b / 4.0);
            // W reaches 1 only at the corner when a+b = 1; the midpoint check
            // grid stays b/1024 below it.
            let e = if strict > 0.0 { strict } else { (b / 2048.0).min(a + b / 4.0) };
            (e > 0.0 && e < 0.5).then_some(e)
        } else {
            None
        };
        Ok(Self::build(
            format!("affine:{a},{b}"),
            Family::Affine { a, b },
            Arc::new(move |x, y| a + b * (x + y) / 2.0),
            Some(analytic),
            true,
            epsilon0,
        ))
    }

    /// ε + (1−2ε)xy, satisfying the regularity condition with ε₀ = ε.
    pub fn product(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("product graphon needs ε in (0,1/2), got {eps}")));
        }
        let c = 1.0 - 2.0 * eps;
        let analytic = Analytic {
            d: Arc::new(move |x| eps + c * x / 2.0),
            d1: Arc::new(move |_| c / 2.0),
            d2: Arc::new(|_| 0.0),
            dinv: Some(Arc::new(move |d| 2.0 * (d - eps) / c)),
            cross: Arc::new(move |y, z| eps * eps + eps * c * (y + z) / 2.0 + c * c * y * z / 3.0),
            row_partial: Arc::new(move |y, z| eps * z + c * y * z * z / 2.0),
        };
        Ok(Self::build(
            format!("product:{eps}"),
            Family::Product { eps },
            Arc::new(move |x, y| eps + c * x * y),
            Some(analytic),
            true,
            Some(eps),
        ))
    }

    /// Kernel from an expression in `x` and `y`, e.g. `0.3 + 0.4*x*y`.
    /// Symmetry and range are checked on a 64×64 grid.
    pub fn expr(text: &str) -> Result<Self> {
        let flat = exmex::parse::<f64>(text).map_err(|e| Error::Parse(format!("graphon expression: {e}")))?;
        let names: Vec<String> = flat.var_names().to_vec();
        if let Some(bad) = names.iter().find(|v| *v != "x" && *v != "y") {
            return Err(Error::Parse(format!("unknown variable {bad:?} in graphon expression")));
        }
        let ix = names.iter().position(|v| v == "x");
        let iy = names.iter().position(|v| v == "y");
        let kernel: Kernel = Arc::new(move |x, y| {
            let mut args = [0.0; 2];
            if let Some(i) = ix {
                args[i] = x;
            }
            if let Some(i) = iy {
                args[i] = y;
            }
            flat.eval(&args[..names.len()]).unwrap_or(f64::NAN)
        });
        let g = Self::build(format!("expr:{text}"), Family::Expr, kernel, None, false, None);
        let reg = g.check_regularity(64, 1e-9);
        if !reg.symmetric || !reg.in_range {
            return Err(Error::Domain(format!("expression {text:?} is not a symmetric [0,1]-valued kernel")));
        }
        Ok(g)
    }

    /// Declares the regularity condition with the given ε₀ (and C³
    /// smoothness) for a user kernel; verified on the 512² grid.
    pub fn with_epsilon0(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("ε₀ must lie in (0,1/2), got {eps}")));
        }
        self.epsilon0 = Some(eps);
        self.is_c3 = true;
        match self.check_regularity(512, 1e-9).condi_w {
            Some(true) => Ok(self),
            _ => Err(Error::Regularity(format!("{} fails the regularity condition with ε₀ = {eps}", self.name))),
        }
    }

    /// Parses `constant:p`, `affine[:a,b]`, `product[:ε]` or `expr:<text>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            if params.trim().is_empty() {
                return Ok(Vec::new());
            }
            params
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("graphon parameter {t:?}: {e}"))))
                .collect()
        };
        match kind {
            "constant" => match nums()?.as_slice() {
                [p] => Self::constant(*p),
                _ => Err(Error::Parse("constant graphon takes one parameter".into())),
            },
            "affine" => match nums()?.as_slice() {
                [] => Self::affine(0.0, 1.0),
                [a, b] => Self::affine(*a, *b),
                _ => Err(Error::Parse("affine graphon takes parameters a,b".into())),
            },
            "product" => match nums()?.as_slice() {
                [] => Self::product(0.1),
                [e] => Self::product(*e),
                _ => Err(Error::Parse("product graphon takes one parameter".into())),
            },
            "expr" => Self::expr(params),
            _ => Err(Error::Parse(format!("unknown graphon kind {kind:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.family, Family::Constant(_))
    }

    pub fn is_c3(&self) -> bool {
        self.is_c3
    }

    pub fn epsilon0(&self) -> Option<f64> {
        self.epsilon0
    }

    pub fn analytic(&self) -> Option<&Analytic> {
        self.analytic.as_ref()
    }

    #[inline]
    pub fn w(&self, x: f64, y: f64) -> f64 {
        (self.kernel)(x, y)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Fails unless the regularity condition is attached.
    pub fn require_regular(&self) -> Result<f64> {
        self.epsilon0.ok_or_else(|| {
            Error::Regularity(format!("{} carries no ε₀ (D′ > 0 not established)", self.name))
        })
    }

    /// D(x) = ∫ W(x,y) dy.
    pub fn degree(&self, x: f64) -> f64 {
        match &self.analytic {
            Some(a) => (a.d)(x),
            None => quad::adaptive(&|y| self.w(x, y), 0.0, 1.0, 1e-14).clamp(0.0, 1.0),
        }
    }

    pub fn degree_prime(&self, x: f64) -> f64 {
        match &self.analytic {
            Some(a) => (a.d1)(x),
            None => {
                let h = 1e-4;
                let (lo, hi) = ((x - h).max(0.0), (x + h).min(1.0));
                (self.degree(hi) - self.degree(lo)) / (hi - lo)
            }
        }
    }

    pub fn degree_second(&self, x: f64) -> f64 {
        match &self.analytic {
            Some(a) => (a.d2)(x),
            None => {
                let h = 1e-3;
                let c = x.clamp(h, 1.0 - h);
                (self.degree(c + h) - 2.0 * self.degree(c) + self.degree(c - h)) / (h * h)
            }
        }
    }

    /// D⁻¹(d), analytic or by bisection to |D(x) − d| ≤ 1e−12.
    pub fn degree_inverse(&self, d: f64) -> Result<f64> {
        if self.epsilon0.is_none() {
            return Err(Error::Precondition(format!("{}: D is not known to be increasing", self.name)));
        }
        let (lo, hi) = (self.degree(0.0), self.degree(1.0));
        let slack = 1e-14;
        if !(d >= lo - slack && d <= hi + slack) {
            return Err(Error::Domain(format!("degree {d} outside [{lo}, {hi}]")));
        }
        if let Some(inv) = self.analytic.as_ref().and_then(|a| a.dinv.as_ref()) {
            return Ok(inv(d).clamp(0.0, 1.0));
        }
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let v = self.degree(m);
            if (v - d).abs() <= 1e-12 {
                return Ok(m);
            }
            if v < d {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// ∫ W(y,x)W(z,x) dx.
    pub fn cross_moment(&self, y: f64, z: f64) -> f64 {
        match &self.analytic {
            Some(a) => (a.cross)(y, z),
            None => quad::adaptive(&|x| self.w(y, x) * self.w(z, x), 0.0, 1.0, 1e-14),
        }
    }

    /// ∫_0^z W(y,x) dx.
    pub fn row_partial(&self, y: f64, z: f64) -> f64 {
        match &self.analytic {
            Some(a) => (a.row_partial)(y, z),
            None => quad::adaptive(&|x| self.w(y, x), 0.0, z, 1e-14),
        }
    }

    /// Symmetry, range and (when ε₀ is attached) the regularity condition,
    /// checked on the midpoint grid with `n` points per axis.
    pub fn check_regularity(&self, n: usize, tol: f64) -> Regularity {
        let pts: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let mut max_asym: f64 = 0.0;
        let mut in_range = true;
        let mut below_cap = true;
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i..] {
                let (a, b) = (self.w(x, y), self.w(y, x));
                max_asym = max_asym.max((a - b).abs());
                if !(a >= -tol && a <= 1.0 + tol) || a.is_nan() {
                    in_range = false;
                }
                if let Some(e) = self.epsilon0 {
                    if a > 1.0 - e + tol {
                        below_cap = false;
                    }
                }
            }
        }
        let mut min_slope = f64::INFINITY;
        let condi_w = self.epsilon0.map(|e| {
            let mut ok = below_cap;
            for &x in &pts {
                let slope = self.degree_prime(x);
                min_slope = min_slope.min(slope);
                if self.degree(x) < e - tol || slope <= 0.0 {
                    ok = false;
                }
            }
            ok && self.is_c3
        });
        Regularity {
            symmetric: max_asym <= tol,
            in_range,
            condi_w,
            max_asymmetry: max_asym,
            min_degree_slope: min_slope,
        }
    }

    /// Cached kernel values on the N×N GL grid.
    pub fn grid(&self, n: usize) -> Arc<Grid> {
        let mut map = self.grids.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| {
                let rule = quad::gl(n);
                let mut w = vec![0.0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        w[a * n + b] = self.w(rule.x[a], rule.x[b]);
                    }
                }
                let wc = w.iter().map(|v| 1.0 - v).collect();
                Arc::new(Grid { rule, w, wc })
            })
            .clone()
    }

    /// Splits a density with pinned vertices into the factor over pinned
    /// pairs (hat) and the integral over the remaining vertices (tilde).
    /// `fixed` lists (vertex, value) pairs with 1-indexed vertices. With
    /// `induced`, non-edges contribute 1 − W.
    pub fn pinned(&self, g: &SimpleGraph, fixed: &[(usize, f64)], induced: bool, q: &QuadratureSpec) -> (f64, f64) {
        let p = g.order();
        let mut value: Vec<Option<f64>> = vec![None; p];
        for &(v, x) in fixed {
            value[v - 1] = Some(x);
        }
        let factor = |a: f64, b: f64, edge: bool| -> f64 {
            let w = self.w(a, b);
            if edge {
                w
            } else {
                1.0 - w
            }
        };
        let mut hat = 1.0;
        for i in 0..p {
            for j in i + 1..p {
                let edge = g.adj0(i, j);
                if !edge && !induced {
                    continue;
                }
                if let (Some(a), Some(b)) = (value[i], value[j]) {
                    hat *= factor(a, b, edge);
                }
            }
        }
        let free: Vec<usize> = (0..p).filter(|&v| value[v].is_none()).collect();
        if free.is_empty() {
            return (hat, 1.0);
        }
        let fg = self.factor_graph(g, &value, &free, induced, q.nodes_per_dim);
        let tilde = if fg.width() < q.dim_switch {
            let grid = self.grid(q.nodes_per_dim);
            fg.contract(&grid.rule.w)
        } else {
            self.mc_tilde(g, &value, &free, induced, q)
        };
        (hat, tilde)
    }

    /// Profile of the pinned density as a function of the free vertex
    /// `keep`, on the GL nodes: entry a is the integral over the other free
    /// vertices with `keep` placed at node a (hat factor included).
    pub fn pinned_profile(&self, g: &SimpleGraph, fixed: &[(usize, f64)], keep: usize, q: &QuadratureSpec) -> Vec<f64> {
        let p = g.order();
        let n = q.nodes_per_dim;
        let mut value: Vec<Option<f64>> = vec![None; p];
        for &(v, x) in fixed {
            value[v - 1] = Some(x);
        }
        let mut hat = 1.0;
        for i in 0..p {
            for j in i + 1..p {
                if g.adj0(i, j) {
                    if let (Some(a), Some(b)) = (value[i], value[j]) {
                        hat *= self.w(a, b);
                    }
                }
            }
        }
        let free: Vec<usize> = (0..p).filter(|&v| value[v].is_none()).collect();
        let kpos = free.iter().position(|&v| v == keep - 1).expect("kept vertex must be free");
        let fg = self.factor_graph(g, &value, &free, false, n);
        let grid = self.grid(n);
        if fg.width_keeping(kpos) < q.dim_switch {
            return fg.contract_keep(&grid.rule.w, kpos).into_iter().map(|v| v * hat).collect();
        }
        grid.rule
            .x
            .iter()
            .map(|&u| {
                let mut fx = fixed.to_vec();
                fx.push((keep, u));
                let (h, t) = self.pinned(g, &fx, false, q);
                h * t
            })
            .collect()
    }

    fn factor_graph(&self, g: &SimpleGraph, value: &[Option<f64>], free: &[usize], induced: bool, n: usize) -> FactorGraph {
        let grid = self.grid(n);
        let pos = |v: usize| free.iter().position(|&u| u == v).unwrap();
        let mut fg = FactorGraph::new(free.len(), n);
        for (fi, &v) in free.iter().enumerate() {
            let mut unary: Option<Vec<f64>> = None;
            for (u, val) in value.iter().enumerate() {
                let Some(x) = val else { continue };
                let edge = g.adj0(u, v);
                if !edge && !induced {
                    continue;
                }
                let vec = unary.get_or_insert_with(|| vec![1.0; n]);
                for (slot, &node) in vec.iter_mut().zip(&grid.rule.x) {
                    let w = self.w(*x, node);
                    *slot *= if edge { w } else { 1.0 - w };
                }
            }
            if let Some(u) = unary {
                fg.unary(fi, u);
            }
        }
        for (ai, &a) in free.iter().enumerate() {
            for &b in &free[ai + 1..] {
                if g.adj0(a, b) {
                    fg.pair(ai, pos(b), &grid.w);
                } else if induced {
                    fg.pair(ai, pos(b), &grid.wc);
                }
            }
        }
        fg
    }

    fn mc_tilde(&self, g: &SimpleGraph, value: &[Option<f64>], free: &[usize], induced: bool, q: &QuadratureSpec) -> f64 {
        let p = g.order();
        let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            tag ^= v;
            tag = tag.wrapping_mul(0x0100_0000_01b3);
        };
        mix(p as u64);
        mix(induced as u64);
        for (a, b) in g.edges() {
            mix((a * 1000 + b) as u64);
        }
        for v in value {
            mix(v.map_or(u64::MAX, f64::to_bits));
        }
        let mut rng = Streams::new(rng::derive(q.mc_seed, tag)).stream(MC_STREAM);
        let mut x = vec![0.0; p];
        let mut acc = 0.0;
        for _ in 0..q.mc_samples {
            for v in 0..p {
                x[v] = match value[v] {
                    Some(val) => val,
                    None => rng::next_unit(&mut rng),
                };
            }
            let mut prod = 1.0;
            for (ai, &a) in free.iter().enumerate() {
                for u in 0..p {
                    // pairs with a fixed endpoint, and free pairs counted once
                    if u == a || (value[u].is_none() && free[..=ai].contains(&u)) {
                        continue;
                    }
                    let edge = g.adj0(a, u);
                    if edge {
                        prod *= self.w(x[a], x[u]);
                    } else if induced {
                        prod *= 1.0 - self.w(x[a], x[u]);
                    }
                }
            }
            acc += prod;
        }
        acc / q.mc_samples as f64
    }

    /// t(F,W).
    pub fn t_graphon(&self, f: &SimpleGraph, q: &QuadratureSpec) -> f64 {
        self.pinned(f, &[], false, q).1
    }

    /// t_ind(F,W) with (1 − W) on every non-edge.
    pub fn t_ind_graphon(&self, f: &SimpleGraph, q: &QuadratureSpec) -> f64 {
        self.pinned(f, &[], true, q).1
    }

    /// (t_x, hat t_x, tilde t_x) for the labeled motif at `x`.
    pub fn t_x_rooted(&self, motif: &LabeledMotif, x: &[f64], q: &QuadratureSpec) -> Result<RootedIntegral> {
        if x.len() != motif.k() {
            return Err(Error::Domain(format!("{} coordinates for {} labels", x.len(), motif.k())));
        }
        if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("coordinate {bad} outside [0,1]")));
        }
        let fixed: Vec<(usize, f64)> = motif.labels().chars().iter().copied().zip(x.iter().copied()).collect();
        let (hat, tilde) = self.pinned(motif.graph(), &fixed, false, q);
        Ok(RootedIntegral { t: hat * tilde, hat, tilde })
    }

    /// hat t(F^ℓ,W) = ∫ hat t_x dx over [0,1]^k.
    pub fn hat_integral(&self, motif: &LabeledMotif, q: &QuadratureSpec) -> f64 {
        let hat_graph = SimpleGraph::new(
            motif.k().max(1),
            &motif
                .hat_pairs()
                .into_iter()
                .map(|(a, b)| (a + 1, b + 1))
                .collect::<Vec<_>>(),
        )
        .expect("hat pairs form a simple graph");
        if motif.k() == 0 {
            return 1.0;
        }
        self.t_graphon(&hat_graph, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{supergraphs, Word};

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn degree_examples() {
        let half = Graphon::constant(0.5).unwrap();
        assert_eq!(half.degree(0.3), 0.5);
        let aff = Graphon::affine(0.0, 1.0).unwrap();
        assert!((aff.degree(0.0) - 0.25).abs() < 1e-15);
        assert!((aff.degree(1.0) - 0.75).abs() < 1e-15);
        assert!(aff.degree_inverse(0.25).unwrap().abs() < 1e-12);
        assert!((aff.degree_inverse(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(half.degree_inverse(0.5), Err(Error::Precondition(_))));
        assert!(matches!(aff.degree_inverse(0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn expression_degree_matches_analytic() {
        let e = Graphon::expr("(x+y)/2").unwrap().with_epsilon0(1.0 / 2048.0).unwrap();
        let a = Graphon::affine(0.0, 1.0).unwrap();
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((e.degree(x) - a.degree(x)).abs() < 1e-13);
            assert!((e.degree_prime(x) - 0.5).abs() < 1e-8);
            assert!(e.degree_second(x).abs() < 1e-6);
            assert!((e.cross_moment(x, 0.3) - a.cross_moment(x, 0.3)).abs() < 1e-13);
            assert!((e.row_partial(x, 0.7) - a.row_partial(x, 0.7)).abs() < 1e-13);
        }
        let d = 0.61;
        let x = e.degree_inverse(d).unwrap();
        assert!((e.degree(x) - d).abs() <= 1e-12);
        assert!(Graphon::expr("x").is_err());
        assert!(Graphon::expr("x+y").is_err());
        assert!(Graphon::expr("z*x").is_err());
    }

    #[test]
    fn density_examples() {
        let half = Graphon::constant(0.5).unwrap();
        let aff = Graphon::affine(0.0, 1.0).unwrap();
        let k3 = SimpleGraph::complete(3).unwrap();
        let k2 = SimpleGraph::complete(2).unwrap();
        assert!((half.t_graphon(&k3, &q()) - 0.125).abs() < 1e-15);
        assert!((aff.t_graphon(&k2, &q()) - 0.5).abs() < 1e-15);
        assert!((aff.t_graphon(&SimpleGraph::empty(3).unwrap(), &q()) - 1.0).abs() < 1e-15);
        assert!((half.t_ind_graphon(&k2, &q()) - 0.5).abs() < 1e-15);
        assert!((half.t_ind_graphon(&SimpleGraph::empty(2).unwrap(), &q()) - 0.5).abs() < 1e-15);
        assert!((half.t_ind_graphon(&SimpleGraph::path(3).unwrap(), &q()) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rooted_examples() {
        let aff = Graphon::affine(0.0, 1.0).unwrap();
        let half = Graphon::constant(0.5).unwrap();
        let k2 = SimpleGraph::complete(2).unwrap();
        let root = LabeledMotif::new(k2.clone(), Word::new(vec![1]).unwrap()).unwrap();
        let r = aff.t_x_rooted(&root, &[0.3], &q()).unwrap();
        assert!((r.t - aff.degree(0.3)).abs() < 1e-15);
        assert_eq!(r.hat, 1.0);
        let both = LabeledMotif::new(k2, Word::new(vec![1, 2]).unwrap()).unwrap();
        let r = half.t_x_rooted(&both, &[0.2, 0.9], &q()).unwrap();
        assert_eq!((r.t, r.hat, r.tilde), (0.5, 0.5, 1.0));
        assert!(matches!(half.t_x_rooted(&both, &[0.2], &q()), Err(Error::Domain(_))));
        let marg = quad::gl(64).integrate(0.0, 1.0, |x| aff.t_x_rooted(&root, &[x], &q()).unwrap().t);
        assert!((marg - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inclusion_exclusion_matches_direct_induced() {
        let prod = Graphon::product(0.1).unwrap();
        let f = SimpleGraph::new(4, &[(1, 2), (2, 3)]).unwrap();
        let alt: f64 = supergraphs(&f)
            .unwrap()
            .iter()
            .map(|s| if s.extra_edges % 2 == 0 { 1.0 } else { -1.0 } * prod.t_graphon(&s.graph, &q()))
            .sum();
        assert!((alt - prod.t_ind_graphon(&f, &q())).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_switch() {
        let aff = Graphon::affine(0.0, 1.0).unwrap();
        let k5 = SimpleGraph::complete(5).unwrap();
        let mc = QuadratureSpec { nodes_per_dim: 8, mc_samples: 400_000, ..q() };
        let exact = QuadratureSpec { nodes_per_dim: 8, dim_switch: 5, ..q() };
        let a = aff.t_graphon(&k5, &mc);
        let b = aff.t_graphon(&k5, &exact);
        // relative SE of the MC mean is below 1%
        assert!((a - b).abs() < 0.03 * b, "{a} vs {b}");
        assert_eq!(a, aff.t_graphon(&k5, &mc));
    }

    #[test]
    fn profiles_integrate_to_density() {
        let prod = Graphon::product(0.2).unwrap();
        let c4 = SimpleGraph::cycle(4).unwrap();
        let rule = quad::gl(64);
        for keep in 1..=4 {
            let prof = prod.pinned_profile(&c4, &[], keep, &q());
            let tot: f64 = prof.iter().zip(&rule.w).map(|(a, b)| a * b).sum();
            assert!((tot - prod.t_graphon(&c4, &q())).abs() < 1e-14);
        }
    }

    #[test]
    fn regularity_flags() {
        let aff = Graphon::affine(0.0, 1.0).unwrap();
        let r = aff.check_regularity(512, 1e-9);
        assert!(r.symmetric && r.in_range);
        assert_eq!(r.condi_w, Some(true));
        assert_eq!(Graphon::product(0.1).unwrap().check_regularity(512, 1e-9).condi_w, Some(true));
        assert_eq!(Graphon::constant(0.5).unwrap().check_regularity(64, 1e-9).condi_w, None);
        assert!(Graphon::expr("x*y").unwrap().with_epsilon0(0.1).is_err());
        assert!(Graphon::from_spec("affine:0.1,0.8").unwrap().epsilon0().is_some());
        assert!(Graphon::from_spec("wavy").is_err());
    }
}
