//! Empirical degree CDF Π_n, its exact mean c_n, and the covariance kernel
//! Σ = Σ₁ + Σ₂ + Σ₃ of its Gaussian limit.

use crate::binom::{self, lattice_floor};
use crate::graph::SimpleGraph;
use crate::graphon::Graphon;
use crate::quad;
use crate::rng::{self, Streams};
use crate::{Error, Result};

/// Π_n(y) = (1/n) #{i : D_i ≤ D(y)}.
pub fn empirical_cdf(g: &SimpleGraph, w: &Graphon, y: f64) -> Result<f64> {
    let n = g.order();
    if n < 2 {
        return Err(Error::Domain("empirical degree CDF needs n ≥ 2".into()));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("y={y} outside [0,1]")));
    }
    let cut = lattice_floor((n - 1) as f64 * w.degree(y));
    Ok((0..n).filter(|&i| g.degree0(i) as f64 <= cut).count() as f64 / n as f64)
}

/// Π_n on a grid of y values, from one pass over the degrees.
pub fn empirical_cdf_grid(g: &SimpleGraph, w: &Graphon, ys: &[f64]) -> Result<Vec<f64>> {
    ys.iter().map(|&y| empirical_cdf(g, w, y)).collect()
}

/// c_n(y) = ∫ H_{n,D(y),0}(D(x)) dx.
pub fn c_n_exact(w: &Graphon, n: u64, y: f64) -> Result<f64> {
    w.require_regular()?;
    if !(0.0..=1.0).contains(&y) || n == 0 {
        return Err(Error::Domain(format!("c_n needs y in [0,1] and n ≥ 1, got y={y}, n={n}")));
    }
    let d = w.degree(y);
    let breaks = binom::transition_breaks(w, y, d, n);
    let f = |x: f64| binom::h(n, d, 0.0, w.degree(x));
    Ok(quad::adaptive_pieces(&f, &breaks, 1e-14))
}

/// −(D″/D′³)σ²_d/2 + (1/D′)((1−2d)/2 + S(nd)), the limit of n(c_n(y) − y)
/// up to the lattice term.
pub fn c_n_expansion(w: &Graphon, n: u64, y: f64) -> f64 {
    let d = w.degree(y);
    let (d1, d2) = (w.degree_prime(y), w.degree_second(y));
    -d2 / d1.powi(3) * d * (1.0 - d) / 2.0 + ((1.0 - 2.0 * d) / 2.0 + binom::sawtooth(n as f64 * d)) / d1
}

#[derive(Clone, Copy, Debug)]
pub struct SigmaParts {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub total: f64,
}

/// Σ and ρ for one graphon.
pub struct DegreeCdfKernel<'a> {
    w: &'a Graphon,
}

impl<'a> DegreeCdfKernel<'a> {
    pub fn new(w: &'a Graphon) -> Result<Self> {
        w.require_regular()?;
        Ok(Self { w })
    }

    fn slope(&self, y: f64) -> Result<f64> {
        let d1 = self.w.degree_prime(y);
        if d1 <= 0.0 {
            return Err(Error::Regularity(format!("D′({y}) = {d1} is not positive")));
        }
        Ok(d1)
    }

    pub fn sigma1(y: f64, z: f64) -> f64 {
        y.min(z) - y * z
    }

    pub fn sigma2(&self, y: f64, z: f64) -> Result<f64> {
        let w = self.w;
        Ok((w.cross_moment(y, z) - w.degree(y) * w.degree(z)) / (self.slope(y)? * self.slope(z)?))
    }

    pub fn sigma3(&self, y: f64, z: f64) -> Result<f64> {
        let w = self.w;
        let a = (w.degree(y) * z - w.row_partial(y, z)) / self.slope(y)?;
        let b = (w.degree(z) * y - w.row_partial(z, y)) / self.slope(z)?;
        Ok(a + b)
    }

    pub fn sigma(&self, y: f64, z: f64) -> Result<SigmaParts> {
        for v in [y, z] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!("{v} outside (0,1)")));
            }
        }
        let s1 = Self::sigma1(y, z);
        let s2 = self.sigma2(y, z)?;
        let s3 = self.sigma3(y, z)?;
        Ok(SigmaParts { s1, s2, s3, total: s1 + s2 + s3 })
    }

    /// ρ(y,u) = 1{u ≤ y} − W(y,u)/D′(y).
    pub fn rho(&self, y: f64, u: f64) -> Result<f64> {
        Ok(if u <= y { 1.0 } else { 0.0 } - self.w.w(y, u) / self.slope(y)?)
    }

    /// ρ̄(y) = ∫ρ(y,u)du, by quadrature.
    pub fn rho_bar(&self, y: f64) -> Result<f64> {
        let d1 = self.slope(y)?;
        let f = |u: f64| if u <= y { 1.0 } else { 0.0 } - self.w.w(y, u) / d1;
        Ok(quad::adaptive_pieces(&f, &[0.0, y, 1.0], 1e-14))
    }

    /// ∫(ρ(y,u) − ρ̄(y))(ρ(z,u) − ρ̄(z))du.
    pub fn chi_covariance(&self, y: f64, z: f64) -> Result<f64> {
        let (dy, dz) = (self.slope(y)?, self.slope(z)?);
        let (by, bz) = (self.rho_bar(y)?, self.rho_bar(z)?);
        let f = |u: f64| {
            let ry = if u <= y { 1.0 } else { 0.0 } - self.w.w(y, u) / dy;
            let rz = if u <= z { 1.0 } else { 0.0 } - self.w.w(z, u) / dz;
            (ry - by) * (rz - bz)
        };
        Ok(quad::adaptive_pieces(&f, &[0.0, y.min(z), y.max(z), 1.0], 1e-14))
    }
}

pub fn sigma_kernel(w: &Graphon, y: f64, z: f64) -> Result<SigmaParts> {
    DegreeCdfKernel::new(w)?.sigma(y, z)
}

pub fn chi_variance_rho(w: &Graphon, y: f64, z: f64) -> Result<f64> {
    DegreeCdfKernel::new(w)?.chi_covariance(y, z)
}

/// lim H_n(y,u) = (D(y) − W(y,u))/D′(y).
pub fn h_limit(w: &Graphon, y: f64, u: f64) -> f64 {
    (w.degree(y) - w.w(y, u)) / w.degree_prime(y)
}

/// lim H*_n(y,u) = 1{u ≤ y} − y.
pub fn h_star_limit(y: f64, u: f64) -> f64 {
    if u <= y {
        1.0 - y
    } else {
        -y
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CovMatrix {
    pub m: [[f64; 2]; 2],
    pub det: f64,
}

/// Covariance of (1{edge y₁–z}, 1{edge y₂–z}) for z uniform.
pub fn bernoulli_cov_matrix(w: &Graphon, y1: f64, y2: f64) -> Result<CovMatrix> {
    let (d1, d2) = (w.degree(y1), w.degree(y2));
    let off = w.cross_moment(y1, y2) - d1 * d2;
    let m = [[d1 * (1.0 - d1), off], [off, d2 * (1.0 - d2)]];
    let det = m[0][0] * m[1][1] - off * off;
    if w.epsilon0().is_some() && det <= 0.0 {
        return Err(Error::Regularity(format!("covariance determinant {det} at ({y1},{y2}) is not positive")));
    }
    Ok(CovMatrix { m, det })
}

/// (1−ε)(ε−δ): the sharp lower bound on ∫fg for 0 ≤ f,g ≤ 1−ε with
/// ∫(f+g) = 1−δ.
pub fn product_lower_bound(eps: f64, delta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) || delta.abs() > eps / 2.0 {
        return Err(Error::Domain(format!("need ε ∈ (0,1/2) and |δ| ≤ ε/2, got ε={eps}, δ={delta}")));
    }
    Ok((1.0 - eps) * (eps - delta))
}

/// (∫fg, bound) for the given pair; δ is read off ∫(f+g).
pub fn product_bound_check<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, eps: f64) -> Result<(f64, f64)> {
    let fg = quad::adaptive(&|x| f(x) * g(x), 0.0, 1.0, 1e-13);
    let sum = quad::adaptive(&|x| f(x) + g(x), 0.0, 1.0, 1e-13);
    Ok((fg, product_lower_bound(eps, 1.0 - sum)?))
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub reps: usize,
}

/// Monte Carlo of n·E[(1{D₁ ≤ d₁} − 1{X₁ ≤ y₁})(1{D₂ ≤ d₂} − 1{X₂ ≤ y₂})]
/// with degrees taken in a graph on n+1 vertices. Only vertices 1 and 2 and
/// their edges are simulated.
pub fn pair_indicator_mc(w: &Graphon, y1: f64, y2: f64, n: usize, reps: usize, seed: u64) -> Result<McEstimate> {
    w.require_regular()?;
    if reps < 2 || n < 1 {
        return Err(Error::Domain("need at least two replicates and n ≥ 1".into()));
    }
    let (c1, c2) = (lattice_floor(n as f64 * w.degree(y1)), lattice_floor(n as f64 * w.degree(y2)));
    let (mut s, mut s2) = (0.0, 0.0);
    for r in 0..reps {
        let mut g = Streams::new(rng::derive(seed, r as u64)).stream(0);
        let x1 = rng::next_unit(&mut g);
        let x2 = rng::next_unit(&mut g);
        let e12 = (rng::next_u32(&mut g) as u64) < rng::bernoulli_threshold(w.w(x1, x2));
        let (mut k1, mut k2) = (e12 as u32, e12 as u32);
        for _ in 1..n {
            let xj = rng::next_unit(&mut g);
            k1 += ((rng::next_u32(&mut g) as u64) < rng::bernoulli_threshold(w.w(x1, xj))) as u32;
            k2 += ((rng::next_u32(&mut g) as u64) < rng::bernoulli_threshold(w.w(x2, xj))) as u32;
        }
        let f1 = (k1 as f64 <= c1) as i32 as f64 - (x1 <= y1) as i32 as f64;
        let f2 = (k2 as f64 <= c2) as i32 as f64 - (x2 <= y2) as i32 as f64;
        let v = n as f64 * f1 * f2;
        s += v;
        s2 += v * v;
    }
    let m = s / reps as f64;
    let var = (s2 / reps as f64 - m * m) * reps as f64 / (reps - 1) as f64;
    Ok(McEstimate { mean: m, se: (var / reps as f64).sqrt(), reps })
}
