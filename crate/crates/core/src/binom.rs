//! Binomial CDF H_{n,d,δ}(p) = P(Bin(n,p) ≤ nd+δ), its Edgeworth expansion
//! with lattice correction, and the integral expansion built on top of it.

use statrs::function::erf::erfc;
use std::f64::consts::PI;

use crate::graphon::Graphon;
use crate::quad;
use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const LN_2PI: f64 = 1.837_877_066_409_345_5;

// Stirling-series coefficients 1/12, 1/360, 1/1260, 1/1680, 1/1188
#[allow(clippy::excessive_precision)]
const S0: f64 = 0.083_333_333_333_333_333_333;
#[allow(clippy::excessive_precision)]
const S1: f64 = 0.002_777_777_777_777_777_777_78;
#[allow(clippy::excessive_precision)]
const S2: f64 = 0.000_793_650_793_650_793_650_793_65;
#[allow(clippy::excessive_precision)]
const S3: f64 = 0.000_595_238_095_238_095_238_095_238;
#[allow(clippy::excessive_precision)]
const S4: f64 = 0.000_841_750_841_750_841_750_841_750_8;

/// ln Γ(n+1) − (n+½)ln n + n − ½ln 2π at n = 0, ½, 1, …, 15.
#[allow(clippy::excessive_precision)]
const SFERR_HALVES: [f64; 31] = [
    0.0,
    0.153_426_409_720_027_345_291_384_8,
    0.081_061_466_795_327_258_219_670_2,
    0.054_814_121_051_917_653_896_139_0,
    0.041_340_695_955_409_294_093_822_1,
    0.033_162_873_519_936_287_485_110_48,
    0.027_677_925_684_998_339_148_789_29,
    0.023_746_163_656_297_495_971_329_20,
    0.020_790_672_103_765_093_111_522_77,
    0.018_488_450_532_673_185_230_779_34,
    0.016_644_691_189_821_192_163_194_87,
    0.015_134_973_221_917_378_873_512_55,
    0.013_876_128_823_070_747_998_745_73,
    0.012_810_465_242_920_226_924_249_86,
    0.011_896_709_945_891_770_095_055_72,
    0.011_104_559_758_206_917_326_629_91,
    0.010_411_265_261_972_096_497_478_567,
    0.009_799_416_126_158_803_298_389_475,
    0.009_255_462_182_712_732_917_728_637,
    0.008_768_700_134_139_385_462_952_823,
    0.008_330_563_433_362_871_256_469_318,
    0.007_934_114_564_314_020_547_248_100,
    0.007_573_675_487_951_840_794_972_024,
    0.007_244_554_301_320_383_179_543_912,
    0.006_942_840_107_209_529_865_664_152,
    0.006_665_247_032_707_682_442_354_394,
    0.006_408_994_188_004_207_068_439_631,
    0.006_171_712_263_039_457_647_532_867,
    0.005_951_370_112_758_847_735_624_416,
    0.005_746_216_513_010_115_682_023_589,
    0.005_554_733_551_962_801_371_038_690,
];

/// Stirling remainder at an integer argument.
fn stirlerr(n: u64) -> f64 {
    if n <= 15 {
        return SFERR_HALVES[(2 * n) as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// x ln(x/np) + np − x without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// Above this min(k, n−k) the product form costs more than it gains.
const DIRECT_MAX_K: u64 = 4096;

/// Double-double value (hi + lo) · 2^e, so long products neither lose
/// precision nor leave the exponent range.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
    e: i64,
}

fn pow2(k: i64) -> f64 {
    f64::from_bits(((k + 1023) as u64) << 52)
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0, e: 0 };

    fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo, e: 0 }.norm()
    }

    fn norm(self) -> Self {
        let (hi, lo) = (self.hi + self.lo, self.lo - ((self.hi + self.lo) - self.hi));
        let be = ((hi.to_bits() >> 52) & 0x7ff) as i64;
        if be == 0 || be == 0x7ff {
            return Dd { hi, lo, e: self.e };
        }
        let s = pow2(1023 - be);
        Dd { hi: hi * s, lo: lo * s, e: self.e + be - 1023 }
    }

    fn mul(self, o: Dd) -> Self {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Dd { hi: p, lo: err, e: self.e + o.e }.norm()
    }

    fn div(self, o: Dd) -> Self {
        let q = self.hi / o.hi;
        let r = (-q).mul_add(o.hi, self.hi) + self.lo - q * o.lo;
        Dd { hi: q, lo: r / o.hi, e: self.e - o.e }.norm()
    }

    fn powi(self, mut n: u64) -> Self {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }

    fn value(self) -> f64 {
        if self.e > 1023 {
            return f64::INFINITY;
        }
        if self.e < -1100 {
            return 0.0;
        }
        // two steps so that 2^e itself never leaves the normal range
        let half = self.e / 2;
        (self.hi + self.lo) * pow2(half) * pow2(self.e - half)
    }
}

/// C(n,k) p^k (1−p)^(n−k) in double-double arithmetic. 1−p enters as its
/// rounded value plus the exact rounding error, so far tails keep full
/// relative precision where exp of a large log would not.
fn pmf_direct(n: u64, k: u64, p: f64) -> f64 {
    let j = k.min(n - k);
    let (mut num, mut den) = (Dd::ONE, Dd::ONE);
    for i in 1..=j {
        num = num.mul(Dd::new((n - j + i) as f64, 0.0));
        den = den.mul(Dd::new(i as f64, 0.0));
    }
    let q = 1.0 - p;
    let qe = -p - (q - 1.0);
    num.div(den).mul(Dd::new(p, 0.0).powi(k)).mul(Dd::new(q, qe).powi(n - k)).value()
}

/// P(Bin(n,p) = k): a scaled exact product when min(k, n−k) ≤ 4096, the
/// saddle-point (Loader) form otherwise.
pub fn pmf(n: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if k.min(n - k) <= DIRECT_MAX_K {
        return pmf_direct(n, k, p);
    }
    let nf = n as f64;
    if k == 0 {
        return (nf * (-p).ln_1p()).exp();
    }
    if k == n {
        return (nf * p.ln()).exp();
    }
    let x = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(x, nf * p) - bd0(nf - x, nf * q);
    let lf = LN_2PI + x.ln() + (-x / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// P(Bin(n,p) ≤ k), summing the tail that excludes the mode.
pub fn cdf_at(n: u64, k: i64, p: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = k as u64;
    if k >= n {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - p;
    let mode = (((n + 1) as f64) * p).floor() as u64;
    let tiny = 1e-18;
    if k < mode {
        // lower tail, downwards from k; re-anchor every 32 terms
        let mut t = pmf(n, k, p);
        let mut sum = t;
        let mut j = k;
        while j > 0 {
            t *= j as f64 / (n - j + 1) as f64 * (q / p);
            j -= 1;
            if (k - j).is_multiple_of(32) {
                t = pmf(n, j, p);
            }
            sum += t;
            if t < tiny * sum {
                break;
            }
        }
        sum
    } else {
        let mut j = k + 1;
        let mut t = pmf(n, j, p);
        let mut upper = t;
        while j < n {
            t *= (n - j) as f64 / (j + 1) as f64 * (p / q);
            j += 1;
            if (j - k - 1).is_multiple_of(32) {
                t = pmf(n, j, p);
            }
            upper += t;
            if t < tiny * upper {
                break;
            }
        }
        1.0 - upper
    }
}

/// ⌊x⌋, snapped up when x sits within rounding distance below an integer
/// (nd+δ is formed in floating point).
pub fn lattice_floor(x: f64) -> f64 {
    let f = x.floor();
    if f + 1.0 - x <= 1e-11 * x.abs().max(1.0) {
        f + 1.0
    } else {
        f
    }
}

/// H_{n,d,δ}(p) = P(X ≤ nd+δ), X ~ Bin(n,p).
pub fn exact_cdf(n: u64, d: f64, delta: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("success probability {p} outside (0,1)")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    Ok(h(n, d, delta, p))
}

/// Unchecked H_{n,d,δ}(p); p ∈ {0,1} handled as limits.
pub(crate) fn h(n: u64, d: f64, delta: f64, p: f64) -> f64 {
    let t = lattice_floor(n as f64 * d + delta);
    cdf_at(n, t.clamp(-1.0, n as f64) as i64, p)
}

/// S(x) = ⌊x⌋ − x + ½ ∈ (−½, ½], right-continuous at the integers.
pub fn sawtooth(x: f64) -> f64 {
    (lattice_floor(x) - x + 0.5).min(0.5)
}

pub fn sigma(x: f64) -> f64 {
    (x * (1.0 - x)).sqrt()
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct EdgeworthEval {
    pub value: f64,
    /// (0.2 + 0.3|2p−1|)/(nσ²) + exp(−1.5√n σ)
    pub bound: f64,
    /// nσ² ≥ 25
    pub in_region: bool,
}

/// Φ(x) + Q(p,x)/√n + S(np + x√nσ)φ(x)/(√nσ), approximating
/// P(X ≤ np + x√nσ).
pub fn edgeworth_cdf(n: u64, p: f64, x: f64) -> EdgeworthEval {
    let nf = n as f64;
    let s = sigma(p);
    let rn = nf.sqrt();
    let q = (2.0 * p - 1.0) * (x * x - 1.0) * norm_pdf(x) / (6.0 * s);
    let value = norm_cdf(x) + q / rn + sawtooth(nf * p + x * rn * s) * norm_pdf(x) / (rn * s);
    let bound = (0.2 + 0.3 * (2.0 * p - 1.0).abs()) / (nf * s * s) + (-1.5 * rn * s).exp();
    EdgeworthEval { value, bound, in_region: nf * s * s >= 25.0 }
}

/// The exact probability that [`edgeworth_cdf`] approximates.
pub fn edgeworth_target(n: u64, p: f64, x: f64) -> f64 {
    let nf = n as f64;
    let t = lattice_floor(nf * p + x * nf.sqrt() * sigma(p));
    cdf_at(n, t.clamp(-1.0, nf) as i64, p)
}

#[derive(Clone, Copy, Debug)]
pub struct EdgeworthTerm {
    pub y_s: f64,
    pub phi_term: f64,
    pub correction: f64,
    pub pi_value: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct CdfApprox {
    pub term: EdgeworthTerm,
    pub value: f64,
    /// log(n)²/n; multiply by a fitted constant
    pub envelope: f64,
}

/// K₀ = [ε₀, 1−ε₀] and the window |s| ≤ α√log n.
#[derive(Clone, Copy, Debug)]
pub struct ApproxDomain {
    pub eps0: f64,
    pub alpha: f64,
}

/// π(s,n,d,δ) = (1−2d)(1+2y_s²)/6 + S(nd+δ) + δ.
pub fn pi_term(s: f64, n: u64, d: f64, delta: f64) -> f64 {
    let ys = -s / sigma(d);
    (1.0 - 2.0 * d) * (1.0 + 2.0 * ys * ys) / 6.0 + sawtooth(n as f64 * d + delta) + delta
}

/// Approximation of H_{n,d,δ}(d + s/√n) by Φ(y_s) + φ(y_s)π/(√n σ_d).
pub fn cdf_approx(n: u64, d: f64, delta: f64, s: f64, dom: ApproxDomain) -> Result<CdfApprox> {
    let nf = n as f64;
    let k0 = |v: f64| v >= dom.eps0 && v <= 1.0 - dom.eps0;
    if n < 2 {
        return Err(Error::Domain("n must be at least 2".into()));
    }
    if !k0(d) || !k0(d + s / nf.sqrt()) {
        return Err(Error::Domain(format!("d={d}, s={s} leave K₀ at n={n}")));
    }
    if s.abs() > dom.alpha * nf.ln().sqrt() {
        return Err(Error::Domain(format!("|s|={} exceeds α√log n", s.abs())));
    }
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("δ={delta} outside [−1,1]")));
    }
    let sd = sigma(d);
    let ys = -s / sd;
    let pi_value = pi_term(s, n, d, delta);
    let phi_term = norm_cdf(ys);
    let correction = norm_pdf(ys) * pi_value / (nf.sqrt() * sd);
    Ok(CdfApprox {
        term: EdgeworthTerm { y_s: ys, phi_term, correction, pi_value },
        value: phi_term + correction,
        envelope: nf.ln().powi(2) / nf,
    })
}

/// |H_{n,d,δ}(u) − 1{u≤d}| ≤ n^{−α+2} whenever √n|u−d| ≥ α√log n.
pub fn tail_bound_check(n: u64, d: f64, delta: f64, u: f64, alpha: f64) -> Result<bool> {
    let nf = n as f64;
    if u == d || nf.sqrt() * (u - d).abs() < alpha * nf.ln().sqrt() {
        return Err(Error::Domain(format!("u={u} is inside the window around d={d}")));
    }
    if !(-1.0..=1.0).contains(&delta) || !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain("δ must lie in [−1,1] and u in (0,1)".into()));
    }
    let hv = exact_cdf(n, d, delta, u)?;
    let ind = if u <= d { 1.0 } else { 0.0 };
    Ok((hv - ind).abs() <= nf.powf(2.0 - alpha))
}

/// (Φ(−A/σ_d), 1/(α n^{2α²})) with A = α√log n.
pub fn gauss_tail_pair(n: u64, alpha: f64, d: f64) -> (f64, f64) {
    let nf = n as f64;
    let a = alpha * nf.ln().sqrt();
    (norm_cdf(-a / sigma(d)), 1.0 / (alpha * nf.powf(2.0 * alpha * alpha)))
}

/// Breakpoints in x where H_{n,d,δ}(D(x)) moves from 1 to 0.
pub(crate) fn transition_breaks(w: &Graphon, y: f64, d: f64, n: u64) -> Vec<f64> {
    let (lo, hi) = (w.degree(0.0), w.degree(1.0));
    let step = sigma(d) / (n as f64).sqrt();
    let mut out = vec![0.0, 1.0, y];
    for j in -12i32..=12 {
        let t = d + j as f64 * step;
        if t > lo && t < hi {
            if let Ok(x) = w.degree_inverse(t) {
                out.push(x);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct ExpansionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// n∫G(x)(H_{n,d,δ}(D(x)) − 1{x≤y})dx against its two-term expansion.
pub fn integral_expansion_check<G, DG>(w: &Graphon, g: G, dg: DG, y: f64, delta: f64, n: u64) -> Result<ExpansionCheck>
where
    G: Fn(f64) -> f64,
    DG: Fn(f64) -> f64,
{
    w.require_regular()?;
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("δ={delta} outside [−1,1]")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("y={y} outside (0,1)")));
    }
    let nf = n as f64;
    let d = w.degree(y);
    let a = 4.0 * nf.ln().sqrt() / nf.sqrt();
    if !(d - a > w.degree(0.0) && d + a < w.degree(1.0)) {
        return Err(Error::Domain(format!("window d ± 4√(log n)/√n leaves D((0,1)) at n={n}")));
    }
    integral_expansion(w, g, dg, y, delta, n)
}

/// [`integral_expansion_check`] without the window condition, so that small `n`
/// can be measured too.
pub fn integral_expansion<G, DG>(w: &Graphon, g: G, dg: DG, y: f64, delta: f64, n: u64) -> Result<ExpansionCheck>
where
    G: Fn(f64) -> f64,
    DG: Fn(f64) -> f64,
{
    w.require_regular()?;
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("δ={delta} outside [−1,1]")));
    }
    if !(y > 0.0 && y < 1.0) || n == 0 {
        return Err(Error::Domain(format!("y={y} outside (0,1) or n=0")));
    }
    let nf = n as f64;
    let d = w.degree(y);
    let breaks = transition_breaks(w, y, d, n);
    let f = |x: f64| {
        let ind = if x <= y { 1.0 } else { 0.0 };
        g(x) * (h(n, d, delta, w.degree(x)) - ind)
    };
    let lhs = nf * quad::adaptive_pieces(&f, &breaks, 1e-13);
    let (d1, d2) = (w.degree_prime(y), w.degree_second(y));
    let (gy, gp) = (g(y), dg(y));
    let s2 = d * (1.0 - d);
    let rhs = (gp * d1 - gy * d2) / d1.powi(3) * s2 / 2.0
        + gy / d1 * ((1.0 - 2.0 * d) / 2.0 + delta + sawtooth(nf * d + delta));
    Ok(ExpansionCheck { lhs, rhs, residual: (lhs - rhs).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_examples() {
        assert!((exact_cdf(2, 0.5, 0.0, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(exact_cdf(10, 1.0, 0.0, 0.3).unwrap(), 1.0);
        assert_eq!(exact_cdf(10, 0.0, -0.5, 0.3).unwrap(), 0.0);
        assert!(matches!(exact_cdf(10, 0.5, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(exact_cdf(10, 0.5, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn pmf_sums_to_one() {
        for &(n, p) in &[(1u64, 0.3), (17, 0.5), (200, 0.013), (1000, 0.77)] {
            let s: f64 = (0..=n).map(|k| pmf(n, k, p)).sum();
            assert!((s - 1.0).abs() < 1e-13, "n={n} p={p} sum={s}");
        }
    }

    #[test]
    fn sawtooth_values() {
        assert_eq!(sawtooth(2.5), 0.0);
        assert!((sawtooth(2.2) - 0.3).abs() < 1e-15);
        // right-continuous at the integers
        assert_eq!(sawtooth(3.0), 0.5);
        assert_eq!(sawtooth(200.0), 0.5);
        assert_eq!(sawtooth(0.29 * 100.0), 0.5);
        for i in 0..200 {
            let x = -7.3 + 0.0731 * i as f64;
            let s = sawtooth(x);
            assert!(s > -0.5 && s <= 0.5);
            assert!((s - sawtooth(x + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn edgeworth_examples() {
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let e = edgeworth_cdf(200, 0.5, x);
            assert!(e.in_region);
            let exact = edgeworth_target(200, 0.5, x);
            assert!((exact - e.value).abs() <= e.bound, "x={x}");
        }
        let e = edgeworth_cdf(200, 0.5, 0.0);
        let want = 0.5 + sawtooth(100.0) * norm_pdf(0.0) * 2.0 / 200f64.sqrt();
        assert!((e.value - want).abs() < 1e-15);
        let e = edgeworth_cdf(10_000, 0.5, 1.0);
        assert!((e.value - norm_cdf(1.0)).abs() <= 0.02);
        assert!(!edgeworth_cdf(50, 0.5, 0.0).in_region);
    }

    #[test]
    fn approx_examples() {
        let dom = ApproxDomain { eps0: 0.1, alpha: 2.0 };
        let a = cdf_approx(400, 0.5, 0.0, 0.0, dom).unwrap();
        let want = 0.5 + norm_pdf(0.0) * sawtooth(200.0) / 10.0;
        assert!((a.value - want).abs() < 1e-15);
        assert_eq!(sawtooth(200.0), 0.5);
        let s = 0.7;
        let b0 = cdf_approx(400, 0.45, 0.0, s, dom).unwrap();
        let b1 = cdf_approx(400, 0.45, -1.0, s, dom).unwrap();
        let ys = -s / sigma(0.45);
        let shift = sawtooth(180.0) - sawtooth(179.0) + 1.0;
        let want = norm_pdf(ys) * shift / (20.0 * sigma(0.45));
        assert!(((b0.value - b1.value) - want).abs() < 1e-15);
        assert!(cdf_approx(400, 0.05, 0.0, 0.0, dom).is_err());
        assert!(cdf_approx(400, 0.5, 0.0, 10.0, dom).is_err());
    }

    #[test]
    fn tail_examples() {
        assert!(tail_bound_check(1024, 0.5, 0.0, 0.9, 3.0).unwrap());
        assert!(tail_bound_check(1024, 0.5, 0.0, 0.1, 3.0).unwrap());
        assert!(matches!(tail_bound_check(1024, 0.5, 0.0, 0.5, 3.0), Err(Error::Domain(_))));
        assert!(matches!(tail_bound_check(1024, 0.5, 0.0, 0.55, 3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gauss_tail_bound() {
        for n in [16u64, 64, 256, 1024, 4096] {
            for d in [0.1, 0.3, 0.5] {
                let (lhs, rhs) = gauss_tail_pair(n, 1.0, d);
                assert!(lhs <= rhs, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn expansion_zero_weight() {
        let w = Graphon::affine(0.0, 1.0).unwrap();
        let r = integral_expansion_check(&w, |_| 0.0, |_| 0.0, 0.5, 0.0, 4096).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(integral_expansion_check(&w, |_| 1.0, |_| 0.0, 0.5, 0.0, 8).is_err());
        let c = Graphon::constant(0.5).unwrap();
        assert!(integral_expansion_check(&c, |_| 1.0, |_| 0.0, 0.5, 0.0, 256).is_err());
    }
}
