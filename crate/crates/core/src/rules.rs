//! Cubature rules: 1D rectangle rule, rank-1 lattice point sets, and a naive
//! component-by-component (CBC) generating-vector search for the weighted
//! Korobov worst-case error.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::scalar::Real;

/// Point/weight set on the unit cube `[0,1)^s`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<R: Real> {
    pub points: Vec<Vec<R>>,
    pub weights: Vec<R>,
}

impl<R: Real> QuadratureRule<R> {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// `s`-fold tensor product of a 1D rule (points ordered odometer-style,
    /// first coordinate slowest).
    pub fn tensor_power(rule: &QuadratureRule<R>, s: usize) -> QuadratureRule<R> {
        assert!(rule.dim() == 1 && s >= 1);
        let n = rule.n();
        let total = n.pow(s as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; s];
        loop {
            let mut p = Vec::with_capacity(s);
            let mut w = R::one();
            for &i in &idx {
                p.push(rule.points[i][0]);
                w *= rule.weights[i];
            }
            points.push(p);
            weights.push(w);
            // odometer increment, last coordinate fastest
            let mut d = s;
            loop {
                if d == 0 {
                    return QuadratureRule { points, weights };
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

/// `n` equally spaced points `k/n` with equal weights `1/n`.
pub fn rectangle_rule<R: Real>(n: usize) -> Result<QuadratureRule<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("rectangle_rule: n = 0".into()));
    }
    let nn = R::from_usize_exact(n);
    let w = R::one() / nn;
    Ok(QuadratureRule {
        points: (0..n).map(|k| vec![R::from_usize_exact(k) / nn]).collect(),
        weights: vec![w; n],
    })
}

/// Rank-1 lattice rule: `N` points `(k*z mod N)/N` with equal weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeRule {
    n: u64,
    z: Vec<u64>,
}

impl LatticeRule {
    pub fn new(n: u64, z: Vec<u64>) -> Result<Self> {
        if n == 0 || z.is_empty() {
            return Err(Error::InvalidArgument(
                "LatticeRule: need N >= 1 and a nonempty generating vector".into(),
            ));
        }
        for &zj in &z {
            if n > 1 && (zj == 0 || zj >= n) {
                return Err(Error::InvalidArgument(format!(
                    "LatticeRule: component {zj} outside 1..{}",
                    n - 1
                )));
            }
            if gcd(zj.max(1), n) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "LatticeRule: gcd({zj}, {n}) != 1"
                )));
            }
        }
        Ok(LatticeRule { n, z })
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn generating_vector(&self) -> &[u64] {
        &self.z
    }

    /// The N points `t_k = (k*z mod N)/N`.
    pub fn points<R: Real>(&self) -> Vec<Vec<R>> {
        let nn = R::from_u64(self.n).expect("N representable");
        (0..self.n)
            .map(|k| {
                self.z
                    .iter()
                    .map(|&zj| R::from_u64((k * zj) % self.n).expect("index") / nn)
                    .collect()
            })
            .collect()
    }

    pub fn to_quadrature<R: Real>(&self) -> QuadratureRule<R> {
        let w = R::one() / R::from_u64(self.n).expect("N representable");
        QuadratureRule {
            points: self.points(),
            weights: vec![w; self.n as usize],
        }
    }
}

pub fn lattice_points<R: Real>(rule: &LatticeRule) -> Vec<Vec<R>> {
    rule.points()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Configuration of the weighted Korobov CBC criterion.
#[derive(Clone, Debug)]
pub struct CbcConfig {
    /// Even smoothness parameter, 2 or 4.
    pub alpha: u32,
    /// Product weights gamma_j > 0; shorter lists are padded with the last
    /// entry (default all 1).
    pub gamma: Vec<f64>,
}

impl Default for CbcConfig {
    fn default() -> Self {
        CbcConfig {
            alpha: 2,
            gamma: vec![1.0],
        }
    }
}

/// Result of a CBC search: the rule plus the final worst-case error square.
#[derive(Clone, Debug)]
pub struct CbcResult {
    pub rule: LatticeRule,
    pub criterion: f64,
}

/// Korobov kernel `omega_alpha(x) = sum_{h != 0} e^{2 pi i h x}/|h|^alpha` in
/// Bernoulli-polynomial closed form.
pub fn korobov_omega(alpha: u32, x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match alpha {
        2 => 2.0 * pi * pi * (x * x - x + 1.0 / 6.0),
        4 => {
            // -(2 pi)^4 / 4! * B_4(x)
            let b4 = x * x * x * x - 2.0 * x * x * x + x * x - 1.0 / 30.0;
            -(2.0 * pi).powi(4) / 24.0 * b4
        }
        _ => panic!("korobov_omega: alpha must be 2 or 4"),
    }
}

/// Direct evaluation of the worst-case error square
/// `e^2(z) = -1 + (1/N) sum_k prod_j [1 + gamma_j omega_alpha({k z_j / N})]`.
pub fn cbc_criterion(n: u64, z: &[u64], cfg: &CbcConfig) -> f64 {
    let mut total = 0.0;
    for k in 0..n {
        let mut prod = 1.0;
        for (j, &zj) in z.iter().enumerate() {
            let x = ((k * zj) % n) as f64 / n as f64;
            prod *= 1.0 + gamma_at(cfg, j) * korobov_omega(cfg.alpha, x);
        }
        total += prod;
    }
    -1.0 + total / n as f64
}

fn gamma_at(cfg: &CbcConfig, j: usize) -> f64 {
    *cfg.gamma
        .get(j)
        .or_else(|| cfg.gamma.last())
        .expect("gamma nonempty")
}

/// Naive O(s*N^2) component-by-component construction: `z_1 = 1`, then each
/// `z_j` minimizes the criterion with ties broken by the smallest candidate.
pub fn cbc_generate(s: usize, n: u64, cfg: &CbcConfig) -> Result<CbcResult> {
    if s == 0 {
        return Err(Error::InvalidArgument("cbc_generate: s = 0".into()));
    }
    if !is_prime(n) {
        return Err(Error::InvalidArgument(format!(
            "cbc_generate: N = {n} is not prime"
        )));
    }
    if !(cfg.alpha == 2 || cfg.alpha == 4) {
        return Err(Error::InvalidArgument("cbc_generate: alpha must be 2 or 4".into()));
    }
    if cfg.gamma.is_empty() || cfg.gamma.iter().any(|&g| g <= 0.0) {
        return Err(Error::InvalidArgument(
            "cbc_generate: gamma must be nonempty and strictly positive".into(),
        ));
    }
    // omega table at k/N, indexed by k z_j mod N
    let omega: Vec<f64> = (0..n)
        .map(|k| korobov_omega(cfg.alpha, k as f64 / n as f64))
        .collect();
    // running per-k product over already-selected components
    let mut prod = vec![1.0f64; n as usize];
    let mut z: Vec<u64> = Vec::with_capacity(s);
    let mut best_e2 = 0.0;
    for j in 0..s {
        let gamma = gamma_at(cfg, j);
        let mut best: Option<(f64, u64)> = None;
        let candidates: std::ops::Range<u64> = if j == 0 { 1..2 } else { 1..n.max(2) };
        for cand in candidates {
            let mut total = 0.0;
            for k in 0..n {
                let idx = ((k * cand) % n) as usize;
                total += prod[k as usize] * (1.0 + gamma * omega[idx]);
            }
            let e2 = -1.0 + total / n as f64;
            let better = match best {
                None => true,
                Some((be, _)) => e2 < be,
            };
            if better {
                best = Some((e2, cand));
            }
        }
        let (e2, zj) = best.expect("nonempty candidate set");
        for k in 0..n {
            let idx = ((k * zj) % n) as usize;
            prod[k as usize] *= 1.0 + gamma * omega[idx];
        }
        z.push(zj);
        best_e2 = e2;
    }
    Ok(CbcResult {
        rule: LatticeRule::new(n, z)?,
        criterion: best_e2,
    })
}

/// Generating-vector file format: line 1 = N, line 2 = s, line 3 = the s
/// components of z, whitespace-separated.
pub fn read_generating_vector(path: &Path) -> Result<LatticeRule> {
    let text = std::fs::read_to_string(path)?;
    parse_generating_vector(&text)
}

pub fn parse_generating_vector(text: &str) -> Result<LatticeRule> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: u64 = lines
        .next()
        .ok_or_else(|| Error::Parse("missing N line".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad N: {e}")))?;
    let s: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("missing s line".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad s: {e}")))?;
    let z: Vec<u64> = lines
        .next()
        .ok_or_else(|| Error::Parse("missing z line".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad z component: {e}"))))
        .collect::<Result<_>>()?;
    if z.len() != s {
        return Err(Error::Parse(format!(
            "expected {s} components, found {}",
            z.len()
        )));
    }
    LatticeRule::new(n, z)
}

pub fn write_generating_vector(path: &Path, rule: &LatticeRule) -> Result<()> {
    let z: Vec<String> = rule.generating_vector().iter().map(u64::to_string).collect();
    let text = format!("{}\n{}\n{}\n", rule.count(), rule.dim(), z.join(" "));
    std::fs::write(path, text)?;
    Ok(())
}
