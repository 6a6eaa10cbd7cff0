use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{BoundCheckReport, WorstCase};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::spectral::SymbolParams;

/// Constant for the block bounds, fitted on seeded sweeps with a safety margin.
pub const BLOCK_CONSTANT: f64 = 8.0;

/// Dyadic frequency and modulation indices of a block triple.
///
/// Block `i` is `D_{k_i, j_i} = {(xi, tau) : xi in [2^{k-1}, 2^{k+1}], tau - p(xi) in I_j}`
/// with `I_0 = [-2, 2]` and `I_j = {|sigma| in [2^{j-1}, 2^{j+1}]}` for `j >= 1`.
/// Block 1 receives the convolution of blocks 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicConfig {
    pub k: [u32; 3],
    pub j: [u32; 3],
}

/// Which case of the block estimate a configuration falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Comparable frequencies and `L_max ~ N_max^2 N_min`.
    Comparable,
    /// One of the three high-high-low cases, indexed by the low block (0, 1 or 2).
    HighHighLow(usize),
    Other,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Comparable => write!(f, "i"),
            Regime::HighHighLow(c) => write!(f, "ii.{}", c + 1),
            Regime::Other => write!(f, "iii"),
        }
    }
}

fn pow2(e: u32) -> i128 {
    1i128 << e
}

fn sorted(a: [u32; 3]) -> [u32; 3] {
    let mut s = a;
    s.sort_unstable();
    s
}

/// `a ~ b` on dyadic exponents.
fn comparable(a: u32, b: u32) -> bool {
    a.abs_diff(b) <= 2
}

/// `a >> b` on dyadic exponents.
fn much_larger(a: u32, b: u32) -> bool {
    a >= b + 3
}

fn modulation_range(j: u32) -> (i128, i128) {
    if j == 0 {
        (0, 2)
    } else {
        (pow2(j - 1), pow2(j + 1))
    }
}

impl DyadicConfig {
    /// Frequency indices in `1..=30`, modulation indices in `0..=90`.
    pub fn new(k: [u32; 3], j: [u32; 3]) -> Result<Self> {
        if k.iter().any(|&x| !(1..=30).contains(&x)) || j.iter().any(|&x| x > 90) {
            return Err(Error::invalid(format!("dyadic indices out of range: k = {k:?}, j = {j:?}")));
        }
        Ok(DyadicConfig { k, j })
    }

    pub fn n(&self, i: usize) -> f64 {
        2f64.powi(self.k[i] as i32)
    }

    pub fn l(&self, i: usize) -> f64 {
        2f64.powi(self.j[i] as i32)
    }

    /// Exact integer test of the support conditions for cubic dispersion.
    ///
    /// On the blocks, `sigma_1 - sigma_2 - sigma_3 = p(xi_2) + p(xi_3) - p(xi_1) = -3 xi_1 xi_2 xi_3`
    /// with `xi_1 = xi_2 + xi_3`. The test requires the frequency intervals to be
    /// compatible, `|k_max - k_med| <= 3`, the resonance to be reachable from the
    /// three modulation ranges, and each modulation to be reachable from the
    /// resonance and the other two. A configuration failing it has an empty
    /// output support.
    pub fn is_admissible(&self) -> bool {
        let [k1, k2, k3] = self.k;
        let ks = sorted(self.k);
        if ks[2] - ks[1] > 3 {
            return false;
        }
        let lo = |k: u32| pow2(k - 1);
        let hi = |k: u32| pow2(k + 1);
        let (s_lo, s_hi) = (lo(k2) + lo(k3), hi(k2) + hi(k3));
        if s_lo > hi(k1) || s_hi < lo(k1) {
            return false;
        }
        let x1_lo = s_lo.max(lo(k1));
        let x1_hi = s_hi.min(hi(k1));
        let r_lo = 3 * x1_lo * lo(k2) * lo(k3);
        let r_hi = 3 * x1_hi * hi(k2) * hi(k3);
        let m: Vec<(i128, i128)> = self.j.iter().map(|&j| modulation_range(j)).collect();
        let hi_sum: i128 = m.iter().map(|r| r.1).sum();
        if r_lo > hi_sum {
            return false;
        }
        (0..3).all(|i| m[i].0 <= r_hi + hi_sum - m[i].1)
    }

    /// The looser textbook form: `|k_max - k_med| <= 3` and `2^{j_max}` within a
    /// factor 4 of `max(2^{j_med}, 2^{2 k_max + k_min})`.
    pub fn satisfies_double(&self) -> bool {
        let ks = sorted(self.k);
        let js = sorted(self.j);
        let target = js[1].max(2 * ks[2] + ks[0]);
        ks[2] - ks[1] <= 3 && js[2].abs_diff(target) <= 2
    }

    pub fn regime(&self) -> Regime {
        let ks = sorted(self.k);
        let js = sorted(self.j);
        let res = 2 * ks[2] + ks[0];
        if comparable(ks[2], ks[0]) && comparable(js[2], res) {
            return Regime::Comparable;
        }
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let (k, j) = (&self.k, &self.j);
            if comparable(k[a], k[b])
                && much_larger(k[a].min(k[b]), k[c])
                && comparable(j[c], res)
                && j[c] + 2 >= j[a]
                && j[c] + 2 >= j[b]
            {
                return Regime::HighHighLow(c);
            }
        }
        Regime::Other
    }

    /// The regime-matched right-hand side of the block estimate, without its constant.
    pub fn regime_bound(&self) -> f64 {
        let mut n: Vec<f64> = (0..3).map(|i| self.n(i)).collect();
        let mut l: Vec<f64> = (0..3).map(|i| self.l(i)).collect();
        n.sort_by(f64::total_cmp);
        l.sort_by(f64::total_cmp);
        let (n_min, n_max) = (n[0], n[2]);
        let (l_min, l_med) = (l[0], l[1]);
        match self.regime() {
            Regime::Comparable => l_min.sqrt() * n_max.powf(-0.25) * l_med.powf(0.25),
            Regime::HighHighLow(_) => l_min.sqrt() / n_max * (n_max * n_max * n_min).min(n_max / n_min * l_med).sqrt(),
            Regime::Other => l_min.sqrt() / n_max * (n_max * n_max * n_min).min(l_med).sqrt(),
        }
    }

    /// Exchanges the two input blocks.
    pub fn swapped_inputs(&self) -> DyadicConfig {
        DyadicConfig { k: [self.k[0], self.k[2], self.k[1]], j: [self.j[0], self.j[2], self.j[1]] }
    }
}

/// Discretisation of the blocks in the coordinates `(xi, sigma = tau - p(xi))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockLattice {
    /// Cells along the frequency side and along each modulation interval.
    pub cells_per_side: usize,
    /// Quadrature points per cell side used for the overlap volumes.
    pub subsamples: usize,
    /// Largest accepted number of input cell pairs.
    pub pair_budget: usize,
}

impl Default for BlockLattice {
    fn default() -> Self {
        BlockLattice { cells_per_side: 32, subsamples: 2, pair_budget: 20_000_000 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    start: f64,
    h: f64,
    n: usize,
}

#[derive(Clone, Debug)]
struct Block {
    xi0: f64,
    hxi: f64,
    nxi: usize,
    segments: Vec<Segment>,
    nsigma: usize,
}

impl Block {
    fn new(k: u32, j: u32, cells: usize) -> Block {
        let xi0 = 2f64.powi(k as i32 - 1);
        let hxi = 3.0 * xi0 / cells as f64;
        let segments = if j == 0 {
            vec![Segment { start: -2.0, h: 4.0 / cells as f64, n: cells }]
        } else {
            let a = 2f64.powi(j as i32 - 1);
            let h = 3.0 * a / cells as f64;
            vec![Segment { start: -4.0 * a, h, n: cells }, Segment { start: a, h, n: cells }]
        };
        let nsigma = segments.iter().map(|s| s.n).sum();
        Block { xi0, hxi, nxi: cells, segments, nsigma }
    }

    fn len(&self) -> usize {
        self.nxi * self.nsigma
    }

    /// `(xi centre, sigma centre, sigma width)` of cell `idx`.
    fn cell(&self, idx: usize) -> (f64, f64, f64) {
        let (ix, mut is) = (idx / self.nsigma, idx % self.nsigma);
        let xi = self.xi0 + (ix as f64 + 0.5) * self.hxi;
        for s in &self.segments {
            if is < s.n {
                return (xi, s.start + (is as f64 + 0.5) * s.h, s.h);
            }
            is -= s.n;
        }
        unreachable!("cell index out of range")
    }

    fn area(&self, idx: usize) -> f64 {
        self.hxi * self.cell(idx).2
    }

    fn locate(&self, xi: f64, sigma: f64) -> Option<usize> {
        let fx = (xi - self.xi0) / self.hxi;
        if !(0.0..self.nxi as f64).contains(&fx) {
            return None;
        }
        let mut offset = 0;
        for s in &self.segments {
            let fs = (sigma - s.start) / s.h;
            if (0.0..s.n as f64).contains(&fs) {
                return Some(fx as usize * self.nsigma + offset + fs as usize);
            }
            offset += s.n;
        }
        None
    }
}

/// Sparse overlap volumes `vol(a, b, c) = |{(P, Q) : P in a, Q in b, P + Q in c}|`
/// for cells `a` of block 2, `b` of block 3 and `c` of block 1.
struct Overlaps {
    out: Block,
    n2: usize,
    n3: usize,
    areas2: Vec<f64>,
    areas3: Vec<f64>,
    rows: Vec<Vec<(u32, u32, f64)>>,
}

impl Overlaps {
    fn build(cfg: &DyadicConfig, params: &SymbolParams, lattice: &BlockLattice) -> Result<Overlaps> {
        let cells = lattice.cells_per_side.max(1);
        let q = lattice.subsamples.max(1);
        let b1 = Block::new(cfg.k[0], cfg.j[0], cells);
        let b2 = Block::new(cfg.k[1], cfg.j[1], cells);
        let b3 = Block::new(cfg.k[2], cfg.j[2], cells);
        let pairs = b2.len() * b3.len();
        if pairs > lattice.pair_budget {
            return Err(Error::LatticeBudget { cells: pairs, limit: lattice.pair_budget });
        }
        let sub = |blk: &Block, idx: usize| -> Vec<(f64, f64)> {
            let (xc, sc, hs) = blk.cell(idx);
            let mut pts = Vec::with_capacity(q * q);
            for a in 0..q {
                let x = xc + ((a as f64 + 0.5) / q as f64 - 0.5) * blk.hxi;
                for b in 0..q {
                    let s = sc + ((b as f64 + 0.5) / q as f64 - 0.5) * hs;
                    pts.push((x, s + params.p(x)));
                }
            }
            pts
        };
        let pts3: Vec<Vec<(f64, f64)>> = (0..b3.len()).map(|i| sub(&b3, i)).collect();
        let areas2: Vec<f64> = (0..b2.len()).map(|i| b2.area(i)).collect();
        let areas3: Vec<f64> = (0..b3.len()).map(|i| b3.area(i)).collect();
        let q4 = (q * q * q * q) as f64;
        let rows = (0..b2.len())
            .into_par_iter()
            .map(|a| {
                let pa = sub(&b2, a);
                let mut row: Vec<(u32, u32, f64)> = Vec::new();
                for (b, pb) in pts3.iter().enumerate() {
                    let w = areas2[a] * areas3[b] / q4;
                    for &(x2, t2) in &pa {
                        for &(x3, t3) in pb {
                            let xi = x2 + x3;
                            if let Some(c) = b1.locate(xi, t2 + t3 - params.p(xi)) {
                                row.push((b as u32, c as u32, w));
                            }
                        }
                    }
                }
                row.sort_by_key(|&(b, c, _)| (b, c));
                row.dedup_by(|next, kept| {
                    if next.0 == kept.0 && next.1 == kept.1 {
                        kept.2 += next.2;
                        true
                    } else {
                        false
                    }
                });
                row
            })
            .collect();
        Ok(Overlaps { n2: b2.len(), n3: b3.len(), out: b1, areas2, areas3, rows })
    }

    fn nonzero(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `||chi_{D_1} (u * v)||` for piecewise constant `u`, `v` of unit norm,
    /// measured after projecting onto piecewise constants on block 1.
    fn norm(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.out.len()];
        for (row, &ua) in self.rows.iter().zip(u) {
            for &(b, c, w) in row {
                acc[c as usize] += ua * v[b as usize] * w;
            }
        }
        acc.iter().enumerate().map(|(c, z)| z.norm_sqr() / self.out.area(c)).sum::<f64>().sqrt()
    }
}

fn gaussian_unit<R: Rng>(areas: &[f64], rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> =
        areas.iter().map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().zip(areas).map(|(z, a)| a * z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Monte Carlo lower estimate of the block norm: the largest
/// `||chi_{D_{k1,j1}} (u * v)||` over `trials` pairs of normalised complex
/// Gaussian trial functions on `D_{k2,j2}` and `D_{k3,j3}`.
///
/// Trial `t` draws from stream `t` of `seed`, so the result does not depend on
/// the thread count. Configurations with empty output support give exactly 0.
pub fn block_norm_estimate(
    cfg: &DyadicConfig,
    params: &SymbolParams,
    trials: usize,
    lattice: &BlockLattice,
    seed: u64,
) -> Result<f64> {
    let ov = Overlaps::build(cfg, params, lattice)?;
    if ov.nonzero() == 0 {
        return Ok(0.0);
    }
    let best = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(seed, t);
            let u = gaussian_unit(&ov.areas2, &mut rng);
            let v = gaussian_unit(&ov.areas3, &mut rng);
            debug_assert_eq!((u.len(), v.len()), (ov.n2, ov.n3));
            ov.norm(&u, &v)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// One row of a block sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSample {
    pub config: DyadicConfig,
    pub regime: Regime,
    pub estimate: f64,
    pub bound: f64,
    pub ratio: f64,
}

fn random_config<R: Rng>(kmax: u32, rng: &mut R) -> DyadicConfig {
    let k2 = rng.random_range(1..=kmax);
    let k3 = rng.random_range(1..=kmax);
    let top = k2.max(k3);
    let k1 = rng.random_range(top.saturating_sub(1).max(1)..=top + 2);
    let res = k1 + k2 + k3;
    let j = [rng.random_range(0..=res + 2), rng.random_range(0..=res + 2), rng.random_range(0..=res + 2)];
    DyadicConfig { k: [k1, k2, k3], j }
}

/// `count` distinct admissible configurations with frequency indices up to `kmax`.
pub fn admissible_configs(count: usize, kmax: u32, seed: u64) -> Vec<DyadicConfig> {
    sample_configs(count, kmax, seed, true)
}

/// `count` distinct configurations failing the admissibility test.
pub fn inadmissible_configs(count: usize, kmax: u32, seed: u64) -> Vec<DyadicConfig> {
    sample_configs(count, kmax, seed, false)
}

fn sample_configs(count: usize, kmax: u32, seed: u64, admissible: bool) -> Vec<DyadicConfig> {
    let mut rng = seeded(seed, 0);
    let mut out: Vec<DyadicConfig> = Vec::with_capacity(count);
    while out.len() < count {
        let c = random_config(kmax.max(1), &mut rng);
        if c.is_admissible() == admissible && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Estimates every configuration and checks `estimate <= stored * bound`.
pub fn block_sweep(
    configs: &[DyadicConfig],
    params: &SymbolParams,
    trials: usize,
    lattice: &BlockLattice,
    seed: u64,
    stored: f64,
) -> Result<(Vec<BlockSample>, BoundCheckReport)> {
    let mut samples = Vec::with_capacity(configs.len());
    for (i, cfg) in configs.iter().enumerate() {
        let estimate = block_norm_estimate(cfg, params, trials, lattice, seed.wrapping_add(i as u64))?;
        let bound = cfg.regime_bound();
        samples.push(BlockSample { config: *cfg, regime: cfg.regime(), estimate, bound, ratio: estimate / bound });
    }
    let mut report = BoundCheckReport::new("block-estimates", seed, stored)
        .with_budget("trials", trials as f64)
        .with_budget("cells_per_side", lattice.cells_per_side as f64)
        .with_budget("subsamples", lattice.subsamples as f64)
        .with_budget("pair_budget", lattice.pair_budget as f64);
    for s in &samples {
        report.record(s.ratio, || WorstCase::Config(s.config));
    }
    for (name, pick) in [("regime_i", 0usize), ("regime_ii", 1), ("regime_iii", 2)] {
        let n = samples
            .iter()
            .filter(|s| match s.regime {
                Regime::Comparable => pick == 0,
                Regime::HighHighLow(_) => pick == 1,
                Regime::Other => pick == 2,
            })
            .count();
        report.detail(name, n as f64);
    }
    Ok((samples, report))
}

/// CSV summary with header `k1,k2,k3,j1,j2,j3,regime,estimate,bound,ratio`.
pub fn write_sweep_csv<W: Write>(samples: &[BlockSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fmt_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["k1", "k2", "k3", "j1", "j2", "j3", "regime", "estimate", "bound", "ratio"]).map_err(fmt_err)?;
    for s in samples {
        let c = &s.config;
        let mut rec: Vec<String> = c.k.iter().chain(&c.j).map(|x| x.to_string()).collect();
        rec.push(s.regime.to_string());
        rec.extend([s.estimate, s.bound, s.ratio].iter().map(|x| format!("{x:e}")));
        w.write_record(&rec).map_err(fmt_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> SymbolParams {
        SymbolParams::airy()
    }

    fn small() -> BlockLattice {
        BlockLattice { cells_per_side: 12, subsamples: 2, pair_budget: 1_000_000 }
    }

    #[test]
    fn admissibility_examples() {
        // Three comparable frequencies with the output modulation at the resonance.
        let c = DyadicConfig::new([3, 2, 2], [10, 0, 0]).unwrap();
        assert!(c.is_admissible());
        // All modulations tiny while the resonance is of size 2^7.
        let c = DyadicConfig::new([3, 2, 2], [0, 0, 0]).unwrap();
        assert!(!c.is_admissible());
        // Output frequency far above both inputs.
        let c = DyadicConfig::new([8, 2, 2], [12, 12, 12]).unwrap();
        assert!(!c.is_admissible());
    }

    #[test]
    fn regimes() {
        assert_eq!(DyadicConfig::new([3, 3, 3], [9, 0, 0]).unwrap().regime(), Regime::Comparable);
        assert_eq!(DyadicConfig::new([6, 6, 2], [3, 1, 14]).unwrap().regime(), Regime::HighHighLow(2));
        assert_eq!(DyadicConfig::new([6, 6, 2], [14, 1, 3]).unwrap().regime(), Regime::Other);
    }

    #[test]
    fn inadmissible_configurations_have_empty_support() {
        for c in inadmissible_configs(6, 4, 11) {
            let e = block_norm_estimate(&c, &cubic(), 2, &small(), 1).unwrap();
            assert_eq!(e, 0.0, "{c:?}");
        }
    }

    #[test]
    fn admissible_resonant_configuration_is_nonzero() {
        let c = DyadicConfig::new([3, 2, 2], [7, 1, 1]).unwrap();
        assert!(block_norm_estimate(&c, &cubic(), 4, &small(), 1).unwrap() > 0.0);
    }

    #[test]
    fn estimator_is_deterministic() {
        let c = DyadicConfig::new([3, 2, 2], [7, 1, 1]).unwrap();
        let a = block_norm_estimate(&c, &cubic(), 8, &small(), 5).unwrap();
        let b = block_norm_estimate(&c, &cubic(), 8, &small(), 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn input_swap_symmetry() {
        // The norm is symmetric in the two inputs; the estimator should agree up to sampling.
        for c in [DyadicConfig::new([4, 4, 1], [2, 1, 9]).unwrap(), DyadicConfig::new([3, 2, 2], [7, 0, 3]).unwrap()] {
            let a = block_norm_estimate(&c, &cubic(), 64, &small(), 3).unwrap();
            let b = block_norm_estimate(&c.swapped_inputs(), &cubic(), 64, &small(), 3).unwrap();
            assert!(a > 0.0 && (a / b - 1.0).abs() < 0.2, "{a} vs {b}");
        }
    }

    #[test]
    fn lattice_budget_is_enforced() {
        let c = DyadicConfig::new([3, 2, 2], [7, 1, 1]).unwrap();
        let lat = BlockLattice { cells_per_side: 32, subsamples: 2, pair_budget: 1000 };
        assert!(matches!(block_norm_estimate(&c, &cubic(), 1, &lat, 0), Err(Error::LatticeBudget { .. })));
    }
}
