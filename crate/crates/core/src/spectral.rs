//! Symmetric eigenproblems through the rational solver: inverse power
//! iteration, diagonal perturbation, interval bisection with shift-invert
//! tests, eigenvectors and singular value decompositions.
//!
//! All matrices handed to the solver are integers. A perturbed matrix
//! `B = A + D` has a dyadic diagonal `D` with `F` fractional bits, and every
//! interval endpoint the bisection visits is a multiple of `2^-F`, so
//! `2^F·(B − mI)` is an integer operator for every shift m.

use crate::linop::{LinearOperator, SparseMatrix};
use crate::meter;
use crate::numeric::{Fixed, Float};
use crate::rational_solver::{bigint_log2, with_solver, Solver, SolverConfig};
use crate::seed::{Rng, Seed};
use crate::{Error, Result};
use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng as _;

#[derive(Debug, Clone)]
pub struct SpectralConfig {
    /// Configuration of every inner linear solve (one coordinate block).
    pub solver: SolverConfig,
    /// Fresh perturbations tried when the merged spectrum has the wrong size.
    pub retries: usize,
    /// Decision-preserving early exits in the shift-invert test (see
    /// [`shift_invert`]). Off means every NO answer runs all T iterations.
    pub certificates: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig { solver: SolverConfig { blocks: Some(1), ..SolverConfig::default() }, retries: 1, certificates: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenPair {
    pub value: Fixed,
    pub vector: Vec<Fixed>,
}

/// One streamed SVD column: `uᵢ`, and for the m largest eigenvalues of
/// `AAᵀ` also `σᵢ` and `vᵢ = σᵢ⁻¹Aᵀuᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvdColumn {
    pub u: Vec<Fixed>,
    pub sigma: Option<Fixed>,
    pub v: Option<Vec<Fixed>>,
}

/// How an inverse power run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// The operator is singular; the value is 0.
    Singular,
    /// `‖u‖² ≥ 2/δ²`; the value is δ.
    Small,
    /// All T iterations ran.
    Completed,
    /// The estimate fell below the caller's threshold (it never increases).
    BelowThreshold,
    /// A trace bound proved `|λ_min|` above the caller's threshold.
    Certified,
}

#[derive(Debug, Clone)]
pub struct InvPowerOutcome {
    pub value: Float,
    /// The last normalized iterate `v⁽ᵀ⁾`.
    pub vector: Vec<Fixed>,
    pub iterations: usize,
    pub solves: usize,
    pub exit: Exit,
}

fn log2_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    bigint_log2(x.mantissa()) + x.exponent() as f64
}

fn log2_sum(terms: &[f64]) -> f64 {
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
}

struct Params {
    iterations: usize,
    eps_l: f64,
    frac_v: u32,
    prec: u32,
}

/// T, the inner accuracy `ε_L = ε/(100M²)` with
/// `M = n²U² + 16n³/δ + 4n⁶(n/ε_S)⁷`, and the fixed-point width of v.
fn params(n: usize, u: &BigInt, eps: f64, delta: &Float, gap: bool) -> Params {
    let nf = n.max(1) as f64;
    let eps_s = if gap { 0.1 } else { eps / 4.0 };
    let iterations = if gap {
        ((4.0 * nf.powi(6) / eps).ln() / (2.0 * 1.1f64.ln())).ceil()
    } else {
        (28.0 * (4.0 * nf / eps_s).ln() / eps).ceil()
    };
    let ln = nf.log2();
    let log_m = log2_sum(&[
        2.0 * ln + 2.0 * bigint_log2(u),
        4.0 + 3.0 * ln - log2_float(delta),
        2.0 + 6.0 * ln + 7.0 * (nf / eps_s).log2(),
    ]);
    let log_eps_l = (eps.log2() - 100f64.log2() - 2.0 * log_m).max(-1000.0);
    let frac_v = (ln - log_eps_l).ceil() as u32 + 8;
    Params { iterations: iterations.max(1.0) as usize, eps_l: log_eps_l.exp2(), frac_v, prec: frac_v + 32 }
}

/// A standard normal sample (Box–Muller on the seeded stream).
fn gaussian(rng: &mut Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn norm2(x: &[Float], prec: u32) -> Result<Float> {
    let mut s = Float::zero(prec);
    for v in x {
        s = s.add_same_sign(&v.mul(v)?)?;
    }
    Ok(s)
}

/// `‖v‖²` of a fixed-point vector given by its scaled integers.
fn fixed_norm2(v: &[BigInt], frac: u32, prec: u32) -> Result<Float> {
    let s: BigInt = v.iter().map(|x| x * x).sum();
    Float::from_bigint(&s, prec)?.mul_pow2(-2 * frac as i64)
}

/// Scaled integers of `x / ‖x‖` rounded to `frac` fractional bits.
fn normalize(x: &[Float], frac: u32, prec: u32) -> Result<Vec<BigInt>> {
    let inv = norm2(x, prec)?.sqrt()?.recip()?;
    x.iter().map(|v| Ok(v.mul(&inv)?.to_fixed(frac).scaled().clone())).collect()
}

/// Solution of `H y = b·2^-frac`, rounded to `prec`.
fn solve_scaled(s: &mut Solver<'_>, b: &[BigInt], frac: u32, p: &Params) -> Result<Vec<Float>> {
    s.solve(b, p.eps_l)?.into_iter().map(|y| y.with_prec(p.prec)?.mul_pow2(-(frac as i64))).collect()
}

/// Early-exit hooks for the shift-invert test.
struct Hooks<'h> {
    /// Stop once the estimate drops below this value.
    below: &'h Float,
    /// Bound on the spectral radius of the operator, for the certificate.
    radius: &'h BigInt,
}

const MAX_CERT_POWER: usize = 64;

/// Tries to prove `|λ_min(H)| ≥ τ` with the trace bound
/// `|λ_min|^(−2k) ≤ Σⱼ ‖H⁻ᵏeⱼ‖²`. Each `‖H⁻ᵏeⱼ‖` is a product of k
/// normalized solves; the fixed-point rounding between them is safe as long
/// as `2^frac` dominates the condition number bound `Rⁿ/|det H|`.
fn certify_above(s: &mut Solver<'_>, k: usize, tau: &Float, radius: &BigInt, p: &Params, solves: &mut usize) -> Result<bool> {
    let n = s.dim();
    let kappa_bits = n as u64 * radius.bits() - (s.determinant().bits() - 1);
    let guard = 24 + (k * n).ilog2() as u64 + 1;
    if kappa_bits + guard >= p.frac_v as u64 {
        return Ok(false);
    }
    let mut t2k = tau.mul(tau)?;
    for _ in 1..k {
        t2k = t2k.mul(&tau.mul(tau)?)?;
    }
    // Σ·τ^(2k)·(1 + 2⁻¹⁶) must stay ≤ 1.
    let margin = Float::from_ratio(&BigInt::from(65537), &BigInt::from(65536), p.prec)?;
    let limit = Float::from_i64(1, p.prec);
    let mut total = Float::zero(p.prec);
    let _charge = meter::charge("inv_power.certificate", 2 * n as u64 * (p.prec as u64 + 64));
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        let mut cur = solve_scaled(s, &e, 0, p)?;
        *solves += 1;
        let mut prod = norm2(&cur, p.prec)?;
        for _ in 1..k {
            let z = normalize(&cur, p.frac_v, p.prec)?;
            let z2 = fixed_norm2(&z, p.frac_v, p.prec)?;
            cur = solve_scaled(s, &z, p.frac_v, p)?;
            *solves += 1;
            prod = prod.mul(&norm2(&cur, p.prec)?.div(&z2)?)?;
        }
        total = total.add_same_sign(&prod)?;
        if total.mul(&t2k)?.mul(&margin)? > limit {
            return Ok(false);
        }
    }
    Ok(true)
}

fn run_inv_power(s: &mut Solver<'_>, p: &Params, delta: &Float, hooks: Option<Hooks<'_>>, seed: Seed) -> Result<InvPowerOutcome> {
    let n = s.dim();
    let prec = p.prec;
    let mut rng = seed.derive("gauss").rng();
    let mut u: Vec<Float> = (0..n).map(|_| Float::from_f64(gaussian(&mut rng), prec)).collect::<Result<_>>()?;
    let _charge = meter::charge("inv_power.vectors", n as u64 * (2 * prec as u64 + p.frac_v as u64 + 192));
    let two = Float::from_i64(2, prec);
    let delta2 = delta.mul(delta)?;
    let mut v = Vec::new();
    let mut rho = Float::zero(prec);
    let mut solves = 0;
    let (mut cert_spent, mut next_k) = (0usize, 1usize);
    let outcome = |value: Float, v: &[BigInt], i: usize, solves: usize, exit: Exit| InvPowerOutcome {
        value,
        vector: v.iter().map(|x| Fixed::new(x.clone(), p.frac_v)).collect(),
        iterations: i,
        solves,
        exit,
    };
    for i in 1..=p.iterations {
        v = normalize(&u, p.frac_v, prec)?;
        u = solve_scaled(s, &v, p.frac_v, p)?;
        solves += 1;
        let u2 = norm2(&u, prec)?;
        if u2.mul(&delta2)? >= two {
            return Ok(outcome(delta.clone(), &v, i, solves, Exit::Small));
        }
        rho = fixed_norm2(&v, p.frac_v, prec)?.div(&u2)?.sqrt()?;
        if let Some(h) = &hooks {
            // ‖v⁽ⁱ⁾‖/‖u⁽ⁱ⁾‖ never increases along the iteration, so the
            // final answer is already known to lie below the threshold.
            if &rho < h.below {
                return Ok(outcome(rho, &v, i, solves, Exit::BelowThreshold));
            }
            if i >= 2 && next_k <= MAX_CERT_POWER && i >= cert_spent {
                let before = solves;
                let ok = certify_above(s, next_k, h.below, h.radius, p, &mut solves)?;
                cert_spent += solves - before;
                next_k *= 2;
                if ok {
                    return Ok(outcome(rho, &v, i, solves, Exit::Certified));
                }
            }
        }
    }
    Ok(outcome(rho, &v, p.iterations, solves, Exit::Completed))
}

fn inv_power_impl(
    op: &LinearOperator<'_>,
    eps: f64,
    delta: &Float,
    gap: bool,
    hooks: Option<Hooks<'_>>,
    seed: Seed,
    cfg: &SpectralConfig,
) -> Result<InvPowerOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("ε must lie in (0, 1)"));
    }
    if delta.is_zero() || delta.is_negative() {
        return Err(Error::invalid("δ must be positive"));
    }
    let n = op.rows();
    let u = op.max_abs_entry().max(BigInt::one());
    let p = params(n, &u, eps, delta, gap);
    with_solver(op, seed.derive("solve"), &cfg.solver, |s| match s {
        None => Ok(InvPowerOutcome {
            value: Float::zero(p.prec),
            vector: vec![Fixed::zero(p.frac_v); n],
            iterations: 0,
            solves: 0,
            exit: Exit::Singular,
        }),
        Some(s) => run_inv_power(s, &p, delta, hooks, seed),
    })
}

/// `λ̃ ≈_ε max{δ, min|λᵢ|}` for a symmetric integer operator; 0 if singular.
pub fn inv_power_op(op: &LinearOperator<'_>, eps: f64, delta: &Float, seed: Seed, cfg: &SpectralConfig) -> Result<InvPowerOutcome> {
    inv_power_impl(op, eps, delta, false, None, seed, cfg)
}

/// [`inv_power_op`] on a symmetric integer matrix.
pub fn inv_power(a: &SparseMatrix, eps: f64, delta: f64, seed: Seed, cfg: &SpectralConfig) -> Result<Float> {
    let delta = Float::from_f64(delta, 64)?;
    Ok(inv_power_op(&LinearOperator::base(a), eps, &delta, seed, cfg)?.value)
}

/// Inverse power iteration under a spectral gap `δ ≤ |λ₁|`, `1.1|λ₁| ≤ |λ₂|`:
/// `O(log(n/ε))` iterations, returning `|λ₁|` and the last iterate.
pub fn inv_power_gap_op(op: &LinearOperator<'_>, eps: f64, delta: &Float, seed: Seed, cfg: &SpectralConfig) -> Result<InvPowerOutcome> {
    inv_power_impl(op, eps, delta, true, None, seed, cfg)
}

/// [`inv_power_gap_op`] on a symmetric integer matrix.
pub fn inv_power_gap(a: &SparseMatrix, eps: f64, delta: f64, seed: Seed, cfg: &SpectralConfig) -> Result<(Float, Vec<Fixed>)> {
    let delta = Float::from_f64(delta, 64)?;
    let out = inv_power_gap_op(&LinearOperator::base(a), eps, &delta, seed, cfg)?;
    Ok((out.value, out.vector))
}

/// `B = A + D` for a symmetric integer operator A and a dyadic diagonal D.
#[derive(Debug, Clone)]
pub struct Perturbed<'a> {
    base: LinearOperator<'a>,
    frac: u32,
    diag: Vec<BigInt>,
    gamma: f64,
    radius: Fixed,
}

impl<'a> Perturbed<'a> {
    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    /// Fractional bits F of the diagonal and of every bisection endpoint.
    pub fn frac_bits(&self) -> u32 {
        self.frac
    }

    /// Target separation γ.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// A power of two bounding every `|λᵢ(B)|`.
    pub fn radius(&self) -> &Fixed {
        &self.radius
    }

    pub fn base(&self) -> &LinearOperator<'a> {
        &self.base
    }

    pub fn diagonal(&self) -> Vec<Fixed> {
        self.diag.iter().map(|d| Fixed::new(d.clone(), self.frac)).collect()
    }

    /// `m` on the F-bit grid, or an error if it does not lie on it.
    fn grid(&self, m: &Fixed) -> Result<BigInt> {
        let g = m.rescale(self.frac);
        if &g != m {
            return Err(Error::invalid("shift is not on the perturbation grid"));
        }
        Ok(g.scaled().clone())
    }

    /// The integer operator `2^F·(B − mI)`.
    pub fn shifted(&self, m: &Fixed) -> Result<LinearOperator<'a>> {
        let mi = self.grid(m)?;
        self.base.clone().scale(BigInt::one() << self.frac as u64).diag_add(self.diag.iter().map(|d| d - &mi).collect())
    }

    /// Integer bound on the spectral radius of `2^F·(B − mI)`.
    fn shifted_radius(&self, m: &Fixed) -> BigInt {
        let r = self.radius.add(&m.abs()).rescale(self.frac);
        r.scaled().clone() + 1
    }
}

fn perturb_with<'a>(op: LinearOperator<'a>, offset: f64, eps: f64, seed: Seed) -> Result<Perturbed<'a>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("ε must lie in (0, 1)"));
    }
    if op.rows() != op.cols() || !op.is_symmetric() {
        return Err(Error::invalid("spectral routines need a symmetric operator"));
    }
    let n = op.rows().max(1);
    let u = op.max_abs_entry().max(BigInt::one());
    let log_gamma = 2.0 * eps.log2() - 4.0 * (n as f64).log2() - bigint_log2(&u);
    let frac = (-log_gamma).ceil().max(0.0) as u32 + 10;
    let floor_at = |x: f64| -> Result<BigInt> {
        let (num, den) = Float::from_f64(x, 64)?.to_ratio();
        Ok(Fixed::floor_ratio(&num, &den, frac)?.scaled().clone())
    };
    let hi = floor_at(eps / 2.0)?;
    let off = floor_at(offset)?;
    let mut rng = seed.rng();
    let diag: Vec<BigInt> = (0..op.rows()).map(|_| rng.gen_bigint_range(&BigInt::zero(), &(&hi + 1)) + &off).collect();
    // Every eigenvalue lies in [−nU − ε − offset, nU + ε + offset].
    let bound: BigInt = BigInt::from(n) * &u + 2 + BigInt::from(offset.ceil() as i64);
    let radius = Fixed::from_int(BigInt::one() << bound.bits(), 0);
    Ok(Perturbed { base: op, frac, diag, gamma: log_gamma.exp2(), radius })
}

/// Random diagonal perturbation with entries in `[0, ε/2]` on a grid of
/// `O(log 1/γ)` bits, `γ = ε²/(n⁴U)`.
pub fn perturb_spectrum<'a>(op: LinearOperator<'a>, eps: f64, seed: Seed) -> Result<Perturbed<'a>> {
    perturb_with(op, 0.0, eps, seed)
}

/// Per-run counters of the bisection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpectrumStats {
    /// `(nodes, internal nodes)` per depth of the last attempt.
    pub levels: Vec<(usize, usize)>,
    pub attempts: usize,
    pub shift_invert_calls: usize,
    pub solves: usize,
    pub full_runs: usize,
    pub early_yes: usize,
    pub certified_no: usize,
    /// Levels of any attempt with more than 2n internal nodes.
    pub level_violations: usize,
}

impl SpectrumStats {
    fn record(&mut self, out: &InvPowerOutcome) {
        self.shift_invert_calls += 1;
        self.solves += out.solves;
        match out.exit {
            Exit::Completed => self.full_runs += 1,
            Exit::BelowThreshold => self.early_yes += 1,
            Exit::Certified => self.certified_no += 1,
            Exit::Singular | Exit::Small => {}
        }
    }
}

fn shift_invert_run(b: &Perturbed<'_>, l: &Fixed, r: &Fixed, seed: Seed, cfg: &SpectralConfig) -> Result<(bool, InvPowerOutcome)> {
    if l >= r {
        return Err(Error::invalid("empty interval"));
    }
    let m = Fixed::midpoint(l, r);
    let op = b.shifted(&m)?;
    let half = r.sub(l).half().rescale(b.frac);
    let delta = Fixed::new(half.scaled().clone(), 0).to_float(64)?;
    let tau = delta.mul(&Float::from_ratio(&BigInt::from(6), &BigInt::from(5), 64)?)?;
    let radius = b.shifted_radius(&m);
    let hooks = cfg.certificates.then_some(Hooks { below: &tau, radius: &radius });
    let out = inv_power_impl(&op, 0.1, &delta, false, hooks, seed, cfg)?;
    Ok((out.value < tau, out))
}

/// YES (`true`) if B has an eigenvalue in `[ℓ − w/4, r + w/4]`, NO only if
/// it has none in `[ℓ, r]`, where `w = r − ℓ`.
///
/// The answer is that of `InvPower(B − mI, 0.1, w/2) < 1.2·w/2`. With
/// certificates on, the run stops as soon as that comparison is decided:
/// the estimate never increases, and `|λ_min|` is a lower bound for it.
pub fn shift_invert(b: &Perturbed<'_>, l: &Fixed, r: &Fixed, seed: Seed, cfg: &SpectralConfig) -> Result<bool> {
    Ok(shift_invert_run(b, l, r, seed, cfg)?.0)
}

/// Level-order bisection of `[−R, R]`; returns the left ends of the leaves.
fn compute_spectrum(b: &Perturbed<'_>, leaf: f64, seed: Seed, cfg: &SpectralConfig, stats: &mut SpectrumStats) -> Result<Vec<Fixed>> {
    let n = b.dim();
    let r0 = b.radius.rescale(b.frac);
    let mut level = vec![(r0.neg(), r0)];
    let mut leaves = Vec::new();
    let mut charge = meter::charge("spectrum.intervals", 0);
    stats.levels.clear();
    let mut depth = 0u64;
    while !level.is_empty() {
        charge.at_least(level.iter().map(|(l, r)| l.scaled().bits() + r.scaled().bits() + 128).sum());
        let mut next = Vec::new();
        let mut internal = 0;
        let outs = eval_level(b, &level, seed.index(depth), cfg)?;
        for ((l, r), (yes, out)) in level.iter().zip(outs) {
            stats.record(&out);
            if !yes {
                continue;
            }
            if r.sub(l).to_f64() < leaf {
                leaves.push(l.clone());
            } else {
                internal += 1;
                let m = Fixed::midpoint(l, r).rescale(b.frac);
                next.push((l.clone(), m.clone()));
                next.push((m, r.clone()));
            }
        }
        stats.levels.push((level.len(), internal));
        // Each eigenvalue lies in the widened intervals of at most two nodes
        // of a level; more means a shift-invert answer was wrong.
        if internal > 2 * n {
            stats.level_violations += 1;
            return Err(Error::ResultCountMismatch { expected: 2 * n, found: internal });
        }
        level = next;
        depth += 1;
    }
    Ok(leaves)
}

#[cfg(feature = "parallel")]
fn eval_level(b: &Perturbed<'_>, level: &[(Fixed, Fixed)], seed: Seed, cfg: &SpectralConfig) -> Result<Vec<(bool, InvPowerOutcome)>> {
    if cfg.solver.parallel {
        use rayon::prelude::*;
        let m = meter::current();
        return level
            .par_iter()
            .enumerate()
            .map(|(i, (l, r))| match &m {
                Some(m) => meter::with_meter(m, || shift_invert_run(b, l, r, seed.index(i as u64), cfg)),
                None => shift_invert_run(b, l, r, seed.index(i as u64), cfg),
            })
            .collect();
    }
    level.iter().enumerate().map(|(i, (l, r))| shift_invert_run(b, l, r, seed.index(i as u64), cfg)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_level(b: &Perturbed<'_>, level: &[(Fixed, Fixed)], seed: Seed, cfg: &SpectralConfig) -> Result<Vec<(bool, InvPowerOutcome)>> {
    level.iter().enumerate().map(|(i, (l, r))| shift_invert_run(b, l, r, seed.index(i as u64), cfg)).collect()
}

/// Drops every value with another value in `(λ − width, λ)`.
fn merge(sorted: Vec<Fixed>, width: &Fixed) -> Vec<Fixed> {
    let mut out: Vec<Fixed> = Vec::with_capacity(sorted.len());
    let mut prev: Option<Fixed> = None;
    for x in sorted {
        let keep = prev.as_ref().is_none_or(|p| x.sub(p) >= *width);
        prev = Some(x.clone());
        if keep {
            out.push(x);
        }
    }
    out
}

/// Eigenvalues of B to within `leaf·1.25`, one per eigenvalue, or a count
/// mismatch.
fn bisect(b: &Perturbed<'_>, leaf: f64, seed: Seed, cfg: &SpectralConfig, stats: &mut SpectrumStats) -> Result<Vec<Fixed>> {
    let leaves = compute_spectrum(b, leaf, seed, cfg, stats)?;
    let width = Fixed::from_f64(b.gamma / 2.0, b.frac)?;
    let merged = merge(leaves, &width);
    if merged.len() != b.dim() {
        return Err(Error::ResultCountMismatch { expected: b.dim(), found: merged.len() });
    }
    Ok(merged)
}

/// Retries `body` with a fresh perturbation on a count mismatch.
fn with_perturbation<'a, T>(
    op: &LinearOperator<'a>,
    offset: f64,
    eps: f64,
    seed: Seed,
    cfg: &SpectralConfig,
    stats: &mut SpectrumStats,
    mut body: impl FnMut(&Perturbed<'a>, Seed, &mut SpectrumStats) -> Result<T>,
) -> Result<T> {
    let mut last = None;
    for attempt in 0..=cfg.retries as u64 {
        stats.attempts += 1;
        let b = perturb_with(op.clone(), offset, eps, seed.derive("perturb").index(attempt))?;
        match body(&b, seed.derive("tree").index(attempt), stats) {
            Err(e @ Error::ResultCountMismatch { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap())
}

/// Sorted approximations with `|λᵢ − λ̃ᵢ| ≤ ε`, plus the run counters.
pub fn spectrum_op(op: &LinearOperator<'_>, eps: f64, seed: Seed, cfg: &SpectralConfig) -> Result<(Vec<Fixed>, SpectrumStats)> {
    let mut stats = SpectrumStats::default();
    if op.rows() == 0 {
        return Ok((Vec::new(), stats));
    }
    let values = with_perturbation(op, 0.0, eps / 2.0, seed, cfg, &mut stats, |b, s, st| bisect(b, b.gamma / 8.0, s, cfg, st))?;
    Ok((values, stats))
}

/// Sorted eigenvalue approximations of a symmetric integer matrix.
pub fn spectrum(a: &SparseMatrix, eps: f64, seed: Seed, cfg: &SpectralConfig) -> Result<Vec<Fixed>> {
    Ok(spectrum_op(&LinearOperator::base(a), eps, seed, cfg)?.0)
}

fn output_frac(n: usize, eps: f64) -> u32 {
    ((64.0 * n.max(1) as f64 / eps).log2().ceil() as u32) + 16
}

fn eigen_stream(
    op: &LinearOperator<'_>,
    offset: f64,
    eps: f64,
    seed: Seed,
    cfg: &SpectralConfig,
    sink: &mut dyn FnMut(EigenPair) -> Result<()>,
) -> Result<SpectrumStats> {
    let n = op.rows();
    let mut stats = SpectrumStats::default();
    if n == 0 {
        return Ok(stats);
    }
    let u = op.max_abs_entry().max(BigInt::one());
    let frac_out = output_frac(n, eps);
    let eps0 = {
        let r = eps / (60.0 * n as f64 * u.to_string().parse::<f64>().unwrap_or(f64::MAX));
        r * r
    };
    with_perturbation(op, offset, eps / 2.0, seed, cfg, &mut stats, |b, s, st| {
        // Eigenvalues of B to γ/10: leaves narrower than γ/16.
        let values = bisect(b, b.gamma / 16.0, s, cfg, st)?;
        let shift = Fixed::from_f64(b.gamma / 5.0, b.frac)?;
        let delta = Float::from_f64(b.gamma / 10.0, 64)?.mul_pow2(b.frac as i64)?;
        for (i, value) in values.into_iter().enumerate() {
            let op_i = b.shifted(&value.add(&shift))?;
            let out = inv_power_gap_op(&op_i, eps0, &delta, s.derive("vector").index(i as u64), cfg)?;
            st.solves += out.solves;
            let vector = out.vector.iter().map(|x| x.rescale(frac_out)).collect();
            sink(EigenPair { value, vector })?;
        }
        Ok(())
    })?;
    Ok(stats)
}

/// Eigenpairs in ascending order, each handed to `sink` as soon as it is
/// computed: `|λᵢ − λ̃ᵢ| ≤ ε`, `‖vᵢ‖² ∈ [1 ± ε]`, `‖Avᵢ − λ̃ᵢvᵢ‖ ≤ ε` and
/// `|⟨vᵢ, vⱼ⟩| ≤ ε`.
pub fn eigendecompose_op(
    op: &LinearOperator<'_>,
    eps: f64,
    seed: Seed,
    cfg: &SpectralConfig,
    sink: &mut dyn FnMut(EigenPair) -> Result<()>,
) -> Result<SpectrumStats> {
    eigen_stream(op, 0.0, eps, seed, cfg, sink)
}

/// [`eigendecompose_op`] on a symmetric integer matrix.
pub fn eigendecompose(a: &SparseMatrix, eps: f64, seed: Seed, cfg: &SpectralConfig, sink: &mut dyn FnMut(EigenPair) -> Result<()>) -> Result<()> {
    eigendecompose_op(&LinearOperator::base(a), eps, seed, cfg, sink).map(|_| ())
}

/// Singular value decomposition of an n×m matrix, n ≥ m, from the
/// eigenpairs of `AAᵀ + ε₀I` with `ε₀ = ε/(60n²·max{1, U})`. Columns
/// arrive in ascending order of σ; only the last m carry `σᵢ` and `vᵢ`.
pub fn svd(a: &SparseMatrix, eps: f64, seed: Seed, cfg: &SpectralConfig, sink: &mut dyn FnMut(SvdColumn) -> Result<()>) -> Result<()> {
    let (n, m) = (a.rows(), a.cols());
    if n < m {
        return Err(Error::invalid("svd needs at least as many rows as columns"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("ε must lie in (0, 1)"));
    }
    let u = a.max_abs().max(1) as f64;
    let eps0 = eps / (60.0 * (n * n) as f64 * u);
    let frac_out = output_frac(n, eps0 / 10.0);
    let op = LinearOperator::gram_t(a, BigInt::zero());
    let mut index = 0;
    let mut forward = |pair: EigenPair| -> Result<()> {
        index += 1;
        if index <= n - m {
            return sink(SvdColumn { u: pair.vector, sigma: None, v: None });
        }
        let prec = frac_out + 32;
        let sigma = if pair.value.is_negative() { Float::zero(prec) } else { pair.value.to_float(prec)?.sqrt()? };
        // v = Aᵀu / σ, streamed over the entries of A.
        let mut atu = vec![Fixed::zero(frac_out); m];
        let _charge = meter::charge("svd.column", m as u64 * (frac_out as u64 + 64));
        for &(i, j, x) in a.entries() {
            atu[j] = atu[j].add(&pair.vector[i].mul(&Fixed::from_int(x, 0)));
        }
        let v = if sigma.is_zero() {
            atu.iter().map(|_| Fixed::zero(frac_out)).collect()
        } else {
            let inv = sigma.recip()?;
            atu.iter().map(|x| Ok(x.to_float(prec)?.mul(&inv)?.to_fixed(frac_out))).collect::<Result<_>>()?
        };
        sink(SvdColumn { u: pair.vector, sigma: Some(sigma.to_fixed(frac_out)), v: Some(v) })
    };
    eigen_stream(&op, eps0, eps0 / 10.0, seed, cfg, &mut forward).map(|_| ())
}
