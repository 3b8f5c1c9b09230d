//! Acceptance run: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Set `LOSPACE_ACCEPTANCE=1,4,9` to run a subset.

#[path = "../../core/tests/props/mod.rs"]
mod props;

use lospace::linop::{LinearOperator, SparseMatrix};
use lospace::oracle::{self, Rational};
use lospace::rational_solver::{determinant, lin_solve};
use lospace::spectral::spectrum_op;
use lospace::wiedemann::{linsolve_zp, minimal_polynomial};
use lospace::{eigendecompose, svd, BigInt, BigUint, EigenPair, Fixed, Float, Seed, SolveOutcome, SolverConfig, SpectralConfig, SvdColumn};
use lospace_cli::bench::{bench_run, BENCH_U};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use props::{dense_int, random_matrix, random_symmetric};
use rand::Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64, detail: String) -> Verdict {
    if elapsed.as_secs() > limit_s {
        Err(format!("{detail}; runtime {:.1}s over the {limit_s}s budget", elapsed.as_secs_f64()))
    } else {
        Ok(detail)
    }
}

fn dyadic(x: &Float) -> Rational {
    let e = x.exponent();
    if e >= 0 {
        Rational::from_integer(x.mantissa() << e as u64)
    } else {
        Rational::new(x.mantissa().clone(), BigInt::from(1) << (-e) as u64)
    }
}

/// `x̂ ≈_ε x` entry-wise: same sign, `|ln(x̂/x)| ≤ ε`, zero only for zero.
fn check_multiplicative(got: &[Float], want: &[Rational], eps: f64) -> Result<f64, String> {
    ensure(got.len() == want.len(), || "length mismatch".into())?;
    let mut worst = 0.0f64;
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if w.is_zero() || g.is_zero() {
            ensure(w.is_zero() && g.is_zero(), || format!("entry {i}: zero pattern differs ({g} vs {w})"))?;
            continue;
        }
        let q = dyadic(g) / w;
        ensure(q.is_positive(), || format!("entry {i}: sign differs"))?;
        let l = q.to_f64().unwrap().ln().abs();
        worst = worst.max(l);
        ensure(l <= eps, || format!("entry {i}: |ln ratio| = {l:e} > {eps:e}"))?;
    }
    Ok(worst)
}

fn invertible(n: usize, u: i64, density: f64, seed: Seed) -> SparseMatrix {
    for k in 0.. {
        let a = random_matrix(n, n, u, density, seed.index(k));
        if !oracle::oracle_det_bareiss(&dense_int(&a)).is_zero() {
            return a;
        }
    }
    unreachable!()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let root = Seed::new(1001);
    for k in 0..200u64 {
        let mut rng = root.index(k).rng();
        let n = rng.gen_range(1..=40);
        let a = random_matrix(n, n, 50, 1.0, root.index(k).derive("a"));
        let got = determinant(&a, lospace::primes::DEFAULT_C, root.index(k).derive("det")).map_err(|e| e.to_string())?;
        let want = oracle::oracle_det_bareiss(&dense_int(&a));
        ensure(got == want, || format!("instance {k} (n = {n}): {got} ≠ {want}"))?;
    }
    within(start.elapsed(), 300, "200/200 determinants exact".into())
}

fn solve_case(a: &SparseMatrix, b: &[BigInt], eps: f64, seed: Seed) -> Result<f64, String> {
    let want = oracle::oracle_solve_exact(&dense_int(a), b).ok_or("oracle says singular")?;
    match lin_solve(a, b, eps, seed, &SolverConfig::default()).map_err(|e| e.to_string())? {
        SolveOutcome::Singular => Err("solver says singular".into()),
        SolveOutcome::Solution(x) => check_multiplicative(&x, &want, eps),
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let root = Seed::new(1002);
    let (mut worst, mut zero_cases) = (0.0f64, 0);
    for k in 0..100u64 {
        let s = root.index(k);
        let mut rng = s.rng();
        let n = rng.gen_range(2..=24);
        let density = if k % 2 == 0 { 1.0 } else { 0.3 };
        let a = invertible(n, 50, density, s.derive("a"));
        let b: Vec<BigInt> = if k % 4 == 3 {
            // Constructed solution with zero entries.
            zero_cases += 1;
            let x: Vec<BigInt> = (0..n).map(|i| BigInt::from(if i % 3 == 0 { 0 } else { rng.gen_range(-50..=50) })).collect();
            LinearOperator::base(&a).apply_int(&x).unwrap()
        } else {
            (0..n).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect()
        };
        let w = solve_case(&a, &b, 1e-6, s.derive("solve")).map_err(|e| format!("instance {k} (n = {n}): {e}"))?;
        worst = worst.max(w);
    }
    within(start.elapsed(), 300, format!("100/100 systems ({zero_cases} with constructed zeros), worst |ln ratio| {worst:.2e}"))
}

fn criterion_3() -> Verdict {
    let root = Seed::new(1003);
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let s = root.index(k);
        let a = invertible(8, 10, 1.0, s.derive("a"));
        let mut rng = s.derive("b").rng();
        let b: Vec<BigInt> = (0..8).map(|_| BigInt::from(rng.gen_range(-100_000_000i64..=100_000_000))).collect();
        worst = worst.max(solve_case(&a, &b, 1e-6, s.derive("solve")).map_err(|e| format!("instance {k}: {e}"))?);
    }
    Ok(format!("20/20 systems with |b| ≤ 10⁸, worst |ln ratio| {worst:.2e}"))
}

fn criterion_4() -> Verdict {
    let root = Seed::new(1004);
    for k in 0..50u64 {
        let s = root.index(k);
        let mut rng = s.rng();
        let n = rng.gen_range(2..=20);
        let a = random_matrix(n, n, 50, 0.7, s.derive("a"));
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let entries: Vec<_> = if k % 2 == 0 || i == j {
            a.entries().iter().filter(|e| e.0 != i).cloned().collect()
        } else {
            let mut e: Vec<_> = a.entries().iter().filter(|e| e.0 != j).cloned().collect();
            e.extend(a.row(i).iter().map(|&(_, c, v)| (j, c, v)));
            e
        };
        let a = SparseMatrix::new(n, n, entries).unwrap();
        let b: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect();
        let out = lin_solve(&a, &b, 1e-6, s.derive("solve"), &SolverConfig::default()).map_err(|e| e.to_string())?;
        ensure(out == SolveOutcome::Singular, || format!("instance {k} (n = {n}) not reported singular"))?;
    }
    Ok("50/50 singular systems reported SINGULAR".into())
}

fn criterion_5() -> Verdict {
    let root = Seed::new(1005);
    let p = BigUint::from(2_147_483_647u64);
    let pi = BigInt::from(p.clone());
    let mut solved = 0;
    for k in 0..100u64 {
        let s = root.index(k);
        let mut rng = s.rng();
        let n = rng.gen_range(1..=12);
        let a = random_matrix(n, n, 50, 0.8, s.derive("a"));
        let b: Vec<BigUint> = (0..n).map(|_| BigUint::from(rng.gen_range(0..2_147_483_647u64))).collect();
        let op = LinearOperator::base(&a);
        if let Ok(x) = linsolve_zp(&op, &b, &p, 1e-6, &mut s.derive("zp").rng()) {
            let xi: Vec<BigInt> = x.iter().map(|v| BigInt::from(v.clone())).collect();
            let ax = op.apply_int(&xi).unwrap();
            for (l, r) in ax.iter().zip(&b) {
                ensure(l.mod_floor(&pi) == BigInt::from(r.clone()), || format!("instance {k}: Ax ≢ b"))?;
            }
            solved += 1;
        }
    }
    let mut hits = 0;
    for k in 0..200u64 {
        let s = root.derive("minpoly").index(k);
        let a = random_matrix(8, 8, 50, 1.0, s.derive("a"));
        let g = minimal_polynomial(&LinearOperator::base(&a), &p, 1, &mut s.derive("w").rng()).map_err(|e| e.to_string())?;
        if g == oracle::oracle_matrix_min_poly(&dense_int(&a), &p) {
            hits += 1;
        }
    }
    ensure(solved > 0, || "no system solved".into())?;
    ensure(2 * hits >= 200, || format!("un-boosted minimal polynomial correct in {hits}/200 < 50%"))?;
    Ok(format!("{solved}/{solved} mod-p solutions verified; minimal polynomial exact in {hits}/200 single runs"))
}

fn symmetric_family(k: u64, seed: Seed) -> SparseMatrix {
    let n = seed.index(k).rng().gen_range(1..=10);
    random_symmetric(n, 10, seed.index(k).derive("a"))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let root = Seed::new(1006);
    let eps = 0.05;
    let (mut worst, mut retries) = (0.0f64, 0);
    for k in 0..50u64 {
        let a = symmetric_family(k, root);
        let n = a.rows();
        let (got, stats) = spectrum_op(&LinearOperator::base(&a), eps, root.index(k).derive("spectrum"), &SpectralConfig::default())
            .map_err(|e| format!("instance {k} (n = {n}): {e}"))?;
        let want = oracle::oracle_eigs_bisect(&dense_int(&a), 1e-4);
        ensure(got.len() == n, || format!("instance {k}: {} values for n = {n}", got.len()))?;
        ensure(got.windows(2).all(|w| w[0] <= w[1]), || format!("instance {k}: output not sorted"))?;
        ensure(stats.attempts <= 2, || format!("instance {k}: {} attempts", stats.attempts))?;
        retries += stats.attempts - 1;
        for (g, w) in got.iter().zip(&want) {
            let d = (g.to_f64() - w).abs();
            worst = worst.max(d);
            ensure(d <= eps, || format!("instance {k}: |{} − {w}| > ε", g.to_f64()))?;
        }
    }
    within(start.elapsed(), 600, format!("50/50 spectra within ε, worst error {worst:.2e}, {retries} retries"))
}

fn f64_vec(v: &[Fixed]) -> Vec<f64> {
    v.iter().map(Fixed::to_f64).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense_f64(a: &SparseMatrix) -> Vec<Vec<f64>> {
    a.to_dense().iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

fn check_eigenpairs(a: &SparseMatrix, pairs: &[EigenPair], eps: f64) -> Result<f64, String> {
    ensure(pairs.len() == a.rows(), || format!("{} pairs for n = {}", pairs.len(), a.rows()))?;
    let d = dense_f64(a);
    let vs: Vec<Vec<f64>> = pairs.iter().map(|p| f64_vec(&p.vector)).collect();
    let mut worst = 0.0f64;
    for (i, (p, v)) in pairs.iter().zip(&vs).enumerate() {
        let lam = p.value.to_f64();
        let av = oracle::matvec_f64(&d, v);
        let res = av.iter().zip(v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
        let norm = dot(v, v);
        worst = worst.max(res).max((norm - 1.0).abs());
        ensure(res <= eps, || format!("pair {i}: residual {res:e}"))?;
        ensure((norm - 1.0).abs() <= eps, || format!("pair {i}: ‖v‖² = {norm}"))?;
        for (j, w) in vs.iter().enumerate().skip(i + 1) {
            let ip = dot(v, w).abs();
            worst = worst.max(ip);
            ensure(ip <= eps, || format!("pairs {i}, {j}: |⟨v, w⟩| = {ip:e}"))?;
        }
    }
    Ok(worst)
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..cols).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}

fn minus(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// The four operator-norm errors of an SVD, from the streamed columns.
fn svd_errors(a: &SparseMatrix, cols: &[SvdColumn]) -> Result<[f64; 4], String> {
    let (n, m) = (a.rows(), a.cols());
    ensure(cols.len() == n, || format!("{} columns for n = {n}", cols.len()))?;
    // Paired columns first so that Σ is rectangular diagonal.
    let paired: Vec<&SvdColumn> = cols.iter().filter(|c| c.sigma.is_some()).collect();
    let single: Vec<&SvdColumn> = cols.iter().filter(|c| c.sigma.is_none()).collect();
    ensure(paired.len() == m, || format!("{} singular values for m = {m}", paired.len()))?;
    let order: Vec<&SvdColumn> = paired.iter().chain(&single).cloned().collect();
    let u_cols: Vec<Vec<f64>> = order.iter().map(|c| f64_vec(&c.u)).collect();
    let v_cols: Vec<Vec<f64>> = paired.iter().map(|c| f64_vec(c.v.as_ref().unwrap())).collect();
    let uu = transpose(&u_cols); // n × n, columns uᵢ
    let vv = transpose(&v_cols); // m × m
    let mut sigma = vec![vec![0.0; m]; n];
    for (i, c) in paired.iter().enumerate() {
        sigma[i][i] = c.sigma.as_ref().unwrap().to_f64();
    }
    let d = dense_f64(a);
    let norm = oracle::spectral_norm_f64;
    Ok([
        norm(&minus(&matmul(&u_cols, &uu), &identity(n))),
        norm(&minus(&matmul(&v_cols, &vv), &identity(m))),
        norm(&minus(&matmul(&d, &vv), &matmul(&uu, &sigma))),
        norm(&minus(&matmul(&transpose(&d), &uu), &matmul(&vv, &transpose(&sigma)))),
    ])
}

const EIGEN_INSTANCES: u64 = 50;
const SVD_INSTANCES: u64 = 20;

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let root = Seed::new(1007);
    let eps = 0.05;
    let cfg = SpectralConfig::default();
    let mut worst = 0.0f64;
    for k in 0..EIGEN_INSTANCES {
        let a = symmetric_family(k, root);
        let mut pairs = Vec::new();
        eigendecompose(&a, eps, root.index(k).derive("eig"), &cfg, &mut |p| {
            pairs.push(p);
            Ok(())
        })
        .map_err(|e| format!("eigendecompose instance {k}: {e}"))?;
        worst = worst.max(check_eigenpairs(&a, &pairs, eps).map_err(|e| format!("eigendecompose instance {k}: {e}"))?);
    }
    let mut worst_svd = 0.0f64;
    for k in 0..SVD_INSTANCES {
        let s = root.derive("svd").index(k);
        let mut rng = s.rng();
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=n);
        let a = random_matrix(n, m, 10, 1.0, s.derive("a"));
        let mut cols = Vec::new();
        svd(&a, eps, s.derive("run"), &cfg, &mut |c| {
            cols.push(c);
            Ok(())
        })
        .map_err(|e| format!("svd instance {k}: {e}"))?;
        let errs = svd_errors(&a, &cols).map_err(|e| format!("svd instance {k}: {e}"))?;
        for (i, e) in errs.iter().enumerate() {
            worst_svd = worst_svd.max(*e);
            ensure(*e <= eps, || format!("svd instance {k} ({n}×{m}): inequality {} gives {e:e}", i + 1))?;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(format!(
        "{EIGEN_INSTANCES} eigendecompositions (worst {worst:.2e}) and {SVD_INSTANCES} SVDs (worst {worst_svd:.2e}) within ε, {elapsed:.0}s"
    ))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let rows = bench_run(&[64, 128, 256], 1e-6, Seed::new(0), &SolverConfig::default(), |_| Ok(())).map_err(|e| format!("{e:?}"))?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let last = rows.last().unwrap();
    let n = last.n as f64;
    let dense = 8.0 * n * n * (n * BENCH_U as f64).log2();
    let share = last.peak_bits as f64 / dense;
    let detail = format!(
        "ratios {:?}, spread {spread:.2}×, peak at n = 256 is {:.2}% of the dense-inverse footprint",
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
        share * 100.0
    );
    ensure(spread < 2.5, || format!("{detail}: spread too large"))?;
    ensure(share < 0.05, || format!("{detail}: peak too large"))?;
    within(start.elapsed(), 900, detail)
}

fn criterion_9() -> Verdict {
    let root = Seed::new(1009);
    let mut multi = 0;
    for k in 0..20u64 {
        let s = root.index(k);
        let mut rng = s.rng();
        let n = rng.gen_range(2..=16);
        let a = invertible(n, 50, 0.5, s.derive("a"));
        let b: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect();
        let eps = [1e-6, 1e-9, 1e-12, 1e-15][k as usize % 4];
        let u = BigInt::from(a.max_abs().max(1));
        if lospace::rational_solver::block_count(n, &u, eps) > 1 {
            multi += 1;
        }
        let render = |cfg: SolverConfig| -> Result<String, String> {
            let out = lin_solve(&a, &b, eps, s.derive("solve"), &cfg).map_err(|e| e.to_string())?;
            Ok(out.solution().ok_or("singular")?.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"))
        };
        let one = render(SolverConfig { blocks: Some(1), ..SolverConfig::default() })?;
        let default = render(SolverConfig::default())?;
        ensure(one.as_bytes() == default.as_bytes(), || format!("instance {k}: outputs differ"))?;
    }
    Ok(format!("20/20 byte-identical ({multi} with default K > 1)"))
}

fn criterion_10() -> Verdict {
    let suites: [(&str, fn(u32) -> props::Outcome); 6] = [
        ("float error composition", props::float_error_composition),
        ("CRT round-trip", props::crt_round_trip),
        ("residual bound", props::residual_bounded),
        ("digit reconstruction", props::digit_reconstruction),
        ("shift-invert soundness", props::shift_invert_sound),
        ("per-level node count", props::level_counts),
    ];
    let mut done = Vec::new();
    for (name, suite) in suites {
        let t = Instant::now();
        suite(1000).map_err(|e| format!("{name}: {e}"))?;
        done.push(format!("{name} ({:.0}s)", t.elapsed().as_secs_f64()));
    }
    Ok(format!("1000 cases each: {}", done.join(", ")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "exact determinant", criterion_1),
        (2, "rational solve", criterion_2),
        (3, "large right-hand side", criterion_3),
        (4, "singularity", criterion_4),
        (5, "finite-field layer", criterion_5),
        (6, "spectrum", criterion_6),
        (7, "eigendecompose and SVD", criterion_7),
        (8, "space scaling", criterion_8),
        (9, "block equivalence", criterion_9),
        (10, "property suites", criterion_10),
    ];
    let only: Option<Vec<u32>> = std::env::var("LOSPACE_ACCEPTANCE").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id:>2} ({name}): PASS [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} ({name}): FAIL [{secs:.1}s] {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
