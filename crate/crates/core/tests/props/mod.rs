//! Property suites shared by the core test target (modest case counts) and
//! the acceptance run (10³ cases each). Every property takes its case count
//! and returns the first failure as text.

#![allow(dead_code)]

use lospace::linop::{LinearOperator, SparseMatrix};
use lospace::oracle::{self, Rational};
use lospace::primes::{self, crt_combine};
use lospace::rational_solver::{lift_exact, lin_solve};
use lospace::spectral::{perturb_spectrum, shift_invert, spectrum_op};
use lospace::wiedemann::{berlekamp_massey, minimal_polynomial, FpPoly};
use lospace::{BigInt, BigUint, Fixed, Float, Seed, SolverConfig, SpectralConfig};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::Rng as _;

pub type Outcome = Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    let config = Config { cases, failure_persistence: None, max_shrink_iters: 64, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn random_matrix(n: usize, m: usize, u: i64, density: f64, seed: Seed) -> SparseMatrix {
    let mut rng = seed.rng();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if rng.gen::<f64>() < density {
                let v = rng.gen_range(-u..=u);
                if v != 0 {
                    entries.push((i, j, v));
                }
            }
        }
    }
    SparseMatrix::new(n, m, entries).unwrap()
}

pub fn random_symmetric(n: usize, u: i64, seed: Seed) -> SparseMatrix {
    let mut rng = seed.rng();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-u..=u);
            if v != 0 {
                entries.push((i, j, v));
                if i != j {
                    entries.push((j, i, v));
                }
            }
        }
    }
    SparseMatrix::new(n, n, entries).unwrap()
}

pub fn dense_int(a: &SparseMatrix) -> Vec<Vec<BigInt>> {
    oracle::dense_from_i64(&a.to_dense())
}

fn random_vector(n: usize, u: i64, seed: Seed) -> Vec<BigInt> {
    let mut rng = seed.rng();
    (0..n).map(|_| BigInt::from(rng.gen_range(-u..=u))).collect()
}

// ---- numeric ----

/// Exact dyadic value `m·2^e`.
#[derive(Clone, Debug)]
struct Dyadic(BigInt, i64);

impl Dyadic {
    fn add(&self, o: &Dyadic) -> Dyadic {
        let e = self.1.min(o.1);
        Dyadic((&self.0 << (self.1 - e) as u64) + (&o.0 << (o.1 - e) as u64), e)
    }

    fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic(&self.0 * &o.0, self.1 + o.1)
    }

    fn ratio(&self) -> Rational {
        dyadic_ratio(&self.0, self.1)
    }
}

fn dyadic_ratio(m: &BigInt, e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(m << e as u64)
    } else {
        Rational::new(m.clone(), BigInt::one() << (-e) as u64)
    }
}

/// Chains of same-sign additions and multiplications: the tracked bound is
/// at most `k·2^-L` and dominates the true error `|ln(value/exact)|`.
pub fn float_error_composition(cases: u32) -> Outcome {
    let op = (any::<bool>(), 128u64..256, -8i64..=-7);
    let strat = (12u32..=64, 128u64..256, proptest::collection::vec(op, 1..=1000));
    run(cases, strat, |(prec, m0, ops)| {
        let mut acc = Float::from_parts(BigInt::from(m0), -7, prec).unwrap();
        let mut exact = Dyadic(BigInt::from(m0), -7);
        for &(is_add, m, e) in &ops {
            let x = Float::from_parts(BigInt::from(m), e, prec).unwrap();
            let xd = Dyadic(BigInt::from(m), e);
            if is_add {
                acc = acc.add_same_sign(&x).unwrap();
                exact = exact.add(&xd);
            } else {
                acc = acc.mul(&x).unwrap();
                exact = exact.mul(&xd);
            }
        }
        let k = ops.len() as f64;
        let unit = (-(prec as f64)).exp2();
        prop_assert!(acc.merr() <= k * unit * (1.0 + 1e-12), "merr {} > k·2^-L {}", acc.merr(), k * unit);
        // |ln(v/x)| ≤ merr, checked through 1 + m + m²/2 ≤ e^m.
        let v = dyadic_ratio(acc.mantissa(), acc.exponent());
        let x = exact.ratio();
        let m = Rational::from_float(acc.merr()).unwrap();
        let grow = Rational::one() + &m + &m * &m / Rational::from_integer(BigInt::from(2));
        prop_assert!(v <= &x * &grow && x <= &v * &grow, "value outside tracked bound");
        Ok(())
    })
}

fn arb_float() -> impl Strategy<Value = (i64, i64, u32)> {
    (-(1i64 << 40)..(1i64 << 40), -80i64..80, 8u32..=64)
}

/// Converting a float's exact ratio back at the same precision is the identity.
pub fn float_round_trip(cases: u32) -> Outcome {
    run(cases, arb_float(), |(m, e, prec)| {
        let f = Float::from_parts(BigInt::from(m), e, prec).unwrap();
        let (num, den) = f.to_ratio();
        prop_assert_eq!(Float::from_ratio(&num, &den, prec).unwrap(), f);
        Ok(())
    })
}

/// Float ordering agrees with exact rational ordering.
pub fn float_cmp_exact(cases: u32) -> Outcome {
    run(cases, (arb_float(), arb_float()), |((m1, e1, p1), (m2, e2, p2))| {
        let a = Float::from_parts(BigInt::from(m1), e1, p1).unwrap();
        let b = Float::from_parts(BigInt::from(m2), e2, p2).unwrap();
        let ra = dyadic_ratio(a.mantissa(), a.exponent());
        let rb = dyadic_ratio(b.mantissa(), b.exponent());
        prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
        Ok(())
    })
}

// ---- primes ----

/// CRT reconstruction reproduces every residue and lies in `[0, P)`.
pub fn crt_round_trip(cases: u32) -> Outcome {
    run(cases, (1usize..=8, 16u64..(1 << 40), any::<u64>()), |(k, lo, s)| {
        let mut rng = Seed::new(s).rng();
        let ps = primes::sample_primes(k, &BigUint::from(lo), &mut rng).unwrap();
        let pairs: Vec<(BigInt, BigInt)> = ps
            .iter()
            .map(|p| {
                let p = BigInt::from(p.clone());
                let r = BigInt::from(rng.gen::<u64>()).mod_floor(&p);
                (p, r)
            })
            .collect();
        let (modulus, r) = crt_combine(&pairs).unwrap();
        let product: BigInt = pairs.iter().map(|(p, _)| p.clone()).product();
        prop_assert_eq!(&modulus, &product);
        prop_assert!(!r.is_negative() && r < modulus);
        for (p, ri) in &pairs {
            prop_assert_eq!(&r.mod_floor(p), ri);
        }
        Ok(())
    })
}

/// Sampled primes are distinct, in range and pass 40 Miller–Rabin rounds.
pub fn sampled_primes_valid(cases: u32) -> Outcome {
    run(cases, (1usize..=6, 16u64..(1 << 30), any::<u64>()), |(k, lo, s)| {
        let mut rng = Seed::new(s).rng();
        let n = BigUint::from(lo);
        let ps = primes::sample_primes(k, &n, &mut rng).unwrap();
        let set: std::collections::BTreeSet<_> = ps.iter().collect();
        prop_assert_eq!(set.len(), k);
        for p in &ps {
            prop_assert!(*p >= n && *p <= &n * &n);
            prop_assert!(primes::is_prime(p, &mut rng));
        }
        Ok(())
    })
}

// ---- linop ----

/// `apply_int` reduced mod p equals `apply_mod`, for plain and composed operators.
pub fn apply_mod_consistent(cases: u32) -> Outcome {
    run(cases, (1usize..=8, 1usize..=8, any::<u64>(), prop::sample::select(vec![17u64, 65537, 4_294_967_311, (1 << 61) - 1])), |(n, m, s, p)| {
        let seed = Seed::new(s);
        let a = random_matrix(n, m, 50, 0.6, seed.derive("a"));
        let p = BigUint::from(p);
        let pi = BigInt::from(p.clone());
        let v = random_vector(m, 1000, seed.derive("v"));
        let vm: Vec<BigUint> = v.iter().map(|x| x.mod_floor(&pi).to_biguint().unwrap()).collect();
        let op = LinearOperator::base(&a).scale(BigInt::from(-3));
        let exact = op.apply_int(&v).unwrap();
        let modular = op.apply_mod(&vm, &p).unwrap();
        for (x, y) in exact.iter().zip(&modular) {
            prop_assert_eq!(x.mod_floor(&pi).to_biguint().unwrap(), y.clone());
        }
        Ok(())
    })
}

fn dense_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|k| &r[k] * &b[k][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Composed operators agree with their dense materializations.
pub fn composition_matches_dense(cases: u32) -> Outcome {
    run(cases, (1usize..=8, 1usize..=8, any::<u64>()), |(n, m, s)| {
        let seed = Seed::new(s);
        let a = random_matrix(n, m, 9, 0.5, seed.derive("a"));
        let sq = random_matrix(n, n, 9, 0.5, seed.derive("sq"));
        let da = dense_int(&a);
        let dsq = dense_int(&sq);
        let d = random_vector(n, 9, seed.derive("d"));
        let mut rng = seed.derive("k").rng();
        let (sh, k) = (BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(-9..=9)));
        // k·(diag(d)·A − sI) + diag(d)
        let op = LinearOperator::base(&sq).diag_scale(d.clone()).unwrap().shift(sh.clone()).unwrap().scale(k.clone()).diag_add(d.clone()).unwrap();
        let mut want = dsq.clone();
        for i in 0..n {
            for j in 0..n {
                want[i][j] = &d[i] * &want[i][j];
            }
            want[i][i] -= &sh;
        }
        for (i, row) in want.iter_mut().enumerate() {
            for x in row.iter_mut() {
                *x *= &k;
            }
            row[i] += &d[i];
        }
        prop_assert_eq!(op.to_dense(), want);
        prop_assert_eq!(LinearOperator::gram(&a).to_dense(), dense_mul(&transpose(&da), &da));
        let c = BigInt::from(rng.gen_range(0..=5));
        let mut aat = dense_mul(&da, &transpose(&da));
        for (i, row) in aat.iter_mut().enumerate() {
            row[i] += &c;
        }
        prop_assert_eq!(LinearOperator::gram_t(&a, c).to_dense(), aat);
        Ok(())
    })
}

// ---- wiedemann ----

fn poly_rem(a: &[BigUint], b: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    let mut r: Vec<BigInt> = a.iter().map(|x| BigInt::from(x.clone())).collect();
    let pi = BigInt::from(p.clone());
    let lead = BigInt::from(b.last().unwrap().clone());
    let inv = lead.modpow(&(&pi - 2), &pi);
    while r.len() >= b.len() {
        let c = (r.last().unwrap() * &inv).mod_floor(&pi);
        let off = r.len() - b.len();
        for (i, bi) in b.iter().enumerate() {
            r[off + i] = (&r[off + i] - &c * BigInt::from(bi.clone())).mod_floor(&pi);
        }
        r.pop();
    }
    r.into_iter().map(|x| x.to_biguint().unwrap()).collect()
}

/// The Berlekamp–Massey output annihilates the sequence and no monic
/// polynomial of smaller degree does (exhaustive for small p and degree).
pub fn bm_minimal(cases: u32) -> Outcome {
    run(cases, (prop::sample::select(vec![2u64, 3, 5, 7]), proptest::collection::vec(0u64..7, 2..=8)), |(p, seq)| {
        let pb = BigUint::from(p);
        let seq: Vec<BigUint> = seq.iter().map(|&x| BigUint::from(x % p)).collect();
        let g = berlekamp_massey(&seq, &pb);
        let annihilates = |c: &[BigUint]| {
            let d = c.len() - 1;
            (0..seq.len().saturating_sub(d)).all(|j| (0..=d).map(|i| &c[i] * &seq[i + j]).sum::<BigUint>() % &pb == BigUint::zero())
        };
        prop_assert!(annihilates(&g.coeffs));
        prop_assert!(g.coeffs.last() == Some(&BigUint::one()));
        let deg = g.degree();
        if deg <= 4 {
            for d in 0..deg {
                for code in 0..p.pow(d as u32) {
                    let mut c: Vec<BigUint> = (0..d).map(|i| BigUint::from(code / p.pow(i as u32) % p)).collect();
                    c.push(BigUint::one());
                    prop_assert!(!annihilates(&c), "smaller annihilator {:?}", c);
                }
            }
        }
        Ok(())
    })
}

/// A single Wiedemann run's minimal polynomial divides the characteristic
/// polynomial mod p.
pub fn minpoly_divides_charpoly(cases: u32) -> Outcome {
    run(cases, (1usize..=8, any::<u64>(), prop::sample::select(vec![101u64, 65537, 2_147_483_647])), |(n, s, p)| {
        let seed = Seed::new(s);
        let a = random_matrix(n, n, 5, 0.5, seed.derive("a"));
        let pb = BigUint::from(p);
        let g: FpPoly = minimal_polynomial(&LinearOperator::base(&a), &pb, 1, &mut seed.derive("w").rng()).unwrap();
        let chi = oracle::char_poly_mod(&dense_int(&a), &pb);
        let r = poly_rem(&chi.coeffs, &g.coeffs, &pb);
        prop_assert!(r.iter().all(|x| x.is_zero()), "g = {:?} does not divide χ = {:?}", g.coeffs, chi.coeffs);
        Ok(())
    })
}

// ---- rational solver ----

fn system(n: usize, s: u64) -> (SparseMatrix, Vec<BigInt>) {
    let seed = Seed::new(s);
    let mut a = random_matrix(n, n, 20, 0.6, seed.derive("a"));
    if oracle::oracle_det_bareiss(&dense_int(&a)).is_zero() {
        // Add a dominant diagonal to make singular draws invertible.
        let mut e: Vec<_> = a.entries().iter().filter(|e| e.0 != e.1).cloned().collect();
        e.extend((0..n).map(|i| (i, i, 20)));
        a = SparseMatrix::new(n, n, e).unwrap();
    }
    let b = random_vector(n, 20, seed.derive("b"));
    (a, b)
}

/// Exact-mode lifting: `Σᵢ ỹ⁽ⁱ⁾pⁱ ≡ (A⁻¹b)·Δ (mod p^T)`.
pub fn digit_reconstruction(cases: u32) -> Outcome {
    run(cases, (1usize..=10, any::<u64>()), |(n, s)| {
        let (a, b) = system(n, s);
        let want = oracle::oracle_solve_exact(&dense_int(&a), &b);
        let got = lift_exact(&a, &b, Seed::new(s).derive("lift"), &SolverConfig::default()).unwrap();
        match (want, got) {
            (None, None) => {}
            (Some(x), Some((delta, stats, sums))) => {
                prop_assert_eq!(&delta, &oracle::oracle_det_bareiss(&dense_int(&a)));
                let pt = BigInt::from(stats.prime.clone()).pow(stats.iterations as u32);
                for (xi, si) in x.iter().zip(&sums) {
                    let scaled = xi * Rational::from_integer(delta.clone());
                    prop_assert!(scaled.is_integer());
                    prop_assert_eq!((scaled.to_integer() - si).mod_floor(&pt), BigInt::zero());
                }
            }
            (w, g) => prop_assert!(false, "oracle {:?} vs solver {:?}", w.is_some(), g.is_some()),
        }
        Ok(())
    })
}

/// `‖r̃⁽ⁱ⁾‖∞ ≤ 2nU` over the whole lifting run.
pub fn residual_bounded(cases: u32) -> Outcome {
    run(cases, (1usize..=10, any::<u64>()), |(n, s)| {
        let (a, b) = system(n, s);
        if let Some((_, stats, _)) = lift_exact(&a, &b, Seed::new(s).derive("lift"), &SolverConfig::default()).unwrap() {
            let u = BigInt::from(a.max_abs().max(1));
            prop_assert_eq!(&stats.residual_bound, &(BigInt::from(2 * n) * u));
            prop_assert!(stats.max_residual <= stats.residual_bound);
        }
        Ok(())
    })
}

/// Zero solution entries come back as exact zeros and nonzero ones never do.
pub fn zero_preservation(cases: u32) -> Outcome {
    run(cases, (1usize..=8, any::<u64>(), proptest::collection::vec(any::<bool>(), 8)), |(n, s, zeros)| {
        let (a, _) = system(n, s);
        let mut x = random_vector(n, 9, Seed::new(s).derive("x"));
        for (xi, z) in x.iter_mut().zip(&zeros) {
            if *z {
                *xi = BigInt::zero();
            }
        }
        let b = LinearOperator::base(&a).apply_int(&x).unwrap();
        let out = lin_solve(&a, &b, 1e-3, Seed::new(s).derive("solve"), &SolverConfig::default()).unwrap();
        let y = out.solution().unwrap();
        for (xi, yi) in x.iter().zip(y) {
            prop_assert_eq!(xi.is_zero(), yi.is_zero());
        }
        Ok(())
    })
}

/// K = 1 and the default block count give identical outputs.
pub fn block_equivalence(cases: u32) -> Outcome {
    run(cases, (2usize..=10, any::<u64>(), 1u32..=10), |(n, s, digits)| {
        let (a, b) = system(n, s);
        let eps = 10f64.powi(-(digits as i32));
        let seed = Seed::new(s).derive("solve");
        let one = lin_solve(&a, &b, eps, seed, &SolverConfig { blocks: Some(1), ..SolverConfig::default() }).unwrap();
        let many = lin_solve(&a, &b, eps, seed, &SolverConfig::default()).unwrap();
        prop_assert_eq!(one, many);
        Ok(())
    })
}

// ---- oracle ----

/// Bareiss reports zero exactly when exact elimination reports singular.
pub fn oracle_consistent(cases: u32) -> Outcome {
    run(cases, (1usize..=6, any::<u64>(), 0.1f64..1.0), |(n, s, density)| {
        let a = dense_int(&random_matrix(n, n, 3, density, Seed::new(s)));
        let b = vec![BigInt::one(); n];
        prop_assert_eq!(oracle::oracle_det_bareiss(&a).is_zero(), oracle::oracle_solve_exact(&a, &b).is_none());
        Ok(())
    })
}

// ---- spectral ----

fn fixed_ratio(x: &Fixed) -> Rational {
    Rational::new(x.scaled().clone(), BigInt::one() << x.frac_bits() as u64)
}

/// Both sides of the shift-invert contract against exact Sturm counts:
/// NO means no eigenvalue of B in `[ℓ, r]`, YES means one in
/// `[ℓ − w/4, r + w/4]`.
pub fn shift_invert_sound(cases: u32) -> Outcome {
    let strat = (1usize..=4, 1i64..=5, any::<u64>(), 0u32..=6, 0.0f64..1.0, any::<bool>(), any::<bool>());
    run(cases, strat, |(n, u, s, k, pos, near, certificates)| {
        let seed = Seed::new(s);
        let a = random_symmetric(n, u, seed.derive("a"));
        let b = perturb_spectrum(LinearOperator::base(&a), 0.2, seed.derive("perturb")).unwrap();
        let f = b.frac_bits();
        let mut q: Vec<Vec<Rational>> = a.to_dense().iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
        for (i, d) in b.diagonal().iter().enumerate() {
            q[i][i] += fixed_ratio(d);
        }
        let w = (-(k as f64)).exp2();
        let center = if near {
            let eigs = oracle::oracle_eigs_bisect_q(&q, 1e-9);
            eigs[(pos * n as f64) as usize % n] + (pos - 0.5) * 1.5 * w
        } else {
            (2.0 * pos - 1.0) * (n as f64 * u as f64 + 1.0)
        };
        let l = Fixed::from_f64(center - w / 2.0, f).unwrap();
        let r = l.add(&Fixed::from_f64(w, f).unwrap());
        let cfg = SpectralConfig { certificates, ..SpectralConfig::default() };
        let yes = shift_invert(&b, &l, &r, seed.derive("si"), &cfg).unwrap();
        let (lq, rq) = (fixed_ratio(&l), fixed_ratio(&r));
        if yes {
            let quarter = Rational::new(BigInt::one(), BigInt::from(4)) * (&rq - &lq);
            prop_assert!(oracle::oracle_eig_count_in(&q, &(&lq - &quarter), &(&rq + &quarter)) > 0, "YES without an eigenvalue nearby");
        } else {
            prop_assert_eq!(oracle::oracle_eig_count_in(&q, &lq, &rq), 0, "NO with an eigenvalue inside");
        }
        Ok(())
    })
}

/// Every level of the bisection tree has at most 2n internal nodes.
pub fn level_counts(cases: u32) -> Outcome {
    run(cases, (1usize..=5, 1i64..=10, any::<u64>(), 0.1f64..0.5), |(n, u, s, eps)| {
        let a = random_symmetric(n, u, Seed::new(s).derive("a"));
        let (values, stats) = spectrum_op(&LinearOperator::base(&a), eps, Seed::new(s), &SpectralConfig::default()).unwrap();
        prop_assert_eq!(values.len(), n);
        prop_assert_eq!(stats.level_violations, 0);
        for &(_, internal) in &stats.levels {
            prop_assert!(internal <= 2 * n);
        }
        Ok(())
    })
}

/// `e^{−ε}·max{δ, |λ_min|} ≤ λ̃ ≤ e^{ε}·max{δ, |λ_min|}`.
pub fn inv_power_brackets(cases: u32) -> Outcome {
    run(cases, (1usize..=4, 1i64..=6, any::<u64>(), 0.05f64..0.3, 0.01f64..2.0), |(n, u, s, eps, delta)| {
        let a = random_symmetric(n, u, Seed::new(s).derive("a"));
        let got = lospace::spectral::inv_power(&a, eps, delta, Seed::new(s), &SpectralConfig::default()).unwrap();
        let eigs = oracle::oracle_eigs_bisect(&dense_int(&a), 1e-12);
        let lmin = eigs.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if lmin < 1e-9 && oracle::oracle_det_bareiss(&dense_int(&a)).is_zero() {
            prop_assert!(got.is_zero());
            return Ok(());
        }
        let target = lmin.max(delta);
        let g = got.to_f64();
        prop_assert!(g >= target * (-eps).exp() * (1.0 - 1e-12) && g <= target * eps.exp() * (1.0 + 1e-12), "{} vs {}", g, target);
        Ok(())
    })
}

pub fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap()
}
