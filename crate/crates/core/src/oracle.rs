//! Brute-force ground truth for tests: fraction-free elimination, exact
//! rational solves, characteristic polynomials with Sturm bisection, and
//! Hankel-system recurrences. Dense, cubic or worse, and unmetered.

use crate::wiedemann::FpPoly;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn dense_from_i64(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Exact determinant by Bareiss elimination.
pub fn oracle_det_bareiss(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Exact `A⁻¹b` by rational Gaussian elimination; `None` when singular.
pub fn oracle_solve_exact(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().chain(std::iter::once(bi)).map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, piv);
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = &m[i][k] / &m[k][k];
                for j in k..=n {
                    let t = &f * &m[k][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Some((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
}

/// Characteristic polynomial `det(xI − A)` by Faddeev–LeVerrier, lowest
/// degree first.
pub fn char_poly(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for (l, ail) in a[i].iter().enumerate() {
                    if !ail.is_zero() && !m[l][j].is_zero() {
                        s += ail * &m[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        c[n - k] = -tr / Rational::from_integer(BigInt::from(k));
    }
    c
}

/// Characteristic polynomial of an integer matrix reduced mod p (p > n).
pub fn char_poly_mod(a: &[Vec<BigInt>], p: &BigUint) -> FpPoly {
    let q: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    let pi = BigInt::from(p.clone());
    let coeffs = char_poly(&q)
        .iter()
        .map(|c| {
            let inv = c.denom().modpow(&(&pi - 2u32), &pi);
            (c.numer() * inv).mod_floor(&pi).into_parts().1
        })
        .collect();
    FpPoly { p: p.clone(), coeffs }
}

type Poly = Vec<Rational>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[Rational]) -> Poly {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect()
}

fn is_const(p: &[Rational]) -> bool {
    p.len() <= 1
}

fn div_rem(a: &[Rational], b: &[Rational]) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            let t = &f * bi;
            r[shift + i] -= t;
        }
        q[shift] = f;
        r.pop();
        r = trim(if r.is_empty() { vec![Rational::zero()] } else { r });
    }
    (q, r)
}

fn monic(p: Poly) -> Poly {
    let lead = p.last().unwrap().clone();
    if lead.is_zero() {
        return p;
    }
    p.into_iter().map(|c| c / &lead).collect()
}

fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0].is_zero()) {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn sub(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()).collect())
}

/// Yun's square-free factorization: `(factor, multiplicity)` pairs.
fn square_free(f: &[Rational]) -> Vec<(Poly, usize)> {
    let f = monic(trim(f.to_vec()));
    if is_const(&f) {
        return Vec::new();
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = div_rem(&f, &a0).0;
    let mut c = div_rem(&df, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while !is_const(&b) {
        let a = gcd(&b, &d);
        let nb = div_rem(&b, &a).0;
        c = div_rem(&d, &a).0;
        if !is_const(&a) {
            out.push((a, i));
        }
        b = nb;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

fn sturm_chain(q: &[Rational]) -> Vec<Poly> {
    let mut chain = vec![q.to_vec(), derivative(q)];
    loop {
        let k = chain.len();
        let (_, r) = div_rem(&chain[k - 2], &chain[k - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn variations(chain: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Roots of a square-free polynomial in `(lo, hi]`, each within `tol`.
fn isolate(chain: &[Poly], lo: Rational, hi: Rational, tol: &Rational, out: &mut Vec<Rational>) {
    let count = variations(chain, &lo) - variations(chain, &hi);
    if count == 0 {
        return;
    }
    if count == 1 && &hi - &lo < *tol {
        out.push((&lo + &hi) / Rational::from_integer(BigInt::from(2)));
        return;
    }
    let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
    if count == 1 && eval(&chain[0], &hi).is_zero() {
        out.push(hi);
        return;
    }
    isolate(chain, lo, mid.clone(), tol, out);
    isolate(chain, mid, hi, tol, out);
}

/// Real roots with multiplicity of a real-rooted polynomial, sorted.
pub fn real_roots(p: &[Rational], tol: f64) -> Vec<Rational> {
    let p = monic(trim(p.to_vec()));
    let bound: Rational = p[..p.len() - 1].iter().map(|c| c.abs()).fold(Rational::zero(), |a, c| a.max(c)) + Rational::one();
    let mut b = Rational::one();
    while b <= bound {
        b *= Rational::from_integer(BigInt::from(2));
    }
    let tol = Rational::from_float(tol).unwrap_or_else(|| rational(1, 1 << 20));
    let mut out = Vec::new();
    for (factor, mult) in square_free(&p) {
        let mut roots = Vec::new();
        isolate(&sturm_chain(&factor), -b.clone(), b.clone(), &tol, &mut roots);
        for r in roots {
            out.extend(std::iter::repeat_n(r, mult));
        }
    }
    out.sort();
    out
}

/// Eigenvalues of a dense symmetric rational matrix, sorted, within `tol`.
pub fn oracle_eigs_bisect_q(a: &[Vec<Rational>], tol: f64) -> Vec<f64> {
    real_roots(&char_poly(a), tol).iter().map(|r| r.to_f64().unwrap()).collect()
}

/// Eigenvalues of a dense symmetric integer matrix, sorted, within `tol`.
pub fn oracle_eigs_bisect(a: &[Vec<BigInt>], tol: f64) -> Vec<f64> {
    let q: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    oracle_eigs_bisect_q(&q, tol)
}

/// Number of distinct eigenvalues of a dense symmetric rational matrix in
/// the closed interval `[lo, hi]`, computed exactly by Sturm sequences.
pub fn oracle_eig_count_in(a: &[Vec<Rational>], lo: &Rational, hi: &Rational) -> usize {
    if lo > hi {
        return 0;
    }
    let p = monic(trim(char_poly(a)));
    let mut count = 0;
    for (factor, _) in square_free(&p) {
        let chain = sturm_chain(&factor);
        count += variations(&chain, lo) - variations(&chain, hi);
        if eval(&factor, lo).is_zero() {
            count += 1;
        }
    }
    count
}

/// Solves `M x = rhs` over F_p by elimination; `None` if inconsistent.
fn solve_mod(mut rows: Vec<Vec<BigInt>>, cols: usize, p: &BigInt) -> Option<Vec<BigInt>> {
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(s) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, s);
        let inv = rows[r][c].modpow(&(p - 2u32), p);
        for x in rows[r].iter_mut() {
            *x = (&*x * &inv).mod_floor(p);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=cols {
                    let t = (&rows[i][j] - &f * &rows[r][j]).mod_floor(p);
                    rows[i][j] = t;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigInt::zero(); cols];
    for (i, &c) in piv_cols.iter().enumerate() {
        x[c] = rows[i][cols].clone();
    }
    Some(x)
}

/// Smallest-degree monic recurrence of `seq` over F_p found by solving the
/// Hankel system for each degree in turn; `None` above `max_deg`.
pub fn oracle_min_recurrence(seq: &[BigUint], p: &BigUint, max_deg: usize) -> Option<FpPoly> {
    let pi = BigInt::from(p.clone());
    let s: Vec<BigInt> = seq.iter().map(|x| BigInt::from(x % p)).collect();
    for d in 0..=max_deg.min(s.len()) {
        // Σ_{j<d} c_j s_{k+j} = −s_{k+d} for every k.
        let rows: Vec<Vec<BigInt>> =
            (0..s.len() - d).map(|k| (0..d).map(|j| s[k + j].clone()).chain([(-&s[k + d]).mod_floor(&pi)]).collect()).collect();
        if rows.is_empty() {
            return Some(FpPoly { p: p.clone(), coeffs: (0..d).map(|_| BigUint::zero()).chain([BigUint::one()]).collect() });
        }
        if let Some(c) = solve_mod(rows, d, &pi) {
            let coeffs = c.into_iter().map(|x| x.into_parts().1).chain([BigUint::one()]).collect();
            return Some(FpPoly { p: p.clone(), coeffs });
        }
    }
    None
}

/// Minimal polynomial of a dense integer matrix over F_p: the first linear
/// dependency among I, A, A², … as flattened matrices.
pub fn oracle_matrix_min_poly(a: &[Vec<BigInt>], p: &BigUint) -> FpPoly {
    let n = a.len();
    let pi = BigInt::from(p.clone());
    let am: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|x| x.mod_floor(&pi)).collect()).collect();
    let mut powers: Vec<Vec<BigInt>> = Vec::new();
    let mut cur: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u32)).collect()).collect();
    for d in 0..=n {
        let flat: Vec<BigInt> = cur.iter().flatten().cloned().collect();
        // Is A^d a combination of lower powers?
        let rows: Vec<Vec<BigInt>> = (0..n * n)
            .map(|k| powers.iter().map(|pw| pw[k].clone()).chain([(-&flat[k]).mod_floor(&pi)]).collect())
            .collect();
        if let Some(c) = solve_mod(rows, d, &pi) {
            let coeffs = c.into_iter().map(|x| x.into_parts().1).chain([BigUint::one()]).collect();
            return FpPoly { p: p.clone(), coeffs };
        }
        powers.push(flat);
        cur = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| &am[i][l] * &cur[l][j]).sum::<BigInt>().mod_floor(&pi)).collect())
            .collect();
    }
    unreachable!("Cayley–Hamilton bounds the degree by n")
}

/// Dense `A·x` in f64.
pub fn matvec_f64(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

/// Spectral norm of a small dense symmetric-or-not matrix, via the
/// largest eigenvalue of `MᵀM` computed with the rational oracle.
pub fn spectral_norm_f64(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let q: Vec<Vec<Rational>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let s: f64 = (0..rows).map(|k| m[k][i] * m[k][j]).sum();
                    Rational::from_float(s).unwrap_or_default()
                })
                .collect()
        })
        .collect();
    oracle_eigs_bisect_q(&q, 1e-12).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}
