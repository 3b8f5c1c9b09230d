//! Sparse matrices and black-box linear operators.
//!
//! A [`LinearOperator`] is a composition descriptor over a borrowed
//! [`SparseMatrix`]. It never materializes the composed matrix: applying it
//! walks the base matrix once per product. Binding an operator to a
//! [`Ring`] converts its scalars once, so repeated products in the same
//! ring cost O(nnz) ring operations each.

mod matrix;

pub use matrix::{parse_vector, vector_to_text, SparseMatrix};

use crate::field::{IntRing, PrimeField, Ring};
use crate::meter;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone)]
pub enum Descriptor<'a> {
    /// The matrix itself.
    Base(&'a SparseMatrix),
    /// `D · A` for an integer diagonal `D`.
    DiagScale(Box<LinearOperator<'a>>, Vec<BigInt>),
    /// `A − s·I`.
    Shift(Box<LinearOperator<'a>>, BigInt),
    /// `k · A`.
    Scale(Box<LinearOperator<'a>>, BigInt),
    /// `A + diag(d)`.
    DiagAdd(Box<LinearOperator<'a>>, Vec<BigInt>),
    /// `[[A, −b], [0ᵀ, 0]]`.
    Augment(Box<LinearOperator<'a>>, &'a [BigInt]),
    /// `AᵀA`.
    Gram(&'a SparseMatrix),
    /// `AAᵀ + c·I`.
    GramT(&'a SparseMatrix, BigInt),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub apply_int: bool,
    pub apply_mod: bool,
}

#[derive(Debug, Clone)]
pub struct LinearOperator<'a> {
    rows: usize,
    cols: usize,
    desc: Descriptor<'a>,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl<'a> LinearOperator<'a> {
    pub fn base(a: &'a SparseMatrix) -> Self {
        LinearOperator { rows: a.rows(), cols: a.cols(), desc: Descriptor::Base(a) }
    }

    pub fn diag_scale(self, d: Vec<BigInt>) -> Result<Self> {
        check_len(self.rows, d.len())?;
        Ok(LinearOperator { rows: self.rows, cols: self.cols, desc: Descriptor::DiagScale(Box::new(self), d) })
    }

    pub fn shift(self, s: BigInt) -> Result<Self> {
        check_len(self.rows, self.cols)?;
        Ok(LinearOperator { rows: self.rows, cols: self.cols, desc: Descriptor::Shift(Box::new(self), s) })
    }

    pub fn scale(self, k: BigInt) -> Self {
        LinearOperator { rows: self.rows, cols: self.cols, desc: Descriptor::Scale(Box::new(self), k) }
    }

    pub fn diag_add(self, d: Vec<BigInt>) -> Result<Self> {
        check_len(self.rows, self.cols)?;
        check_len(self.rows, d.len())?;
        Ok(LinearOperator { rows: self.rows, cols: self.cols, desc: Descriptor::DiagAdd(Box::new(self), d) })
    }

    pub fn augment(self, b: &'a [BigInt]) -> Result<Self> {
        check_len(self.rows, self.cols)?;
        check_len(self.rows, b.len())?;
        let n = self.rows + 1;
        Ok(LinearOperator { rows: n, cols: n, desc: Descriptor::Augment(Box::new(self), b) })
    }

    pub fn gram(a: &'a SparseMatrix) -> Self {
        LinearOperator { rows: a.cols(), cols: a.cols(), desc: Descriptor::Gram(a) }
    }

    pub fn gram_t(a: &'a SparseMatrix, c: BigInt) -> Self {
        LinearOperator { rows: a.rows(), cols: a.rows(), desc: Descriptor::GramT(a, c) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn descriptor(&self) -> &Descriptor<'a> {
        &self.desc
    }

    pub fn capabilities(&self) -> Capabilities {
        Capabilities { apply_int: true, apply_mod: true }
    }

    /// Number of stored entries touched by one product.
    pub fn nnz(&self) -> usize {
        match &self.desc {
            Descriptor::Base(a) | Descriptor::Gram(a) => a.nnz(),
            Descriptor::GramT(a, _) => 2 * a.nnz(),
            Descriptor::DiagScale(i, _)
            | Descriptor::Shift(i, _)
            | Descriptor::Scale(i, _)
            | Descriptor::DiagAdd(i, _)
            | Descriptor::Augment(i, _) => i.nnz() + self.rows,
        }
    }

    /// Exact bound U on the absolute value of every entry of the operator.
    pub fn max_abs_entry(&self) -> BigInt {
        let max = |v: &[BigInt]| v.iter().map(|x| x.abs()).max().unwrap_or_default();
        match &self.desc {
            Descriptor::Base(a) => BigInt::from(a.max_abs()),
            Descriptor::DiagScale(i, d) => i.max_abs_entry() * max(d),
            Descriptor::Shift(i, s) => i.max_abs_entry() + s.abs(),
            Descriptor::Scale(i, k) => i.max_abs_entry() * k.abs(),
            Descriptor::DiagAdd(i, d) => i.max_abs_entry() + max(d),
            Descriptor::Augment(i, b) => i.max_abs_entry().max(max(b)),
            Descriptor::Gram(a) => {
                // The largest entry of AᵀA is its largest diagonal entry.
                let mut norms = vec![BigInt::zero(); a.cols()];
                for &(_, j, v) in a.entries() {
                    norms[j] += BigInt::from(v) * v;
                }
                max(&norms)
            }
            Descriptor::GramT(a, c) => {
                let best = (0..a.rows())
                    .map(|i| a.row(i).iter().map(|e| BigInt::from(e.2) * e.2).sum::<BigInt>())
                    .max()
                    .unwrap_or_default();
                best + c.abs()
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.desc {
            Descriptor::Base(a) => a.is_symmetric(),
            Descriptor::Gram(_) | Descriptor::GramT(..) => true,
            Descriptor::Shift(i, _) | Descriptor::Scale(i, _) | Descriptor::DiagAdd(i, _) => i.is_symmetric(),
            Descriptor::DiagScale(..) | Descriptor::Augment(..) => false,
        }
    }

    pub fn bind<'s, R: Ring>(&'s self, ring: &'s R) -> Bound<'s, R> {
        Bound { ring, rows: self.rows, cols: self.cols, node: self.node(ring) }
    }

    fn node<'s, R: Ring>(&'s self, ring: &R) -> Node<'s, R::Elem> {
        let conv = |v: &[BigInt]| v.iter().map(|x| ring.from_bigint(x)).collect::<Vec<_>>();
        match &self.desc {
            Descriptor::Base(a) => Node::Base(a),
            Descriptor::DiagScale(i, d) => Node::DiagScale(Box::new(i.node(ring)), conv(d)),
            Descriptor::Shift(i, s) => Node::Shift(Box::new(i.node(ring)), ring.from_bigint(s)),
            Descriptor::Scale(i, k) => Node::Scale(Box::new(i.node(ring)), ring.from_bigint(k)),
            Descriptor::DiagAdd(i, d) => Node::DiagAdd(Box::new(i.node(ring)), conv(d)),
            Descriptor::Augment(i, b) => {
                let nb = b.iter().map(|x| ring.neg(&ring.from_bigint(x))).collect();
                Node::Augment(Box::new(i.node(ring)), nb)
            }
            Descriptor::Gram(a) => Node::Gram(a),
            Descriptor::GramT(a, c) => Node::GramT(a, ring.from_bigint(c)),
        }
    }

    /// Exact integer product.
    pub fn apply_int(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let ring = IntRing;
        let mut out = vec![BigInt::zero(); self.rows];
        self.bind(&ring).apply(v, &mut out)?;
        Ok(out)
    }

    /// Product mod p on canonical residues.
    pub fn apply_mod(&self, v: &[BigUint], p: &BigUint) -> Result<Vec<BigUint>> {
        crate::with_field!(p, |f| self.apply_mod_in(f, v))
    }

    fn apply_mod_in<F: PrimeField>(&self, f: &F, v: &[BigUint]) -> Result<Vec<BigUint>> {
        let x: Vec<F::Elem> = v.iter().map(|e| f.from_biguint(e)).collect();
        let mut out = vec![f.zero(); self.rows];
        self.bind(f).apply(&x, &mut out)?;
        Ok(out.iter().map(|e| f.to_biguint(e)).collect())
    }

    /// Dense integer materialization (tests and small-n diagnostics only).
    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut cols = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut e = vec![BigInt::zero(); self.cols];
            e[j] = BigInt::from(1);
            cols.push(self.apply_int(&e).unwrap());
        }
        (0..self.rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }
}

enum Node<'s, E> {
    Base(&'s SparseMatrix),
    DiagScale(Box<Node<'s, E>>, Vec<E>),
    Shift(Box<Node<'s, E>>, E),
    Scale(Box<Node<'s, E>>, E),
    DiagAdd(Box<Node<'s, E>>, Vec<E>),
    Augment(Box<Node<'s, E>>, Vec<E>),
    Gram(&'s SparseMatrix),
    GramT(&'s SparseMatrix, E),
}

/// An operator with its scalars converted into a specific ring.
pub struct Bound<'s, R: Ring> {
    ring: &'s R,
    rows: usize,
    cols: usize,
    node: Node<'s, R::Elem>,
}

impl<R: Ring> Bound<'_, R> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ring(&self) -> &R {
        self.ring
    }

    /// `out ← op · v`.
    pub fn apply(&self, v: &[R::Elem], out: &mut [R::Elem]) -> Result<()> {
        check_len(self.cols, v.len())?;
        check_len(self.rows, out.len())?;
        apply_node(self.ring, &self.node, v, out);
        Ok(())
    }
}

fn mat_vec<R: Ring>(r: &R, a: &SparseMatrix, v: &[R::Elem], out: &mut [R::Elem]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = r.zero();
        for &(_, j, x) in a.row(i) {
            acc = r.add(&acc, &r.mul_small(x, &v[j]));
        }
        *o = acc;
    }
}

fn apply_node<R: Ring>(r: &R, node: &Node<'_, R::Elem>, v: &[R::Elem], out: &mut [R::Elem]) {
    match node {
        Node::Base(a) => mat_vec(r, a, v, out),
        Node::DiagScale(inner, d) => {
            apply_node(r, inner, v, out);
            for (o, di) in out.iter_mut().zip(d) {
                *o = r.mul(o, di);
            }
        }
        Node::Shift(inner, s) => {
            apply_node(r, inner, v, out);
            for (o, x) in out.iter_mut().zip(v) {
                *o = r.sub(o, &r.mul(s, x));
            }
        }
        Node::Scale(inner, k) => {
            apply_node(r, inner, v, out);
            for o in out.iter_mut() {
                *o = r.mul(o, k);
            }
        }
        Node::DiagAdd(inner, d) => {
            apply_node(r, inner, v, out);
            for ((o, x), di) in out.iter_mut().zip(v).zip(d) {
                *o = r.add(o, &r.mul(di, x));
            }
        }
        Node::Augment(inner, neg_b) => {
            let n = neg_b.len();
            apply_node(r, inner, &v[..n], &mut out[..n]);
            for (o, nb) in out[..n].iter_mut().zip(neg_b) {
                *o = r.add(o, &r.mul(nb, &v[n]));
            }
            out[n] = r.zero();
        }
        Node::Gram(a) => {
            // Row-streamed: (AᵀA v)_i = Σ_j A_ji (A v)_j, one scalar (A v)_j
            // live at a time.
            for o in out.iter_mut() {
                *o = r.zero();
            }
            for j in 0..a.rows() {
                let row = a.row(j);
                let mut s = r.zero();
                for &(_, k, x) in row {
                    s = r.add(&s, &r.mul_small(x, &v[k]));
                }
                for &(_, i, x) in row {
                    out[i] = r.add(&out[i], &r.mul_small(x, &s));
                }
            }
        }
        Node::GramT(a, c) => {
            let mut y = vec![r.zero(); a.cols()];
            for (j, row) in (0..a.rows()).map(|j| (j, a.row(j))) {
                for &(_, k, x) in row {
                    y[k] = r.add(&y[k], &r.mul_small(x, &v[j]));
                }
            }
            let _charge = meter::charge("linop.gram_t", y.iter().map(|e| r.elem_bits(e)).sum());
            mat_vec(r, a, &y, out);
            for (o, x) in out.iter_mut().zip(v) {
                *o = r.add(o, &r.mul(c, x));
            }
        }
    }
}
