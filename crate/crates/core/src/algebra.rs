//! Unital matrix algebras `B ⊂ D`.
//!
//! `B` is `M_k` and `D` is `M_m`. The inclusion is fixed by the images
//! `f_ij` of the matrix units of `B`, so `ι(b) = Σ b_ij f_ij`.

use alloc::format;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// How `B` sits inside `D`.
#[derive(Clone, Debug)]
pub enum Embedding<S: Scalar> {
    /// `b ↦ diag(b, …, b)`; needs `dim_b | dim_d`.
    BlockDiagonal,
    /// Explicit images of the matrix units, indexed `[i * k + j]`.
    Units(Vec<Mat<S>>),
}

/// Exact or floating arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    /// Rationals.
    Exact,
    /// `f64`.
    Float,
}

/// The pair `B ⊂ D` with its embedding.
#[derive(Clone, Debug)]
pub struct AlgebraContext<S: Scalar> {
    dim_b: usize,
    dim_d: usize,
    units: Vec<Mat<S>>,
}

impl<S: Scalar> AlgebraContext<S> {
    /// Validates dimensions and the embedding.
    pub fn new(dim_b: usize, dim_d: usize, embedding: Embedding<S>) -> Result<Self> {
        if dim_b == 0 || dim_d == 0 {
            return Err(CbfError::Validation("dimensions must be positive".into()));
        }
        if dim_b > dim_d {
            return Err(CbfError::Validation(format!("dim_B = {dim_b} exceeds dim_D = {dim_d}")));
        }
        let units = match embedding {
            Embedding::BlockDiagonal => {
                if !dim_d.is_multiple_of(dim_b) {
                    return Err(CbfError::Validation(format!(
                        "block-diagonal embedding needs dim_B | dim_D (got {dim_b}, {dim_d})"
                    )));
                }
                let r = dim_d / dim_b;
                let mut u = Vec::with_capacity(dim_b * dim_b);
                for i in 0..dim_b {
                    for j in 0..dim_b {
                        u.push(Mat::identity(r).kron(&Mat::unit(dim_b, i, j)));
                    }
                }
                u
            }
            Embedding::Units(u) => u,
        };
        let ctx = AlgebraContext { dim_b, dim_d, units };
        ctx.validate()?;
        Ok(ctx)
    }

    /// The scalar case `B = D = M_1`.
    pub fn scalar() -> Self {
        AlgebraContext { dim_b: 1, dim_d: 1, units: alloc::vec![Mat::identity(1)] }
    }

    fn validate(&self) -> Result<()> {
        let k = self.dim_b;
        if self.units.len() != k * k {
            return Err(CbfError::Validation("wrong number of matrix-unit images".into()));
        }
        for u in &self.units {
            if u.dim() != self.dim_d {
                return Err(CbfError::Dimension { expected: self.dim_d, found: u.dim() });
            }
        }
        let mut sum = Mat::zero(self.dim_d);
        for i in 0..k {
            sum.add_assign(&self.units[i * k + i]);
            for j in 0..k {
                let fij = &self.units[i * k + j];
                if fij.is_zero() {
                    return Err(CbfError::Validation("embedding is not injective".into()));
                }
                for l in 0..k {
                    for m in 0..k {
                        let p = fij.mul(&self.units[l * k + m]);
                        let ok = if j == l { p == self.units[i * k + m] } else { p.is_zero() };
                        if !ok {
                            return Err(CbfError::Validation("embedding is not multiplicative".into()));
                        }
                    }
                }
            }
        }
        if !sum.is_identity() {
            return Err(CbfError::Validation("embedding is not unital".into()));
        }
        Ok(())
    }

    /// `dim B` (side length).
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// `dim D` (side length).
    pub fn dim_d(&self) -> usize {
        self.dim_d
    }

    /// Image of the matrix unit `E_ij` of `B`.
    pub fn unit_image(&self, i: usize, j: usize) -> &Mat<S> {
        &self.units[i * self.dim_b + j]
    }

    /// The inclusion `B → D`.
    pub fn b_to_d(&self, b: &Mat<S>) -> Result<Mat<S>> {
        if b.dim() != self.dim_b {
            return Err(CbfError::Dimension { expected: self.dim_b, found: b.dim() });
        }
        Ok(self.embed(b))
    }

    /// The preimage of `x` under the inclusion, or a validation error if
    /// `x` is not in `ι(B)`.
    pub fn d_to_b(&self, x: &Mat<S>) -> Result<Mat<S>> {
        if x.dim() != self.dim_d {
            return Err(CbfError::Dimension { expected: self.dim_d, found: x.dim() });
        }
        let k = self.dim_b;
        let f00 = &self.units[0];
        let (r, c) = (0..self.dim_d)
            .flat_map(|r| (0..self.dim_d).map(move |c| (r, c)))
            .find(|&(r, c)| !f00.get(r, c).is_zero())
            .expect("f_00 is nonzero");
        let scale = f00.get(r, c).inv().expect("nonzero");
        let mut b = Mat::zero(k);
        for i in 0..k {
            for j in 0..k {
                // f_0i x f_j0 = b_ij f_00
                let y = self.units[i].mul(x).mul(&self.units[j * k]);
                b.set(i, j, y.get(r, c).mul(&scale));
            }
        }
        if self.embed(&b).max_abs_diff(x) > if S::is_exact() { 0.0 } else { 1e-9 } {
            return Err(CbfError::Validation("element is not in the image of B".into()));
        }
        Ok(b)
    }

    pub(crate) fn embed(&self, b: &Mat<S>) -> Mat<S> {
        let k = self.dim_b;
        let mut out = Mat::zero(self.dim_d);
        for i in 0..k {
            for j in 0..k {
                let x = b.get(i, j);
                if !x.is_zero() {
                    out.add_assign(&self.units[i * k + j].scale(x));
                }
            }
        }
        out
    }

    /// Projects onto the commutant of `ι(B)` via `x ↦ Σ_i f_i0 x f_0i`.
    pub fn commutant_part(&self, x: &Mat<S>) -> Mat<S> {
        let k = self.dim_b;
        let mut out = Mat::zero(self.dim_d);
        for i in 0..k {
            out.add_assign(&self.units[i * k].mul(x).mul(&self.units[i]));
        }
        out
    }

    /// True if `x` commutes with every `ι(E_ij)`.
    pub fn in_commutant(&self, x: &Mat<S>) -> bool {
        self.units.iter().all(|u| u.commutes_with(x))
    }

    /// A random element of `B`.
    pub fn random_b(&self, r: i64, rng: &mut dyn RngCore) -> Mat<S> {
        Mat::random_small(self.dim_b, r, 12, rng)
    }
}
