//! Dense square matrices over a [`Scalar`].

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand_core::RngCore;

use crate::scalar::Scalar;

/// A dense `n × n` matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Mat<S> {
    /// The zero matrix.
    pub fn zero(n: usize) -> Self {
        Mat { n, data: vec![S::zero(); n * n] }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// `s` times the identity.
    pub fn scalar(n: usize, s: S) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    /// Builds from row-major entries; `None` if the length is not a square.
    pub fn from_rows(n: usize, data: Vec<S>) -> Option<Self> {
        (data.len() == n * n).then_some(Mat { n, data })
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.data[i * n + j] = S::one();
        m
    }

    /// Side length.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[S] {
        &self.data
    }

    /// True if every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// True if this is the identity.
    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    *x == S::one()
                } else {
                    x.is_zero()
                }
            })
        })
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    /// In-place sum.
    pub fn add_assign(&mut self, o: &Self) {
        debug_assert_eq!(self.n, o.n);
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            if !b.is_zero() {
                *a = a.add(b);
            }
        }
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|a| a.neg()).collect() }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: &S) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    /// Product `self · o`.
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let n = self.n;
        if n == 1 {
            return Mat { n, data: vec![self.data[0].mul(&o.data[0])] };
        }
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        let t = a.mul(b);
                        out.data[i * n + j] = out.data[i * n + j].add(&t);
                    }
                }
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.data[r * n + col].is_zero())?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.data[col * n + col].inv()?;
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j].mul(&p);
                inv.data[col * n + j] = inv.data[col * n + j].mul(&p);
            }
            for r in 0..n {
                if r == col || a.data[r * n + col].is_zero() {
                    continue;
                }
                let f = a.data[r * n + col].clone();
                for j in 0..n {
                    let x = a.data[col * n + j].mul(&f);
                    a.data[r * n + j] = a.data[r * n + j].sub(&x);
                    let y = inv.data[col * n + j].mul(&f);
                    inv.data[r * n + j] = inv.data[r * n + j].sub(&y);
                }
            }
        }
        Some(inv)
    }

    /// Commutator test `self · o == o · self`.
    pub fn commutes_with(&self, o: &Self) -> bool {
        self.mul(o) == o.mul(self)
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        let (a, b) = (self.n, o.n);
        let n = a * b;
        let mut out = Self::zero(n);
        for i in 0..a {
            for j in 0..a {
                let x = &self.data[i * a + j];
                if x.is_zero() {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + (j * b + l)] = x.mul(&o.data[k * b + l]);
                    }
                }
            }
        }
        out
    }

    /// The `k × k` block at block coordinates `(bi, bj)`.
    pub fn block(&self, k: usize, bi: usize, bj: usize) -> Self {
        let mut out = Self::zero(k);
        for i in 0..k {
            for j in 0..k {
                out.data[i * k + j] = self.data[(bi * k + i) * self.n + bj * k + j].clone();
            }
        }
        out
    }

    /// Writes a `k × k` block at block coordinates `(bi, bj)`.
    pub fn set_block(&mut self, bi: usize, bj: usize, blk: &Self) {
        let k = blk.n;
        for i in 0..k {
            for j in 0..k {
                self.data[(bi * k + i) * self.n + bj * k + j] = blk.data[i * k + j].clone();
            }
        }
    }

    /// Largest entrywise absolute difference, as a float.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| {
                let d = a.sub(b).to_f64();
                if d < 0.0 {
                    -d
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|a| {
                let d = a.to_f64();
                if d < 0.0 {
                    -d
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    }

    /// Total order for use as a map key.
    pub fn key_cmp(&self, o: &Self) -> Ordering {
        self.n.cmp(&o.n).then_with(|| {
            for (a, b) in self.data.iter().zip(&o.data) {
                let c = a.key_cmp(b);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    /// Converts entries to floats.
    pub fn to_f64(&self) -> Mat<f64> {
        Mat { n: self.n, data: self.data.iter().map(|x| x.to_f64()).collect() }
    }

    /// Random matrix with small integer entries in `[-r, r]`, each nonzero
    /// with probability `density` out of 16.
    pub fn random_small(n: usize, r: i64, density: u32, rng: &mut dyn RngCore) -> Self {
        let mut m = Self::zero(n);
        for x in m.data.iter_mut() {
            if rng.next_u32() % 16 < density {
                *x = S::from_int(small_int(r, rng));
            }
        }
        m
    }

    /// Random matrix whose entries are fractions `p/q` with `|p| ≤ r` and
    /// `1 ≤ q ≤ 3`.
    pub fn random_rational(n: usize, r: i64, rng: &mut dyn RngCore) -> Self {
        let mut m = Self::zero(n);
        for x in m.data.iter_mut() {
            let p = small_int(r, rng);
            let q = 1 + (rng.next_u32() % 3) as i64;
            *x = S::from_frac(p, q);
        }
        m
    }
}

/// Uniform integer in `[-r, r]`.
pub fn small_int(r: i64, rng: &mut dyn RngCore) -> i64 {
    (rng.next_u64() % (2 * r as u64 + 1)) as i64 - r
}

/// Wrapper giving matrices a total order, for map keys.
#[derive(Clone, Debug)]
pub struct MatKey<S: Scalar>(pub Mat<S>);

impl<S: Scalar> PartialEq for MatKey<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for MatKey<S> {}
impl<S: Scalar> PartialOrd for MatKey<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> Ord for MatKey<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.key_cmp(&o.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type M = Mat<Rational>;

    fn m(n: usize, v: &[i64]) -> M {
        M::from_rows(n, v.iter().map(|&x| Rational::from_int(x)).collect()).unwrap()
    }

    #[test]
    fn product_and_identity() {
        let a = m(2, &[1, 2, 3, 4]);
        let b = m(2, &[0, 1, 1, 0]);
        assert_eq!(a.mul(&b), m(2, &[2, 1, 4, 3]));
        assert_eq!(a.mul(&M::identity(2)), a);
        assert!(M::identity(3).is_identity());
    }

    #[test]
    fn kron_and_blocks() {
        let a = m(2, &[1, 2, 3, 4]);
        let k = M::identity(2).kron(&a);
        assert_eq!(k.block(2, 0, 0), a);
        assert_eq!(k.block(2, 1, 1), a);
        assert!(k.block(2, 0, 1).is_zero());
    }
}
