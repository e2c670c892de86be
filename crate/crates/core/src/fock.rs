//! Reduced free products of pointed `B-B` bimodules with `D`-valued maps.
//!
//! Each factor is `X_k = B ⊕ X°_k` with `X°_k = B^{⊕d}`. The bimodule maps
//! are `p(b ⊕ x) = b` and `q(b ⊕ x) = ι(b) + Σ_i ι(x_i) δ_i`, where every
//! `δ_i` lies in the commutant of `ι(B)`. A vector of the free product is a
//! `B`-valued coefficient for each alternating word of letters
//! `(factor, copy)`; the empty word is the vacuum summand.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use rand_core::RngCore;

use crate::algebra::AlgebraContext;
use crate::bnc::Face;
use crate::cumulants::{PairFunctional, Piece};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// One pointed bimodule, described by its reduced rank and `q`-data.
#[derive(Clone, Debug)]
pub struct Factor<S: Scalar> {
    deltas: Vec<Mat<S>>,
}

impl<S: Scalar> Factor<S> {
    /// Builds a factor from the `δ_i`, which must commute with `ι(B)`.
    pub fn new(ctx: &AlgebraContext<S>, deltas: Vec<Mat<S>>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(CbfError::Validation("a factor needs at least one reduced copy".into()));
        }
        for d in &deltas {
            if d.dim() != ctx.dim_d() {
                return Err(CbfError::Dimension { expected: ctx.dim_d(), found: d.dim() });
            }
            if !ctx.in_commutant(d) {
                return Err(CbfError::Validation("q-map is not a bimodule map".into()));
            }
        }
        Ok(Factor { deltas })
    }

    /// Random `δ_i`. With `null_last`, the last copy has `δ = 0`, which
    /// leaves room for operators centered for both expectations.
    pub fn random(ctx: &AlgebraContext<S>, d: usize, null_last: bool, rng: &mut dyn RngCore) -> Self {
        let mut deltas = Vec::with_capacity(d);
        for i in 0..d {
            if null_last && i + 1 == d {
                deltas.push(Mat::zero(ctx.dim_d()));
                continue;
            }
            loop {
                let x = ctx.commutant_part(&Mat::random_small(ctx.dim_d(), 2, 10, rng));
                if !x.is_zero() {
                    deltas.push(x);
                    break;
                }
            }
        }
        Factor { deltas }
    }

    /// All `δ_i = 0`, so `q = ι ∘ p`.
    pub fn trivial(ctx: &AlgebraContext<S>, d: usize) -> Self {
        Factor { deltas: vec![Mat::zero(ctx.dim_d()); d] }
    }

    /// Reduced rank `d`.
    pub fn reduced_dim(&self) -> usize {
        self.deltas.len()
    }

    /// The `δ_i`.
    pub fn deltas(&self) -> &[Mat<S>] {
        &self.deltas
    }
}

/// A `B`-linear operator on one factor: an `(1+d) × (1+d)` array of
/// `B`-blocks.
///
/// As a left operator it sends `x` to `(Σ_i A_ji x_i)_j`; as a right
/// operator to `(Σ_i x_i A_ij)_j`. Index 0 is the `B` summand.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOp<S: Scalar> {
    size: usize,
    k: usize,
    blocks: Vec<Mat<S>>,
}

impl<S: Scalar> BlockOp<S> {
    /// All-zero operator.
    pub fn zero(size: usize, k: usize) -> Self {
        BlockOp { size, k, blocks: vec![Mat::zero(k); size * size] }
    }

    /// `diag(b, …, b)`.
    pub fn diagonal(size: usize, b: &Mat<S>) -> Self {
        let mut op = Self::zero(size, b.dim());
        for i in 0..size {
            op.blocks[i * size + i] = b.clone();
        }
        op
    }

    /// Random small-integer blocks.
    pub fn random(size: usize, k: usize, r: i64, density: u32, rng: &mut dyn RngCore) -> Self {
        let blocks = (0..size * size).map(|_| Mat::random_small(k, r, density, rng)).collect();
        BlockOp { size, k, blocks }
    }

    /// Number of block rows.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Block `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &Mat<S> {
        &self.blocks[i * self.size + j]
    }

    /// Overwrites block `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, b: Mat<S>) {
        self.blocks[i * self.size + j] = b;
    }

    /// Tensor-split operators on `size = s1 · s2` with vacuum `(0,0)`:
    /// `a ⊗ 1` read as a left operator and `1 ⊗ a'` read as a right
    /// operator. They commute.
    pub fn split_pair(a: &BlockOp<S>, a2: &BlockOp<S>) -> (BlockOp<S>, BlockOp<S>) {
        let (s1, s2, k) = (a.size, a2.size, a.k);
        let n = s1 * s2;
        let mut left = Self::zero(n, k);
        let mut right = Self::zero(n, k);
        for i1 in 0..s1 {
            for j1 in 0..s1 {
                for t in 0..s2 {
                    left.set(i1 * s2 + t, j1 * s2 + t, a.get(i1, j1).clone());
                }
            }
        }
        for i2 in 0..s2 {
            for j2 in 0..s2 {
                for t in 0..s1 {
                    right.set(t * s2 + i2, t * s2 + j2, a2.get(i2, j2).clone());
                }
            }
        }
        (left, right)
    }

    /// Reads a right operator with the same vacuum image as this left one.
    pub fn vacuum_mirror(&self) -> BlockOp<S> {
        let mut out = Self::zero(self.size, self.k);
        for j in 0..self.size {
            out.set(0, j, self.get(j, 0).clone());
        }
        out
    }

    /// Extracts the block form of a scalar matrix acting on the
    /// vectorized factor space (index `(i, r, c)` ↦ `(i·k + r)·k + c`).
    /// Fails unless the map commutes with the `B`-action on the opposite
    /// side.
    pub fn from_linear_map(size: usize, k: usize, side: Face, t: &Mat<S>) -> Result<Self> {
        let dim = size * k * k;
        if t.dim() != dim {
            return Err(CbfError::Dimension { expected: dim, found: t.dim() });
        }
        let idx = |i: usize, r: usize, c: usize| (i * k + r) * k + c;
        // commutation with multiplication by matrix units on the other side
        for a in 0..k {
            for b in 0..k {
                let mut m = Mat::zero(dim);
                for i in 0..size {
                    for r in 0..k {
                        for c in 0..k {
                            match side {
                                // x ↦ x E_ab: entry (r,c) gets x(r,a) if c = b
                                Face::Left => {
                                    if c == b {
                                        m.set(idx(i, r, c), idx(i, r, a), S::one());
                                    }
                                }
                                // x ↦ E_ab x: entry (r,c) gets x(b,c) if r = a
                                Face::Right => {
                                    if r == a {
                                        m.set(idx(i, r, c), idx(i, b, c), S::one());
                                    }
                                }
                            }
                        }
                    }
                }
                if !t.commutes_with(&m) {
                    return Err(CbfError::Face(format!(
                        "map does not commute with the {} B-action",
                        match side {
                            Face::Left => "right",
                            Face::Right => "left",
                        }
                    )));
                }
            }
        }
        let mut op = Self::zero(size, k);
        for i in 0..size {
            for j in 0..size {
                let mut blk = Mat::zero(k);
                for r in 0..k {
                    for s in 0..k {
                        let v = match side {
                            // (A x)_j(r, 0) = Σ_s A_ji(r, s) x_i(s, 0)
                            Face::Left => t.get(idx(j, r, 0), idx(i, s, 0)).clone(),
                            // (x A)_j(0, s) = Σ_r x_i(0, r) A_ij(r, s)
                            Face::Right => t.get(idx(j, 0, s), idx(i, 0, r)).clone(),
                        };
                        blk.set(r, s, v);
                    }
                }
                match side {
                    Face::Left => op.set(j, i, blk),
                    Face::Right => op.set(i, j, blk),
                }
            }
        }
        Ok(op)
    }
}

/// Vacuum expectations of a single-factor operator: `(E, F)`.
pub fn factor_expectations<S: Scalar>(
    ctx: &AlgebraContext<S>,
    factor: &Factor<S>,
    side: Face,
    a: &BlockOp<S>,
) -> (Mat<S>, Mat<S>) {
    let e = a.get(0, 0).clone();
    let mut f = ctx.embed(&e);
    for (i, delta) in factor.deltas.iter().enumerate() {
        let c = match side {
            Face::Left => a.get(i + 1, 0),
            Face::Right => a.get(0, i + 1),
        };
        if !c.is_zero() {
            f.add_assign(&ctx.embed(c).mul(delta));
        }
    }
    (e, f)
}

/// Makes `E(Z) = F(Z) = 0` by clearing the vacuum-to-vacuum block and the
/// vacuum transitions into copies with `δ ≠ 0`.
pub fn center<S: Scalar>(factor: &Factor<S>, side: Face, a: &mut BlockOp<S>) {
    let k = a.k;
    a.set(0, 0, Mat::zero(k));
    for (i, delta) in factor.deltas.iter().enumerate() {
        if !delta.is_zero() {
            match side {
                Face::Left => a.set(i + 1, 0, Mat::zero(k)),
                Face::Right => a.set(0, i + 1, Mat::zero(k)),
            }
        }
    }
}

/// An operator on the free product.
#[derive(Clone, Debug)]
pub enum Op<S: Scalar> {
    /// `λ_k(A)`.
    Left(usize, Arc<BlockOp<S>>),
    /// `ρ_k(A)`.
    Right(usize, Arc<BlockOp<S>>),
    /// `L_b`.
    LMul(Mat<S>),
    /// `R_b`.
    RMul(Mat<S>),
    /// A linear combination.
    Combo(Vec<(S, Op<S>)>),
    /// A product, written left to right.
    Prod(Vec<Op<S>>),
}

/// A vector in the free product: one coefficient per word.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S: Scalar> {
    coeffs: Vec<Option<Mat<S>>>,
}

impl<S: Scalar> Vector<S> {
    /// Coefficient of word `w`, if nonzero.
    pub fn coeff(&self, w: usize) -> Option<&Mat<S>> {
        self.coeffs.get(w).and_then(|c| c.as_ref())
    }

    fn add_at(&mut self, w: usize, m: Mat<S>) {
        match &mut self.coeffs[w] {
            Some(c) => c.add_assign(&m),
            slot @ None => *slot = Some(m),
        }
    }

    fn prune(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            if c.as_ref().is_some_and(|m| m.is_zero()) {
                *c = None;
            }
        }
        self
    }
}

type Letter = (usize, usize);

/// The reduced free product of several factors, truncated to words of
/// length at most `max_len`.
#[derive(Clone, Debug)]
pub struct FockSpace<S: Scalar> {
    ctx: AlgebraContext<S>,
    factors: Vec<Factor<S>>,
    max_len: usize,
    words: Vec<Vec<Letter>>,
    letter_base: Vec<usize>,
    prepend: Vec<Vec<Option<usize>>>,
    append: Vec<Vec<Option<usize>>>,
    first: Vec<Option<(Letter, usize)>>,
    last: Vec<Option<(Letter, usize)>>,
    deltas: Vec<Mat<S>>,
}

impl<S: Scalar> FockSpace<S> {
    /// Builds the word tables.
    pub fn new(ctx: AlgebraContext<S>, factors: Vec<Factor<S>>, max_len: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(CbfError::Validation("need at least one factor".into()));
        }
        let mut letter_base = Vec::with_capacity(factors.len());
        let mut n_letters = 0;
        for f in &factors {
            letter_base.push(n_letters);
            n_letters += f.reduced_dim();
        }
        let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut index: BTreeMap<Vec<Letter>, usize> = BTreeMap::new();
        index.insert(Vec::new(), 0);
        let mut frontier = vec![0usize];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &w in &frontier {
                let tail = words[w].last().map(|l| l.0);
                for (fi, f) in factors.iter().enumerate() {
                    if Some(fi) == tail {
                        continue;
                    }
                    for c in 1..=f.reduced_dim() {
                        let mut nw = words[w].clone();
                        nw.push((fi, c));
                        index.insert(nw.clone(), words.len());
                        next.push(words.len());
                        words.push(nw);
                    }
                }
            }
            frontier = next;
            if words.len() > 2_000_000 {
                return Err(CbfError::SizeLimit { n: words.len(), limit: 2_000_000 });
            }
        }
        let lid = |l: Letter| letter_base[l.0] + l.1 - 1;
        let nw = words.len();
        let mut prepend = vec![vec![None; n_letters]; nw];
        let mut append = vec![vec![None; n_letters]; nw];
        let mut first = vec![None; nw];
        let mut last = vec![None; nw];
        let mut deltas = Vec::with_capacity(nw);
        for (w, word) in words.iter().enumerate() {
            if let Some(&l) = word.first() {
                first[w] = Some((l, index[&word[1..]]));
            }
            if let Some(&l) = word.last() {
                last[w] = Some((l, index[&word[..word.len() - 1]]));
            }
            for (fi, f) in factors.iter().enumerate() {
                for c in 1..=f.reduced_dim() {
                    if word.first().map(|l| l.0) != Some(fi) {
                        let mut v = vec![(fi, c)];
                        v.extend_from_slice(word);
                        prepend[w][lid((fi, c))] = index.get(&v).copied();
                    }
                    if word.last().map(|l| l.0) != Some(fi) {
                        let mut v = word.clone();
                        v.push((fi, c));
                        append[w][lid((fi, c))] = index.get(&v).copied();
                    }
                }
            }
            let mut d = Mat::identity(ctx.dim_d());
            for &(fi, c) in word {
                d = d.mul(&factors[fi].deltas[c - 1]);
            }
            deltas.push(d);
        }
        Ok(FockSpace { ctx, factors, max_len, words, letter_base, prepend, append, first, last, deltas })
    }

    /// The algebra context.
    pub fn context(&self) -> &AlgebraContext<S> {
        &self.ctx
    }

    /// The factors.
    pub fn factors(&self) -> &[Factor<S>] {
        &self.factors
    }

    /// Truncation length.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of basis words, vacuum included.
    pub fn basis_count(&self) -> usize {
        self.words.len()
    }

    /// The words, as `(factor, copy)` letters with copies from 1.
    pub fn words(&self) -> &[Vec<(usize, usize)>] {
        &self.words
    }

    fn lid(&self, f: usize, c: usize) -> usize {
        self.letter_base[f] + c - 1
    }

    /// `λ_k(A)` after checking sizes.
    pub fn lift(&self, factor: usize, side: Face, a: BlockOp<S>) -> Result<Op<S>> {
        let f = self
            .factors
            .get(factor)
            .ok_or_else(|| CbfError::Validation(format!("no factor {factor}")))?;
        if a.size != f.reduced_dim() + 1 {
            return Err(CbfError::Dimension { expected: f.reduced_dim() + 1, found: a.size });
        }
        if a.k != self.ctx.dim_b() {
            return Err(CbfError::Dimension { expected: self.ctx.dim_b(), found: a.k });
        }
        let a = Arc::new(a);
        Ok(match side {
            Face::Left => Op::Left(factor, a),
            Face::Right => Op::Right(factor, a),
        })
    }

    /// `1 ⊕ 0`.
    pub fn vacuum(&self) -> Vector<S> {
        let mut coeffs = vec![None; self.words.len()];
        coeffs[0] = Some(Mat::identity(self.ctx.dim_b()));
        Vector { coeffs }
    }

    fn empty(&self) -> Vector<S> {
        Vector { coeffs: vec![None; self.words.len()] }
    }

    /// Applies an operator.
    pub fn apply(&self, op: &Op<S>, v: &Vector<S>) -> Result<Vector<S>> {
        let trunc = CbfError::Truncation { max_len: self.max_len };
        match op {
            Op::Left(k, a) => {
                let mut out = self.empty();
                for (w, c) in v.coeffs.iter().enumerate() {
                    let Some(c) = c else { continue };
                    let (i, rest) = match self.first[w] {
                        Some(((f, i), rest)) if f == *k => (i, rest),
                        _ => (0, w),
                    };
                    for j in 0..a.size {
                        let blk = a.get(j, i);
                        if blk.is_zero() {
                            continue;
                        }
                        let x = blk.mul(c);
                        if x.is_zero() {
                            continue;
                        }
                        let target = if j == 0 {
                            rest
                        } else {
                            self.prepend[rest][self.lid(*k, j)].ok_or(trunc.clone())?
                        };
                        out.add_at(target, x);
                    }
                }
                Ok(out.prune())
            }
            Op::Right(k, a) => {
                let mut out = self.empty();
                for (w, c) in v.coeffs.iter().enumerate() {
                    let Some(c) = c else { continue };
                    let (i, init) = match self.last[w] {
                        Some(((f, i), init)) if f == *k => (i, init),
                        _ => (0, w),
                    };
                    for j in 0..a.size {
                        let blk = a.get(i, j);
                        if blk.is_zero() {
                            continue;
                        }
                        let x = c.mul(blk);
                        if x.is_zero() {
                            continue;
                        }
                        let target = if j == 0 {
                            init
                        } else {
                            self.append[init][self.lid(*k, j)].ok_or(trunc.clone())?
                        };
                        out.add_at(target, x);
                    }
                }
                Ok(out.prune())
            }
            Op::LMul(b) => Ok(Vector { coeffs: v.coeffs.iter().map(|c| c.as_ref().map(|c| b.mul(c))).collect() }
                .prune()),
            Op::RMul(b) => Ok(Vector { coeffs: v.coeffs.iter().map(|c| c.as_ref().map(|c| c.mul(b))).collect() }
                .prune()),
            Op::Combo(terms) => {
                let mut out = self.empty();
                for (s, t) in terms {
                    let y = self.apply(t, v)?;
                    for (w, c) in y.coeffs.into_iter().enumerate() {
                        if let Some(c) = c {
                            out.add_at(w, c.scale(s));
                        }
                    }
                }
                Ok(out.prune())
            }
            Op::Prod(ops) => {
                let mut cur = v.clone();
                for t in ops.iter().rev() {
                    cur = self.apply(t, &cur)?;
                }
                Ok(cur)
            }
        }
    }

    /// `p(v)`: the vacuum coefficient.
    pub fn expect_e(&self, v: &Vector<S>) -> Mat<S> {
        v.coeffs[0].clone().unwrap_or_else(|| Mat::zero(self.ctx.dim_b()))
    }

    /// `q(v) = Σ_w ι(c_w) Δ_w`.
    pub fn expect_f(&self, v: &Vector<S>) -> Mat<S> {
        let mut out = Mat::zero(self.ctx.dim_d());
        for (w, c) in v.coeffs.iter().enumerate() {
            if let Some(c) = c {
                let d = &self.deltas[w];
                if !d.is_zero() {
                    out.add_assign(&self.ctx.embed(c).mul(d));
                }
            }
        }
        out
    }

    /// `(E(T), F(T))` for `T` applied to the vacuum.
    pub fn expectations(&self, op: &Op<S>) -> Result<(Mat<S>, Mat<S>)> {
        let v = self.apply(op, &self.vacuum())?;
        Ok((self.expect_e(&v), self.expect_f(&v)))
    }
}

/// The two-state functional of a free product, with a table of atomic
/// operators referenced by [`Piece::Atom`].
#[derive(Debug)]
pub struct FockPair<S: Scalar> {
    space: Arc<FockSpace<S>>,
    atoms: Vec<Option<Op<S>>>,
    cache: RefCell<BTreeMap<Vec<Piece<S>>, Arc<Vector<S>>>>,
}

const CACHE_CAP: usize = 60_000;

impl<S: Scalar> FockPair<S> {
    /// Wraps a space and its atoms. `None` atoms belong to another pair.
    pub fn new(space: Arc<FockSpace<S>>, atoms: Vec<Option<Op<S>>>) -> Self {
        FockPair { space, atoms, cache: RefCell::new(BTreeMap::new()) }
    }

    /// The underlying space.
    pub fn space(&self) -> &Arc<FockSpace<S>> {
        &self.space
    }

    /// The atom table.
    pub fn atoms(&self) -> &[Option<Op<S>>] {
        &self.atoms
    }

    /// The vector `P Ω` for a product of pieces.
    pub fn apply_pieces(&self, pieces: &[Piece<S>]) -> Result<Arc<Vector<S>>> {
        let mut start = pieces.len();
        let mut cur: Option<Arc<Vector<S>>> = None;
        {
            let cache = self.cache.borrow();
            for s in 0..pieces.len() {
                if let Some(v) = cache.get(&pieces[s..]) {
                    start = s;
                    cur = Some(v.clone());
                    break;
                }
            }
        }
        let mut cur = match cur {
            Some(v) => v,
            None => Arc::new(self.space.vacuum()),
        };
        for s in (0..start).rev() {
            let next = match &pieces[s] {
                Piece::Atom(a) => {
                    let op = self
                        .atoms
                        .get(*a)
                        .and_then(|o| o.as_ref())
                        .ok_or_else(|| CbfError::Validation(format!("atom {a} is not defined here")))?;
                    self.space.apply(op, &cur)?
                }
                Piece::L(b) => self.space.apply(&Op::LMul((**b).clone()), &cur)?,
                Piece::R(b) => self.space.apply(&Op::RMul((**b).clone()), &cur)?,
            };
            cur = Arc::new(next);
            let mut cache = self.cache.borrow_mut();
            if cache.len() >= CACHE_CAP {
                cache.clear();
            }
            cache.insert(pieces[s..].to_vec(), cur.clone());
        }
        Ok(cur)
    }
}

impl<S: Scalar> PairFunctional<S> for FockPair<S> {
    fn context(&self) -> &AlgebraContext<S> {
        &self.space.ctx
    }

    fn e(&self, _class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        Ok(self.space.expect_e(&*self.apply_pieces(pieces)?))
    }

    fn f(&self, _class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        Ok(self.space.expect_f(&*self.apply_pieces(pieces)?))
    }
}
