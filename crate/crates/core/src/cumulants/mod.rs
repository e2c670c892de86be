//! Moment and cumulant functionals indexed by bi-non-crossing partitions.
//!
//! Inputs are [`Word`]s: a face word, a family label per position and one
//! [`Entry`] per position. An entry is a product of [`Piece`]s, either an
//! atomic operator or a `B`-operator `L_b`/`R_b`. Every value is computed
//! from a [`PairFunctional`], which evaluates the pair `(E, F)` on a
//! flattened product.

mod checks;
mod theta;

pub use checks::*;
pub use theta::*;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;

use crate::algebra::AlgebraContext;
use crate::bnc::{BncPartition, Chi, Face, Lattice, Omega, DEFAULT_MAX_N};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// A factor of an entry.
#[derive(Clone, Debug)]
pub enum Piece<S: Scalar> {
    /// The atomic operator with this id.
    Atom(usize),
    /// `L_b`.
    L(Arc<Mat<S>>),
    /// `R_b`.
    R(Arc<Mat<S>>),
}

impl<S: Scalar> Piece<S> {
    /// `L_b`.
    pub fn left(b: Mat<S>) -> Self {
        Piece::L(Arc::new(b))
    }

    /// `R_b`.
    pub fn right(b: Mat<S>) -> Self {
        Piece::R(Arc::new(b))
    }

    /// `L_b` or `R_b` by face.
    pub fn on(face: Face, b: Mat<S>) -> Self {
        match face {
            Face::Left => Self::left(b),
            Face::Right => Self::right(b),
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Piece::Atom(_) => 0,
            Piece::L(_) => 1,
            Piece::R(_) => 2,
        }
    }
}

impl<S: Scalar> Ord for Piece<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Piece::Atom(a), Piece::Atom(b)) => a.cmp(b),
            (Piece::L(a), Piece::L(b)) | (Piece::R(a), Piece::R(b)) => {
                if Arc::ptr_eq(a, b) {
                    Ordering::Equal
                } else {
                    a.key_cmp(b)
                }
            }
            _ => self.tag().cmp(&o.tag()),
        }
    }
}

impl<S: Scalar> PartialOrd for Piece<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<S: Scalar> PartialEq for Piece<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Piece<S> {}

/// A product of pieces.
pub type Entry<S> = Vec<Piece<S>>;

/// The pair `(E, F)` evaluated on products.
///
/// `class` is the family every atom of the product belongs to; pairs that
/// realise one family ignore it.
pub trait PairFunctional<S: Scalar> {
    /// The algebras `B ⊂ D`.
    fn context(&self) -> &AlgebraContext<S>;
    /// `E` of the product, in `B`.
    fn e(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>>;
    /// `F` of the product, in `D`.
    fn f(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>>;
}

/// One pair per family, dispatched on the class label.
pub struct PerClass<'a, S: Scalar> {
    pairs: Vec<&'a dyn PairFunctional<S>>,
}

impl<'a, S: Scalar> PerClass<'a, S> {
    /// All pairs must share `B ⊂ D`.
    pub fn new(pairs: Vec<&'a dyn PairFunctional<S>>) -> Result<Self> {
        let first = pairs.first().ok_or_else(|| CbfError::Validation("no pairs".into()))?;
        let (kb, kd) = (first.context().dim_b(), first.context().dim_d());
        for p in &pairs {
            if p.context().dim_b() != kb {
                return Err(CbfError::Dimension { expected: kb, found: p.context().dim_b() });
            }
            if p.context().dim_d() != kd {
                return Err(CbfError::Dimension { expected: kd, found: p.context().dim_d() });
            }
        }
        Ok(PerClass { pairs })
    }

    fn get(&self, class: usize) -> Result<&'a dyn PairFunctional<S>> {
        self.pairs
            .get(class)
            .copied()
            .ok_or_else(|| CbfError::Validation(alloc::format!("no pair for family {class}")))
    }
}

impl<S: Scalar> PairFunctional<S> for PerClass<'_, S> {
    fn context(&self) -> &AlgebraContext<S> {
        self.pairs[0].context()
    }

    fn e(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        self.get(class)?.e(class, pieces)
    }

    fn f(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        self.get(class)?.f(class, pieces)
    }
}

/// Face word, family labels and entries.
#[derive(Clone, Debug)]
pub struct Word<S: Scalar> {
    chi: Chi,
    labels: Vec<usize>,
    entries: Vec<Entry<S>>,
}

impl<S: Scalar> Word<S> {
    /// A word whose positions all belong to family 0.
    pub fn new(chi: Chi, entries: Vec<Entry<S>>) -> Result<Self> {
        let labels = vec![0; chi.len()];
        Self::with_labels(chi, labels, entries)
    }

    /// A word with family labels.
    pub fn with_labels(chi: Chi, labels: Vec<usize>, entries: Vec<Entry<S>>) -> Result<Self> {
        if chi.is_empty() {
            return Err(CbfError::Validation("empty word".into()));
        }
        if labels.len() != chi.len() || entries.len() != chi.len() {
            return Err(CbfError::Validation("faces, labels and entries differ in length".into()));
        }
        Ok(Word { chi, labels, entries })
    }

    /// Faces.
    pub fn chi(&self) -> &Chi {
        &self.chi
    }

    /// Family labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Entries.
    pub fn entries(&self) -> &[Entry<S>] {
        &self.entries
    }

    /// Length.
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    /// Never true for a constructed word.
    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    /// Subword on ascending positions.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        Word {
            chi: self.chi.restrict(subset),
            labels: subset.iter().map(|&i| self.labels[i]).collect(),
            entries: subset.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// The same word with every position in family 0, for pairs that
    /// realise all families at once.
    pub fn unlabeled(&self) -> Self {
        Word { chi: self.chi.clone(), labels: vec![0; self.len()], entries: self.entries.clone() }
    }

    /// Replaces the entry at `k`.
    pub fn set_entry(&mut self, k: usize, e: Entry<S>) {
        self.entries[k] = e;
    }

    /// The product `Z_1 ⋯ Z_n`.
    pub fn flatten(&self) -> Vec<Piece<S>> {
        self.entries.iter().flat_map(|e| e.iter().cloned()).collect()
    }

    /// Identifies positions `q` and `q+1` (0-based), multiplying entries.
    pub fn merge_adjacent(&self, q: usize) -> Result<Self> {
        if q + 1 >= self.len() {
            return Err(CbfError::Validation("q must be below n".into()));
        }
        let chi = self.chi.remove(q)?;
        if self.chi.face(q) != self.chi.face(q + 1) {
            return Err(CbfError::Face("merged positions must share a face".into()));
        }
        if self.labels[q] != self.labels[q + 1] {
            return Err(CbfError::MixedFamilies(self.labels[q], self.labels[q + 1]));
        }
        let mut entries = self.entries.clone();
        let tail = entries.remove(q + 1);
        entries[q].extend(tail);
        let mut labels = self.labels.clone();
        labels.remove(q + 1);
        Ok(Word { chi, labels, entries })
    }

    fn class(&self) -> Result<usize> {
        class_of(&self.labels)
    }
}

impl<S: Scalar> Ord for Word<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.chi
            .cmp(&o.chi)
            .then_with(|| self.labels.cmp(&o.labels))
            .then_with(|| self.entries.cmp(&o.entries))
    }
}

impl<S: Scalar> PartialOrd for Word<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<S: Scalar> PartialEq for Word<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Word<S> {}

fn class_of(labels: &[usize]) -> Result<usize> {
    let c = labels[0];
    match labels.iter().find(|&&l| l != c) {
        Some(&d) => Err(CbfError::MixedFamilies(c, d)),
        None => Ok(c),
    }
}

/// Which top-level functional a leaf of a reduction evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Leaf {
    /// `E` of the product.
    E,
    /// `F` of the product.
    F,
    /// `κ_{1}`.
    Kappa,
    /// `K_{1}`.
    K,
}

/// Which neighbour receives the value of a nested block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Absorb {
    /// The `≺`-predecessor of the block.
    Before,
    /// The `≺`-successor of the block.
    After,
}

struct LatticeInfo {
    lattice: Lattice,
    mu_top: Vec<(usize, i64)>,
}

/// Evaluates `E_π`, `F_π`, `κ_π` and `K_π` against a pair functional, with
/// memoised top-level cumulants.
pub struct Engine<'a, S: Scalar> {
    pair: &'a dyn PairFunctional<S>,
    max_n: usize,
    lattices: RefCell<BTreeMap<(usize, u64), Arc<LatticeInfo>>>,
    kappa_memo: RefCell<BTreeMap<Word<S>, Mat<S>>>,
    k_memo: RefCell<BTreeMap<Word<S>, Mat<S>>>,
}

const MEMO_CAP: usize = 200_000;

impl<'a, S: Scalar> Engine<'a, S> {
    /// Engine with the default size cap.
    pub fn new(pair: &'a dyn PairFunctional<S>) -> Self {
        Self::with_max_n(pair, DEFAULT_MAX_N)
    }

    /// Engine refusing words longer than `max_n`.
    pub fn with_max_n(pair: &'a dyn PairFunctional<S>, max_n: usize) -> Self {
        Engine {
            pair,
            max_n,
            lattices: RefCell::new(BTreeMap::new()),
            kappa_memo: RefCell::new(BTreeMap::new()),
            k_memo: RefCell::new(BTreeMap::new()),
        }
    }

    /// The underlying pair.
    pub fn pair(&self) -> &'a dyn PairFunctional<S> {
        self.pair
    }

    /// The algebras.
    pub fn context(&self) -> &AlgebraContext<S> {
        self.pair.context()
    }

    fn lattice(&self, chi: &Chi) -> Result<Arc<LatticeInfo>> {
        let key = (chi.len(), chi.bits());
        if let Some(l) = self.lattices.borrow().get(&key) {
            return Ok(l.clone());
        }
        let lattice = Lattice::new(chi, self.max_n)?;
        let mu_top = lattice.mobius_down(lattice.top());
        let info = Arc::new(LatticeInfo { lattice, mu_top });
        self.lattices.borrow_mut().insert(key, info.clone());
        Ok(info)
    }

    /// `BNC(χ)` for a face word.
    pub fn bnc(&self, chi: &Chi) -> Result<Vec<BncPartition>> {
        Ok(self.lattice(chi)?.lattice.elements().to_vec())
    }

    fn check(&self, w: &Word<S>, pi: &BncPartition) -> Result<()> {
        if w.len() > self.max_n {
            return Err(CbfError::SizeLimit { n: w.len(), limit: self.max_n });
        }
        if pi.chi() != w.chi() {
            return Err(CbfError::Validation("partition and word have different faces".into()));
        }
        Ok(())
    }

    /// `E(Z_1 ⋯ Z_n)`.
    pub fn e_top(&self, w: &Word<S>) -> Result<Mat<S>> {
        self.pair.e(w.class()?, &w.flatten())
    }

    /// `F(Z_1 ⋯ Z_n)`.
    pub fn f_top(&self, w: &Word<S>) -> Result<Mat<S>> {
        self.pair.f(w.class()?, &w.flatten())
    }

    fn leaf(&self, leaf: Leaf, w: &Word<S>) -> Result<Mat<S>> {
        match leaf {
            Leaf::E => self.e_top(w),
            Leaf::F => self.f_top(w),
            Leaf::Kappa => self.kappa_top(w),
            Leaf::K => self.k_top(w),
        }
    }

    /// `E_π` by removing the lowest-starting block and feeding its value
    /// to its neighbour, until one block remains.
    pub fn e_pi(&self, w: &Word<S>, pi: &BncPartition) -> Result<Mat<S>> {
        self.check(w, pi)?;
        let mut st = State::new(w);
        let all: Vec<usize> = (0..w.len()).collect();
        let mut blocks = pi.blocks().to_vec();
        self.absorb_lowest(&mut st, &all, &mut blocks)?;
        self.e_top(&st.sub(&blocks[0]))
    }

    /// `F_π`: product over `χ`-intervals, with nested blocks reduced by
    /// `E` first.
    pub fn f_pi(&self, w: &Word<S>, pi: &BncPartition) -> Result<Mat<S>> {
        self.check(w, pi)?;
        self.by_intervals(w, pi, |_| true)
    }

    /// `Θ`-type product: each `χ`-interval evaluated by `E` or `F` after
    /// `E`-reduction of its nested blocks. `use_f[j]` picks `F` for the
    /// `j`-th interval in `≺` order.
    pub fn interval_product(&self, w: &Word<S>, pi: &BncPartition, use_f: &[bool]) -> Result<Mat<S>> {
        self.check(w, pi)?;
        let dec = pi.chi_intervals();
        if use_f.len() != dec.intervals.len() {
            return Err(CbfError::Validation("one label per interval expected".into()));
        }
        self.by_intervals(w, pi, |j| use_f[j])
    }

    fn by_intervals(&self, w: &Word<S>, pi: &BncPartition, use_f: impl Fn(usize) -> bool) -> Result<Mat<S>> {
        let dec = pi.chi_intervals();
        let mut st = State::new(w);
        let mut acc: Option<Mat<S>> = None;
        for (j, piece) in dec.intervals.iter().enumerate() {
            let mut blocks: Vec<Vec<usize>> =
                pi.blocks().iter().filter(|b| piece.binary_search(&b[0]).is_ok()).cloned().collect();
            self.absorb_lowest(&mut st, piece, &mut blocks)?;
            let sub = st.sub(&blocks[0]);
            let v = if use_f(j) { self.f_top(&sub)? } else { self.context().embed(&self.e_top(&sub)?) };
            acc = Some(match acc {
                None => v,
                Some(a) => a.mul(&v),
            });
        }
        Ok(acc.unwrap())
    }

    // Repeatedly removes the block with the largest minimum, inserting its
    // `E`-value into the adjacent block, until one block is left.
    fn absorb_lowest(&self, st: &mut State<S>, universe: &[usize], blocks: &mut Vec<Vec<usize>>) -> Result<()> {
        let rank = st.chi.rank();
        while blocks.len() > 1 {
            let vi = (0..blocks.len()).max_by_key(|&i| blocks[i][0]).unwrap();
            let v = blocks.remove(vi);
            let m = v[0];
            let val = self.e_top(&st.sub(&v))?;
            let face = st.chi.face(m);
            let tail: Vec<usize> =
                universe.iter().copied().filter(|&j| j > m && st.alive[j] && v.binary_search(&j).is_err()).collect();
            if tail.is_empty() {
                let target = universe.iter().copied().filter(|&j| j < m && st.alive[j]).max().unwrap();
                st.entries[target].push(Piece::on(face, val));
            } else {
                let pick = match face {
                    Face::Left => tail.iter().copied().min_by_key(|&j| rank[j]),
                    Face::Right => tail.iter().copied().max_by_key(|&j| rank[j]),
                }
                .unwrap();
                let wb = blocks.iter().find(|b| b.binary_search(&pick).is_ok()).unwrap();
                let k = *wb.iter().find(|&&j| j > m).unwrap();
                st.entries[k].insert(0, Piece::on(face, val));
            }
            for &j in &v {
                st.alive[j] = false;
            }
        }
        Ok(())
    }

    /// Generic multiplicative extension of top-level values: nested blocks
    /// evaluated by `inner` are fed to a `≺`-neighbour, the outer block of
    /// each `χ`-interval is evaluated by `outer`, and intervals multiply in
    /// `≺` order.
    pub fn reduce_pi(&self, w: &Word<S>, pi: &BncPartition, inner: Leaf, outer: Leaf, side: Absorb) -> Result<Mat<S>> {
        self.check(w, pi)?;
        if matches!(inner, Leaf::F | Leaf::K) {
            return Err(CbfError::Validation("nested values must be B-valued".into()));
        }
        let dec = pi.chi_intervals();
        let rank = w.chi().rank();
        let mut st = State::new(w);
        let mut acc: Option<Mat<S>> = None;
        for (piece, &o) in dec.intervals.iter().zip(&dec.outer) {
            let mut nested: Vec<Vec<usize>> = pi
                .blocks()
                .iter()
                .enumerate()
                .filter(|(i, b)| *i != o && piece.binary_search(&b[0]).is_ok())
                .map(|(_, b)| b.clone())
                .collect();
            while !nested.is_empty() {
                let vi = (0..nested.len()).max_by_key(|&i| nested[i][0]).unwrap();
                let v = nested.remove(vi);
                let val = self.leaf(inner, &st.sub(&v))?;
                for &j in &v {
                    st.alive[j] = false;
                }
                let lo = v.iter().map(|&j| rank[j]).min().unwrap();
                let hi = v.iter().map(|&j| rank[j]).max().unwrap();
                let live = piece.iter().copied().filter(|&j| st.alive[j]);
                match side {
                    Absorb::Before => {
                        let p = live.filter(|&j| rank[j] < lo).max_by_key(|&j| rank[j]).unwrap();
                        match st.chi.face(p) {
                            Face::Left => st.entries[p].push(Piece::left(val)),
                            Face::Right => st.entries[p].insert(0, Piece::right(val)),
                        }
                    }
                    Absorb::After => {
                        let q = live.filter(|&j| rank[j] > hi).min_by_key(|&j| rank[j]).unwrap();
                        match st.chi.face(q) {
                            Face::Left => st.entries[q].insert(0, Piece::left(val)),
                            Face::Right => st.entries[q].push(Piece::right(val)),
                        }
                    }
                }
            }
            let v = self.leaf(outer, &st.sub(&pi.blocks()[o]))?;
            acc = Some(match acc {
                None => v,
                Some(a) => a.mul(&v),
            });
        }
        Ok(acc.unwrap())
    }

    /// `κ_{1_χ}` by Möbius inversion of `E_σ`.
    pub fn kappa_top(&self, w: &Word<S>) -> Result<Mat<S>> {
        if w.len() == 1 {
            return self.e_top(w);
        }
        if let Some(v) = self.kappa_memo.borrow().get(w) {
            return Ok(v.clone());
        }
        let info = self.lattice(w.chi())?;
        let mut acc = Mat::zero(self.context().dim_b());
        for &(s, m) in &info.mu_top {
            let e = self.e_pi(w, &info.lattice.elements()[s])?;
            acc.add_assign(&e.scale(&S::from_int(m)));
        }
        remember(&self.kappa_memo, w, &acc);
        Ok(acc)
    }

    /// `κ_π = Σ_{σ ≤ π} E_σ μ(σ, π)`.
    pub fn kappa_pi(&self, w: &Word<S>, pi: &BncPartition) -> Result<Mat<S>> {
        self.check(w, pi)?;
        if pi.is_one() {
            return self.kappa_top(w);
        }
        let info = self.lattice(w.chi())?;
        let idx = info.lattice.index_of(pi).unwrap();
        let mut acc = Mat::zero(self.context().dim_b());
        for (s, m) in info.lattice.mobius_down(idx) {
            let e = self.e_pi(w, &info.lattice.elements()[s])?;
            acc.add_assign(&e.scale(&S::from_int(m)));
        }
        Ok(acc)
    }

    /// `K_{1_χ} = F(Z_1 ⋯ Z_n) − Σ_{π ≠ 1} K_π`.
    pub fn k_top(&self, w: &Word<S>) -> Result<Mat<S>> {
        if w.len() == 1 {
            return self.f_top(w);
        }
        if let Some(v) = self.k_memo.borrow().get(w) {
            return Ok(v.clone());
        }
        let info = self.lattice(w.chi())?;
        let mut acc = self.f_top(w)?;
        for (i, p) in info.lattice.elements().iter().enumerate() {
            if i == info.lattice.top() {
                continue;
            }
            acc = acc.sub(&self.k_pi(w, p)?);
        }
        remember(&self.k_memo, w, &acc);
        Ok(acc)
    }

    /// `K_π`, multiplicative over intervals with `κ` on nested blocks.
    pub fn k_pi(&self, w: &Word<S>, pi: &BncPartition) -> Result<Mat<S>> {
        self.check(w, pi)?;
        if pi.is_one() {
            return self.k_top(w);
        }
        self.reduce_pi(w, pi, Leaf::Kappa, Leaf::K, Absorb::Before)
    }

    /// `E(Z_1 ⋯ Z_n) = Σ_π κ_π`.
    pub fn e_from_cumulants(&self, w: &Word<S>) -> Result<Mat<S>> {
        let info = self.lattice(w.chi())?;
        let mut acc = Mat::zero(self.context().dim_b());
        for p in info.lattice.elements() {
            acc.add_assign(&self.reduce_pi(w, p, Leaf::Kappa, Leaf::Kappa, Absorb::Before)?);
        }
        Ok(acc)
    }

    /// `F(Z_1 ⋯ Z_n) = Σ_π K_π`.
    pub fn f_from_cumulants(&self, w: &Word<S>) -> Result<Mat<S>> {
        let info = self.lattice(w.chi())?;
        let mut acc = Mat::zero(self.context().dim_d());
        for p in info.lattice.elements() {
            acc.add_assign(&self.k_pi(w, p)?);
        }
        Ok(acc)
    }

    /// Moment `E` of a mixed word from the per-family pairs:
    /// `Σ_{π ≤ ω} [Σ_{π ≤ σ ≤ ω} μ(π, σ)] E_π`.
    pub fn cbifree_moment_e(&self, w: &Word<S>) -> Result<Mat<S>> {
        let omega = Omega::new(w.labels().to_vec());
        let info = self.lattice(w.chi())?;
        let els = info.lattice.elements();
        let mut acc = Mat::zero(self.context().dim_b());
        for (i, p) in els.iter().enumerate() {
            if !p.leq_omega(&omega)? {
                continue;
            }
            let c: i64 = info
                .lattice
                .mobius_up(i)
                .into_iter()
                .filter(|&(s, _)| els[s].leq_omega(&omega).unwrap_or(false))
                .map(|(_, m)| m)
                .sum();
            if c != 0 {
                acc.add_assign(&self.e_pi(w, p)?.scale(&S::from_int(c)));
            }
        }
        Ok(acc)
    }

    /// Moment `F` of a mixed word from the per-family pairs:
    /// `Σ_{π ≤ ω} K_π`.
    pub fn cbifree_moment_f(&self, w: &Word<S>) -> Result<Mat<S>> {
        let omega = Omega::new(w.labels().to_vec());
        let info = self.lattice(w.chi())?;
        let mut acc = Mat::zero(self.context().dim_d());
        for p in info.lattice.elements() {
            if p.leq_omega(&omega)? {
                acc.add_assign(&self.k_pi(w, p)?);
            }
        }
        Ok(acc)
    }
}

fn remember<S: Scalar>(memo: &RefCell<BTreeMap<Word<S>, Mat<S>>>, w: &Word<S>, v: &Mat<S>) {
    let mut m = memo.borrow_mut();
    if m.len() >= MEMO_CAP {
        m.clear();
    }
    m.insert(w.clone(), v.clone());
}

struct State<S: Scalar> {
    chi: Chi,
    labels: Vec<usize>,
    entries: Vec<Entry<S>>,
    alive: Vec<bool>,
}

impl<S: Scalar> State<S> {
    fn new(w: &Word<S>) -> Self {
        State { chi: w.chi.clone(), labels: w.labels.clone(), entries: w.entries.clone(), alive: vec![true; w.len()] }
    }

    fn sub(&self, positions: &[usize]) -> Word<S> {
        Word {
            chi: self.chi.restrict(positions),
            labels: positions.iter().map(|&i| self.labels[i]).collect(),
            entries: positions.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }
}
