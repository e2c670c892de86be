//! Structural identities of the cumulant pair, evaluated on concrete words.
//!
//! Each function returns both sides of an identity so callers can compare
//! them exactly or within a tolerance.

use alloc::vec::Vec;

use crate::algebra::AlgebraContext;
use crate::bnc::{BncPartition, Chi, Face};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

use super::{Engine, Entry, PairFunctional, Piece, Word};

/// Both sides of an identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Sides<S: Scalar> {
    /// Left-hand side.
    pub lhs: Mat<S>,
    /// Right-hand side.
    pub rhs: Mat<S>,
}

impl<S: Scalar> Sides<S> {
    /// Exact equality, or equality within `tol` in float mode.
    pub fn holds(&self, tol: f64) -> bool {
        if S::is_exact() {
            self.lhs == self.rhs
        } else {
            self.lhs.max_abs_diff(&self.rhs) <= tol
        }
    }
}

/// Outcome of the four reduction conditions on one word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    /// Moving a trailing `B`-operator.
    pub cond1: bool,
    /// Moving a leading `B`-operator.
    pub cond2: bool,
    /// Factorisation over `χ`-intervals.
    pub cond3: bool,
    /// Absorption of a nested interval.
    pub cond4: bool,
}

impl AxiomReport {
    /// All four hold.
    pub fn all(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3 && self.cond4
    }
}

/// A partition-indexed function `(word, π) ↦ value`.
pub type PartitionFn<'f, S> = dyn Fn(&Word<S>, &BncPartition) -> Result<Mat<S>> + 'f;

fn same<S: Scalar>(a: &Mat<S>, b: &Mat<S>, tol: f64) -> bool {
    if S::is_exact() {
        a == b
    } else {
        a.max_abs_diff(b) <= tol
    }
}

fn with_piece<S: Scalar>(w: &Word<S>, k: usize, piece: Piece<S>, front: bool) -> Word<S> {
    let mut e: Entry<S> = w.entries()[k].clone();
    if front {
        e.insert(0, piece);
    } else {
        e.push(piece);
    }
    let mut out = w.clone();
    out.set_entry(k, e);
    out
}

/// Checks the reduction conditions for `outer` on `w`.
///
/// `inner` supplies the nested values in the absorption condition. With
/// `modified`, absorption is only required when the `≺`-extremes share a
/// block. When `ctx` is given the values are `D`-valued and `b` is
/// embedded before multiplying.
pub fn axiom_checks<S: Scalar>(
    w: &Word<S>,
    b: &Mat<S>,
    inner: &PartitionFn<'_, S>,
    outer: &PartitionFn<'_, S>,
    modified: bool,
    ctx: Option<&AlgebraContext<S>>,
    max_n: usize,
    tol: f64,
) -> Result<AxiomReport> {
    let n = w.len();
    let chi = w.chi().clone();
    let one = BncPartition::one(&chi);
    let bd = match ctx {
        Some(c) => c.b_to_d(b)?,
        None => b.clone(),
    };
    let top = |x: &Word<S>| outer(x, &BncPartition::one(x.chi()));
    let base = top(w)?;
    let mut rep = AxiomReport::default();

    // (1)
    let last = chi.face(n - 1);
    let lhs = top(&with_piece(w, n - 1, Piece::on(last, b.clone()), false))?;
    let q = (0..n).rev().find(|&k| chi.face(k) != last);
    let rhs = match (q, last) {
        (Some(q), f) => top(&with_piece(w, q, Piece::on(f.flip(), b.clone()), false))?,
        (None, Face::Left) => base.mul(&bd),
        (None, Face::Right) => bd.mul(&base),
    };
    rep.cond1 = same(&lhs, &rhs, tol);

    // (2)
    rep.cond2 = true;
    for p in 0..n {
        let f = chi.face(p);
        let lhs = top(&with_piece(w, p, Piece::on(f, b.clone()), true))?;
        let q = (0..p).rev().find(|&k| chi.face(k) == f);
        let rhs = match (q, f) {
            (Some(q), _) => top(&with_piece(w, q, Piece::on(f, b.clone()), false))?,
            (None, Face::Left) => bd.mul(&base),
            (None, Face::Right) => base.mul(&bd),
        };
        rep.cond2 &= same(&lhs, &rhs, tol);
    }

    // (3) and (4)
    rep.cond3 = true;
    rep.cond4 = true;
    let rank = chi.rank();
    for pi in crate::bnc::enumerate_bnc(&chi, max_n)? {
        let value = outer(w, &pi)?;
        let dec = pi.chi_intervals();
        if dec.intervals.len() > 1 {
            let mut prod: Option<Mat<S>> = None;
            for iv in &dec.intervals {
                let v = outer(&w.restrict(iv), &pi.restrict(iv)?)?;
                prod = Some(match prod {
                    None => v,
                    Some(a) => a.mul(&v),
                });
            }
            rep.cond3 &= same(&value, &prod.unwrap(), tol);
        }
        if pi == one || (modified && dec.intervals.len() > 1) {
            continue;
        }
        let kinds = pi.classify_blocks();
        let Some(vi) = (0..pi.len())
            .filter(|&i| kinds[i] == crate::bnc::BlockKind::Interior)
            .max_by_key(|&i| pi.blocks()[i][0])
        else {
            continue;
        };
        let v = &pi.blocks()[vi];
        let wset: Vec<usize> = (0..n).filter(|j| v.binary_search(j).is_err()).collect();
        let val = inner(&w.restrict(v), &pi.restrict(v)?)?;
        let lo = v.iter().map(|&j| rank[j]).min().unwrap();
        let hi = v.iter().map(|&j| rank[j]).max().unwrap();
        let p = *wset.iter().filter(|&&j| rank[j] < lo).max_by_key(|&&j| rank[j]).unwrap();
        let q = *wset.iter().filter(|&&j| rank[j] > hi).min_by_key(|&&j| rank[j]).unwrap();
        let pw = pi.restrict(&wset)?;
        let via_p = match chi.face(p) {
            Face::Left => with_piece(w, p, Piece::left(val.clone()), false),
            Face::Right => with_piece(w, p, Piece::right(val.clone()), true),
        };
        let via_q = match chi.face(q) {
            Face::Left => with_piece(w, q, Piece::left(val.clone()), true),
            Face::Right => with_piece(w, q, Piece::right(val), false),
        };
        let a = outer(&via_p.restrict(&wset), &pw)?;
        let c = outer(&via_q.restrict(&wset), &pw)?;
        rep.cond4 &= same(&value, &a, tol) && same(&value, &c, tol);
    }
    Ok(rep)
}

/// The four reduction checks for `E`, `κ`, `F` and `K` on one word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairAxioms {
    /// `E_π`.
    pub e: AxiomReport,
    /// `κ_π`.
    pub kappa: AxiomReport,
    /// `F_π`.
    pub f: AxiomReport,
    /// `K_π`.
    pub k: AxiomReport,
}

/// Both sides of an identity for `κ` and for `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductCheck<S: Scalar> {
    /// `κ` version.
    pub kappa: Sides<S>,
    /// `K` version.
    pub k: Sides<S>,
}

impl<S: Scalar> Engine<'_, S> {
    /// Checks the reduction conditions of `(E, F)` and `(κ, K)` on `w`.
    pub fn pair_axioms(&self, w: &Word<S>, b: &Mat<S>, tol: f64) -> Result<PairAxioms> {
        let ctx = self.context().clone();
        let e = |x: &Word<S>, p: &BncPartition| self.e_pi(x, p);
        let kap = |x: &Word<S>, p: &BncPartition| self.kappa_pi(x, p);
        let f = |x: &Word<S>, p: &BncPartition| self.f_pi(x, p);
        let k = |x: &Word<S>, p: &BncPartition| self.k_pi(x, p);
        Ok(PairAxioms {
            e: axiom_checks(w, b, &e, &e, false, None, self.max_n, tol)?,
            kappa: axiom_checks(w, b, &kap, &kap, false, None, self.max_n, tol)?,
            f: axiom_checks(w, b, &e, &f, true, Some(&ctx), self.max_n, tol)?,
            k: axiom_checks(w, b, &kap, &k, true, Some(&ctx), self.max_n, tol)?,
        })
    }

    /// `κ_1` and `K_1` with the entry at `q` replaced by `L_b` or `R_b`
    /// according to its face.
    pub fn b_insertion_cumulants(&self, w: &Word<S>, q: usize, b: &Mat<S>) -> Result<(Mat<S>, Mat<S>)> {
        if q >= w.len() {
            return Err(CbfError::Validation("position out of range".into()));
        }
        let mut x = w.clone();
        x.set_entry(q, alloc::vec![Piece::on(w.chi().face(q), b.clone())]);
        Ok((self.kappa_top(&x)?, self.k_top(&x)?))
    }

    /// `K_π` of the merged word against `Σ_{σ|_{q=q+1} = π} K_σ`, for every
    /// `π` on the merged face word.
    pub fn merge_lemma(&self, w: &Word<S>, q: usize) -> Result<Vec<(BncPartition, Sides<S>)>> {
        let merged = w.merge_adjacent(q)?;
        let sigmas = self.bnc(w.chi())?;
        let mut out = Vec::new();
        for pi in self.bnc(merged.chi())? {
            let lhs = self.k_pi(&merged, &pi)?;
            let mut rhs = Mat::zero(self.context().dim_d());
            for s in &sigmas {
                if s.merge_adjacent(q)? == pi {
                    rhs.add_assign(&self.k_pi(w, s)?);
                }
            }
            out.push((pi, Sides { lhs, rhs }));
        }
        Ok(out)
    }

    /// Cumulants of grouped products against the sum over `σ` with
    /// `σ ∨ 0̂ = 1`. `sizes` are the consecutive group sizes; faces must
    /// be constant on each group.
    pub fn grouped_cumulants(&self, w: &Word<S>, sizes: &[usize]) -> Result<ProductCheck<S>> {
        if sizes.iter().sum::<usize>() != w.len() || sizes.contains(&0) {
            return Err(CbfError::Validation("group sizes must be positive and sum to n".into()));
        }
        let mut blocks = Vec::new();
        let mut start = 0;
        for &s in sizes {
            blocks.push((start..start + s).collect::<Vec<usize>>());
            start += s;
        }
        for g in &blocks {
            if g.iter().any(|&i| w.chi().face(i) != w.chi().face(g[0])) {
                return Err(CbfError::Face("faces must be constant on each group".into()));
            }
        }
        let zero_hat = BncPartition::new(w.chi().clone(), blocks.clone())?;
        let mut grouped = w.clone();
        for g in blocks.iter().rev() {
            for _ in 1..g.len() {
                grouped = grouped.merge_adjacent(g[0])?;
            }
        }
        let mut k_rhs = Mat::zero(self.context().dim_d());
        let mut kappa_rhs = Mat::zero(self.context().dim_b());
        for s in self.bnc(w.chi())? {
            if s.join(&zero_hat)?.is_one() {
                k_rhs.add_assign(&self.k_pi(w, &s)?);
                kappa_rhs.add_assign(&self.kappa_pi(w, &s)?);
            }
        }
        Ok(ProductCheck {
            kappa: Sides { lhs: self.kappa_top(&grouped)?, rhs: kappa_rhs },
            k: Sides { lhs: self.k_top(&grouped)?, rhs: k_rhs },
        })
    }

    /// The cumulant-pair identity for merging `q` and `q+1`:
    /// `Φ_1(merged) = Φ_1 + Σ_{|π| = 2, q ≁ q+1} Φ_π`, for `κ` and `K`.
    pub fn cumulant_pair_identity(&self, w: &Word<S>, q: usize) -> Result<ProductCheck<S>> {
        let merged = w.merge_adjacent(q)?;
        let mut k_rhs = self.k_top(w)?;
        let mut kappa_rhs = self.kappa_top(w)?;
        for p in self.bnc(w.chi())? {
            if p.len() == 2 && p.labels()[q] != p.labels()[q + 1] {
                k_rhs.add_assign(&self.k_pi(w, &p)?);
                kappa_rhs.add_assign(&self.kappa_pi(w, &p)?);
            }
        }
        Ok(ProductCheck {
            kappa: Sides { lhs: self.kappa_top(&merged)?, rhs: kappa_rhs },
            k: Sides { lhs: self.k_top(&merged)?, rhs: k_rhs },
        })
    }

    /// The moment-pair identity: `E` and `F` of the merged word equal those
    /// of the original.
    pub fn moment_pair_identity(&self, w: &Word<S>, q: usize) -> Result<(Sides<S>, Sides<S>)> {
        let merged = w.merge_adjacent(q)?;
        Ok((
            Sides { lhs: self.e_top(&merged)?, rhs: self.e_top(w)? },
            Sides { lhs: self.f_top(&merged)?, rhs: self.f_top(w)? },
        ))
    }

    /// Swapping an adjacent left-right pair `(k0, k0+1)`: cumulants of the
    /// original and of the swapped word (`κ` then `K`).
    pub fn swap_sides(&self, w: &Word<S>, k0: usize) -> Result<ProductCheck<S>> {
        let n = w.len();
        if k0 + 1 >= n || w.chi().face(k0) != Face::Left || w.chi().face(k0 + 1) != Face::Right {
            return Err(CbfError::Face("need a left position followed by a right one".into()));
        }
        let mut faces = w.chi().faces().to_vec();
        faces.swap(k0, k0 + 1);
        let mut entries = w.entries().to_vec();
        entries.swap(k0, k0 + 1);
        let mut labels = w.labels().to_vec();
        labels.swap(k0, k0 + 1);
        let sw = Word::with_labels(Chi::new(faces)?, labels, entries)?;
        Ok(ProductCheck {
            kappa: Sides { lhs: self.kappa_top(w)?, rhs: self.kappa_top(&sw)? },
            k: Sides { lhs: self.k_top(w)?, rhs: self.k_top(&sw)? },
        })
    }

    /// Replacing a final left entry by a right entry `y`: cumulants of the
    /// original and of the modified word (`κ` then `K`).
    pub fn tail_sides(&self, w: &Word<S>, y: Entry<S>) -> Result<ProductCheck<S>> {
        let n = w.len();
        if w.chi().face(n - 1) != Face::Left {
            return Err(CbfError::Face("the last position must be a left one".into()));
        }
        let mut faces = w.chi().faces().to_vec();
        faces[n - 1] = Face::Right;
        let mut entries = w.entries().to_vec();
        entries[n - 1] = y;
        let tw = Word::with_labels(Chi::new(faces)?, w.labels().to_vec(), entries)?;
        Ok(ProductCheck {
            kappa: Sides { lhs: self.kappa_top(w)?, rhs: self.kappa_top(&tw)? },
            k: Sides { lhs: self.k_top(w)?, rhs: self.k_top(&tw)? },
        })
    }
}

/// Tests `E(Z X Y Z') = E(Z Y X Z')` and the same for `F` over all probe
/// pairs, including empty probes.
pub fn swap_hypothesis<S: Scalar>(
    pair: &dyn PairFunctional<S>,
    x: &Entry<S>,
    y: &Entry<S>,
    probes: &[Entry<S>],
) -> Result<bool> {
    let mut ps: Vec<Entry<S>> = alloc::vec![Vec::new()];
    ps.extend(probes.iter().cloned());
    for z in &ps {
        for z2 in &ps {
            let a: Vec<Piece<S>> = z.iter().chain(x).chain(y).chain(z2).cloned().collect();
            let b: Vec<Piece<S>> = z.iter().chain(y).chain(x).chain(z2).cloned().collect();
            if pair.e(0, &a)? != pair.e(0, &b)? || pair.f(0, &a)? != pair.f(0, &b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Tests `E(Z X) = E(Z Y)` and the same for `F` over the probes.
pub fn tail_hypothesis<S: Scalar>(
    pair: &dyn PairFunctional<S>,
    x: &Entry<S>,
    y: &Entry<S>,
    probes: &[Entry<S>],
) -> Result<bool> {
    let mut ps: Vec<Entry<S>> = alloc::vec![Vec::new()];
    ps.extend(probes.iter().cloned());
    for z in &ps {
        let a: Vec<Piece<S>> = z.iter().chain(x).cloned().collect();
        let b: Vec<Piece<S>> = z.iter().chain(y).cloned().collect();
        if pair.e(0, &a)? != pair.e(0, &b)? || pair.f(0, &a)? != pair.f(0, &b)? {
            return Ok(false);
        }
    }
    Ok(true)
}
