//! Expansion of `F` over labelled partitions `(π, ι)`.
//!
//! The scalar-valued recursion for `K` is expanded formally: `φ(V)` stands
//! for `E` of the positions in `V` and `ψ(V)` for `F`. Every monomial of
//! `Σ_{π ≤ ω} K_π` is then a labelled partition, and its integer
//! coefficient is `c(χ, ω; π, ι)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bnc::{enumerate_bnc, BlockKind, BncPartition, Chi, Lattice, Omega};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

use super::{Engine, Word};

type Mono = Vec<(u32, bool)>;
type Poly = BTreeMap<Mono, i64>;

/// One term `c · Θ_{(π, ι)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTerm {
    /// The partition.
    pub pi: BncPartition,
    /// `true` where the outer block of the `j`-th `χ`-interval (in `≺`
    /// order) is evaluated by `F`.
    pub use_f: Vec<bool>,
    /// The integer coefficient.
    pub coeff: i64,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut v: Mono = a.iter().chain(b.iter()).copied().collect();
    v.sort_unstable();
    v
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            *out.entry(mono_mul(ma, mb)).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn poly_add(acc: &mut Poly, b: &Poly, s: i64) {
    for (m, c) in b {
        *acc.entry(m.clone()).or_insert(0) += s * c;
    }
    acc.retain(|_, c| *c != 0);
}

fn single(mask: u32, psi: bool) -> Poly {
    let mut p = Poly::new();
    p.insert(alloc::vec![(mask, psi)], 1);
    p
}

fn positions(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

struct Formal<'a> {
    chi: &'a Chi,
    max_n: usize,
    kappa: BTreeMap<u32, Poly>,
    k: BTreeMap<u32, Poly>,
}

impl Formal<'_> {
    fn sub_partitions(&self, mask: u32) -> Result<(Vec<(Vec<u32>, Vec<BlockKind>)>, Lattice)> {
        let pos = positions(mask);
        let sub = self.chi.restrict(&pos);
        let lat = Lattice::new(&sub, self.max_n)?;
        let v = lat
            .elements()
            .iter()
            .map(|p| {
                let masks = p.blocks().iter().map(|b| b.iter().map(|&i| 1u32 << pos[i]).sum()).collect();
                (masks, p.classify_blocks())
            })
            .collect();
        Ok((v, lat))
    }

    fn kappa(&mut self, mask: u32) -> Result<Poly> {
        if let Some(p) = self.kappa.get(&mask) {
            return Ok(p.clone());
        }
        let (parts, lat) = self.sub_partitions(mask)?;
        let mut acc = Poly::new();
        for (s, mu) in lat.mobius_down(lat.top()) {
            let mut term = Poly::new();
            term.insert(Vec::new(), mu);
            for &b in &parts[s].0 {
                term = poly_mul(&term, &single(b, false));
            }
            poly_add(&mut acc, &term, 1);
        }
        self.kappa.insert(mask, acc.clone());
        Ok(acc)
    }

    fn k_pi(&mut self, masks: &[u32], kinds: &[BlockKind]) -> Result<Poly> {
        let mut term = Poly::new();
        term.insert(Vec::new(), 1);
        for (&b, kind) in masks.iter().zip(kinds) {
            let f = match kind {
                BlockKind::Interior => self.kappa(b)?,
                BlockKind::Exterior => self.k(b)?,
            };
            term = poly_mul(&term, &f);
        }
        Ok(term)
    }

    fn k(&mut self, mask: u32) -> Result<Poly> {
        if let Some(p) = self.k.get(&mask) {
            return Ok(p.clone());
        }
        let mut acc = single(mask, true);
        if mask.count_ones() > 1 {
            let (parts, lat) = self.sub_partitions(mask)?;
            for (i, (masks, kinds)) in parts.iter().enumerate() {
                if i == lat.top() {
                    continue;
                }
                let t = self.k_pi(masks, kinds)?;
                poly_add(&mut acc, &t, -1);
            }
        }
        self.k.insert(mask, acc.clone());
        Ok(acc)
    }
}

/// The coefficients `c(χ, ω; π, ι)` with `F = Σ c · Θ_{(π, ι)}`.
///
/// Fails with a validation error if a nested block would carry an `F`
/// label, which the expansion never produces.
pub fn theta_expansion(chi: &Chi, omega: &Omega, max_n: usize) -> Result<Vec<ThetaTerm>> {
    let n = chi.len();
    if omega.len() != n {
        return Err(CbfError::Validation("ω and χ differ in length".into()));
    }
    if n > max_n.min(20) {
        return Err(CbfError::SizeLimit { n, limit: max_n.min(20) });
    }
    let mut fm = Formal { chi, max_n, kappa: BTreeMap::new(), k: BTreeMap::new() };
    let mut total = Poly::new();
    for p in enumerate_bnc(chi, max_n)? {
        if !p.leq_omega(omega)? {
            continue;
        }
        let masks: Vec<u32> = p.blocks().iter().map(|b| b.iter().map(|&i| 1u32 << i).sum()).collect();
        let t = fm.k_pi(&masks, &p.classify_blocks())?;
        poly_add(&mut total, &t, 1);
    }
    let mut out = Vec::with_capacity(total.len());
    for (mono, coeff) in total {
        let blocks: Vec<Vec<usize>> = mono.iter().map(|&(m, _)| positions(m)).collect();
        let pi = BncPartition::new(chi.clone(), blocks)?;
        let kinds = pi.classify_blocks();
        let psi_of = |b: &[usize]| {
            let m: u32 = b.iter().map(|&i| 1u32 << i).sum();
            mono.iter().find(|x| x.0 == m).unwrap().1
        };
        for (b, kind) in pi.blocks().iter().zip(&kinds) {
            if *kind == BlockKind::Interior && psi_of(b) {
                return Err(CbfError::Validation("nested block labelled by F in the expansion".into()));
            }
        }
        let dec = pi.chi_intervals();
        let use_f = dec.outer.iter().map(|&o| psi_of(&pi.blocks()[o])).collect();
        out.push(ThetaTerm { pi, use_f, coeff });
    }
    Ok(out)
}

impl<S: Scalar> Engine<'_, S> {
    /// `Σ c · Θ_{(π, ι)}` for a labelled word.
    pub fn theta_sum(&self, w: &Word<S>, terms: &[ThetaTerm]) -> Result<Mat<S>> {
        let mut acc = Mat::zero(self.context().dim_d());
        for t in terms {
            let v = self.interval_product(w, &t.pi, &t.use_f)?;
            acc.add_assign(&v.scale(&S::from_int(t.coeff)));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lefts_same_family() {
        let chi = Chi::parse("ll").unwrap();
        let t = theta_expansion(&chi, &Omega::new(alloc::vec![0, 0]), 10).unwrap();
        // F(Z1 Z2) appears once with coefficient 1 and nothing else survives
        assert_eq!(t.len(), 1);
        assert!(t[0].pi.is_one() && t[0].use_f == [true] && t[0].coeff == 1);
    }

    #[test]
    fn two_lefts_different_families() {
        let chi = Chi::parse("ll").unwrap();
        let t = theta_expansion(&chi, &Omega::new(alloc::vec![0, 1]), 10).unwrap();
        // K_{0} = F(Z1)F(Z2): a single product term
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].pi.len(), 2);
        assert_eq!(t[0].use_f, [true, true]);
    }
}
