//! Random families realised on free products, used by checks and tests.
//!
//! Family `c` lives on factor `c`. Atom `2c` is its left generator and atom
//! `2c + 1` its right generator.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraContext, Embedding};
use crate::bnc::{Chi, Face};
use crate::cumulants::{Entry, PairFunctional, PerClass, Piece, Word};
use crate::error::Result;
use crate::fock::{center, BlockOp, Factor, FockPair, FockSpace, Op};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Size and shape of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    /// `dim B`.
    pub dim_b: usize,
    /// `dim D`.
    pub dim_d: usize,
    /// Reduced rank of each factor.
    pub reduced: usize,
    /// Number of families.
    pub families: usize,
    /// Truncation length of the joint free product.
    pub max_len: usize,
    /// Make every generator satisfy `E = F = 0`.
    pub centered: bool,
    /// Use factors whose copies carry no `D`-part, so that `F = ι ∘ E`.
    pub f_equals_e: bool,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec { dim_b: 2, dim_d: 4, reduced: 2, families: 2, max_len: 5, centered: false, f_equals_e: false }
    }
}

/// Atom id of family `c` on face `f`.
pub fn atom_id(c: usize, f: Face) -> usize {
    2 * c + usize::from(f == Face::Right)
}

/// Random families with their joint and per-family pairs.
pub struct Instance<S: Scalar> {
    spec: InstanceSpec,
    ctx: AlgebraContext<S>,
    factors: Vec<Factor<S>>,
    gens: Vec<(BlockOp<S>, BlockOp<S>)>,
    joint: FockPair<S>,
    single: Vec<FockPair<S>>,
}

impl<S: Scalar> Instance<S> {
    /// Draws an instance from a seed.
    pub fn random(spec: InstanceSpec, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = AlgebraContext::new(spec.dim_b, spec.dim_d, Embedding::BlockDiagonal)?;
        let mut factors = Vec::new();
        let mut gens = Vec::new();
        for _ in 0..spec.families {
            let f = if spec.f_equals_e {
                Factor::trivial(&ctx, spec.reduced)
            } else {
                Factor::random(&ctx, spec.reduced, spec.centered, &mut rng)
            };
            let mut l = BlockOp::random(spec.reduced + 1, spec.dim_b, 2, 9, &mut rng);
            let mut r = BlockOp::random(spec.reduced + 1, spec.dim_b, 2, 9, &mut rng);
            if spec.centered {
                center(&f, Face::Left, &mut l);
                center(&f, Face::Right, &mut r);
            }
            factors.push(f);
            gens.push((l, r));
        }
        Self::from_parts(spec, ctx, factors, gens)
    }

    /// Builds from explicit factors and generators.
    pub fn from_parts(
        spec: InstanceSpec,
        ctx: AlgebraContext<S>,
        factors: Vec<Factor<S>>,
        gens: Vec<(BlockOp<S>, BlockOp<S>)>,
    ) -> Result<Self> {
        let joint_space = Arc::new(FockSpace::new(ctx.clone(), factors.clone(), spec.max_len)?);
        let mut atoms = Vec::new();
        for (c, (l, r)) in gens.iter().enumerate() {
            atoms.push(Some(joint_space.lift(c, Face::Left, l.clone())?));
            atoms.push(Some(joint_space.lift(c, Face::Right, r.clone())?));
        }
        let joint = FockPair::new(joint_space, atoms);
        let mut single = Vec::new();
        for (c, (l, r)) in gens.iter().enumerate() {
            let sp = Arc::new(FockSpace::new(ctx.clone(), vec![factors[c].clone()], spec.max_len)?);
            let mut atoms: Vec<Option<Op<S>>> = vec![None; 2 * gens.len()];
            atoms[2 * c] = Some(sp.lift(0, Face::Left, l.clone())?);
            atoms[2 * c + 1] = Some(sp.lift(0, Face::Right, r.clone())?);
            single.push(FockPair::new(sp, atoms));
        }
        Ok(Instance { spec, ctx, factors, gens, joint, single })
    }

    /// The shape.
    pub fn spec(&self) -> InstanceSpec {
        self.spec
    }

    /// The algebras.
    pub fn context(&self) -> &AlgebraContext<S> {
        &self.ctx
    }

    /// The factors.
    pub fn factors(&self) -> &[Factor<S>] {
        &self.factors
    }

    /// Left and right generator of each family.
    pub fn generators(&self) -> &[(BlockOp<S>, BlockOp<S>)] {
        &self.gens
    }

    /// The pair on the joint free product.
    pub fn joint(&self) -> &FockPair<S> {
        &self.joint
    }

    /// The pair `(s Σ_c Z_{c,ℓ}, s Σ_c Z_{c,r})` on the joint free product,
    /// as atoms 0 and 1.
    pub fn sum_pair(&self, s: S) -> FockPair<S> {
        let atoms = self.joint.atoms();
        let sum = |face: usize| {
            let terms = (0..self.gens.len())
                .map(|c| (s.clone(), atoms[2 * c + face].clone().expect("joint atoms are set")))
                .collect();
            Some(Op::Combo(terms))
        };
        FockPair::new(self.joint.space().clone(), vec![sum(0), sum(1)])
    }

    /// The pair of family `c` on its own factor.
    pub fn single(&self, c: usize) -> &FockPair<S> {
        &self.single[c]
    }

    /// Per-family pairs dispatched by label.
    pub fn per_class(&self) -> PerClass<'_, S> {
        let v: Vec<&dyn PairFunctional<S>> = self.single.iter().map(|p| p as &dyn PairFunctional<S>).collect();
        PerClass::new(v).expect("instance has at least one family")
    }

    /// A word with one generator per position. With `decorate`, entries are
    /// randomly wrapped in `B`-operators of their face.
    pub fn word(&self, chi: &Chi, omega: &[usize], decorate: bool, rng: &mut dyn RngCore) -> Result<Word<S>> {
        let entries: Vec<Entry<S>> = (0..chi.len())
            .map(|k| {
                let f = chi.face(k);
                let mut e = vec![Piece::Atom(atom_id(omega[k], f))];
                if decorate {
                    if rng.next_u32().is_multiple_of(3) {
                        e.insert(0, Piece::on(f, self.ctx.random_b(2, rng)));
                    }
                    if rng.next_u32().is_multiple_of(3) {
                        e.push(Piece::on(f, self.ctx.random_b(2, rng)));
                    }
                }
                e
            })
            .collect();
        Word::with_labels(chi.clone(), omega.to_vec(), entries)
    }

    /// A random element of `B`.
    pub fn random_b(&self, rng: &mut dyn RngCore) -> Mat<S> {
        self.ctx.random_b(2, rng)
    }
}

/// All face words of length `n`.
pub fn all_chis(n: usize) -> Vec<Chi> {
    (0..1u64 << n).map(|b| Chi::from_bits(n, b)).collect()
}

/// All labelings of `n` positions by `k` families.
pub fn all_omegas(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..k).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}
