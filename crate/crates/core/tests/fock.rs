use std::sync::Arc;

use cbf_core::algebra::{AlgebraContext, Embedding};
use cbf_core::bnc::Face;
use cbf_core::cumulants::{PairFunctional, Piece};
use cbf_core::fock::*;
use cbf_core::matrix::Mat;
use cbf_core::sample::{all_chis, all_omegas, atom_id, Instance, InstanceSpec};
use cbf_core::scalar::{Rational, Scalar};
use cbf_core::CbfError;
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_int(n)
}

fn ctx24() -> AlgebraContext<Q> {
    AlgebraContext::new(2, 4, Embedding::BlockDiagonal).unwrap()
}

#[test]
fn basis_count_of_two_factors() {
    let ctx = ctx24();
    for d in 1..=3 {
        for l in 0..=4 {
            let sp = FockSpace::new(ctx.clone(), vec![Factor::trivial(&ctx, d); 2], l).unwrap();
            let want = 1 + (1..=l as u32).map(|m| 2 * d.pow(m)).sum::<usize>();
            assert_eq!(sp.basis_count(), want);
            assert!(sp.words().iter().all(|w| w.windows(2).all(|p| p[0].0 != p[1].0)));
        }
    }
}

#[test]
fn identity_has_unit_expectations() {
    let ctx = ctx24();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = Factor::random(&ctx, 2, false, &mut rng);
    let sp = FockSpace::new(ctx.clone(), vec![f], 2).unwrap();
    let (e, fv) = sp.expectations(&Op::Prod(vec![])).unwrap();
    assert!(e.is_identity() && fv.is_identity());
}

// A dim-1 computation by hand: ρ_2(A') puts A'_00 on the vacuum and A'_01 on
// the letter of factor 2; λ_1(A) then acts on the first tensor slot.
#[test]
fn two_letter_word_by_hand() {
    let ctx = AlgebraContext::<Q>::scalar();
    let f1 = Factor::new(&ctx, vec![Mat::scalar(1, q(3))]).unwrap();
    let f2 = Factor::new(&ctx, vec![Mat::scalar(1, q(5))]).unwrap();
    let sp = FockSpace::new(ctx, vec![f1, f2], 2).unwrap();
    let mut a = BlockOp::zero(2, 1);
    a.set(0, 0, Mat::scalar(1, q(2)));
    a.set(1, 0, Mat::scalar(1, q(7)));
    let mut a2 = BlockOp::zero(2, 1);
    a2.set(0, 0, Mat::scalar(1, q(-1)));
    a2.set(0, 1, Mat::scalar(1, q(4)));
    let op = Op::Prod(vec![sp.lift(0, Face::Left, a).unwrap(), sp.lift(1, Face::Right, a2).unwrap()]);
    let (e, f) = sp.expectations(&op).unwrap();
    // vacuum: 2·(−1); words (1): 7·(−1), (2): 2·4, (1,2): 7·4
    assert_eq!(*e.get(0, 0), q(-2));
    let want = -2 + (-7) * 3 + 8 * 5 + 28 * 3 * 5;
    assert_eq!(*f.get(0, 0), q(want));
}

#[test]
fn q_of_a_two_letter_word_is_a_product() {
    let ctx = ctx24();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f1 = Factor::random(&ctx, 1, false, &mut rng);
    let f2 = Factor::random(&ctx, 1, false, &mut rng);
    let (d1, d2) = (f1.deltas()[0].clone(), f2.deltas()[0].clone());
    let sp = FockSpace::new(ctx.clone(), vec![f1, f2], 2).unwrap();
    // creation of the unit letter of each factor
    let mut c = BlockOp::zero(2, 2);
    c.set(1, 0, Mat::identity(2));
    let op = Op::Prod(vec![sp.lift(0, Face::Left, c.clone()).unwrap(), sp.lift(1, Face::Left, c).unwrap()]);
    let (e, f) = sp.expectations(&op).unwrap();
    assert!(e.is_zero());
    assert_eq!(f, d1.mul(&d2));
}

#[test]
fn truncation_overflow_is_an_error() {
    let ctx = ctx24();
    let sp = FockSpace::new(ctx.clone(), vec![Factor::trivial(&ctx, 1); 2], 1).unwrap();
    let mut c = BlockOp::zero(2, 2);
    c.set(1, 0, Mat::identity(2));
    let op = Op::Prod(vec![sp.lift(0, Face::Left, c.clone()).unwrap(), sp.lift(1, Face::Left, c).unwrap()]);
    assert!(matches!(sp.expectations(&op), Err(CbfError::Truncation { max_len: 1 })));
}

#[test]
fn lift_checks_sizes() {
    let ctx = ctx24();
    let sp = FockSpace::new(ctx.clone(), vec![Factor::trivial(&ctx, 2)], 1).unwrap();
    assert!(matches!(sp.lift(0, Face::Left, BlockOp::zero(2, 2)), Err(CbfError::Dimension { .. })));
    assert!(matches!(sp.lift(0, Face::Left, BlockOp::zero(3, 1)), Err(CbfError::Dimension { .. })));
    assert!(sp.lift(1, Face::Left, BlockOp::zero(3, 2)).is_err());
}

#[test]
fn factor_rejects_non_commutant_deltas() {
    let ctx = ctx24();
    // E_01 of D mixes the two copies of B and is not in the commutant
    assert!(Factor::new(&ctx, vec![Mat::unit(4, 0, 1)]).is_err());
}

#[test]
fn linear_maps_must_respect_the_other_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a: BlockOp<Q> = BlockOp::random(2, 2, 2, 12, &mut rng);
    // the left action x ↦ Σ A_ji x_i as a matrix on vectorized X
    let (size, k) = (2, 2);
    let dim = size * k * k;
    let idx = |i: usize, r: usize, c: usize| (i * k + r) * k + c;
    let mut t = Mat::zero(dim);
    for j in 0..size {
        for i in 0..size {
            for r in 0..k {
                for s in 0..k {
                    for c in 0..k {
                        t.set(idx(j, r, c), idx(i, s, c), a.get(j, i).get(r, s).clone());
                    }
                }
            }
        }
    }
    assert_eq!(BlockOp::from_linear_map(size, k, Face::Left, &t).unwrap(), a);
    assert!(matches!(BlockOp::from_linear_map(size, k, Face::Right, &t), Err(CbfError::Face(_))));
    let junk: Mat<Q> = Mat::random_small(dim, 2, 12, &mut rng);
    assert!(BlockOp::from_linear_map(size, k, Face::Left, &junk).is_err());
}

#[test]
fn same_seed_same_instance() {
    let a = Instance::<Q>::random(InstanceSpec::default(), 11).unwrap();
    let b = Instance::<Q>::random(InstanceSpec::default(), 11).unwrap();
    assert_eq!(a.generators(), b.generators());
    assert_eq!(a.factors()[0].deltas(), b.factors()[0].deltas());
}

#[test]
fn centred_generators_have_zero_expectations() {
    let spec = InstanceSpec { centered: true, ..Default::default() };
    for seed in 0..5 {
        let inst = Instance::<Q>::random(spec, seed).unwrap();
        for c in 0..spec.families {
            for face in [Face::Left, Face::Right] {
                let p = [Piece::Atom(atom_id(c, face))];
                assert!(inst.joint().e(0, &p).unwrap().is_zero());
                assert!(inst.joint().f(0, &p).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn lifting_preserves_expectations() {
    let ctx = ctx24();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let fs: Vec<Factor<Q>> = (0..3).map(|_| Factor::random(&ctx, 2, false, &mut rng)).collect();
        let sp = FockSpace::new(ctx.clone(), fs.clone(), 2).unwrap();
        for (k, f) in fs.iter().enumerate() {
            for side in [Face::Left, Face::Right] {
                let a = BlockOp::random(3, 2, 2, 10, &mut rng);
                let want = factor_expectations(&ctx, f, side, &a);
                assert_eq!(sp.expectations(&sp.lift(k, side, a).unwrap()).unwrap(), want);
            }
        }
    }
}

#[test]
fn b_operators_lift_to_themselves() {
    let ctx = ctx24();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fs: Vec<Factor<Q>> = (0..2).map(|_| Factor::random(&ctx, 2, false, &mut rng)).collect();
    let sp = FockSpace::new(ctx.clone(), fs, 3).unwrap();
    let b = ctx.random_b(2, &mut rng);
    let g = sp.lift(1, Face::Right, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap();
    let h = sp.lift(0, Face::Left, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap();
    let v = sp.apply(&Op::Prod(vec![h, g]), &sp.vacuum()).unwrap();
    let lifted = sp.lift(0, Face::Left, BlockOp::diagonal(3, &b)).unwrap();
    assert_eq!(sp.apply(&lifted, &v).unwrap(), sp.apply(&Op::LMul(b.clone()), &v).unwrap());
    let lifted = sp.lift(1, Face::Right, BlockOp::diagonal(3, &b)).unwrap();
    assert_eq!(sp.apply(&lifted, &v).unwrap(), sp.apply(&Op::RMul(b), &v).unwrap());
}

#[test]
fn faces_commute_with_opposite_b_operators() {
    let ctx = ctx24();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fs: Vec<Factor<Q>> = (0..2).map(|_| Factor::random(&ctx, 2, false, &mut rng)).collect();
    let sp = FockSpace::new(ctx.clone(), fs, 4).unwrap();
    for _ in 0..10 {
        let pre = Op::Prod(vec![
            sp.lift(0, Face::Right, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap(),
            sp.lift(1, Face::Left, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap(),
        ]);
        let v = sp.apply(&pre, &sp.vacuum()).unwrap();
        let b = ctx.random_b(2, &mut rng);
        let l = sp.lift(0, Face::Left, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap();
        let r = sp.lift(1, Face::Right, BlockOp::random(3, 2, 2, 10, &mut rng)).unwrap();
        let lr = |x: Op<Q>, y: Op<Q>| sp.apply(&Op::Prod(vec![x, y]), &v).unwrap();
        assert_eq!(lr(l.clone(), Op::RMul(b.clone())), lr(Op::RMul(b.clone()), l));
        assert_eq!(lr(r.clone(), Op::LMul(b.clone())), lr(Op::LMul(b), r));
    }
}

#[test]
fn b_operator_rules_for_expectations() {
    let inst = Instance::<Q>::random(InstanceSpec::default(), 5).unwrap();
    let ctx = inst.context().clone();
    let pair = inst.joint();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let z: Vec<Piece<Q>> = (0..3).map(|_| Piece::Atom((rng.next_u32() % 4) as usize)).collect();
        let (b1, b2, b) = (ctx.random_b(2, &mut rng), ctx.random_b(2, &mut rng), ctx.random_b(2, &mut rng));
        let mut outer = vec![Piece::left(b1.clone()), Piece::right(b2.clone())];
        outer.extend(z.iter().cloned());
        let e = pair.e(0, &z).unwrap();
        let f = pair.f(0, &z).unwrap();
        assert_eq!(pair.e(0, &outer).unwrap(), b1.mul(&e).mul(&b2));
        let (d1, d2) = (ctx.b_to_d(&b1).unwrap(), ctx.b_to_d(&b2).unwrap());
        assert_eq!(pair.f(0, &outer).unwrap(), d1.mul(&f).mul(&d2));
        let mut zl = z.clone();
        zl.push(Piece::left(b.clone()));
        let mut zr = z.clone();
        zr.push(Piece::right(b));
        assert_eq!(pair.e(0, &zl).unwrap(), pair.e(0, &zr).unwrap());
        assert_eq!(pair.f(0, &zl).unwrap(), pair.f(0, &zr).unwrap());
    }
}

#[test]
fn truncation_length_does_not_matter_once_long_enough() {
    for seed in 0..3 {
        for n in 1..=4 {
            let short = Instance::<Q>::random(InstanceSpec { max_len: n, ..Default::default() }, seed).unwrap();
            let long = Instance::<Q>::random(InstanceSpec { max_len: n + 1, ..Default::default() }, seed).unwrap();
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            for chi in all_chis(n) {
                for om in all_omegas(n, 2) {
                    let a = short.word(&chi, &om, true, &mut r1).unwrap().flatten();
                    let b = long.word(&chi, &om, true, &mut r2).unwrap().flatten();
                    assert_eq!(short.joint().e(0, &a).unwrap(), long.joint().e(0, &b).unwrap());
                    assert_eq!(short.joint().f(0, &a).unwrap(), long.joint().f(0, &b).unwrap());
                }
            }
        }
    }
}

#[test]
fn float_mode_agrees_with_exact_mode() {
    let ex = Instance::<Q>::random(InstanceSpec::default(), 2).unwrap();
    let fl = Instance::<f64>::random(InstanceSpec::default(), 2).unwrap();
    let mut r1 = ChaCha8Rng::seed_from_u64(1);
    let mut r2 = ChaCha8Rng::seed_from_u64(1);
    for chi in all_chis(4) {
        let om = [0, 1, 1, 0];
        let a = ex.word(&chi, &om, true, &mut r1).unwrap().flatten();
        let b = fl.word(&chi, &om, true, &mut r2).unwrap().flatten();
        let e = ex.joint().f(0, &a).unwrap().to_f64();
        assert!(e.max_abs_diff(&fl.joint().f(0, &b).unwrap()) <= 1e-9);
    }
}

#[test]
fn spaces_are_shareable() {
    let ctx = ctx24();
    let sp = Arc::new(FockSpace::<Q>::new(ctx.clone(), vec![Factor::trivial(&ctx, 1)], 1).unwrap());
    let pair = FockPair::new(sp.clone(), vec![None]);
    assert!(pair.e(0, &[Piece::Atom(0)]).is_err());
    assert!(pair.e(0, &[]).unwrap().is_identity());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expectations_are_bimodule_maps(seed in 0u64..1000, len in 1usize..4) {
        let inst = Instance::<Q>::random(InstanceSpec { max_len: 4, ..Default::default() }, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<Piece<Q>> = (0..len).map(|_| Piece::Atom((rng.next_u32() % 4) as usize)).collect();
        let b = inst.random_b(&mut rng);
        let mut lz = vec![Piece::left(b.clone())];
        lz.extend(z.iter().cloned());
        let e = inst.joint().e(0, &z).unwrap();
        prop_assert_eq!(inst.joint().e(0, &lz).unwrap(), b.mul(&e));
    }
}
