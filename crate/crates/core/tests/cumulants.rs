use std::sync::Arc;

use cbf_core::algebra::{AlgebraContext, Embedding};
use cbf_core::bnc::{mobius_bnc, BncPartition, Chi, Face, Omega};
use cbf_core::cumulants::*;
use cbf_core::fock::{BlockOp, Factor, FockPair, FockSpace};
use cbf_core::matrix::Mat;
use cbf_core::sample::*;
use cbf_core::scalar::{Rational, Scalar};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

fn inst(seed: u64) -> Instance<Q> {
    Instance::random(InstanceSpec::default(), seed).unwrap()
}

#[test]
fn combinatorial_moments_match_the_fock_model() {
    for seed in [1, 2] {
        let inst = inst(seed);
        let pc = inst.per_class();
        let by_class = Engine::new(&pc);
        let joint = Engine::new(inst.joint());
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 40);
        for n in 1..=4 {
            for chi in all_chis(n) {
                for om in all_omegas(n, 2) {
                    let w = inst.word(&chi, &om, true, &mut rng).unwrap();
                    let o = w.unlabeled();
                    assert_eq!(by_class.cbifree_moment_e(&w).unwrap(), joint.e_top(&o).unwrap(), "E {chi} {om:?}");
                    assert_eq!(by_class.cbifree_moment_f(&w).unwrap(), joint.f_top(&o).unwrap(), "F {chi} {om:?}");
                }
            }
        }
    }
}

#[test]
fn float_mode_agrees_with_exact() {
    let exact = inst(3);
    let float: Instance<f64> = Instance::random(InstanceSpec::default(), 3).unwrap();
    let (ee, ef) = (Engine::new(exact.joint()), Engine::new(float.joint()));
    let mut r1 = ChaCha8Rng::seed_from_u64(9);
    let mut r2 = ChaCha8Rng::seed_from_u64(9);
    for chi in all_chis(4) {
        let om = [0, 1, 1, 0];
        let we = exact.word(&chi, &om, true, &mut r1).unwrap();
        let wf = float.word(&chi, &om, true, &mut r2).unwrap();
        let ke = ee.k_top(&we.unlabeled()).unwrap().to_f64();
        let kf = ef.k_top(&wf.unlabeled()).unwrap();
        assert!(ke.max_abs_diff(&kf) < 1e-9, "{chi}");
    }
}

#[test]
fn mixed_cumulants_vanish() {
    let inst = inst(4);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut constant_nonzero = 0;
    for n in 2..=4 {
        for chi in all_chis(n) {
            for om in all_omegas(n, 2) {
                let w = inst.word(&chi, &om, true, &mut rng).unwrap().unlabeled();
                let k = eng.k_top(&w).unwrap();
                if om.iter().all(|&c| c == om[0]) {
                    constant_nonzero += usize::from(!k.is_zero());
                    continue;
                }
                assert!(k.is_zero(), "K {chi} {om:?}");
                assert!(eng.kappa_top(&w).unwrap().is_zero(), "κ {chi} {om:?}");
            }
        }
    }
    assert!(constant_nonzero > 0);
}

#[test]
fn families_on_one_factor_have_mixed_cumulants() {
    let inst = inst(5);
    let ctx = inst.context().clone();
    let space = Arc::new(FockSpace::new(ctx, vec![inst.factors()[0].clone()], 4).unwrap());
    let g = inst.generators();
    let atoms = vec![
        Some(space.lift(0, Face::Left, g[0].0.clone()).unwrap()),
        Some(space.lift(0, Face::Right, g[0].1.clone()).unwrap()),
        Some(space.lift(0, Face::Left, g[1].0.clone()).unwrap()),
        Some(space.lift(0, Face::Right, g[1].1.clone()).unwrap()),
    ];
    let pair = FockPair::new(space, atoms);
    let eng = Engine::new(&pair);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nonzero = 0;
    for chi in all_chis(3) {
        let w = inst.word(&chi, &[0, 1, 0], false, &mut rng).unwrap().unlabeled();
        nonzero += usize::from(!eng.k_top(&w).unwrap().is_zero());
    }
    assert!(nonzero > 0);
}

#[test]
fn moments_and_cumulants_round_trip() {
    let inst = inst(6);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let n = 1 + (rng.next_u32() % 5) as usize;
        let chi = Chi::from_bits(n, rng.next_u64() & ((1 << n) - 1));
        let om: Vec<usize> = (0..n).map(|_| (rng.next_u32() % 2) as usize).collect();
        let w = inst.word(&chi, &om, true, &mut rng).unwrap().unlabeled();
        assert_eq!(eng.e_from_cumulants(&w).unwrap(), eng.e_top(&w).unwrap());
        assert_eq!(eng.f_from_cumulants(&w).unwrap(), eng.f_top(&w).unwrap());
        let one = BncPartition::one(&chi);
        let mut kappa = Mat::zero(2);
        for p in eng.bnc(&chi).unwrap() {
            let m = mobius_bnc(&p, &one, 10).unwrap();
            kappa.add_assign(&eng.e_pi(&w, &p).unwrap().scale(&Q::from_int(m)));
        }
        assert_eq!(kappa, eng.kappa_top(&w).unwrap());
    }
}

#[test]
fn theta_expansion_gives_f() {
    let inst = inst(7);
    let pc = inst.per_class();
    let eng = Engine::new(&pc);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=4 {
        for chi in all_chis(n) {
            for om in all_omegas(n, 2) {
                let w = inst.word(&chi, &om, true, &mut rng).unwrap();
                let terms = theta_expansion(&chi, &Omega::new(om.clone()), 10).unwrap();
                assert_eq!(eng.theta_sum(&w, &terms).unwrap(), eng.cbifree_moment_f(&w).unwrap(), "{chi} {om:?}");
            }
        }
    }
}

#[test]
fn reduction_axioms_hold() {
    let inst = inst(8);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=4 {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng).unwrap().unlabeled();
            let b = inst.random_b(&mut rng);
            let ax = eng.pair_axioms(&w, &b, 0.0).unwrap();
            assert!(ax.e.all() && ax.kappa.all() && ax.f.all() && ax.k.all(), "{chi} {ax:?}");
        }
    }
}

#[test]
fn corrupted_f_breaks_factorisation() {
    let inst = inst(8);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let chi = Chi::parse("lrlr").unwrap();
    let w = inst.word(&chi, &[0; 4], false, &mut rng).unwrap().unlabeled();
    let b = inst.random_b(&mut rng);
    let bump = Mat::unit(4, 0, 1);
    let e = |x: &Word<Q>, p: &BncPartition| eng.e_pi(x, p);
    let bad_f = |x: &Word<Q>, p: &BncPartition| Ok(eng.f_pi(x, p)?.add(&bump));
    let ctx = eng.context().clone();
    let rep = axiom_checks(&w, &b, &e, &bad_f, true, Some(&ctx), 10, 0.0).unwrap();
    assert!(!rep.cond3);
}

#[test]
fn b_operator_entries_kill_cumulants() {
    let inst = inst(9);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=4 {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng).unwrap().unlabeled();
            for q in 0..n {
                let (kap, k) = eng.b_insertion_cumulants(&w, q, &inst.random_b(&mut rng)).unwrap();
                assert!(kap.is_zero() && k.is_zero(), "{chi} q={q}");
            }
        }
    }
}

#[test]
fn merge_lemma_holds() {
    let inst = inst(10);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=4 {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng).unwrap().unlabeled();
            for q in 0..n - 1 {
                if chi.face(q) != chi.face(q + 1) {
                    continue;
                }
                for (pi, s) in eng.merge_lemma(&w, q).unwrap() {
                    assert!(s.holds(0.0), "{chi} q={q} π={:?}", pi.to_one_based());
                }
            }
        }
    }
}

// consecutive runs of constant face, split every possible way
fn groupings(chi: &Chi) -> Vec<Vec<usize>> {
    let n = chi.len();
    let mut out = Vec::new();
    for cuts in 0..1u32 << (n - 1) {
        let mut sizes = Vec::new();
        let mut run = 1;
        let mut ok = true;
        for i in 0..n - 1 {
            if cuts >> i & 1 == 1 {
                sizes.push(run);
                run = 1;
            } else {
                ok &= chi.face(i) == chi.face(i + 1);
                run += 1;
            }
        }
        sizes.push(run);
        if ok {
            out.push(sizes);
        }
    }
    out
}

#[test]
fn cumulants_of_products() {
    let inst = inst(11);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for n in 2..=4 {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng).unwrap().unlabeled();
            for sizes in groupings(&chi) {
                let c = eng.grouped_cumulants(&w, &sizes).unwrap();
                assert!(c.kappa.holds(0.0) && c.k.holds(0.0), "{chi} {sizes:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 30);
    let w = inst.word(&Chi::parse("lr").unwrap(), &[0, 0], false, &mut rng).unwrap();
    assert!(eng.grouped_cumulants(&w, &[2]).is_err());
}

#[test]
fn pair_characterisations() {
    let inst = inst(12);
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=4 {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng).unwrap().unlabeled();
            for q in 0..n - 1 {
                if chi.face(q) != chi.face(q + 1) {
                    continue;
                }
                let c = eng.cumulant_pair_identity(&w, q).unwrap();
                assert!(c.kappa.holds(0.0) && c.k.holds(0.0), "{chi} q={q}");
                let (e, f) = eng.moment_pair_identity(&w, q).unwrap();
                assert!(e.holds(0.0) && f.holds(0.0), "{chi} q={q}");
            }
        }
    }
}

// One factor carrying a commuting left/right pair (atoms 0, 1) plus two
// generic generators (atoms 2, 3).
fn witness_pair(x: BlockOp<Q>, y: BlockOp<Q>, rng: &mut ChaCha8Rng) -> FockPair<Q> {
    let ctx = AlgebraContext::<Q>::new(2, 4, Embedding::BlockDiagonal).unwrap();
    let size = x.size();
    let factor = Factor::random(&ctx, size - 1, false, rng);
    let space = Arc::new(FockSpace::new(ctx, vec![factor], 4).unwrap());
    let zl = BlockOp::random(size, 2, 2, 9, rng);
    let zr = BlockOp::random(size, 2, 2, 9, rng);
    let atoms = vec![
        Some(space.lift(0, Face::Left, x).unwrap()),
        Some(space.lift(0, Face::Right, y).unwrap()),
        Some(space.lift(0, Face::Left, zl).unwrap()),
        Some(space.lift(0, Face::Right, zr).unwrap()),
    ];
    FockPair::new(space, atoms)
}

fn probes() -> Vec<Entry<Q>> {
    let mut out = Vec::new();
    for a in 0..4 {
        out.push(vec![Piece::Atom(a)]);
        for b in 0..4 {
            out.push(vec![Piece::Atom(a), Piece::Atom(b)]);
        }
    }
    out
}

fn filler(face: Face) -> Entry<Q> {
    vec![Piece::Atom(if face == Face::Left { 2 } else { 3 })]
}

#[test]
fn swap_lemma_on_split_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (x, y) = BlockOp::split_pair(&BlockOp::random(2, 2, 2, 9, &mut rng), &BlockOp::random(2, 2, 2, 9, &mut rng));
    let pair = witness_pair(x, y, &mut rng);
    let (xe, ye) = (vec![Piece::Atom(0)], vec![Piece::Atom(1)]);
    assert!(swap_hypothesis(&pair, &xe, &ye, &probes()).unwrap());
    let eng = Engine::new(&pair);
    let mut nonzero = 0;
    for n in 2..=4 {
        for k0 in 0..n - 1 {
            for chi in all_chis(n) {
                if chi.face(k0) != Face::Left || chi.face(k0 + 1) != Face::Right {
                    continue;
                }
                let entries = (0..n)
                    .map(|k| match k {
                        _ if k == k0 => xe.clone(),
                        _ if k == k0 + 1 => ye.clone(),
                        _ => filler(chi.face(k)),
                    })
                    .collect();
                let w = Word::new(chi.clone(), entries).unwrap();
                let s = eng.swap_sides(&w, k0).unwrap();
                assert!(s.kappa.holds(0.0) && s.k.holds(0.0), "{chi} k0={k0}");
                nonzero += usize::from(!s.k.lhs.is_zero());
            }
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn tail_lemma_on_mirror_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let x = BlockOp::random(3, 2, 2, 9, &mut rng);
    let y = x.vacuum_mirror();
    let pair = witness_pair(x, y, &mut rng);
    let (xe, ye) = (vec![Piece::Atom(0)], vec![Piece::Atom(1)]);
    assert!(tail_hypothesis(&pair, &xe, &ye, &probes()).unwrap());
    let eng = Engine::new(&pair);
    let mut nonzero = 0;
    for n in 1..=4 {
        for chi in all_chis(n) {
            if chi.face(n - 1) != Face::Left {
                continue;
            }
            let mut entries: Vec<Entry<Q>> = (0..n - 1).map(|k| filler(chi.face(k))).collect();
            entries.push(xe.clone());
            let w = Word::new(chi.clone(), entries).unwrap();
            let s = eng.tail_sides(&w, ye.clone()).unwrap();
            assert!(s.kappa.holds(0.0) && s.k.holds(0.0), "{chi}");
            nonzero += usize::from(!s.k.lhs.is_zero());
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn generic_operators_fail_the_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let x = BlockOp::random(3, 2, 2, 9, &mut rng);
    let y = BlockOp::random(3, 2, 2, 9, &mut rng);
    let pair = witness_pair(x, y, &mut rng);
    let (xe, ye) = (vec![Piece::Atom(0)], vec![Piece::Atom(1)]);
    assert!(!swap_hypothesis(&pair, &xe, &ye, &probes()).unwrap());
    assert!(!tail_hypothesis(&pair, &xe, &ye, &probes()).unwrap());
}

#[test]
fn b_operators_satisfy_both_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let inst = inst(13);
    let b = inst.random_b(&mut rng);
    let (xe, ye) = (vec![Piece::left(b.clone())], vec![Piece::right(b)]);
    let probes: Vec<Entry<Q>> = (0..4).map(|a| vec![Piece::Atom(a)]).collect();
    assert!(swap_hypothesis(inst.joint(), &xe, &ye, &probes).unwrap());
    assert!(tail_hypothesis(inst.joint(), &xe, &ye, &probes).unwrap());
}
