use cbf_core::bnc::{Chi, Face};
use cbf_core::cumulants::{Engine, Piece, Word};
use cbf_core::matrix::Mat;
use cbf_core::sample::{Instance, InstanceSpec};
use cbf_core::scalar::Rational;
use cbf_core::series::*;
use cbf_core::CbfError;
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

const Z: TwoFaced = TwoFaced { left: 0, right: 1 };

fn random_series(seed: u64, with_c: bool, constant: Option<Mat<Q>>) -> TruncatedSeries<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = match constant {
        Some(m) => TruncatedSeries::constant(m, 4),
        None => TruncatedSeries::zero(2, 4),
    };
    for _ in 0..6 {
        let a = rng.next_u32() % 3;
        let c = u32::from(with_c && rng.next_u32() % 2 == 0);
        let d = rng.next_u32() % (4 - a - c + 1) + u32::from(a + c == 0);
        s.add_term([a, c, d], &Mat::random_small(2, 3, 7, &mut rng));
    }
    s
}

fn split_c(x: &TruncatedSeries<Q>) -> (TruncatedSeries<Q>, TruncatedSeries<Q>) {
    let mut parts = [TruncatedSeries::zero(x.dim(), x.truncation()), TruncatedSeries::zero(x.dim(), x.truncation())];
    for (d, m) in x.terms() {
        parts[d[1] as usize].add_term(*d, m);
    }
    let [a, b] = parts;
    (a, b)
}

fn point(inst: &Instance<Q>, seed: u64, n: u32) -> SeriesPoint<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SeriesPoint { b0: inst.random_b(&mut rng), c0: inst.random_b(&mut rng), d0: inst.random_b(&mut rng), n }
}

fn single(spec: InstanceSpec, seed: u64) -> Instance<Q> {
    Instance::random(InstanceSpec { families: 1, max_len: 1, ..spec }, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplication_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (random_series(a, true, None), random_series(b, false, None), random_series(c, false, None));
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn multiplication_distributes(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (random_series(a, false, None), random_series(b, true, None), random_series(c, true, None));
        let l = x.mul(&y.add(&z).unwrap()).unwrap();
        let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn inverse_is_two_sided(a in any::<u64>()) {
        let x = random_series(a, false, Some(Mat::identity(2)));
        let inv = x.inverse().unwrap();
        let one = TruncatedSeries::one(2, 4);
        prop_assert_eq!(x.mul(&inv).unwrap(), one.clone());
        prop_assert_eq!(inv.mul(&x).unwrap(), one);
    }

    #[test]
    fn inverse_with_c_terms(a in any::<u64>()) {
        // x = x0 + x1 by c-degree; then x0·i0 = 1 and x0·i1 + x1·i0 = 0
        let x = random_series(a, true, Some(Mat::identity(2)));
        let inv = x.inverse().unwrap();
        let (x0, x1) = split_c(&x);
        let (i0, i1) = split_c(&inv);
        prop_assert_eq!(x0.mul(&i0).unwrap(), TruncatedSeries::one(2, 4));
        let cross = x0.mul(&i1).unwrap().add(&x1.mul(&i0).unwrap()).unwrap();
        prop_assert_eq!(cross.terms().count(), 0);
    }
}

#[test]
fn squared_c_terms_are_rejected() {
    let c = TruncatedSeries::monomial([0, 1, 0], Mat::<Q>::identity(2), 4);
    assert!(matches!(c.mul(&c), Err(CbfError::Precondition(_))));
}

#[test]
fn non_invertible_constant_is_rejected() {
    let x = TruncatedSeries::monomial([1, 0, 0], Mat::<Q>::identity(2), 4);
    assert!(x.inverse().is_err());
}

#[test]
fn truncation_drops_high_degrees() {
    let x = TruncatedSeries::monomial([1, 0, 1], Mat::<Q>::identity(2), 3);
    let sq = x.mul(&x).unwrap();
    assert_eq!(sq.terms().count(), 0);
    assert_eq!(x.shift([0, 0, 2]).terms().count(), 0);
}

#[test]
fn placement_of_insertions() {
    let inst = single(InstanceSpec::default(), 1);
    let eng = Engine::new(inst.joint());
    let fam = SeriesFamily::new(&eng, vec![(0, Face::Left), (1, Face::Right)]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b: Vec<Mat<Q>> = (0..3).map(|_| inst.random_b(&mut rng)).collect();
    let (a0, a1) = (Piece::Atom(0), Piece::Atom(1));

    let w = fam.word(&[0, 0, 0], &b[..2]).unwrap();
    let expect = vec![
        vec![a0.clone()],
        vec![Piece::left(b[0].clone()), a0.clone()],
        vec![Piece::left(b[1].clone()), a0.clone()],
    ];
    assert_eq!(w, Word::new(Chi::parse("lll").unwrap(), expect).unwrap());

    // first right at 1: that entry stays bare, the spare insertion trails
    let w = fam.word(&[0, 1, 0], &b[..2]).unwrap();
    let expect = vec![
        vec![a0.clone()],
        vec![a1.clone()],
        vec![Piece::left(b[0].clone()), a0.clone(), Piece::left(b[1].clone())],
    ];
    assert_eq!(w, Word::new(Chi::parse("lrl").unwrap(), expect).unwrap());

    let w = fam.word(&[0, 1], &b[..1]).unwrap();
    let expect = vec![vec![a0.clone()], vec![a1.clone(), Piece::right(b[0].clone())]];
    assert_eq!(w, Word::new(Chi::parse("lr").unwrap(), expect).unwrap());
    assert!(fam.word(&[0, 1], &b).is_err());
    assert!(fam.word(&[0, 2], &b[..1]).is_err());
}

#[test]
fn first_order_series_are_expectations() {
    let inst = single(InstanceSpec::default(), 2);
    let eng = Engine::new(inst.joint());
    let members = [(0, Face::Left), (1, Face::Right)];
    for (o, atom, chi) in [(0, 0, "l"), (1, 1, "r")] {
        let w = Word::new(Chi::parse(chi).unwrap(), vec![vec![Piece::Atom(atom)]]).unwrap();
        let nu = family_series_eval(&eng, &members, SeriesKind::Nu, &[o], &[]).unwrap();
        let mu = family_series_eval(&eng, &members, SeriesKind::Mu, &[o], &[]).unwrap();
        assert_eq!(nu, eng.e_top(&w).unwrap());
        assert_eq!(mu, eng.f_top(&w).unwrap());
        assert_eq!(family_series_eval(&eng, &members, SeriesKind::Rho, &[o], &[]).unwrap(), nu);
        assert_eq!(family_series_eval(&eng, &members, SeriesKind::Eta, &[o], &[]).unwrap(), mu);
    }
}

#[test]
fn moment_series_start_at_one() {
    let inst = single(InstanceSpec::default(), 3);
    let eng = Engine::new(inst.joint());
    let pt = point(&inst, 3, 3);
    for side in [Face::Left, Face::Right] {
        for which in [Moment::E, Moment::F] {
            let s = one_sided_moment_series(&eng, Z, side, which, &pt).unwrap();
            assert!(s.coeff([0, 0, 0]).is_identity());
        }
    }
    let e = one_sided_moment_series(&eng, Z, Face::Left, Moment::E, &pt).unwrap();
    let f = one_sided_moment_series(&eng, Z, Face::Left, Moment::F, &pt).unwrap();
    assert!(e.max_diff(&f).unwrap() > 0.0);
}

#[test]
fn one_sided_transforms_hold() {
    for seed in 0..3 {
        let inst = single(InstanceSpec::default(), seed);
        let eng = Engine::new(inst.joint());
        let pt = point(&inst, seed + 100, 4);
        for side in [Face::Left, Face::Right] {
            let rep = check_cumulant_transform(&eng, Z, side, &pt).unwrap();
            assert!(rep.holds(), "seed {seed} {side:?} {rep:?}");
            assert!(rep.degrees > 0);
        }
    }
}

#[test]
fn two_sided_transform_holds() {
    for seed in 0..3 {
        let inst = single(InstanceSpec::default(), seed);
        let eng = Engine::new(inst.joint());
        let rep = check_partial_r(&eng, Z, &point(&inst, seed + 100, 4)).unwrap();
        assert!(rep.holds(), "seed {seed} {rep:?}");
    }
}

#[test]
fn perturbed_right_side_is_caught() {
    let inst = single(InstanceSpec::default(), 1);
    let eng = Engine::new(inst.joint());
    let (l, r) = partial_r_sides(&eng, Z, &point(&inst, 101, 4)).unwrap();
    assert_eq!(l.mismatches(&r, 0.0).unwrap(), 0);
    let r2 = r.add(&TruncatedSeries::monomial([1, 1, 1], Mat::identity(4), 4)).unwrap();
    assert_eq!(l.mismatches(&r2, 0.0).unwrap(), 1);
}

#[test]
fn degenerate_shapes() {
    for (b, d, fe) in [(1, 1, false), (2, 2, true), (1, 1, true)] {
        let spec = InstanceSpec { dim_b: b, dim_d: d, f_equals_e: fe, ..Default::default() };
        let inst = single(spec, 3);
        let eng = Engine::new(inst.joint());
        let mut pt = point(&inst, 101, 4);
        if b == 1 {
            pt.c0 = Mat::identity(1);
        }
        assert!(check_partial_r(&eng, Z, &pt).unwrap().holds());
        if fe {
            let e = one_sided_moment_series(&eng, Z, Face::Left, Moment::E, &pt).unwrap();
            let f = one_sided_moment_series(&eng, Z, Face::Left, Moment::F, &pt).unwrap();
            assert_eq!(e.max_diff(&f).unwrap(), 0.0);
        }
    }
}

#[test]
fn transform_is_additive() {
    let spec = InstanceSpec { families: 2, max_len: 4, ..Default::default() };
    let inst = Instance::<Q>::random(spec, 3).unwrap();
    let rep = check_additivity(&inst, &point(&inst, 101, 3)).unwrap();
    assert!(rep.holds(), "{rep:?}");
}

#[test]
fn float_transform_within_tolerance() {
    let inst = Instance::<f64>::random(InstanceSpec { families: 1, max_len: 1, ..Default::default() }, 2).unwrap();
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pt = SeriesPoint { b0: inst.random_b(&mut rng), c0: inst.random_b(&mut rng), d0: inst.random_b(&mut rng), n: 3 };
    let rep = check_partial_r(&eng, Z, &pt).unwrap();
    assert!(rep.holds() && rep.max_diff < 1e-9, "{rep:?}");
}

#[test]
fn kind_names_parse() {
    assert_eq!(SeriesKind::parse("eta"), Some(SeriesKind::Eta));
    assert_eq!(SeriesKind::parse("nu"), Some(SeriesKind::Nu));
    assert_eq!(SeriesKind::parse("x"), None);
}
