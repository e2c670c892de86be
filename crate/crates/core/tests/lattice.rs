use std::collections::BTreeSet;

use cbf_core::bnc::*;
use cbf_core::sample::all_chis;
use proptest::prelude::*;

// Every set partition of 0..n, as sorted block lists.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::<Vec<usize>>::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for p in out {
            for k in 0..p.len() {
                let mut q = p.clone();
                q[k].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

fn crosses(a: &[usize], b: &[usize], rank: &[usize]) -> bool {
    for &a1 in a {
        for &a2 in a {
            for &b1 in b {
                for &b2 in b {
                    let (x1, x2, y1, y2) = (rank[a1], rank[a2], rank[b1], rank[b2]);
                    if x1 < y1 && y1 < x2 && x2 < y2 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn brute_bnc(chi: &Chi) -> BTreeSet<Vec<Vec<usize>>> {
    let rank = chi.rank();
    set_partitions(chi.len())
        .into_iter()
        .filter(|p| {
            (0..p.len()).all(|i| (0..p.len()).all(|j| i == j || !crosses(&p[i], &p[j], &rank)))
        })
        .map(|mut p| {
            p.sort();
            p
        })
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=6 {
        for chi in all_chis(n) {
            let got: BTreeSet<Vec<Vec<usize>>> =
                enumerate_bnc(&chi, 10).unwrap().iter().map(|p| p.blocks().to_vec()).collect();
            assert_eq!(got, brute_bnc(&chi), "χ = {chi}");
        }
    }
}

#[test]
fn counts_are_catalan() {
    for n in 0..=8 {
        let step = if n <= 5 { 1 } else { 37 };
        for bits in (0..1u64 << n).step_by(step) {
            let chi = Chi::from_bits(n, bits);
            assert_eq!(enumerate_bnc(&chi, 10).unwrap().len() as u64, catalan(n), "χ = {chi}");
        }
    }
}

#[test]
fn size_cap_is_enforced() {
    let chi = Chi::parse("lllll").unwrap();
    assert!(matches!(enumerate_bnc(&chi, 4), Err(cbf_core::CbfError::SizeLimit { n: 5, limit: 4 })));
}

#[test]
fn twelve_point_example() {
    // lefts 1 2 4 6 7 9 12, rights 3 5 8 10 11
    let chi = Chi::parse("llrlrllrlrrl").unwrap();
    let blocks = vec![vec![1, 6], vec![2, 4], vec![7, 11], vec![9, 12], vec![3, 8, 10], vec![5]];
    let pi = BncPartition::from_one_based(chi.clone(), &blocks).unwrap();
    let dec = pi.chi_intervals();
    let one_based: Vec<Vec<usize>> = dec.intervals.iter().map(|v| v.iter().map(|i| i + 1).collect()).collect();
    assert_eq!(one_based, vec![vec![1, 2, 4, 6], vec![7, 9, 11, 12], vec![3, 5, 8, 10]]);
    let order = chi.order();
    let ext: Vec<Vec<usize>> = dec.outer.iter().map(|&o| pi.blocks()[o].iter().map(|i| i + 1).collect()).collect();
    assert_eq!(ext, vec![vec![1, 6], vec![7, 11], vec![3, 8, 10]]);
    // ≺-extremes of each interval
    let ext_pts: Vec<(usize, usize)> = dec
        .intervals
        .iter()
        .map(|v| {
            let r: Vec<usize> = order.iter().copied().filter(|i| v.contains(i)).collect();
            (r[0] + 1, r[r.len() - 1] + 1)
        })
        .collect();
    assert_eq!(ext_pts, vec![(1, 6), (7, 11), (10, 3)]);
    let kinds = pi.classify_blocks();
    for (k, b) in pi.blocks().iter().enumerate() {
        let exterior = dec.outer.contains(&k);
        assert_eq!(kinds[k] == BlockKind::Exterior, exterior, "block {b:?}");
    }
}

#[test]
fn exterior_blocks_are_interval_outers() {
    for n in 1..=7 {
        for chi in all_chis(n) {
            for pi in enumerate_bnc(&chi, 10).unwrap() {
                let dec = pi.chi_intervals();
                let kinds = pi.classify_blocks();
                let ext: BTreeSet<usize> = (0..pi.len()).filter(|&k| kinds[k] == BlockKind::Exterior).collect();
                let outer: BTreeSet<usize> = dec.outer.iter().copied().collect();
                assert_eq!(ext, outer);
                let covered: usize = dec.intervals.iter().map(Vec::len).sum();
                assert_eq!(covered, n);
            }
        }
    }
}

#[test]
fn join_is_least_upper_bound() {
    for n in 1..=5 {
        for chi in all_chis(n) {
            let all = enumerate_bnc(&chi, 10).unwrap();
            for s in &all {
                for p in &all {
                    let j = s.join(p).unwrap();
                    let uppers: Vec<&BncPartition> =
                        all.iter().filter(|t| s.leq(t).unwrap() && p.leq(t).unwrap()).collect();
                    assert!(uppers.contains(&&j));
                    assert!(uppers.iter().all(|t| j.leq(t).unwrap()));
                }
            }
        }
    }
}

#[test]
fn merge_adjacent_is_onto() {
    for n in 2..=6 {
        for chi in all_chis(n) {
            let all = enumerate_bnc(&chi, 10).unwrap();
            for q in 0..n - 1 {
                if chi.face(q) != chi.face(q + 1) {
                    continue;
                }
                let image: BTreeSet<BncPartition> = all.iter().map(|p| p.merge_adjacent(q).unwrap()).collect();
                let target: BTreeSet<BncPartition> =
                    enumerate_bnc(&chi.remove(q).unwrap(), 10).unwrap().into_iter().collect();
                assert_eq!(image, target, "χ = {chi}, q = {q}");
            }
        }
    }
}

#[test]
fn mobius_small_values() {
    let chi = Chi::parse("lll").unwrap();
    let zero = BncPartition::zero(&chi);
    let one = BncPartition::one(&chi);
    // on NC(3) the Möbius value μ(0̂, 1̂) is 2
    assert_eq!(mobius_bnc(&zero, &one, 10).unwrap(), 2);
    let mid = BncPartition::from_one_based(chi.clone(), &[vec![1, 2], vec![3]]).unwrap();
    assert_eq!(mobius_bnc(&mid, &one, 10).unwrap(), -1);
    let other = BncPartition::from_one_based(chi, &[vec![1, 3], vec![2]]).unwrap();
    assert!(matches!(mobius_bnc(&mid, &other, 10), Err(cbf_core::CbfError::NotComparable)));
}

#[test]
fn json_round_trip_is_one_based() {
    let chi = Chi::parse("lrlr").unwrap();
    let p = BncPartition::from_one_based(chi, &[vec![1, 2], vec![3, 4]]).unwrap();
    assert_eq!(p.to_one_based(), vec![vec![1, 2], vec![3, 4]]);
    assert!(p.to_json_string().contains("[1,2]"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zeta_times_mobius_is_delta(n in 1usize..=5, bits in any::<u64>()) {
        let chi = Chi::from_bits(n, bits & ((1 << n) - 1));
        let lat = Lattice::new(&chi, 10).unwrap();
        let els = lat.elements();
        for (si, s) in els.iter().enumerate() {
            for (pi, p) in els.iter().enumerate() {
                if !s.leq(p).unwrap() {
                    continue;
                }
                let sum: i64 = els
                    .iter()
                    .filter(|t| s.leq(t).unwrap() && t.leq(p).unwrap())
                    .map(|t| lat.mobius(t, p).unwrap())
                    .sum();
                prop_assert_eq!(sum, i64::from(si == pi));
            }
        }
    }

    #[test]
    fn restriction_stays_bnc(n in 2usize..=6, bits in any::<u64>(), mask in any::<u64>(), pick in any::<usize>()) {
        let chi = Chi::from_bits(n, bits & ((1 << n) - 1));
        let all = enumerate_bnc(&chi, 10).unwrap();
        let p = &all[pick % all.len()];
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let r = p.restrict(&subset).unwrap();
        prop_assert!(is_bnc(r.blocks(), r.chi()).unwrap());
    }

    #[test]
    fn order_is_lefts_up_rights_down(n in 1usize..=10, bits in any::<u64>()) {
        let chi = Chi::from_bits(n, bits & ((1 << n) - 1));
        let order = chi.order();
        let lefts: Vec<usize> = (0..n).filter(|&i| chi.face(i) == Face::Left).collect();
        let mut rights: Vec<usize> = (0..n).filter(|&i| chi.face(i) == Face::Right).collect();
        rights.reverse();
        prop_assert_eq!(order, lefts.into_iter().chain(rights).collect::<Vec<_>>());
    }
}
