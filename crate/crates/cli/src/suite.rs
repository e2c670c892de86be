//! The ten acceptance criteria, each timed against its budget.

use std::sync::Arc;
use std::time::{Duration, Instant};

use cbf_core::bnc::{catalan, enumerate_bnc, BncPartition, Chi, Face, Lattice};
use cbf_core::cumulants::{swap_hypothesis, tail_hypothesis, Engine, Entry, Piece, Word};
use cbf_core::fock::{BlockOp, Factor, FockPair, FockSpace};
use cbf_core::limits::{clt_check, general_limit_equivalence, poisson_check, sum_cumulants, CovarianceMaps, Normalization};
use cbf_core::matrix::Mat;
use cbf_core::sample::{all_chis, all_omegas, Instance, InstanceSpec};
use cbf_core::scalar::{Rational, Scalar};
use cbf_core::series::{check_cumulant_transform, check_partial_r, SeriesFamily, SeriesKind, SeriesPoint, TwoFaced};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliResult;

type Q = Rational;

/// Knobs for the suite. The defaults are the acceptance sizes.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Seeds per oracle criterion.
    pub seeds: u64,
    /// Instances for the transform criterion.
    pub instances: u64,
    /// Truncation length for the oracle criteria.
    pub max_len: usize,
    /// Offset added to every seed.
    pub base_seed: u64,
    /// Float tolerance.
    pub tol: f64,
    /// Lattice cap.
    pub max_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seeds: 25, instances: 50, max_len: 5, base_seed: 0, tol: 1e-9, max_n: 10 }
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: u64,
}

impl Criterion {
    /// One status line.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {:<28} {:>8.2}s / {}s  {}", self.id, self.title, self.seconds, self.budget_seconds, self.detail)
    }
}

/// Running tally of named checks.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    /// Checks run.
    pub checked: usize,
    /// Descriptions of the failed ones.
    pub failed: Vec<String>,
}

impl Tally {
    /// Records one check.
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed.push(what());
        }
    }

    /// Pass flag and a one-line description.
    pub fn summary(&self) -> (bool, String) {
        if self.failed.is_empty() {
            (true, format!("{} checks", self.checked))
        } else {
            let first = self.failed.iter().take(3).cloned().collect::<Vec<_>>().join("; ");
            (false, format!("{}/{} failed: {first}", self.failed.len(), self.checked))
        }
    }
}

const TITLES: [(&str, u64); 10] = [
    ("lattice counts", 30),
    ("mobius inversion", 60),
    ("oracle equivalence", 600),
    ("mixed cumulants vanish", 300),
    ("moment-cumulant round trip", 120),
    ("product and swap identities", 300),
    ("r-transform", 600),
    ("central limit", 120),
    ("compound poisson", 120),
    ("truncation soundness", 300),
];

/// Runs criterion `id` (1-based).
pub fn run_one(id: u32, cfg: &SuiteConfig) -> Criterion {
    let (title, budget) = TITLES[(id - 1) as usize];
    let start = Instant::now();
    let res = match id {
        1 => lattice_counts(cfg),
        2 => mobius_inversion(cfg),
        3 => oracle_equivalence(cfg),
        4 => vanishing(cfg),
        5 => round_trip(cfg),
        6 => product_identities(cfg),
        7 => r_transform(cfg),
        8 => central_limit(cfg),
        9 => compound_poisson(cfg),
        _ => truncation_soundness(cfg),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match res {
        Ok(t) => t.summary(),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > Duration::from_secs(budget) {
        passed = false;
        detail.push_str(" (over budget)");
    }
    Criterion { id, title, passed, detail, seconds: elapsed.as_secs_f64(), budget_seconds: budget }
}

/// Runs every criterion in order, calling `each` after each one.
pub fn run_all(cfg: &SuiteConfig, mut each: impl FnMut(&Criterion)) -> Vec<Criterion> {
    (1..=10)
        .map(|id| {
            let c = run_one(id, cfg);
            each(&c);
            c
        })
        .collect()
}

fn lattice_counts(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
    for n in 1..=8usize {
        let patterns: Vec<u64> = if n <= 5 {
            (0..1u64 << n).collect()
        } else {
            (0..50).map(|_| rng.next_u64() & ((1 << n) - 1)).collect()
        };
        for bits in patterns {
            let chi = Chi::from_bits(n, bits);
            let got = enumerate_bnc(&chi, cfg.max_n)?.len() as u64;
            t.check(got == catalan(n), || format!("{chi}: {got}"));
        }
    }
    Ok(t)
}

/// `ζ∗μ = δ` and `μ∗ζ = δ` on one lattice, with `μ` read both from below
/// and from above.
pub fn zeta_mobius_delta(lat: &Lattice) -> bool {
    let m = lat.len();
    let els = lat.elements();
    let leq: Vec<Vec<bool>> = els.iter().map(|s| els.iter().map(|p| s.leq(p).unwrap_or(false)).collect()).collect();
    let mut down = vec![vec![0i64; m]; m];
    let mut up = vec![vec![0i64; m]; m];
    for p in 0..m {
        for (s, v) in lat.mobius_down(p) {
            down[s][p] = v;
        }
        for (q, v) in lat.mobius_up(p) {
            up[p][q] = v;
        }
    }
    for s in 0..m {
        for p in 0..m {
            if down[s][p] != up[s][p] {
                return false;
            }
            if !leq[s][p] {
                continue;
            }
            let want = i64::from(s == p);
            let zm: i64 = (0..m).filter(|&t| leq[s][t] && leq[t][p]).map(|t| down[t][p]).sum();
            let mz: i64 = (0..m).filter(|&t| leq[s][t] && leq[t][p]).map(|t| up[s][t]).sum();
            if zm != want || mz != want {
                return false;
            }
        }
    }
    true
}

fn mobius_inversion(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    for n in 1..=6 {
        for chi in all_chis(n) {
            let lat = Lattice::new(&chi, cfg.max_n)?;
            t.check(zeta_mobius_delta(&lat), || format!("{chi}"));
            // on all-left words μ(0̂, 1̂) = (−1)^{n−1} C_{n−1}
            if chi.bits() == 0 {
                let m = lat.mobius(&BncPartition::zero(&chi), &BncPartition::one(&chi))?;
                let want = if n % 2 == 1 { 1 } else { -1 } * catalan(n - 1) as i64;
                t.check(m == want, || format!("μ(0,1) on {chi}: {m}"));
            }
        }
    }
    Ok(t)
}

fn oracle_spec(max_len: usize) -> InstanceSpec {
    InstanceSpec { max_len, ..InstanceSpec::default() }
}

/// Combinatorial and oracle moments for every `(χ, ω)` with `n ≤ 4` on one
/// seed, as `(combinatorial E, F, oracle E, F)`.
pub fn oracle_values<S: Scalar>(spec: InstanceSpec, seed: u64) -> CliResult<Vec<[Mat<S>; 4]>> {
    let inst = Instance::<S>::random(spec, seed)?;
    let pc = inst.per_class();
    let by_class = Engine::new(&pc);
    let joint = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for n in 1..=4 {
        for chi in all_chis(n) {
            for om in all_omegas(n, spec.families) {
                let w = inst.word(&chi, &om, true, &mut rng)?;
                let o = w.unlabeled();
                out.push([by_class.cbifree_moment_e(&w)?, by_class.cbifree_moment_f(&w)?, joint.e_top(&o)?, joint.f_top(&o)?]);
            }
        }
    }
    Ok(out)
}

fn oracle_equivalence(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let spec = oracle_spec(cfg.max_len);
    for s in 0..cfg.seeds {
        let seed = cfg.base_seed + s;
        for (k, v) in oracle_values::<Q>(spec, seed)?.iter().enumerate() {
            t.check(v[0] == v[2], || format!("seed {seed} word {k}: E"));
            t.check(v[1] == v[3], || format!("seed {seed} word {k}: F"));
        }
        for (k, v) in oracle_values::<f64>(spec, seed)?.iter().enumerate() {
            t.check(v[0].max_abs_diff(&v[2]) <= cfg.tol, || format!("seed {seed} word {k}: float E"));
            t.check(v[1].max_abs_diff(&v[3]) <= cfg.tol, || format!("seed {seed} word {k}: float F"));
        }
    }
    Ok(t)
}

/// The four atoms of two families lifted onto the first factor only, so the
/// families are not free.
pub fn same_factor_pair<S: Scalar>(inst: &Instance<S>) -> CliResult<FockPair<S>> {
    let space = Arc::new(FockSpace::new(inst.context().clone(), vec![inst.factors()[0].clone()], inst.spec().max_len)?);
    let mut atoms = Vec::new();
    for (l, r) in inst.generators() {
        atoms.push(Some(space.lift(0, Face::Left, l.clone())?));
        atoms.push(Some(space.lift(0, Face::Right, r.clone())?));
    }
    Ok(FockPair::new(space, atoms))
}

/// Mixed `κ` and `K` on every `(χ, ω)` with `2 ≤ n ≤ max_n` and non-constant
/// `ω`.
pub fn mixed_vanishing<S: Scalar>(inst: &Instance<S>, max_n: usize, seed: u64, tol: f64, t: &mut Tally) -> CliResult<()> {
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a11);
    let zero = |m: &Mat<S>| if S::is_exact() { m.is_zero() } else { m.max_abs() <= tol };
    for n in 2..=max_n {
        for chi in all_chis(n) {
            for om in all_omegas(n, inst.spec().families) {
                if om.iter().all(|&c| c == om[0]) {
                    continue;
                }
                let w = inst.word(&chi, &om, true, &mut rng)?.unlabeled();
                let ok = zero(&eng.kappa_top(&w)?) && zero(&eng.k_top(&w)?);
                t.check(ok, || format!("seed {seed} {chi} {om:?}"));
            }
        }
    }
    Ok(())
}

/// Searches words with `n ≤ 3` for a nonzero mixed `K` on non-free inputs.
pub fn negative_control<S: Scalar>(inst: &Instance<S>, seed: u64) -> CliResult<Option<String>> {
    let pair = same_factor_pair(inst)?;
    let eng = Engine::new(&pair);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=3 {
        for chi in all_chis(n) {
            for om in all_omegas(n, inst.spec().families) {
                if om.iter().all(|&c| c == om[0]) {
                    continue;
                }
                let w = inst.word(&chi, &om, false, &mut rng)?.unlabeled();
                if !eng.k_top(&w)?.is_zero() {
                    return Ok(Some(format!("{chi} {om:?}")));
                }
            }
        }
    }
    Ok(None)
}

fn vanishing(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let spec = oracle_spec(cfg.max_len);
    for s in 0..cfg.seeds {
        let seed = cfg.base_seed + s;
        let inst = Instance::<Q>::random(spec, seed)?;
        mixed_vanishing(&inst, 5, seed, cfg.tol, &mut t)?;
    }
    let inst = Instance::<Q>::random(spec, cfg.base_seed)?;
    let witness = negative_control(&inst, cfg.base_seed)?;
    t.check(witness.is_some(), || "negative control found no nonzero mixed cumulant".into());
    Ok(t)
}

fn round_trip(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let inst = Instance::<Q>::random(oracle_spec(cfg.max_len), cfg.base_seed + 1)?;
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed + 2);
    for k in 0..100 {
        let n = 1 + (rng.next_u32() % 5) as usize;
        let chi = Chi::from_bits(n, rng.next_u64() & ((1 << n) - 1));
        let om: Vec<usize> = (0..n).map(|_| (rng.next_u32() % 2) as usize).collect();
        let w = inst.word(&chi, &om, true, &mut rng)?.unlabeled();
        let (e, f) = (eng.e_top(&w)?, eng.f_top(&w)?);
        t.check(eng.e_from_cumulants(&w)? == e, || format!("word {k}: E = Σκ"));
        t.check(eng.f_from_cumulants(&w)? == f, || format!("word {k}: F = ΣK"));
        let lat = Lattice::new(&chi, cfg.max_n)?;
        let one = BncPartition::one(&chi);
        let mut kappa = Mat::zero(inst.context().dim_b());
        let mut k_rest = Mat::zero(inst.context().dim_d());
        for p in lat.elements() {
            kappa.add_assign(&eng.e_pi(&w, p)?.scale(&Q::from_int(lat.mobius(p, &one)?)));
            if !p.is_one() {
                k_rest.add_assign(&eng.k_pi(&w, p)?);
            }
        }
        t.check(kappa == eng.kappa_top(&w)?, || format!("word {k}: κ = Σμ E"));
        t.check(f.sub(&k_rest) == eng.k_top(&w)?, || format!("word {k}: K = F − Σ K"));
    }
    Ok(t)
}

/// Splits `n` positions into consecutive groups of constant face, in every
/// possible way.
pub fn groupings(chi: &Chi) -> Vec<Vec<usize>> {
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

/// Reduction axioms, `B`-insertion vanishing, product formula and pair
/// characterisations on one family for `2 ≤ n ≤ max_n`.
pub fn structural_checks<S: Scalar>(inst: &Instance<S>, max_n: usize, seed: u64, tol: f64, t: &mut Tally) -> CliResult<()> {
    let eng = Engine::new(inst.joint());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a11);
    let zero = |m: &Mat<S>| if S::is_exact() { m.is_zero() } else { m.max_abs() <= tol };
    for n in 1..=max_n {
        for chi in all_chis(n) {
            let w = inst.word(&chi, &vec![0; n], true, &mut rng)?.unlabeled();
            let ax = eng.pair_axioms(&w, &inst.random_b(&mut rng), tol)?;
            t.check(ax.e.all() && ax.kappa.all() && ax.f.all() && ax.k.all(), || format!("{chi} axioms {ax:?}"));
            if n < 2 {
                continue;
            }
            for q in 0..n {
                let (kap, k) = eng.b_insertion_cumulants(&w, q, &inst.random_b(&mut rng))?;
                t.check(zero(&kap) && zero(&k), || format!("{chi} B-insertion at {q}"));
            }
            for sizes in groupings(&chi) {
                let c = eng.grouped_cumulants(&w, &sizes)?;
                t.check(c.kappa.holds(tol) && c.k.holds(tol), || format!("{chi} grouping {sizes:?}"));
            }
            for q in 0..n - 1 {
                if chi.face(q) != chi.face(q + 1) {
                    continue;
                }
                let c = eng.cumulant_pair_identity(&w, q)?;
                t.check(c.kappa.holds(tol) && c.k.holds(tol), || format!("{chi} cumulant pair at {q}"));
                let (e, f) = eng.moment_pair_identity(&w, q)?;
                t.check(e.holds(tol) && f.holds(tol), || format!("{chi} moment pair at {q}"));
            }
        }
    }
    Ok(())
}

/// One factor carrying `x` (left, atom 0), `y` (right, atom 1) and two
/// generic generators (atoms 2 and 3).
pub fn witness_pair(x: BlockOp<Q>, y: BlockOp<Q>, rng: &mut ChaCha8Rng) -> CliResult<FockPair<Q>> {
    let ctx = cbf_core::algebra::AlgebraContext::<Q>::new(2, 4, cbf_core::algebra::Embedding::BlockDiagonal)?;
    let size = x.size();
    let factor = Factor::random(&ctx, size - 1, false, rng);
    let space = Arc::new(FockSpace::new(ctx, vec![factor], 4)?);
    let zl = BlockOp::random(size, 2, 2, 9, rng);
    let zr = BlockOp::random(size, 2, 2, 9, rng);
    let atoms = vec![
        Some(space.lift(0, Face::Left, x)?),
        Some(space.lift(0, Face::Right, y)?),
        Some(space.lift(0, Face::Left, zl)?),
        Some(space.lift(0, Face::Right, zr)?),
    ];
    Ok(FockPair::new(space, atoms))
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

/// Outcome of the swap or tail lemma on one witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaOutcome {
    /// Hypotheses failed; conclusions were not judged.
    NotApplicable,
    /// Hypotheses held; `failures` conclusions failed out of `checked`.
    Checked { checked: usize, failures: usize, nonzero: usize },
}

/// Swap lemma on atoms 0 (left) and 1 (right) of `pair`.
pub fn swap_lemma(pair: &FockPair<Q>, max_n: usize) -> CliResult<LemmaOutcome> {
    let (xe, ye) = (vec![Piece::Atom(0)], vec![Piece::Atom(1)]);
    if !swap_hypothesis(pair, &xe, &ye, &probes())? {
        return Ok(LemmaOutcome::NotApplicable);
    }
    let eng = Engine::new(pair);
    let (mut checked, mut failures, mut nonzero) = (0, 0, 0);
    for n in 2..=max_n {
        for k0 in 0..n - 1 {
            for chi in all_chis(n) {
                if chi.face(k0) != Face::Left || chi.face(k0 + 1) != Face::Right {
                    continue;
                }
                let entries = (0..n)
                    .map(|k| {
                        if k == k0 {
                            xe.clone()
                        } else if k == k0 + 1 {
                            ye.clone()
                        } else {
                            filler(chi.face(k))
                        }
                    })
                    .collect();
                let s = eng.swap_sides(&Word::new(chi.clone(), entries)?, k0)?;
                checked += 1;
                failures += usize::from(!(s.kappa.holds(0.0) && s.k.holds(0.0)));
                nonzero += usize::from(!s.k.lhs.is_zero());
            }
        }
    }
    Ok(LemmaOutcome::Checked { checked, failures, nonzero })
}

/// Tail lemma on atoms 0 (left) and 1 (right) of `pair`.
pub fn tail_lemma(pair: &FockPair<Q>, max_n: usize) -> CliResult<LemmaOutcome> {
    let (xe, ye) = (vec![Piece::Atom(0)], vec![Piece::Atom(1)]);
    if !tail_hypothesis(pair, &xe, &ye, &probes())? {
        return Ok(LemmaOutcome::NotApplicable);
    }
    let eng = Engine::new(pair);
    let (mut checked, mut failures, mut nonzero) = (0, 0, 0);
    for n in 1..=max_n {
        for chi in all_chis(n) {
            if chi.face(n - 1) != Face::Left {
                continue;
            }
            let mut entries: Vec<Entry<Q>> = (0..n - 1).map(|k| filler(chi.face(k))).collect();
            entries.push(xe.clone());
            let s = eng.tail_sides(&Word::new(chi.clone(), entries)?, ye.clone())?;
            checked += 1;
            failures += usize::from(!(s.kappa.holds(0.0) && s.k.holds(0.0)));
            nonzero += usize::from(!s.k.lhs.is_zero());
        }
    }
    Ok(LemmaOutcome::Checked { checked, failures, nonzero })
}

/// Swap and tail lemmas on the tensor-split and vacuum-mirror witnesses,
/// and the generic control, as `(name, passed)`.
pub fn witness_checks(seed: u64, max_n: usize) -> CliResult<Vec<(String, bool)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let good = |o: &LemmaOutcome| matches!(o, LemmaOutcome::Checked { failures: 0, nonzero, .. } if *nonzero > 0);
    let mut out = Vec::new();
    let (x, y) = BlockOp::split_pair(&BlockOp::random(2, 2, 2, 9, &mut rng), &BlockOp::random(2, 2, 2, 9, &mut rng));
    let split = witness_pair(x, y, &mut rng)?;
    out.push(("swap lemma on split witness".into(), good(&swap_lemma(&split, max_n)?)));
    let x = BlockOp::random(3, 2, 2, 9, &mut rng);
    let y = x.vacuum_mirror();
    let mirror = witness_pair(x, y, &mut rng)?;
    out.push(("tail lemma on mirror witness".into(), good(&tail_lemma(&mirror, max_n)?)));
    let generic = witness_pair(BlockOp::random(3, 2, 2, 9, &mut rng), BlockOp::random(3, 2, 2, 9, &mut rng), &mut rng)?;
    out.push((
        "generic operators reported not applicable".into(),
        swap_lemma(&generic, max_n)? == LemmaOutcome::NotApplicable
            && tail_lemma(&generic, max_n)? == LemmaOutcome::NotApplicable,
    ));
    Ok(out)
}

fn product_identities(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    for s in 0..3 {
        let seed = cfg.base_seed + s;
        let inst = Instance::<Q>::random(oracle_spec(cfg.max_len), seed)?;
        structural_checks(&inst, 4, seed, 0.0, &mut t)?;
        for (name, ok) in witness_checks(seed, 4)? {
            t.check(ok, || format!("seed {seed}: {name}"));
        }
    }
    Ok(t)
}

/// A random series point on `inst`.
pub fn series_point<S: Scalar>(inst: &Instance<S>, seed: u64, n: u32) -> SeriesPoint<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SeriesPoint { b0: inst.random_b(&mut rng), c0: inst.random_b(&mut rng), d0: inst.random_b(&mut rng), n }
}

/// One family (atoms 0 and 1) on its own factor.
pub fn single_family<S: Scalar>(spec: InstanceSpec, seed: u64) -> CliResult<Instance<S>> {
    Ok(Instance::random(InstanceSpec { families: 1, max_len: 1, ..spec }, seed)?)
}

const Z: TwoFaced = TwoFaced { left: 0, right: 1 };

fn r_transform(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let mut shapes = vec![(InstanceSpec::default(), cfg.instances)];
    shapes.push((InstanceSpec { dim_b: 1, dim_d: 1, ..InstanceSpec::default() }, 5));
    shapes.push((InstanceSpec { dim_b: 2, dim_d: 2, f_equals_e: true, ..InstanceSpec::default() }, 5));
    for (spec, count) in shapes {
        for s in 0..count {
            let seed = cfg.base_seed + s;
            let inst = single_family::<Q>(spec, seed)?;
            let eng = Engine::new(inst.joint());
            let pt = series_point(&inst, seed + 1000, 4);
            let tag = format!("{}/{} seed {seed}", spec.dim_b, spec.dim_d);
            for side in [Face::Left, Face::Right] {
                let rep = check_cumulant_transform(&eng, Z, side, &pt)?;
                t.check(rep.holds(), || format!("{tag} {side:?} lemma: {rep:?}"));
            }
            let rep = check_partial_r(&eng, Z, &pt)?;
            t.check(rep.holds(), || format!("{tag} theorem: {rep:?}"));
        }
    }
    Ok(t)
}

fn central_limit(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let ladder = [1, 4, 16, 64];
    for s in 0..3 {
        let seed = cfg.base_seed + s;
        let spec = InstanceSpec { centered: true, ..InstanceSpec::default() };
        let inst = single_family::<Q>(spec, seed)?;
        let eng = Engine::new(inst.joint());
        let fam = SeriesFamily::new(&eng, vec![(0, Face::Left), (1, Face::Right)]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
        let rep = clt_check(&fam, &ladder, 5, &mut rng)?;
        for (name, ok) in &rep.checks {
            t.check(*ok, || format!("seed {seed}: {name}"));
        }
        let cov = CovarianceMaps::from_family(&fam)?;
        let b = inst.random_b(&mut rng);
        for i in 0..2 {
            for j in 0..2 {
                for &c in &ladder {
                    let bs = [b.clone()];
                    let rho = sum_cumulants(&[&fam], c, Normalization::InvSqrt, SeriesKind::Rho, &[i, j], &bs)?;
                    let eta = sum_cumulants(&[&fam], c, Normalization::InvSqrt, SeriesKind::Eta, &[i, j], &bs)?;
                    t.check(rho == cov.sigma(i, j, &b) && eta == cov.tau(i, j, &b), || {
                        format!("seed {seed}: order 2 ({i},{j}) at N = {c}")
                    });
                }
            }
        }
    }
    Ok(t)
}

fn compound_poisson(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    let ladder = [8, 16, 32, 64];
    let members = [(0, Face::Left), (1, Face::Right)];
    for s in 0..2 {
        let seed = cfg.base_seed + s;
        let inst = single_family::<Q>(InstanceSpec::default(), seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 900);
        let lambda = Q::from_frac(1, 2);
        let p = poisson_check(inst.joint(), &members, lambda.clone(), &ladder, 4, &mut rng)?;
        let g = general_limit_equivalence(inst.joint(), &members, lambda, &ladder, 4, &mut rng)?;
        for (name, ok) in p.checks.iter().chain(&g.checks) {
            t.check(*ok, || format!("seed {seed}: {name}"));
        }
    }
    Ok(t)
}

fn truncation_soundness(cfg: &SuiteConfig) -> CliResult<Tally> {
    let mut t = Tally::default();
    for s in 0..cfg.seeds {
        let seed = cfg.base_seed + s;
        let a = oracle_values::<Q>(oracle_spec(cfg.max_len), seed)?;
        let b = oracle_values::<Q>(oracle_spec(cfg.max_len + 1), seed)?;
        t.check(a.len() == b.len(), || format!("seed {seed}: word count"));
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            t.check(x == y, || format!("seed {seed} word {k}: values moved"));
            t.check(y[0] == y[2] && y[1] == y[3], || format!("seed {seed} word {k}: oracle mismatch"));
        }
    }
    Ok(t)
}
