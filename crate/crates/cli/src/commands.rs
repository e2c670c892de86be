//! One function per leaf command. Each returns a [`Report`].

use cbf_core::bnc::{catalan, enumerate_bnc, BlockKind, BncPartition, Chi, Face, Lattice, Omega};
use cbf_core::cumulants::{theta_expansion, Engine, Word};
use cbf_core::limits::{clt_check, general_limit_equivalence, poisson_check, LimitReport};
use cbf_core::sample::{all_chis, all_omegas, Instance, InstanceSpec};
use cbf_core::scalar::{Rational, Scalar};
use cbf_core::series::{
    check_cumulant_transform, check_partial_r, one_sided_cumulant_series, partial_r_transform, SeriesFamily,
    SeriesKind, TruncatedSeries, TwoFaced,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Config, Mode};
use crate::error::{CliError, CliResult};
use crate::report::{mat_json, series_json, Report};
use crate::suite::{self, Tally};

/// Every runnable command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leaf {
    BncEnumerate,
    BncMobius,
    BncIntervals,
    RepBuild,
    RepMoments,
    CumulantsEval,
    CumulantsMixedTest,
    CumulantsProductTest,
    MomentsUniversalE,
    MomentsUniversalF,
    RtransformLemma,
    RtransformTheorem,
    LimitsClt,
    LimitsPoisson,
    LimitsGeneral,
    SuiteAcceptance,
}

const NAMES: [(Leaf, &str, &str); 16] = [
    (Leaf::BncEnumerate, "bnc", "enumerate"),
    (Leaf::BncMobius, "bnc", "mobius"),
    (Leaf::BncIntervals, "bnc", "intervals"),
    (Leaf::RepBuild, "rep", "build"),
    (Leaf::RepMoments, "rep", "moments"),
    (Leaf::CumulantsEval, "cumulants", "eval"),
    (Leaf::CumulantsMixedTest, "cumulants", "mixed-test"),
    (Leaf::CumulantsProductTest, "cumulants", "product-test"),
    (Leaf::MomentsUniversalE, "moments", "universal-E"),
    (Leaf::MomentsUniversalF, "moments", "universal-F"),
    (Leaf::RtransformLemma, "rtransform", "lemma"),
    (Leaf::RtransformTheorem, "rtransform", "theorem"),
    (Leaf::LimitsClt, "limits", "clt"),
    (Leaf::LimitsPoisson, "limits", "poisson"),
    (Leaf::LimitsGeneral, "limits", "general"),
    (Leaf::SuiteAcceptance, "suite", "acceptance"),
];

impl Leaf {
    /// `["group", "command"]`.
    pub fn path(self) -> Vec<String> {
        let (_, g, c) = NAMES.iter().find(|x| x.0 == self).expect("every leaf is named");
        vec![g.to_string(), c.to_string()]
    }

    /// Inverse of [`Leaf::path`].
    pub fn from_path(p: &[String]) -> CliResult<Self> {
        NAMES
            .iter()
            .find(|x| p.len() == 2 && x.1 == p[0] && x.2 == p[1])
            .map(|x| x.0)
            .ok_or_else(|| CliError::Usage(format!("unknown command {p:?}")))
    }
}

/// Runs a command in the configured scalar mode.
pub fn execute(leaf: Leaf, cfg: &Config) -> CliResult<Report> {
    match cfg.mode {
        Mode::Exact => execute_as::<Rational>(leaf, cfg),
        Mode::Float => execute_as::<f64>(leaf, cfg),
    }
}

fn execute_as<S: Scalar>(leaf: Leaf, cfg: &Config) -> CliResult<Report> {
    let mut r = Report::new(&leaf.path().join(" "), cfg.mode);
    match leaf {
        Leaf::BncEnumerate => bnc_enumerate(cfg, &mut r)?,
        Leaf::BncMobius => bnc_mobius(cfg, &mut r)?,
        Leaf::BncIntervals => bnc_intervals(cfg, &mut r)?,
        Leaf::RepBuild => rep_build::<S>(cfg, &mut r)?,
        Leaf::RepMoments => rep_moments::<S>(cfg, &mut r)?,
        Leaf::CumulantsEval => cumulants_eval::<S>(cfg, &mut r)?,
        Leaf::CumulantsMixedTest => mixed_test::<S>(cfg, &mut r)?,
        Leaf::CumulantsProductTest => product_test::<S>(cfg, &mut r)?,
        Leaf::MomentsUniversalE => universal::<S>(cfg, false, &mut r)?,
        Leaf::MomentsUniversalF => universal::<S>(cfg, true, &mut r)?,
        Leaf::RtransformLemma => rtransform::<S>(cfg, false, &mut r)?,
        Leaf::RtransformTheorem => rtransform::<S>(cfg, true, &mut r)?,
        Leaf::LimitsClt => limits::<S>(cfg, 0, &mut r)?,
        Leaf::LimitsPoisson => limits::<S>(cfg, 1, &mut r)?,
        Leaf::LimitsGeneral => limits::<S>(cfg, 2, &mut r)?,
        Leaf::SuiteAcceptance => acceptance(cfg, &mut r)?,
    }
    Ok(r)
}

fn need_chi(cfg: &Config) -> CliResult<Chi> {
    let s = cfg.chi.as_deref().ok_or_else(|| CliError::Usage("--chi is required".into()))?;
    Ok(Chi::parse(s)?)
}

fn omega_for(cfg: &Config, chi: &Chi) -> CliResult<Vec<usize>> {
    let om = cfg.omega.clone().unwrap_or_else(|| vec![0; chi.len()]);
    if om.len() != chi.len() {
        return Err(CliError::Usage(format!("ω has {} labels, χ has {} positions", om.len(), chi.len())));
    }
    if let Some(&bad) = om.iter().find(|&&c| c >= cfg.factors) {
        return Err(CliError::Usage(format!("label {bad} needs more than {} factors", cfg.factors)));
    }
    Ok(om)
}

fn spec(cfg: &Config) -> InstanceSpec {
    InstanceSpec {
        dim_b: cfg.dim_b,
        dim_d: cfg.dim_d,
        reduced: cfg.reduced,
        families: cfg.factors,
        max_len: cfg.max_len,
        centered: false,
        f_equals_e: false,
    }
}

fn tally_into(r: &mut Report, name: &str, t: &Tally) {
    let (ok, detail) = t.summary();
    r.check(name, ok);
    r.line(format!("{name}: {detail}"));
}

fn bnc_enumerate(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let chi = need_chi(cfg)?;
    let mut parts: Vec<Vec<Vec<usize>>> = enumerate_bnc(&chi, cfg.max_n)?.iter().map(|p| p.to_one_based()).collect();
    parts.sort();
    r.line(format!("{} partitions", parts.len()));
    for p in &parts {
        r.line(serde_json::to_string(p)?);
    }
    r.check("count is Catalan", parts.len() as u64 == catalan(chi.len()));
    r.data = json!({ "chi": chi.to_string(), "count": parts.len(), "partitions": parts });
    Ok(())
}

fn bnc_mobius(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let chi = need_chi(cfg)?;
    let lat = Lattice::new(&chi, cfg.max_n)?;
    let mut rows: Vec<(Vec<Vec<usize>>, i64)> =
        lat.mobius_down(lat.top()).into_iter().map(|(s, m)| (lat.elements()[s].to_one_based(), m)).collect();
    rows.sort();
    if let Some(b) = &cfg.blocks {
        let sigma = BncPartition::from_one_based(chi.clone(), b)?;
        let m = lat.mobius(&sigma, &BncPartition::one(&chi))?;
        r.line(format!("mu({}, 1) = {m}", serde_json::to_string(b)?));
    }
    let m0 = lat.mobius(&BncPartition::zero(&chi), &BncPartition::one(&chi))?;
    r.line(format!("mu(0, 1) = {m0}"));
    let ok = suite::zeta_mobius_delta(&lat);
    r.line(format!("zeta*mu = delta: {ok}"));
    r.check("zeta*mu = delta", ok);
    let table: Vec<_> = rows.iter().map(|(p, m)| json!({ "partition": p, "mu_to_top": m })).collect();
    r.data = json!({ "chi": chi.to_string(), "size": lat.len(), "mu_zero_top": m0, "table": table });
    Ok(())
}

fn bnc_intervals(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let chi = need_chi(cfg)?;
    let blocks = cfg.blocks.as_ref().ok_or_else(|| CliError::Usage("--blocks is required".into()))?;
    let pi = BncPartition::from_one_based(chi.clone(), blocks)?;
    let dec = pi.chi_intervals();
    let kinds = pi.classify_blocks();
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    let intervals: Vec<Vec<usize>> = dec.intervals.iter().map(|v| one(v)).collect();
    let outer: Vec<Vec<usize>> = dec.outer.iter().map(|&o| one(&pi.blocks()[o])).collect();
    let kinds: Vec<_> = pi
        .blocks()
        .iter()
        .zip(&kinds)
        .map(|(b, k)| json!({ "block": one(b), "kind": if *k == BlockKind::Exterior { "exterior" } else { "interior" } }))
        .collect();
    r.line(format!("chi-intervals: {}", serde_json::to_string(&intervals)?));
    r.line(format!("outer blocks: {}", serde_json::to_string(&outer)?));
    r.check("partition is bi-non-crossing", true);
    r.data = json!({ "chi": chi.to_string(), "intervals": intervals, "outer": outer, "blocks": kinds });
    Ok(())
}

fn rep_build<S: Scalar>(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    let space = inst.joint().space();
    r.line(format!("factors: {}, basis words: {}, max length: {}", inst.factors().len(), space.basis_count(), space.max_len()));
    let centred: Vec<_> = inst
        .factors()
        .iter()
        .map(|f| json!({ "reduced": f.reduced_dim(), "deltas": f.deltas().iter().map(mat_json).collect::<Vec<_>>() }))
        .collect();
    r.check("instance built", true);
    r.data = json!({
        "dim_b": cfg.dim_b, "dim_d": cfg.dim_d, "max_len": space.max_len(),
        "basis_count": space.basis_count(), "factors": centred,
    });
    Ok(())
}

fn word_for<S: Scalar>(cfg: &Config, inst: &Instance<S>) -> CliResult<(Chi, Vec<usize>, Word<S>)> {
    let chi = need_chi(cfg)?;
    let om = omega_for(cfg, &chi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = inst.word(&chi, &om, false, &mut rng)?;
    Ok((chi, om, w))
}

fn rep_moments<S: Scalar>(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    let (chi, om, w) = word_for(cfg, &inst)?;
    let eng = Engine::new(inst.joint());
    let (e, f) = (eng.e_top(&w.unlabeled())?, eng.f_top(&w.unlabeled())?);
    r.line(format!("E = {}", mat_json(&e)));
    r.line(format!("F = {}", mat_json(&f)));
    r.check("moments evaluated", true);
    r.data = json!({ "chi": chi.to_string(), "omega": om, "E": mat_json(&e), "F": mat_json(&f) });
    Ok(())
}

fn cumulants_eval<S: Scalar>(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    let (chi, om, w) = word_for(cfg, &inst)?;
    let eng = Engine::new(inst.joint());
    let w = w.unlabeled();
    let (kap, k) = (eng.kappa_top(&w)?, eng.k_top(&w)?);
    let tol = if S::is_exact() { 0.0 } else { cfg.tol };
    let e_ok = eng.e_from_cumulants(&w)?.max_abs_diff(&eng.e_top(&w)?) <= tol;
    let f_ok = eng.f_from_cumulants(&w)?.max_abs_diff(&eng.f_top(&w)?) <= tol;
    r.line(format!("kappa = {}", mat_json(&kap)));
    r.line(format!("K = {}", mat_json(&k)));
    r.check("E = sum of kappa_pi", e_ok);
    r.check("F = sum of K_pi", f_ok);
    r.data = json!({ "chi": chi.to_string(), "omega": om, "kappa": mat_json(&kap), "K": mat_json(&k) });
    Ok(())
}

fn mixed_test<S: Scalar>(cfg: &Config, r: &mut Report) -> CliResult<()> {
    if cfg.factors < 2 {
        return Err(CliError::Usage("--factors must be at least 2".into()));
    }
    let mut t = Tally::default();
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    suite::mixed_vanishing(&inst, cfg.n, cfg.seed, cfg.tol, &mut t)?;
    let ok = t.failed.is_empty();
    r.line(format!("all mixed cumulants zero: {ok}"));
    r.line(format!("words checked: {}", t.checked));
    r.check("all mixed cumulants zero", ok);
    let witness = suite::negative_control(&inst, cfg.seed)?;
    r.line(format!("same-factor control nonzero: {}", witness.is_some()));
    r.check("negative control has a nonzero mixed cumulant", witness.is_some());
    r.data = json!({ "checked": t.checked, "failures": t.failed, "control_witness": witness });
    Ok(())
}

fn product_test<S: Scalar>(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let mut t = Tally::default();
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    suite::structural_checks(&inst, cfg.n, cfg.seed, cfg.tol, &mut t)?;
    tally_into(r, "structural identities", &t);
    for (name, ok) in suite::witness_checks(cfg.seed, cfg.n.max(2))? {
        r.line(format!("{name}: {ok}"));
        r.check(name, ok);
    }
    r.data = json!({ "checked": t.checked, "failures": t.failed });
    Ok(())
}

fn universal<S: Scalar>(cfg: &Config, f_side: bool, r: &mut Report) -> CliResult<()> {
    let inst = Instance::<S>::random(spec(cfg), cfg.seed)?;
    r.seeds = vec![cfg.seed];
    let pc = inst.per_class();
    let by_class = Engine::new(&pc);
    let joint = Engine::new(inst.joint());
    let tol = if S::is_exact() { 0.0 } else { cfg.tol };
    let mut words = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.chi.is_some() {
        let (chi, om, w) = word_for(cfg, &inst)?;
        words.push((chi, om, w));
    } else {
        for n in 1..=cfg.n {
            for chi in all_chis(n) {
                for om in all_omegas(n, cfg.factors) {
                    let w = inst.word(&chi, &om, true, &mut rng)?;
                    words.push((chi.clone(), om, w));
                }
            }
        }
    }
    let mut t = Tally::default();
    let mut detail = Vec::new();
    for (chi, om, w) in &words {
        let oracle = if f_side { joint.f_top(&w.unlabeled())? } else { joint.e_top(&w.unlabeled())? };
        let formula = if f_side { by_class.cbifree_moment_f(w)? } else { by_class.cbifree_moment_e(w)? };
        t.check(formula.max_abs_diff(&oracle) <= tol, || format!("{chi} {om:?}"));
        if f_side {
            let terms = theta_expansion(chi, &Omega::new(om.clone()), cfg.max_n)?;
            let th = by_class.theta_sum(w, &terms)?;
            t.check(th.max_abs_diff(&oracle) <= tol, || format!("{chi} {om:?} theta"));
            if words.len() == 1 {
                r.line(format!("theta terms: {}", terms.len()));
            }
        }
        if words.len() == 1 {
            detail.push(json!({ "chi": chi.to_string(), "omega": om, "formula": mat_json(&formula), "oracle": mat_json(&oracle) }));
        }
    }
    let name = if f_side { "combinatorial F equals oracle F" } else { "combinatorial E equals oracle E" };
    tally_into(r, name, &t);
    r.data = json!({ "words": words.len(), "failures": t.failed, "values": detail });
    Ok(())
}

fn rtransform<S: Scalar>(cfg: &Config, theorem: bool, r: &mut Report) -> CliResult<()> {
    let ispec = InstanceSpec { dim_b: cfg.dim_b, dim_d: cfg.dim_d, reduced: cfg.reduced, ..InstanceSpec::default() };
    let inst = suite::single_family::<S>(ispec, cfg.seed)?;
    r.seeds = vec![cfg.seed];
    let eng = Engine::new(inst.joint());
    let pt = suite::series_point(&inst, cfg.seed + 1000, cfg.degree);
    let z = TwoFaced { left: 0, right: 1 };
    let (reports, dump) = if theorem {
        (vec![("theorem", check_partial_r(&eng, z, &pt)?)], partial_r_transform(&eng, z, &pt)?)
    } else {
        let left = check_cumulant_transform(&eng, z, Face::Left, &pt)?;
        let right = check_cumulant_transform(&eng, z, Face::Right, &pt)?;
        let arg = TruncatedSeries::monomial([1, 0, 0], pt.b0.clone(), pt.n);
        (vec![("left lemma", left), ("right lemma", right)], one_sided_cumulant_series(&eng, z, Face::Left, &arg)?)
    };
    let mut summary = Vec::new();
    for (name, rep) in &reports {
        r.line(format!("{name}: coefficient-diff {} over {} degrees", rep.max_diff, rep.degrees));
        r.check(*name, rep.holds());
        summary.push(json!({ "name": name, "max_diff": rep.max_diff, "mismatched": rep.mismatched, "degrees": rep.degrees }));
    }
    let series = series_json(&dump);
    r.files.push(("series.json".into(), serde_json::to_vec_pretty(&series)?));
    r.data = json!({ "degree": cfg.degree, "checks": summary, "series": series });
    Ok(())
}

fn limit_csv(rep: &LimitReport, kind: SeriesKind) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "omega", "N", "value-norm", "fitted-rate"])?;
    for row in rep.rows.iter().filter(|x| x.kind == kind) {
        let omega: String = row.omega.iter().map(|o| o.to_string()).collect();
        let rate = row.fitted_rate.map(|x| format!("{x:.6}")).unwrap_or_default();
        w.write_record([row.n.to_string(), omega, row.copies.to_string(), format!("{:e}", row.value_norm), rate])?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn limits<S: Scalar>(cfg: &Config, which: u8, r: &mut Report) -> CliResult<()> {
    let members = vec![(0, Face::Left), (1, Face::Right)];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed + 500);
    r.seeds = vec![cfg.seed];
    let ispec = InstanceSpec { dim_b: cfg.dim_b, dim_d: cfg.dim_d, reduced: cfg.reduced, centered: which == 0, ..InstanceSpec::default() };
    let inst = suite::single_family::<S>(ispec, cfg.seed)?;
    let rep = if which == 0 {
        let ladder = cfg.ladder.clone().unwrap_or_else(|| vec![1, 4, 16, 64]);
        let eng = Engine::new(inst.joint());
        let fam = SeriesFamily::new(&eng, members);
        clt_check(&fam, &ladder, cfg.n, &mut rng)?
    } else {
        let ladder = cfg.ladder.clone().unwrap_or_else(|| vec![8, 16, 32, 64]);
        let lambda = S::parse(&cfg.lambda).ok_or_else(|| CliError::Usage(format!("cannot read λ = {}", cfg.lambda)))?;
        if which == 1 {
            poisson_check(inst.joint(), &members, lambda, &ladder, cfg.n, &mut rng)?
        } else {
            general_limit_equivalence(inst.joint(), &members, lambda, &ladder, cfg.n, &mut rng)?
        }
    };
    let failed: Vec<&String> = rep.checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    r.line(format!("{} checks, {} failed", rep.checks.len(), failed.len()));
    for name in &failed {
        r.line(format!("failed: {name}"));
    }
    for (name, ok) in &rep.checks {
        r.check(name.clone(), *ok);
    }
    r.files.push(("limits_rho.csv".into(), limit_csv(&rep, SeriesKind::Rho)?));
    r.files.push(("limits_eta.csv".into(), limit_csv(&rep, SeriesKind::Eta)?));
    r.data = json!({ "rows": rep.rows.len() });
    Ok(())
}

fn acceptance(cfg: &Config, r: &mut Report) -> CliResult<()> {
    let sc = suite::SuiteConfig {
        seeds: cfg.seeds,
        instances: cfg.instances,
        max_len: cfg.max_len,
        base_seed: cfg.seed,
        tol: cfg.tol,
        max_n: cfg.max_n,
    };
    r.seeds = (cfg.seed..cfg.seed + cfg.seeds.max(cfg.instances)).collect();
    let results = suite::run_all(&sc, |c| println!("{}", c.line()));
    let mut rows = Vec::new();
    for c in &results {
        r.check(format!("{} {}", c.id, c.title), c.passed);
        rows.push(json!({ "id": c.id, "title": c.title, "passed": c.passed, "detail": c.detail }));
    }
    let timing: Vec<_> = results.iter().map(|c| json!({ "id": c.id, "seconds": c.seconds, "budget": c.budget_seconds })).collect();
    r.data = json!({ "criteria": rows });
    r.timing = Some(json!(timing));
    Ok(())
}
