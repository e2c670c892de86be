//! Cumulants of sums of identically distributed families and their
//! Gaussian and compound Poisson limits.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand_chacha::rand_core::RngCore;

use crate::algebra::AlgebraContext;
use crate::bnc::{enumerate_bnc, BlockKind, BncPartition, Chi, Face};
use crate::cumulants::{Engine, PairFunctional, Piece};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::sample::{all_omegas, Instance, InstanceSpec};
use crate::scalar::Scalar;
use crate::series::{SeriesFamily, SeriesKind};

/// Scaling applied to each summand of `S_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `S_N = Σ Z_m`.
    One,
    /// `S_N = N^{-1/2} Σ Z_m`.
    InvSqrt,
}

fn isqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|x| x * x == n)
}

/// `N · s^n`, the factor turning one summand's order-`n` cumulant into that
/// of `S_N`. In exact mode `InvSqrt` needs `N` to be a perfect square.
pub fn sum_factor<S: Scalar>(copies: u64, n: usize, norm: Normalization) -> Result<S> {
    let nn = S::from_int(copies as i64);
    match norm {
        Normalization::One => Ok(nn),
        Normalization::InvSqrt => {
            let root = if S::is_exact() {
                let r = isqrt(copies).ok_or_else(|| {
                    CbfError::Precondition(format!("N = {copies} is not a perfect square in exact mode"))
                })?;
                S::from_int(r as i64)
            } else {
                S::parse(&format!("{}", (copies as f64).sqrt())).expect("float literal")
            };
            let inv = root.inv().ok_or_else(|| CbfError::Precondition("N = 0".into()))?;
            let mut f = nn;
            for _ in 0..n {
                f = f.mul(&inv);
            }
            Ok(f)
        }
    }
}

/// Cumulant `ρ` or `η` of `S_N` where `S_N` sums `repeat` copies of each
/// listed summand, all c-bi-free. Computed by additivity and multilinearity
/// without realising the sum.
pub fn sum_cumulants<S: Scalar>(
    summands: &[&SeriesFamily<'_, '_, S>],
    repeat: u64,
    norm: Normalization,
    kind: SeriesKind,
    omega: &[usize],
    bs: &[Mat<S>],
) -> Result<Mat<S>> {
    if matches!(kind, SeriesKind::Nu | SeriesKind::Mu) {
        return Err(CbfError::Validation("sums are additive in cumulants only".into()));
    }
    let first = summands.first().ok_or_else(|| CbfError::Validation("no summands".into()))?;
    let copies = repeat * summands.len() as u64;
    let per_copy = sum_factor::<S>(copies, omega.len(), norm)?.mul(&S::from_frac(1, copies as i64));
    let mut acc = first.eval(kind, omega, bs)?.scale(&S::zero());
    for f in summands {
        acc.add_assign(&f.eval(kind, omega, bs)?);
    }
    Ok(acc.scale(&per_copy.mul(&S::from_int(repeat as i64))))
}

/// Cumulants of an `N`-fold free product of copies of one family, computed
/// on the realised sum and compared with `N ρ^Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumCheck {
    /// Copies.
    pub copies: usize,
    /// `(n, ω)` pairs compared.
    pub checked: usize,
    /// Pairs that differ.
    pub mismatched: usize,
    /// Largest difference.
    pub max_diff: f64,
    /// Compared values that are nonzero.
    pub nonzero: usize,
}

/// Direct check of `sum_cumulants` at normalisation 1 against a realised
/// free product of `copies` identical factors.
pub fn check_sum_direct<S: Scalar>(spec: InstanceSpec, seed: u64, copies: usize, max_n: usize, rng: &mut dyn RngCore) -> Result<SumCheck> {
    let one = Instance::<S>::random(InstanceSpec { families: 1, ..spec }, seed)?;
    let joint_spec = InstanceSpec { families: copies, max_len: spec.max_len.max(max_n), ..spec };
    let many = Instance::from_parts(
        joint_spec,
        one.context().clone(),
        vec![one.factors()[0].clone(); copies],
        vec![one.generators()[0].clone(); copies],
    )?;
    let sum = many.sum_pair(S::one());
    let e_sum = Engine::new(&sum);
    let e_one = Engine::new(one.single(0));
    let members = vec![(0, Face::Left), (1, Face::Right)];
    let f_sum = SeriesFamily::new(&e_sum, members.clone());
    let f_one = SeriesFamily::new(&e_one, members);
    let mut out = SumCheck { copies, checked: 0, mismatched: 0, max_diff: 0.0, nonzero: 0 };
    let tol = if S::is_exact() { 0.0 } else { 1e-9 };
    for n in 1..=max_n {
        for omega in all_omegas(n, 2) {
            let bs: Vec<Mat<S>> = (1..n).map(|_| one.random_b(rng)).collect();
            for kind in [SeriesKind::Rho, SeriesKind::Eta] {
                let direct = f_sum.eval(kind, &omega, &bs)?;
                let formula = sum_cumulants(&[&f_one], copies as u64, Normalization::One, kind, &omega, &bs)?;
                let d = direct.max_abs_diff(&formula);
                out.checked += 1;
                out.nonzero += usize::from(!direct.is_zero());
                out.max_diff = out.max_diff.max(d);
                if d > tol {
                    out.mismatched += 1;
                }
            }
        }
    }
    Ok(out)
}

/// One ladder point of a limit check.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    /// Order.
    pub n: usize,
    /// Member labels.
    pub omega: Vec<usize>,
    /// `ρ` or `η`.
    pub kind: SeriesKind,
    /// Number of summands.
    pub copies: u64,
    /// Norm of the distance to the limit (or of the defect).
    pub value_norm: f64,
    /// Least-squares slope of `log value_norm` against `log N` over the
    /// upper half of the ladder, if those values are nonzero.
    pub fitted_rate: Option<f64>,
}

/// Rows plus named pass/fail checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LimitReport {
    /// Ladder table.
    pub rows: Vec<LimitRow>,
    /// Named checks.
    pub checks: Vec<(String, bool)>,
}

impl LimitReport {
    /// True if every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    fn check(&mut self, name: String, ok: bool) {
        self.checks.push((name, ok));
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_rate(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|p| p.1 <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|p| Float::ln(p.0)).collect();
    let ly: Vec<f64> = points.iter().map(|p| Float::ln(p.1)).collect();
    let k = points.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(num / den)
}

/// [`fit_rate`] over the upper half of the points (at least two). Lower
/// terms of a defect can dominate at small `N`, so only the tail is fitted.
pub fn tail_rate(points: &[(f64, f64)]) -> Option<f64> {
    let keep = points.len().div_ceil(2);
    fit_rate(&points[points.len() - keep.max(2).min(points.len())..])
}

fn push_ladder(report: &mut LimitReport, n: usize, omega: &[usize], kind: SeriesKind, pts: &[(u64, f64)]) {
    let fp: Vec<(f64, f64)> = pts.iter().map(|&(c, v)| (c as f64, v)).collect();
    let rate = tail_rate(&fp);
    for &(c, v) in pts {
        report.rows.push(LimitRow { n, omega: omega.to_vec(), kind, copies: c, value_norm: v, fitted_rate: rate });
    }
}

fn omega_label(omega: &[usize]) -> String {
    omega.iter().map(|o| format!("{o}")).collect::<Vec<_>>().join("")
}

/// Central limit check for a centred family: order-2 cumulants of `S_N`
/// are constant and order-`n` ones shrink like `N^{-(n-2)/2}`.
pub fn clt_check<S: Scalar>(
    family: &SeriesFamily<'_, '_, S>,
    ladder: &[u64],
    max_n: usize,
    rng: &mut dyn RngCore,
) -> Result<LimitReport> {
    let ctx = family.context().clone();
    let members = family.members().len();
    let tol = if S::is_exact() { 0.0 } else { 1e-9 };
    for m in 0..members {
        let e = family.eval(SeriesKind::Nu, &[m], &[])?;
        let f = family.eval(SeriesKind::Mu, &[m], &[])?;
        if e.max_abs() > tol || f.max_abs() > tol {
            return Err(CbfError::Precondition(format!("member {m} is not centred")));
        }
    }
    let mut report = LimitReport::default();
    for n in 1..=max_n {
        for omega in all_omegas(n, members) {
            let bs: Vec<Mat<S>> = (1..n).map(|_| ctx.random_b(2, rng)).collect();
            for kind in [SeriesKind::Rho, SeriesKind::Eta] {
                let base = family.eval(kind, &omega, &bs)?;
                let limit = if n == 2 { base.clone() } else { base.scale(&S::zero()) };
                let mut pts = Vec::new();
                let mut prev: Option<Mat<S>> = None;
                let mut scaling_ok = true;
                for &c in ladder {
                    let v = sum_cumulants(&[family], c, Normalization::InvSqrt, kind, &omega, &bs)?;
                    if let Some(p) = &prev {
                        // consecutive ladder points differ by a factor 4 in N
                        let want = p.scale(&S::from_frac(1, 1i64 << (n.max(2) - 2)));
                        if n >= 2 && v.max_abs_diff(&want) > tol {
                            scaling_ok = false;
                        }
                    }
                    pts.push((c, v.max_abs_diff(&limit)));
                    prev = Some(v);
                }
                let label = omega_label(&omega);
                let kname = if kind == SeriesKind::Rho { "rho" } else { "eta" };
                if n == 2 {
                    report.check(format!("{kname} n=2 ω={label} constant"), pts.iter().all(|p| p.1 <= tol));
                } else if n >= 3 {
                    report.check(format!("{kname} n={n} ω={label} scaling"), scaling_ok);
                    let fp: Vec<(f64, f64)> = pts.iter().map(|&(c, v)| (c as f64, v)).collect();
                    if let Some(r) = fit_rate(&fp) {
                        let want = -((n - 2) as f64) / 2.0;
                        report.check(format!("{kname} n={n} ω={label} rate"), (r - want).abs() <= 0.1 * want.abs());
                    }
                } else {
                    report.check(format!("{kname} n=1 ω={label} zero"), pts.iter().all(|p| p.1 <= tol));
                }
                push_ladder(&mut report, n, &omega, kind, &pts);
            }
        }
    }
    Ok(report)
}

/// Linear maps `b ↦ (ρ_{(i,j)}(b))` and `b ↦ (η_{(i,j)}(b))`, stored on the
/// matrix units of `B`.
#[derive(Clone, Debug)]
pub struct CovarianceMaps<S: Scalar> {
    members: usize,
    dim_b: usize,
    sigma: Vec<Mat<S>>,
    tau: Vec<Mat<S>>,
}

impl<S: Scalar> CovarianceMaps<S> {
    /// Reads the order-2 cumulants of a family on a basis of `B`.
    pub fn from_family(family: &SeriesFamily<'_, '_, S>) -> Result<Self> {
        let k = family.context().dim_b();
        let members = family.members().len();
        let (mut sigma, mut tau) = (Vec::new(), Vec::new());
        for i in 0..members {
            for j in 0..members {
                for p in 0..k {
                    for q in 0..k {
                        let u = Mat::unit(k, p, q);
                        sigma.push(family.eval(SeriesKind::Rho, &[i, j], core::slice::from_ref(&u))?);
                        tau.push(family.eval(SeriesKind::Eta, &[i, j], &[u])?);
                    }
                }
            }
        }
        Ok(CovarianceMaps { members, dim_b: k, sigma, tau })
    }

    fn apply(&self, table: &[Mat<S>], i: usize, j: usize, b: &Mat<S>) -> Mat<S> {
        let k = self.dim_b;
        let base = (i * self.members + j) * k * k;
        let mut acc = table[base].scale(&S::zero());
        for p in 0..k {
            for q in 0..k {
                acc.add_assign(&table[base + p * k + q].scale(b.get(p, q)));
            }
        }
        acc
    }

    /// `σ_{ij}(b)`, in `B`.
    pub fn sigma(&self, i: usize, j: usize, b: &Mat<S>) -> Mat<S> {
        self.apply(&self.sigma, i, j, b)
    }

    /// `τ_{ij}(b)`, in `D`.
    pub fn tau(&self, i: usize, j: usize, b: &Mat<S>) -> Mat<S> {
        self.apply(&self.tau, i, j, b)
    }

    /// Largest gap between the stored maps and direct evaluation at `b`.
    pub fn linearity_gap(&self, family: &SeriesFamily<'_, '_, S>, b: &Mat<S>) -> Result<f64> {
        let mut gap: f64 = 0.0;
        for i in 0..self.members {
            for j in 0..self.members {
                let r = family.eval(SeriesKind::Rho, &[i, j], core::slice::from_ref(b))?;
                let e = family.eval(SeriesKind::Eta, &[i, j], core::slice::from_ref(b))?;
                gap = gap.max(r.max_abs_diff(&self.sigma(i, j, b)));
                gap = gap.max(e.max_abs_diff(&self.tau(i, j, b)));
            }
        }
        Ok(gap)
    }
}

/// `E` and `F` moments of one left variable from scalar cumulant tables,
/// summing over bi-non-crossing partitions of `n` left positions.
/// `kappa[m]` and `k[m]` are the order-`m` cumulants; missing orders are 0.
pub fn scalar_moments_from_cumulants<S: Scalar>(n: usize, kappa: &[S], k: &[S], max_n: usize) -> Result<(S, S)> {
    let chi = Chi::lefts_then_rights(n, 0)?;
    let get = |t: &[S], m: usize| t.get(m).cloned().unwrap_or_else(S::zero);
    let (mut e, mut f) = (S::zero(), S::zero());
    for p in enumerate_bnc(&chi, max_n)? {
        let mut pe = S::one();
        let mut pf = S::one();
        for (b, kind) in p.blocks().iter().zip(p.classify_blocks()) {
            pe = pe.mul(&get(kappa, b.len()));
            pf = pf.mul(&match kind {
                BlockKind::Interior => get(kappa, b.len()),
                BlockKind::Exterior => get(k, b.len()),
            });
        }
        e = e.add(&pe);
        f = f.add(&pf);
    }
    Ok((e, f))
}

/// The pair `((1 − ε)E_δ + εE, (1 − ε)F_δ + εF)`, where `δ` is the zero
/// family: products containing an atom are scaled by `ε` and atom-free
/// products are left alone.
pub struct Mixture<'a, S: Scalar> {
    jump: &'a dyn PairFunctional<S>,
    eps: S,
}

impl<'a, S: Scalar> Mixture<'a, S> {
    /// Mixes `jump` with weight `eps`.
    pub fn new(jump: &'a dyn PairFunctional<S>, eps: S) -> Self {
        Mixture { jump, eps }
    }

    fn weight(&self, pieces: &[Piece<S>]) -> S {
        if pieces.iter().any(|p| matches!(p, Piece::Atom(_))) {
            self.eps.clone()
        } else {
            S::one()
        }
    }
}

impl<S: Scalar> PairFunctional<S> for Mixture<'_, S> {
    fn context(&self) -> &AlgebraContext<S> {
        self.jump.context()
    }

    fn e(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        Ok(self.jump.e(class, pieces)?.scale(&self.weight(pieces)))
    }

    fn f(&self, class: usize, pieces: &[Piece<S>]) -> Result<Mat<S>> {
        Ok(self.jump.f(class, pieces)?.scale(&self.weight(pieces)))
    }
}

/// Cumulants of the mixture as polynomials in `ε`, recovered by exact
/// interpolation at `ε = 1, …, n + 1` (they vanish at `ε = 0`).
pub fn mixture_cumulant_poly<S: Scalar>(
    jump: &dyn PairFunctional<S>,
    members: &[(usize, Face)],
    kind: SeriesKind,
    omega: &[usize],
    bs: &[Mat<S>],
) -> Result<Vec<Mat<S>>> {
    let n = omega.len();
    // values at ε = 0..=n, with the ε = 0 value known to be zero
    let mut ys = vec![Mat::zero(if matches!(kind, SeriesKind::Nu | SeriesKind::Rho) { jump.context().dim_b() } else { jump.context().dim_d() })];
    for e in 1..=n as i64 {
        let mix = Mixture::new(jump, S::from_int(e));
        let eng = Engine::new(&mix);
        ys.push(SeriesFamily::new(&eng, members.to_vec()).eval(kind, omega, bs)?);
    }
    // Newton divided differences on nodes 0..=n, then expand to monomials.
    let mut dd = ys.clone();
    for j in 1..=n {
        for i in (j..=n).rev() {
            let d = dd[i].sub(&dd[i - 1]).scale(&S::from_frac(1, j as i64));
            dd[i] = d;
        }
    }
    let dim = ys[0].dim();
    let mut coeffs = vec![Mat::zero(dim); n + 1];
    // basis polynomial Π_{m<i} (ε − m), as integer coefficients
    let mut basis: Vec<i64> = vec![1];
    for (i, d) in dd.iter().enumerate() {
        for (p, c) in basis.iter().enumerate() {
            coeffs[p].add_assign(&d.scale(&S::from_int(*c)));
        }
        let mut next = vec![0i64; basis.len() + 1];
        for (p, c) in basis.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * i as i64;
        }
        basis = next;
    }
    Ok(coeffs)
}

fn eval_poly<S: Scalar>(coeffs: &[Mat<S>], x: &S) -> Mat<S> {
    let mut acc = coeffs[0].scale(&S::zero());
    for c in coeffs.iter().rev() {
        acc = acc.scale(x).add(c);
    }
    acc
}

/// Compound Poisson check: for `S_N` a sum of `N` copies of the mixture at
/// `ε = λ/N`, the cumulants tend to `λ ν` and `λ μ` of the jump family with
/// error `O(1/N)`.
pub fn poisson_check<S: Scalar>(
    jump: &dyn PairFunctional<S>,
    members: &[(usize, Face)],
    lambda: S,
    ladder: &[u64],
    max_n: usize,
    rng: &mut dyn RngCore,
) -> Result<LimitReport> {
    let ctx = jump.context().clone();
    let tol = if S::is_exact() { 0.0 } else { 1e-9 };
    let eng = Engine::new(jump);
    let jf = SeriesFamily::new(&eng, members.to_vec());
    let mut report = LimitReport::default();
    for n in 1..=max_n {
        for omega in all_omegas(n, members.len()) {
            let bs: Vec<Mat<S>> = (1..n).map(|_| ctx.random_b(2, rng)).collect();
            for (kind, moment) in [(SeriesKind::Rho, SeriesKind::Nu), (SeriesKind::Eta, SeriesKind::Mu)] {
                let poly = mixture_cumulant_poly(jump, members, kind, &omega, &bs)?;
                let target = jf.eval(moment, &omega, &bs)?;
                let limit = poly[1].scale(&lambda);
                let label = omega_label(&omega);
                let kname = if kind == SeriesKind::Rho { "rho" } else { "eta" };
                report.check(
                    format!("{kname} n={n} ω={label} limit"),
                    limit.max_abs_diff(&target.scale(&lambda)) <= tol,
                );
                let mut pts = Vec::new();
                for &c in ladder {
                    let eps = lambda.mul(&S::from_frac(1, c as i64));
                    let v = eval_poly(&poly, &eps).scale(&S::from_int(c as i64));
                    pts.push((c, v.max_abs_diff(&limit)));
                }
                let fp: Vec<(f64, f64)> = pts.iter().map(|&(c, v)| (c as f64, v)).collect();
                match tail_rate(&fp) {
                    Some(r) => report.check(format!("{kname} n={n} ω={label} rate"), (r + 1.0).abs() <= 0.1),
                    None => report.check(format!("{kname} n={n} ω={label} exact"), pts.iter().all(|p| p.1 <= tol)),
                }
                push_ladder(&mut report, n, &omega, kind, &pts);
            }
        }
    }
    Ok(report)
}

/// For the Poisson ladder `Z_N` (the mixture at `ε = λ/N`): `N ν_N = λ ν`
/// exactly, and `N ν_N − N ρ_N` (and the `μ, η` analogue) decays like
/// `1/N`. At `n = 2` the defect is compared with the single term
/// `N ε² E_{0̂}` of the jump pair.
pub fn general_limit_equivalence<S: Scalar>(
    jump: &dyn PairFunctional<S>,
    members: &[(usize, Face)],
    lambda: S,
    ladder: &[u64],
    max_n: usize,
    rng: &mut dyn RngCore,
) -> Result<LimitReport> {
    let ctx = jump.context().clone();
    let tol = if S::is_exact() { 0.0 } else { 1e-9 };
    let jeng = Engine::new(jump);
    let jf = SeriesFamily::new(&jeng, members.to_vec());
    let mut report = LimitReport::default();
    for n in 1..=max_n {
        for omega in all_omegas(n, members.len()) {
            let bs: Vec<Mat<S>> = (1..n).map(|_| ctx.random_b(2, rng)).collect();
            let label = omega_label(&omega);
            for (cum, mom) in [(SeriesKind::Rho, SeriesKind::Nu), (SeriesKind::Eta, SeriesKind::Mu)] {
                let kname = if cum == SeriesKind::Rho { "rho" } else { "eta" };
                let jump_moment = jf.eval(mom, &omega, &bs)?;
                let mut pts = Vec::new();
                let mut exact_ok = true;
                let mut n2_ok = true;
                for &c in ladder {
                    let eps = lambda.mul(&S::from_frac(1, c as i64));
                    let mix = Mixture::new(jump, eps.clone());
                    let eng = Engine::new(&mix);
                    let fam = SeriesFamily::new(&eng, members.to_vec());
                    let big_n = S::from_int(c as i64);
                    let nm = fam.eval(mom, &omega, &bs)?.scale(&big_n);
                    let nc = fam.eval(cum, &omega, &bs)?.scale(&big_n);
                    if nm.max_abs_diff(&jump_moment.scale(&lambda)) > tol {
                        exact_ok = false;
                    }
                    let defect = nm.sub(&nc);
                    if n == 2 {
                        let w = fam.word(&omega, &bs)?;
                        let zero = BncPartition::zero(w.chi());
                        let t = if cum == SeriesKind::Rho { jeng.e_pi(&w, &zero)? } else { jeng.f_pi(&w, &zero)? };
                        if defect.max_abs_diff(&t.scale(&big_n.mul(&eps).mul(&eps))) > tol {
                            n2_ok = false;
                        }
                    }
                    pts.push((c, defect.max_abs()));
                }
                report.check(format!("{kname} n={n} ω={label} N·moment = λ·jump"), exact_ok);
                if n == 1 {
                    report.check(format!("{kname} n=1 ω={label} no defect"), pts.iter().all(|p| p.1 <= tol));
                } else {
                    if n == 2 {
                        report.check(format!("{kname} n=2 ω={label} single term"), n2_ok);
                    }
                    let fp: Vec<(f64, f64)> = pts.iter().map(|&(c, v)| (c as f64, v)).collect();
                    if let Some(r) = tail_rate(&fp) {
                        report.check(format!("{kname} n={n} ω={label} defect rate"), (r + 1.0).abs() <= 0.1);
                    }
                }
                push_ladder(&mut report, n, &omega, cum, &pts);
            }
        }
    }
    Ok(report)
}
