//! Truncated series in the parameters `(t_b, t_c, t_d)` and the moment and
//! cumulant series of two-faced families.
//!
//! A series point `b = t_b·b₀`, `c = t_c·c₀`, `d = t_d·d₀` turns every
//! transform into a polynomial in `t` with matrix coefficients. The `t_c`
//! degree never exceeds 1 since every identity here is affine in `c`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::AlgebraContext;
use crate::bnc::{Chi, Face};
use crate::cumulants::{Engine, Entry, Piece, Word};
use crate::error::{CbfError, Result};
use crate::matrix::Mat;
use crate::sample::Instance;
use crate::scalar::Scalar;

/// Multi-degree `(d_b, d_c, d_d)`.
pub type Degree = [u32; 3];

fn total(d: &Degree) -> u32 {
    d[0] + d[1] + d[2]
}

fn add_deg(a: &Degree, b: &Degree) -> Degree {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// A polynomial in `(t_b, t_c, t_d)` with matrix coefficients, truncated at
/// total degree `n` and at `t_c`-degree 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S: Scalar> {
    dim: usize,
    n: u32,
    coeffs: BTreeMap<Degree, Mat<S>>,
}

impl<S: Scalar> TruncatedSeries<S> {
    /// The zero series.
    pub fn zero(dim: usize, n: u32) -> Self {
        TruncatedSeries { dim, n, coeffs: BTreeMap::new() }
    }

    /// The constant `m`.
    pub fn constant(m: Mat<S>, n: u32) -> Self {
        Self::monomial([0, 0, 0], m, n)
    }

    /// The unit.
    pub fn one(dim: usize, n: u32) -> Self {
        Self::constant(Mat::identity(dim), n)
    }

    /// `m·t^deg`, or zero if `deg` is above the truncation.
    pub fn monomial(deg: Degree, m: Mat<S>, n: u32) -> Self {
        let mut s = Self::zero(m.dim(), n);
        s.add_term(deg, &m);
        s
    }

    /// Matrix size of the coefficients.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Truncation degree.
    pub fn truncation(&self) -> u32 {
        self.n
    }

    /// Nonzero coefficients in degree order.
    pub fn terms(&self) -> impl Iterator<Item = (&Degree, &Mat<S>)> {
        self.coeffs.iter()
    }

    /// Coefficient of `t^deg`.
    pub fn coeff(&self, deg: Degree) -> Mat<S> {
        self.coeffs.get(&deg).cloned().unwrap_or_else(|| Mat::zero(self.dim))
    }

    /// Adds `m·t^deg` in place. Terms above the truncation are dropped.
    pub fn add_term(&mut self, deg: Degree, m: &Mat<S>) {
        if total(&deg) > self.n || deg[1] > 1 || m.is_zero() {
            return;
        }
        let e = self.coeffs.entry(deg).or_insert_with(|| Mat::zero(m.dim()));
        e.add_assign(m);
        if e.is_zero() {
            self.coeffs.remove(&deg);
        }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(CbfError::Dimension { expected: self.dim, found: o.dim });
        }
        if self.n != o.n {
            return Err(CbfError::Validation(format!("truncations differ: {} and {}", self.n, o.n)));
        }
        Ok(())
    }

    /// `self + o`.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut out = self.clone();
        for (d, m) in &o.coeffs {
            out.add_term(*d, m);
        }
        Ok(out)
    }

    /// `self - o`.
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// `-self`.
    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(d, m)| (*d, m.neg())).collect();
        TruncatedSeries { dim: self.dim, n: self.n, coeffs }
    }

    /// `self · o`. Fails if a product of two `t_c` terms survives the
    /// truncation.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut out = Self::zero(self.dim, self.n);
        for (da, a) in &self.coeffs {
            for (db, b) in &o.coeffs {
                let d = add_deg(da, db);
                if total(&d) > self.n {
                    continue;
                }
                if d[1] > 1 {
                    return Err(CbfError::Precondition("product is quadratic in c".into()));
                }
                out.add_term(d, &a.mul(b));
            }
        }
        Ok(out)
    }

    /// Left multiplication of every coefficient by `m`.
    pub fn lmul(&self, m: &Mat<S>) -> Self {
        let mut out = Self::zero(self.dim, self.n);
        for (d, a) in &self.coeffs {
            out.add_term(*d, &m.mul(a));
        }
        out
    }

    /// Right multiplication of every coefficient by `m`.
    pub fn rmul(&self, m: &Mat<S>) -> Self {
        let mut out = Self::zero(self.dim, self.n);
        for (d, a) in &self.coeffs {
            out.add_term(*d, &a.mul(m));
        }
        out
    }

    /// `t^deg · self`.
    pub fn shift(&self, deg: Degree) -> Self {
        let mut out = Self::zero(self.dim, self.n);
        for (d, a) in &self.coeffs {
            out.add_term(add_deg(d, &deg), a);
        }
        out
    }

    /// Multiplicative inverse. The constant coefficient must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff([0, 0, 0]);
        let inv0 = c0.inverse().ok_or_else(|| CbfError::Precondition("constant coefficient is singular".into()))?;
        let mut degs: Vec<Degree> = Vec::new();
        for t in 0..=self.n {
            for c in 0..=1u32.min(t) {
                for b in 0..=t - c {
                    degs.push([b, c, t - c - b]);
                }
            }
        }
        let mut out = Self::zero(self.dim, self.n);
        out.add_term([0, 0, 0], &inv0);
        for alpha in degs.into_iter().skip(1) {
            let mut acc = Mat::zero(self.dim);
            for (beta, s) in &self.coeffs {
                if total(beta) == 0 || (0..3).any(|i| beta[i] > alpha[i]) {
                    continue;
                }
                let gamma = [alpha[0] - beta[0], alpha[1] - beta[1], alpha[2] - beta[2]];
                if let Some(x) = out.coeffs.get(&gamma) {
                    acc.add_assign(&s.mul(x));
                }
            }
            out.add_term(alpha, &inv0.mul(&acc).neg());
        }
        Ok(out)
    }

    /// Coefficientwise image of a `B`-valued series in `D`.
    pub fn embed(&self, ctx: &AlgebraContext<S>) -> Result<Self> {
        let mut out = Self::zero(ctx.dim_d(), self.n);
        for (d, a) in &self.coeffs {
            out.add_term(*d, &ctx.b_to_d(a)?);
        }
        Ok(out)
    }

    /// Largest coefficient difference against `o`.
    pub fn max_diff(&self, o: &Self) -> Result<f64> {
        Ok(self.sub(o)?.coeffs.values().map(|m| m.max_abs()).fold(0.0, f64::max))
    }

    /// Number of degrees where `self` and `o` differ.
    pub fn mismatches(&self, o: &Self, tol: f64) -> Result<usize> {
        Ok(self.sub(o)?.coeffs.values().filter(|m| m.max_abs() > tol).count())
    }
}

/// Which of the four series of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// Moments under `E`.
    Nu,
    /// Moments under `F`.
    Mu,
    /// Cumulants `κ`.
    Rho,
    /// Cumulants `K`.
    Eta,
}

impl SeriesKind {
    /// Parses `nu`, `mu`, `rho` or `eta`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nu" => Some(SeriesKind::Nu),
            "mu" => Some(SeriesKind::Mu),
            "rho" => Some(SeriesKind::Rho),
            "eta" => Some(SeriesKind::Eta),
            _ => None,
        }
    }
}

/// A two-faced family `{Z_i}_{i∈I} ⊔ {Z_j}_{j∈J}` whose members are atoms
/// of one pair.
pub struct SeriesFamily<'e, 'a, S: Scalar> {
    engine: &'e Engine<'a, S>,
    members: Vec<(usize, Face)>,
}

impl<'e, 'a, S: Scalar> SeriesFamily<'e, 'a, S> {
    /// Members as `(atom id, face)`; the face decides `I` or `J`.
    pub fn new(engine: &'e Engine<'a, S>, members: Vec<(usize, Face)>) -> Self {
        SeriesFamily { engine, members }
    }

    /// The algebras.
    pub fn context(&self) -> &AlgebraContext<S> {
        self.engine.context()
    }

    /// The members.
    pub fn members(&self) -> &[(usize, Face)] {
        &self.members
    }

    /// The word `Z_{ω(1)}, C Z_{ω(2)}, …` with insertions `b_1..b_{n−1}`.
    pub fn word(&self, omega: &[usize], bs: &[Mat<S>]) -> Result<Word<S>> {
        let n = omega.len();
        if n == 0 {
            return Err(CbfError::Validation("empty ω".into()));
        }
        if bs.len() + 1 != n {
            return Err(CbfError::Validation(format!("expected {} insertions, got {}", n - 1, bs.len())));
        }
        let mut faces = Vec::with_capacity(n);
        for &o in omega {
            let (_, f) = *self
                .members
                .get(o)
                .ok_or_else(|| CbfError::Validation(format!("no member {o}")))?;
            faces.push(f);
        }
        let atom = |k: usize| Piece::Atom(self.members[omega[k]].0);
        let mut entries: Vec<Entry<S>> = vec![vec![atom(0)]];
        let first_left = faces.iter().position(|&f| f == Face::Left);
        let first_right = faces.iter().position(|&f| f == Face::Right);
        match (first_left, first_right) {
            (Some(_), Some(_)) => {
                let k0 = first_left.max(first_right).unwrap();
                let mut b = bs.iter();
                for k in 1..n {
                    if k == k0 {
                        entries.push(vec![atom(k)]);
                    } else {
                        let x = b.next().unwrap().clone();
                        entries.push(vec![Piece::on(faces[k], x), atom(k)]);
                    }
                }
                let x = b.next().unwrap().clone();
                entries[n - 1].push(Piece::on(faces[n - 1], x));
            }
            _ => {
                for k in 1..n {
                    entries.push(vec![Piece::on(faces[k], bs[k - 1].clone()), atom(k)]);
                }
            }
        }
        Word::new(Chi::new(faces)?, entries)
    }

    /// One of `ν, μ, ρ, η` at `(ω, b_1..b_{n−1})`.
    pub fn eval(&self, kind: SeriesKind, omega: &[usize], bs: &[Mat<S>]) -> Result<Mat<S>> {
        let w = self.word(omega, bs)?;
        match kind {
            SeriesKind::Nu => self.engine.e_top(&w),
            SeriesKind::Mu => self.engine.f_top(&w),
            SeriesKind::Rho => self.engine.kappa_top(&w),
            SeriesKind::Eta => self.engine.k_top(&w),
        }
    }
}

/// Evaluates one series of a family.
pub fn family_series_eval<S: Scalar>(
    engine: &Engine<'_, S>,
    members: &[(usize, Face)],
    kind: SeriesKind,
    omega: &[usize],
    bs: &[Mat<S>],
) -> Result<Mat<S>> {
    SeriesFamily::new(engine, members.to_vec()).eval(kind, omega, bs)
}

/// A pair `(Z_ℓ, Z_r)` given by atom ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoFaced {
    /// Atom of `Z_ℓ`.
    pub left: usize,
    /// Atom of `Z_r`.
    pub right: usize,
}

/// Base points `b₀, c₀, d₀` and truncation.
#[derive(Clone, Debug)]
pub struct SeriesPoint<S: Scalar> {
    /// Direction of `b`.
    pub b0: Mat<S>,
    /// Direction of `c`.
    pub c0: Mat<S>,
    /// Direction of `d`.
    pub d0: Mat<S>,
    /// Total degree.
    pub n: u32,
}

/// Which expectation a moment series uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Moment {
    /// `E`, giving `M`.
    E,
    /// `F`, giving `𝕄`.
    F,
}

fn expect<S: Scalar>(engine: &Engine<'_, S>, which: Moment, pieces: &[Piece<S>]) -> Result<Mat<S>> {
    let ctx = engine.context();
    match which {
        Moment::E => ctx.b_to_d(&engine.pair().e(0, pieces)?),
        Moment::F => engine.pair().f(0, pieces),
    }
}

/// `M^ℓ(b)` (or `𝕄^ℓ`) at `b = t_b·b₀`, or the right analogue in `t_d`.
/// Values are taken in `D`.
pub fn one_sided_moment_series<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    side: Face,
    which: Moment,
    pt: &SeriesPoint<S>,
) -> Result<TruncatedSeries<S>> {
    let ctx = engine.context();
    let mut out = TruncatedSeries::one(ctx.dim_d(), pt.n);
    let mut pieces = Vec::new();
    for m in 1..=pt.n {
        let deg = match side {
            Face::Left => {
                pieces.push(Piece::left(pt.b0.clone()));
                pieces.push(Piece::Atom(z.left));
                [m, 0, 0]
            }
            Face::Right => {
                pieces.push(Piece::right(pt.d0.clone()));
                pieces.push(Piece::Atom(z.right));
                [0, 0, m]
            }
        };
        out.add_term(deg, &expect(engine, which, &pieces)?);
    }
    Ok(out)
}

/// `M_{(Z_ℓ,Z_r)}(b, c, d)` (or `𝕄`), in `D`.
pub fn two_sided_moment_series<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    which: Moment,
    pt: &SeriesPoint<S>,
) -> Result<TruncatedSeries<S>> {
    let ctx = engine.context();
    let mut out = TruncatedSeries::zero(ctx.dim_d(), pt.n);
    for m in 0..pt.n {
        for n in 0..pt.n - m {
            let mut pieces = Vec::new();
            for _ in 0..m {
                pieces.push(Piece::left(pt.b0.clone()));
                pieces.push(Piece::Atom(z.left));
            }
            for _ in 0..n {
                pieces.push(Piece::right(pt.d0.clone()));
                pieces.push(Piece::Atom(z.right));
            }
            pieces.push(Piece::right(pt.c0.clone()));
            out.add_term([m, 1, n], &expect(engine, which, &pieces)?);
        }
    }
    Ok(out)
}

/// Restricts a `D`-valued series whose coefficients lie in `B` to `B`.
fn restrict_to_b<S: Scalar>(ctx: &AlgebraContext<S>, s: &TruncatedSeries<S>) -> Result<TruncatedSeries<S>> {
    let mut out = TruncatedSeries::zero(ctx.dim_b(), s.n);
    for (d, m) in s.terms() {
        out.add_term(*d, &ctx.d_to_b(m)?);
    }
    Ok(out)
}

/// A `B`-valued argument of a cumulant series, split into homogeneous parts.
fn components<S: Scalar>(arg: &TruncatedSeries<S>) -> Result<Vec<(Degree, Mat<S>)>> {
    if !arg.coeff([0, 0, 0]).is_zero() {
        return Err(CbfError::Precondition("series argument has a constant term".into()));
    }
    Ok(arg.terms().map(|(d, m)| (*d, m.clone())).collect())
}

/// Calls `f` on every choice of one component per slot whose degrees add up
/// to at most `n`, with at most one `t_c` power.
fn for_each_choice<S: Scalar>(
    slots: &[&[(Degree, Mat<S>)]],
    n: u32,
    f: &mut dyn FnMut(Degree, &[&Mat<S>]) -> Result<()>,
) -> Result<()> {
    fn go<'m, S: Scalar>(
        slots: &[&'m [(Degree, Mat<S>)]],
        n: u32,
        deg: Degree,
        picked: &mut Vec<&'m Mat<S>>,
        f: &mut dyn FnMut(Degree, &[&Mat<S>]) -> Result<()>,
    ) -> Result<()> {
        let Some((first, rest)) = slots.split_first() else {
            return f(deg, picked);
        };
        for (d, m) in first.iter() {
            let nd = add_deg(&deg, d);
            if total(&nd) > n || nd[1] > 1 {
                continue;
            }
            picked.push(m);
            go(rest, n, nd, picked, f)?;
            picked.pop();
        }
        Ok(())
    }
    go(slots, n, [0, 0, 0], &mut Vec::new(), f)
}

/// `C^ℓ(β)` or `C^r(β)` for a `B`-valued series `β` without constant term.
pub fn one_sided_cumulant_series<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    side: Face,
    arg: &TruncatedSeries<S>,
) -> Result<TruncatedSeries<S>> {
    let ctx = engine.context();
    let n = arg.truncation();
    let comps = components(arg)?;
    let mut out = TruncatedSeries::one(ctx.dim_d(), n);
    for m in 1..=n as usize {
        let chi = match side {
            Face::Left => Chi::lefts_then_rights(m, 0)?,
            Face::Right => Chi::lefts_then_rights(0, m)?,
        };
        let atom = if side == Face::Left { z.left } else { z.right };
        let slots = vec![comps.as_slice(); m];
        for_each_choice(&slots, n, &mut |deg, picked| {
            let entries = picked.iter().map(|b| vec![Piece::on(side, (*b).clone()), Piece::Atom(atom)]).collect();
            let k = engine.k_top(&Word::new(chi.clone(), entries)?)?;
            out.add_term(deg, &k);
            Ok(())
        })?;
    }
    Ok(out)
}

/// `C_{(Z_ℓ,Z_r)}(β, γ, δ)` for `B`-valued series without constant terms.
pub fn two_sided_cumulant_series<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    b: &TruncatedSeries<S>,
    c: &TruncatedSeries<S>,
    d: &TruncatedSeries<S>,
) -> Result<TruncatedSeries<S>> {
    let ctx = engine.context();
    let n = b.truncation();
    let (bc, cc, dc) = (components(b)?, components(c)?, components(d)?);
    let mut out = c.embed(ctx)?;
    let lentry = |x: &Mat<S>| vec![Piece::left(x.clone()), Piece::Atom(z.left)];
    let rentry = |x: &Mat<S>| vec![Piece::right(x.clone()), Piece::Atom(z.right)];
    for m in 1..n as usize {
        let chi = Chi::lefts_then_rights(m, 0)?;
        let mut slots = vec![bc.as_slice(); m];
        slots.push(cc.as_slice());
        for_each_choice(&slots, n, &mut |deg, picked| {
            let mut entries: Vec<Entry<S>> = picked[..m].iter().map(|x| lentry(x)).collect();
            entries[m - 1].push(Piece::left(picked[m].clone()));
            out.add_term(deg, &engine.k_top(&Word::new(chi.clone(), entries)?)?);
            Ok(())
        })?;
    }
    for m in 0..n as usize {
        for r in 1..n as usize - m {
            let chi = Chi::lefts_then_rights(m, r)?;
            let mut slots = vec![bc.as_slice(); m];
            slots.extend(vec![dc.as_slice(); r]);
            slots.push(cc.as_slice());
            for_each_choice(&slots, n, &mut |deg, picked| {
                let mut entries: Vec<Entry<S>> = picked[..m].iter().map(|x| lentry(x)).collect();
                entries.extend(picked[m..m + r].iter().map(|x| rentry(x)));
                entries[m + r - 1].push(Piece::right(picked[m + r].clone()));
                out.add_term(deg, &engine.k_top(&Word::new(chi.clone(), entries)?)?);
                Ok(())
            })?;
        }
    }
    Ok(out)
}

/// Coefficientwise comparison of two sides.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesReport {
    /// Largest coefficient difference.
    pub max_diff: f64,
    /// Degrees at which the sides differ beyond the tolerance.
    pub mismatched: usize,
    /// Number of degrees where either side is nonzero.
    pub degrees: usize,
    /// Truncation.
    pub n: u32,
}

impl SeriesReport {
    fn compare<S: Scalar>(lhs: &TruncatedSeries<S>, rhs: &TruncatedSeries<S>, tol: f64) -> Result<Self> {
        let mut degs: Vec<Degree> = lhs.terms().map(|(d, _)| *d).collect();
        degs.extend(rhs.terms().map(|(d, _)| *d));
        degs.sort_unstable();
        degs.dedup();
        Ok(SeriesReport {
            max_diff: lhs.max_diff(rhs)?,
            mismatched: lhs.mismatches(rhs, tol)?,
            degrees: degs.len(),
            n: lhs.truncation(),
        })
    }

    /// True when no coefficient differs.
    pub fn holds(&self) -> bool {
        self.mismatched == 0
    }
}

fn tolerance<S: Scalar>() -> f64 {
    if S::is_exact() {
        0.0
    } else {
        1e-9
    }
}

fn scaled_direction<S: Scalar>(m: &Mat<S>, deg: Degree, n: u32) -> TruncatedSeries<S> {
    TruncatedSeries::monomial(deg, m.clone(), n)
}

/// `C^ℓ(M^ℓ(b)b) = 1 + M^ℓ − M^ℓ𝕄^ℓ⁻¹` on the left, or
/// `C^r(dM^r(d)) = 1 + M^r − 𝕄^r⁻¹M^r` on the right.
pub fn check_cumulant_transform<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    side: Face,
    pt: &SeriesPoint<S>,
) -> Result<SeriesReport> {
    let ctx = engine.context();
    let m = one_sided_moment_series(engine, z, side, Moment::E, pt)?;
    let mm = one_sided_moment_series(engine, z, side, Moment::F, pt)?;
    let mb = restrict_to_b(ctx, &m)?;
    let arg = match side {
        Face::Left => mb.mul(&scaled_direction(&pt.b0, [1, 0, 0], pt.n))?,
        Face::Right => scaled_direction(&pt.d0, [0, 0, 1], pt.n).mul(&mb)?,
    };
    let lhs = one_sided_cumulant_series(engine, z, side, &arg)?;
    let one = TruncatedSeries::one(ctx.dim_d(), pt.n);
    let inv = mm.inverse()?;
    let prod = match side {
        Face::Left => m.mul(&inv)?,
        Face::Right => inv.mul(&m)?,
    };
    let rhs = one.add(&m)?.sub(&prod)?;
    SeriesReport::compare(&lhs, &rhs, tolerance::<S>())
}

/// Both sides of the partial transform identity for `(Z_ℓ, Z_r)`.
pub fn partial_r_sides<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    pt: &SeriesPoint<S>,
) -> Result<(TruncatedSeries<S>, TruncatedSeries<S>)> {
    let ctx = engine.context();
    let n = pt.n;
    let ml = one_sided_moment_series(engine, z, Face::Left, Moment::E, pt)?;
    let mml = one_sided_moment_series(engine, z, Face::Left, Moment::F, pt)?;
    let mr = one_sided_moment_series(engine, z, Face::Right, Moment::E, pt)?;
    let mmr = one_sided_moment_series(engine, z, Face::Right, Moment::F, pt)?;
    let m2 = two_sided_moment_series(engine, z, Moment::E, pt)?;
    let mm2 = two_sided_moment_series(engine, z, Moment::F, pt)?;

    let b_arg = restrict_to_b(ctx, &ml)?.mul(&scaled_direction(&pt.b0, [1, 0, 0], n))?;
    let d_arg = scaled_direction(&pt.d0, [0, 0, 1], n).mul(&restrict_to_b(ctx, &mr)?)?;
    let c_arg = restrict_to_b(ctx, &m2)?;
    let lhs = two_sided_cumulant_series(engine, z, &b_arg, &c_arg, &d_arg)?;

    let one = TruncatedSeries::one(ctx.dim_d(), n);
    let inv_l = mml.inverse()?;
    let inv_r = mmr.inverse()?;
    let c = scaled_direction(&ctx.b_to_d(&pt.c0)?, [0, 1, 0], n);
    let t1 = ml.mul(&inv_l)?.mul(&mm2)?.mul(&inv_r)?.mul(&mr)?;
    let t3 = ml.mul(&one.sub(&inv_l)?)?.mul(&m2)?;
    let t4 = m2.mul(&one.sub(&inv_r)?)?.mul(&mr)?;
    let t5 = ml.mul(&c)?.mul(&mr)?;
    let rhs = t1.add(&m2)?.add(&t3)?.add(&t4)?.sub(&t5)?;
    Ok((lhs, rhs))
}

/// Coefficientwise check of the partial transform identity.
pub fn check_partial_r<S: Scalar>(engine: &Engine<'_, S>, z: TwoFaced, pt: &SeriesPoint<S>) -> Result<SeriesReport> {
    let (lhs, rhs) = partial_r_sides(engine, z, pt)?;
    SeriesReport::compare(&lhs, &rhs, tolerance::<S>())
}

/// `C_{(Z_ℓ,Z_r)}(b, c, d) − c` at the plain point `b = t_b b₀` etc.
pub fn partial_r_transform<S: Scalar>(
    engine: &Engine<'_, S>,
    z: TwoFaced,
    pt: &SeriesPoint<S>,
) -> Result<TruncatedSeries<S>> {
    let ctx = engine.context();
    let n = pt.n;
    let b = scaled_direction(&pt.b0, [1, 0, 0], n);
    let c = scaled_direction(&pt.c0, [0, 1, 0], n);
    let d = scaled_direction(&pt.d0, [0, 0, 1], n);
    two_sided_cumulant_series(engine, z, &b, &c, &d)?.sub(&c.embed(ctx)?)
}

/// `C − c` of the summed pair against the sum of `C − c` over the families
/// of an instance, whose pairs are c-bi-free.
pub fn check_additivity<S: Scalar>(inst: &Instance<S>, pt: &SeriesPoint<S>) -> Result<SeriesReport> {
    let sum = inst.sum_pair(S::one());
    let eng = Engine::new(&sum);
    let lhs = partial_r_transform(&eng, TwoFaced { left: 0, right: 1 }, pt)?;
    let mut rhs = TruncatedSeries::zero(inst.context().dim_d(), pt.n);
    for c in 0..inst.generators().len() {
        let e = Engine::new(inst.single(c));
        let z = TwoFaced { left: 2 * c, right: 2 * c + 1 };
        rhs = rhs.add(&partial_r_transform(&e, z, pt)?)?;
    }
    SeriesReport::compare(&lhs, &rhs, tolerance::<S>())
}
