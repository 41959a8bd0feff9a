//! Shahidi local coefficient matrices (Slcm), their trace, determinant and
//! characteristic polynomial, and the Plancherel measure computed along
//! several independent paths.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::characters::{eta_prime, AddCharTwist, CharError, GenuineCharData, MultChar};
use crate::exact_scalars::CycNumber;
use crate::factors::{
    chi_x_pow, epsilon, gamma_dual, l_factor, meta_epsilon_ratio, meta_gamma, meta_gamma_dual, one_minus_qinv,
    partial_gamma_closed, partial_gamma_dual, partial_meta_gamma_closed, partial_meta_gamma_dual, slot, tate_gamma,
    weil_gamma_psi, FactorError,
};
use crate::lagrangian::{dual_group, DecompositionKind, LagrangianDecomposition};
use crate::ratfun::{poly_add, poly_divexact, poly_gcd, poly_mul, poly_scale, poly_sub, Poly, RatFun, Slot};
use crate::tame_field::{FStarClass, TameContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlcmError {
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("closed forms need the standard decomposition")]
    NotStandard,
    #[error("closed forms need a normalized psi")]
    NotNormalized,
    #[error("the data's cover n = {0} differs from the context's n = {1}")]
    CoverMismatch(u64, u64),
    #[error("m = {m} is not a valid related cover for n = {n}")]
    BadRelatedCover { m: u64, n: u64 },
    #[error("context error: {0}")]
    Context(String),
}

/// A d x d Slcm indexed by K x K in the order of `kbar`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlcmMatrix {
    pub kind: Option<DecompositionKind>,
    pub kbar: Vec<FStarClass>,
    pub data: GenuineCharData,
    pub entries: Vec<Vec<RatFun>>,
}

impl SlcmMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> RatFun {
        let field = self.entries[0][0].field().clone();
        self.entries.iter().enumerate().fold(RatFun::zero(&field), |acc, (i, row)| &acc + &row[i])
    }

    pub fn det(&self) -> RatFun {
        determinant(&self.entries)
    }

    pub fn charpoly(&self) -> Vec<RatFun> {
        charpoly(&self.entries)
    }

    /// Positions of the nonzero entries, row by row.
    pub fn support(&self) -> Vec<Vec<bool>> {
        self.entries.iter().map(|r| r.iter().map(|e| !e.is_zero()).collect()).collect()
    }
}

fn check_cover(ctx: &TameContext, data: &GenuineCharData) -> Result<(), SlcmError> {
    if data.cover.n != ctx.n() {
        return Err(SlcmError::CoverMismatch(data.cover.n, ctx.n()));
    }
    Ok(())
}

/// eta_x for odd n, eta'_x for n = 2 mod 4.
fn entry_twist(ctx: &TameContext, x: FStarClass) -> Result<MultChar, SlcmError> {
    if ctx.cover.even {
        Ok(eta_prime(ctx, x)?)
    } else {
        Ok(ctx.eta(x))
    }
}

/// tau_L(a, b, chi, s, psi) from the definition of the partial factors.
pub fn slcm_entry(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    data: &GenuineCharData,
    a: FStarClass,
    b: FStarClass,
) -> Result<RatFun, SlcmError> {
    let rho = data.chi.mul(&entry_twist(ctx, ctx.cmul(a, b))?.inv());
    let k = ctx.cmul(a, ctx.cinv(b));
    Ok(if ctx.cover.even {
        partial_meta_gamma_dual(ctx, l, &rho, &data.psi, k)?
    } else {
        partial_gamma_dual(ctx, l, &rho, &data.psi, k)?
    })
}

fn build<F>(ctx: &TameContext, l: &LagrangianDecomposition, data: &GenuineCharData, f: F) -> Result<SlcmMatrix, SlcmError>
where
    F: Fn(usize, usize) -> Result<RatFun, SlcmError> + Sync,
{
    check_cover(ctx, data)?;
    let d = l.kbar.len();
    let flat: Vec<RatFun> = (0..d * d).into_par_iter().map(|ix| f(ix / d, ix % d)).collect::<Result<_, _>>()?;
    let entries = flat.chunks(d).map(|r| r.to_vec()).collect();
    Ok(SlcmMatrix { kind: l.kind, kbar: l.kbar.clone(), data: *data, entries })
}

/// The Slcm of the given decomposition, entry by entry from the partial factors.
pub fn assemble_slcm(ctx: &TameContext, l: &LagrangianDecomposition, data: &GenuineCharData) -> Result<SlcmMatrix, SlcmError> {
    build(ctx, l, data, |r, c| slcm_entry(ctx, l, data, l.kbar[r], l.kbar[c]))
}

/// Closed form of tau_L(k^i, k^j) for the standard decomposition and a normalized psi.
pub fn slcm_entry_closed(ctx: &TameContext, data: &GenuineCharData, i: i64, j: i64) -> Result<RatFun, SlcmError> {
    if data.psi.a != ctx.one_class() {
        return Err(SlcmError::NotNormalized);
    }
    let chi = &data.chi;
    let n = ctx.n() as i64;
    let d = ctx.d() as i64;
    let field = ctx.cyc();
    let t = i - j;
    let on_diagonal = (i + j).rem_euclid(d) == 0;
    let chin = chi.pow(n);
    let lnn = slot(ctx, &l_factor(ctx, &chin), Slot::Times(n));
    let rho = chi.mul(&entry_twist(ctx, ctx.class(i + j, 0))?.inv());
    if !ctx.cover.even {
        let sparse = |hit: bool| {
            if hit {
                slot(ctx, &epsilon(ctx, &rho.inv(), &data.psi), Slot::OneMinus)
            } else {
                RatFun::zero(field)
            }
        };
        if chin.is_ramified(ctx) {
            return Ok(sparse((t - chi.conductor()).rem_euclid(n) == 0));
        }
        if !chi.is_ramified(ctx) {
            if !on_diagonal {
                return Ok(sparse((t - 1).rem_euclid(n) == 0));
            }
            // tau(a^{-1}, a) with a = k^j
            let alpha = if j <= (n - 1) / 2 { 0 } else { n };
            let lead = chi_x_pow(ctx, chi, 2 * j - alpha);
            let rest = if j == (n - 1) / 2 {
                slot(ctx, &gamma_dual(ctx, &chin, &data.psi), Slot::Times(n))
            } else {
                lnn.scale(&one_minus_qinv(ctx))
            };
            return Ok(&lead * &rest);
        }
        return Ok(partial_gamma_closed(ctx, &rho, &data.psi, t)?);
    }
    let sparse = |hit: bool| if hit { meta_epsilon_ratio(ctx, &rho, &data.psi) } else { RatFun::zero(field) };
    if chin.is_ramified(ctx) {
        return Ok(sparse((t - chi.conductor()).rem_euclid(d) == 0));
    }
    let square_ramified = chi.pow(2).is_ramified(ctx);
    if !square_ramified && !on_diagonal {
        return Ok(sparse((t - 1).rem_euclid(d) == 0));
    }
    if on_diagonal && !square_ramified {
        let top = slot(ctx, &meta_gamma_dual(ctx, &chi.pow(d), &data.psi), Slot::Times(d));
        let mid = (d - 1) / 2;
        if !chi.is_ramified(ctx) {
            let rest = if j == mid { top } else { lnn.scale(&one_minus_qinv(ctx)) };
            return Ok(&chi_x_pow(ctx, chi, 2 * j) * &rest);
        }
        if j == mid {
            return Ok(&chi_x_pow(ctx, chi, d - 1) * &top);
        }
        let beta = if j <= (d - 3) / 2 { d } else { -d };
        let eps = slot(ctx, &epsilon(ctx, chi, &data.psi), Slot::PlusHalf);
        let c = &one_minus_qinv(ctx) * &chi.eval(ctx, ctx.minus_one());
        return Ok(&(&chi_x_pow(ctx, chi, 2 * j - 1 + beta) * &eps) * &lnn.scale(&c));
    }
    Ok(partial_meta_gamma_closed(ctx, &rho, &data.psi, t)?)
}

/// The Slcm of the standard decomposition from the closed forms.
pub fn assemble_slcm_closed(ctx: &TameContext, data: &GenuineCharData) -> Result<SlcmMatrix, SlcmError> {
    let l = LagrangianDecomposition::standard(ctx);
    build(ctx, &l, data, |r, c| slcm_entry_closed(ctx, data, r as i64, c as i64))
}

/// T(sigma, s, psi) as the trace of the Slcm; only the diagonal is computed.
pub fn trace_t(ctx: &TameContext, l: &LagrangianDecomposition, data: &GenuineCharData) -> Result<RatFun, SlcmError> {
    check_cover(ctx, data)?;
    let diag: Vec<RatFun> =
        l.kbar.par_iter().map(|&a| slcm_entry(ctx, l, data, a, a)).collect::<Result<_, _>>()?;
    Ok(diag.iter().fold(RatFun::zero(ctx.cyc()), |acc, e| &acc + e))
}

/// T(sigma, s, psi) = d^{-1} sum over eta of gamma(1 - s, chi^{-1} eta, psi) (resp. gammã).
pub fn trace_t_formula(ctx: &TameContext, data: &GenuineCharData) -> Result<RatFun, SlcmError> {
    check_cover(ctx, data)?;
    let terms: Vec<RatFun> = dual_group(ctx)
        .par_iter()
        .map(|(_, eta)| {
            let rho = data.chi.mul(eta);
            if ctx.cover.even {
                meta_gamma_dual(ctx, &rho, &data.psi)
            } else {
                gamma_dual(ctx, &rho, &data.psi)
            }
        })
        .collect();
    let sum = terms.iter().fold(RatFun::zero(ctx.cyc()), |acc, e| &acc + e);
    Ok(sum.scale(&ctx.ratio(1, ctx.d() as i64)))
}

/// Common denominator D of the entries and the polynomial matrix D M.
fn clear_denominators(m: &[Vec<RatFun>]) -> (Vec<Vec<Poly>>, Poly) {
    let field = m[0][0].field().clone();
    let mut d: Poly = vec![CycNumber::one(&field)];
    for e in m.iter().flatten().filter(|e| !e.is_zero()) {
        let g = poly_gcd(&d, e.denom());
        d = poly_mul(&d, &poly_divexact(e.denom(), &g));
    }
    let p = m
        .iter()
        .map(|row| row.iter().map(|e| if e.is_zero() { vec![] } else { poly_mul(e.numer(), &poly_divexact(&d, e.denom())) }).collect())
        .collect();
    (p, d)
}

/// Determinant by fraction-free elimination of the cleared matrix.
pub fn determinant(m: &[Vec<RatFun>]) -> RatFun {
    let n = m.len();
    let field = m[0][0].field().clone();
    let (mut a, den) = clear_denominators(m);
    let mut sign = false;
    let mut prev: Poly = vec![CycNumber::one(&field)];
    for k in 0..n {
        if a[k][k].is_empty() {
            match (k + 1..n).find(|&r| !a[r][k].is_empty()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return RatFun::zero(&field),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = poly_sub(&poly_mul(&a[i][j], &a[k][k]), &poly_mul(&a[i][k], &a[k][j]));
                a[i][j] = poly_divexact(&v, &prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = RatFun::over_power(&field, a[n - 1][n - 1].clone(), &den, n);
    if sign {
        -det
    } else {
        det
    }
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(vec![], |acc, k| if a[i][k].is_empty() || b[k][j].is_empty() { acc } else { poly_add(&acc, &poly_mul(&a[i][k], &b[k][j])) }))
                .collect()
        })
        .collect()
}

/// Coefficients c_0, ..., c_d of det(t I - M) = sum c_k t^k.
///
/// Faddeev-LeVerrier on P = D M; the coefficient of t^{d-k} of P is D^k times that of M.
pub fn charpoly(m: &[Vec<RatFun>]) -> Vec<RatFun> {
    let n = m.len();
    let field = m[0][0].field().clone();
    let (p, den) = clear_denominators(m);
    let mut cp: Vec<Poly> = vec![vec![]; n + 1];
    cp[n] = vec![CycNumber::one(&field)];
    let mut mk: Vec<Vec<Poly>> = vec![vec![vec![]; n]; n];
    for k in 1..=n {
        mk = mat_mul(&p, &mk);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] = poly_add(&row[i], &cp[n - k + 1]);
        }
        let amk = mat_mul(&p, &mk);
        let tr = (0..n).fold(vec![], |acc, i| poly_add(&acc, &amk[i][i]));
        cp[n - k] = poly_scale(&tr, &CycNumber::from_ratio(&field, -1, k as i64));
    }
    cp.into_iter().enumerate().map(|(j, c)| RatFun::over_power(&field, c, &den, n - j)).collect()
}

// ---- Plancherel measure

/// (-1, -1)_n.
pub fn minus_one_symbol(ctx: &TameContext) -> CycNumber {
    ctx.hilbert_symbol(ctx.n(), ctx.minus_one(), ctx.minus_one())
}

/// chi_sigma(-I_2, (-1, -1)_n) = (-1, -1)_n chi_psi(-1).
pub fn central_at_minus_identity(ctx: &TameContext, data: &GenuineCharData) -> CycNumber {
    &minus_one_symbol(ctx) * &data.chi_psi_eval(ctx, ctx.minus_one())
}

/// mu_n^{-1} = (-1,-1)_n chi_psi(-1) sum_k tau(1, k, chi, s) tau(k^{-1}, 1, chi^{-1}, -s).
pub fn plancherel_plan_and_sum(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    data: &GenuineCharData,
) -> Result<RatFun, SlcmError> {
    check_cover(ctx, data)?;
    let one = ctx.one_class();
    let dual = GenuineCharData { chi: data.chi.inv(), ..*data };
    let terms: Vec<RatFun> = l
        .kbar
        .par_iter()
        .map(|&k| -> Result<RatFun, SlcmError> {
            let left = slcm_entry(ctx, l, data, one, k)?;
            if left.is_zero() {
                return Ok(left);
            }
            let right = slcm_entry(ctx, l, &dual, ctx.cinv(k), one)?;
            Ok(&left * &slot(ctx, &right, Slot::Minus))
        })
        .collect::<Result<_, _>>()?;
    let sum = terms.iter().fold(RatFun::zero(ctx.cyc()), |acc, e| &acc + e);
    Ok(sum.scale(&central_at_minus_identity(ctx, data)))
}

/// mu_1(chi)^{-1} or mu_2(chi_psi)^{-1} by the scalar formulas, per the parity of the context.
pub fn plancherel_scalar(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let at_m1 = chi.eval(ctx, ctx.minus_one());
    if ctx.cover.even {
        let m1 = ctx.minus_one();
        let c = &(&ctx.hilbert_symbol(2, m1, m1) * &at_m1) * &weil_gamma_psi(ctx, *psi, m1).inv().expect("unit");
        let g = &meta_gamma_dual(ctx, chi, psi) * &slot(ctx, &meta_gamma(ctx, chi, psi), Slot::Shift(1));
        g.scale(&c)
    } else {
        let g = &gamma_dual(ctx, chi, psi) * &slot(ctx, &tate_gamma(ctx, chi, psi), Slot::Shift(1));
        g.scale(&at_m1)
    }
}

/// mu_n^{-1} = d^{-2} sum over eta of mu_{n/d}((chi eta)_psi)^{-1}.
pub fn plancherel_average(ctx: &TameContext, data: &GenuineCharData) -> Result<RatFun, SlcmError> {
    check_cover(ctx, data)?;
    let dual = dual_group(ctx);
    let terms: Vec<RatFun> =
        dual.par_iter().map(|(_, eta)| plancherel_scalar(ctx, &data.chi.mul(eta), &data.psi)).collect();
    let sum = terms.iter().fold(RatFun::zero(ctx.cyc()), |acc, e| &acc + e);
    Ok(sum.scale(&ctx.ratio(1, dual.len() as i64)))
}

/// L(ns, chi^n) L(-ns, chi^{-n}) / (L(1 - ns, chi^{-n}) L(1 + ns, chi^n)).
pub fn plancherel_l_ratio(ctx: &TameContext, chi: &MultChar) -> RatFun {
    let n = ctx.n() as i64;
    let lp = l_factor(ctx, &chi.pow(n));
    let lm = l_factor(ctx, &chi.pow(-n));
    let at = |f: &RatFun, s: Option<Slot>| {
        let g = match s {
            Some(s) => slot(ctx, f, s),
            None => f.clone(),
        };
        slot(ctx, &g, Slot::Times(n))
    };
    let num = &at(&lp, None) * &at(&lm, Some(Slot::Minus));
    let den = &at(&lm, Some(Slot::OneMinus)) * &at(&lp, Some(Slot::Shift(1)));
    &num / &den
}

/// c(sigma) and the L-ratio of the explicit formula.
pub fn plancherel_closed(ctx: &TameContext, data: &GenuineCharData) -> Result<(CycNumber, RatFun), SlcmError> {
    check_cover(ctx, data)?;
    let n = ctx.n() as i64;
    let e = n / ctx.d() as i64;
    let mut c = ctx.q_pow(data.psi.conductor());
    if data.chi.pow(n).is_ramified(ctx) {
        let dual = dual_group(ctx);
        let mut mean = CycNumber::zero(ctx.cyc());
        for (_, eta) in &dual {
            mean += &ctx.q_pow(-data.chi.pow(e).mul(&eta.pow(e)).conductor());
        }
        c = &c * &(&mean * &ctx.ratio(1, dual.len() as i64));
    }
    Ok((c, plancherel_l_ratio(ctx, &data.chi)))
}

/// d^{-2} sum_a |a|^{-1} [(a, -1)_2] T(chi, s, psi_a) T(chi^{-1}, -s, psi_a).
pub fn trace_plancherel_sum(ctx: &TameContext, data: &GenuineCharData) -> Result<RatFun, SlcmError> {
    check_cover(ctx, data)?;
    let l = LagrangianDecomposition::standard(ctx);
    let classes = ctx.class_group(ctx.d()).map_err(|e| SlcmError::Context(e.to_string()))?;
    let terms: Vec<RatFun> = classes
        .par_iter()
        .map(|&a| -> Result<RatFun, SlcmError> {
            let psi = data.psi.twist(ctx, a);
            let here = GenuineCharData { psi, ..*data };
            let there = GenuineCharData { chi: data.chi.inv(), psi, ..*data };
            let t1 = trace_t(ctx, &l, &here)?;
            let t2 = slot(ctx, &trace_t(ctx, &l, &there)?, Slot::Minus);
            let mut w = ctx.q_pow(a.val);
            if ctx.cover.even {
                w = &w * &ctx.hilbert_symbol(2, a, ctx.minus_one());
            }
            Ok((&t1 * &t2).scale(&w))
        })
        .collect::<Result<_, _>>()?;
    let sum = terms.iter().fold(RatFun::zero(ctx.cyc()), |acc, e| &acc + e);
    Ok(sum.scale(&ctx.ratio(1, classes.len() as i64)))
}

/// Reducibility verdict with its cross-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reducibility {
    /// n odd and chi restricted to F*^n is a nontrivial quadratic character.
    pub reducible: bool,
    /// sigma = sigma^w, i.e. chi^{2d} = 1.
    pub self_dual: bool,
    /// order of mu_n^{-1} at X = 1 (negative for a pole).
    pub order_at_zero: i64,
}

impl Reducibility {
    /// The verdict agrees with: self-dual and mu^{-1} analytic and nonzero at s = 0.
    pub fn consistent(&self) -> bool {
        self.reducible == (self.self_dual && self.order_at_zero == 0)
    }
}

pub fn reducibility(ctx: &TameContext, data: &GenuineCharData, mu_inverse: &RatFun) -> Reducibility {
    let restricted = data.chi.pow(ctx.d() as i64);
    let self_dual = restricted.pow(2).is_trivial();
    let reducible = !ctx.cover.even && self_dual && !restricted.is_trivial();
    let order_at_zero = mu_inverse.order_at(&CycNumber::one(ctx.cyc())).expect("nonzero mu");
    Reducibility { reducible, self_dual, order_at_zero }
}

/// sum over eta with eta^n = 1 of q^{-e(eta)}, and n(n - 1)/q + n.
pub fn conductor_identity(ctx: &TameContext) -> (CycNumber, CycNumber) {
    let n = ctx.n();
    let mut lhs = CycNumber::zero(ctx.cyc());
    let (qm1, order) = (ctx.qm1(), ctx.order);
    for j in (0..qm1).filter(|j| (j * n) % qm1 == 0) {
        for k in (0..order).filter(|k| (k * n) % order == 0) {
            lhs += &ctx.q_pow(-MultChar::new(ctx, j, k).conductor());
        }
    }
    let nn = n as i64;
    let rhs = &ctx.ratio(nn * (nn - 1), ctx.q() as i64) + &ctx.int(nn);
    (lhs, rhs)
}

/// The context of the m-fold cover and the representations E_m(sigma) related to sigma.
pub fn related_reps(
    ctx: &TameContext,
    data: &GenuineCharData,
    m: u64,
) -> Result<(TameContext, Vec<GenuineCharData>), SlcmError> {
    let n = ctx.n();
    let bad = SlcmError::BadRelatedCover { m, n };
    if m == 0 || n % m != 0 || m % 2 != n % 2 || m % 4 == 0 {
        return Err(bad);
    }
    let c = if m % 2 == 1 { m } else { m / 2 };
    if ctx.d() % c != 0 {
        return Err(bad);
    }
    let mctx = TameContext::new(ctx.p(), ctx.field.f, m, Some(ctx.field.modulus().to_vec()))
        .map_err(|e| SlcmError::Context(e.to_string()))?;
    let mut reps: Vec<MultChar> = Vec::new();
    for (_, eta) in dual_group(ctx) {
        if !reps.iter().any(|r| r.mul(&eta.inv()).pow(c as i64).is_trivial()) {
            reps.push(eta);
        }
    }
    let out = reps.into_iter().map(|eta| GenuineCharData::new(data.chi.mul(&eta), data.psi, mctx.cover)).collect();
    Ok((mctx, out))
}

/// mean over E_m(sigma) of mu_m(pi)^{-1}.
pub fn plancherel_harmonic_mean(ctx: &TameContext, data: &GenuineCharData, m: u64) -> Result<RatFun, SlcmError> {
    let (mctx, reps) = related_reps(ctx, data, m)?;
    let l = LagrangianDecomposition::standard(&mctx);
    let mut sum = RatFun::zero(ctx.cyc());
    for r in &reps {
        sum = &sum + &plancherel_plan_and_sum(&mctx, &l, r)?;
    }
    Ok(sum.scale(&ctx.ratio(1, reps.len() as i64)))
}

/// All Plancherel paths for one sigma.
#[derive(Debug, Clone)]
pub struct PlancherelReport {
    pub mu_inverse: RatFun,
    /// plan_and_sum, average, closed, trace_sum (the last divided by chi_sigma(-I_2, ...)).
    pub paths: BTreeMap<&'static str, RatFun>,
    pub c_sigma: CycNumber,
    pub reducibility: Reducibility,
}

impl PlancherelReport {
    pub fn paths_agree(&self) -> bool {
        self.paths.values().all(|v| *v == self.mu_inverse)
    }

    pub fn pole_order_at_zero(&self) -> i64 {
        -self.reducibility.order_at_zero
    }
}

pub fn plancherel_report(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    data: &GenuineCharData,
) -> Result<PlancherelReport, SlcmError> {
    let mu = plancherel_plan_and_sum(ctx, l, data)?;
    let mut paths = BTreeMap::new();
    paths.insert("plan_and_sum", mu.clone());
    paths.insert("average", plancherel_average(ctx, data)?);
    let (c_sigma, ratio) = plancherel_closed(ctx, data)?;
    paths.insert("closed", ratio.scale(&c_sigma));
    let central = central_at_minus_identity(ctx, data);
    let ts = trace_plancherel_sum(ctx, data)?;
    paths.insert("trace_sum", ts.scale(&central.inv().expect("root of unity")));
    let reducibility = reducibility(ctx, data, &mu);
    Ok(PlancherelReport { mu_inverse: mu, paths, c_sigma, reducibility })
}
