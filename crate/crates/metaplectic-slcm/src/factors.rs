//! L, epsilon and gamma factors, Weil indices, the metaplectic gamma factor and
//! the partial factors, all as rational functions of X = q^{-s}.
//!
//! Naming: `gamma_dual(chi)` is gamma(1 - s, chi^{-1}, psi), the form in which
//! the factors enter the Slcm; `tate_gamma(chi)` is gamma(s, chi, psi).

use thiserror::Error;

use crate::characters::{AddCharTwist, MultChar};
use crate::exact_scalars::CycNumber;
use crate::lagrangian::LagrangianDecomposition;
use crate::ratfun::{at_slot, RatFun, Slot};
use crate::schwartz::Ext;
use crate::tame_field::{FStarClass, TameContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("{0:?} is not a class of K")]
    NotInK(FStarClass),
    #[error("closed forms are stated for a normalized psi only")]
    NotNormalized,
    #[error("the shell oracle runs over Q_p only (f = 1)")]
    NeedsPrimeField,
    #[error("the shell oracle needs |v(a)| <= 1, got v(a) = {0}")]
    TwistTooDeep(i64),
    #[error("shell depth must be 1, 2 or 3, got {0}")]
    BadDepth(u32),
    #[error("shell {0} of the oracle integral does not vanish")]
    Unstable(i64),
    #[error("this closed form needs an odd cover")]
    NeedsOddCover,
    #[error("this closed form needs n = 2 mod 4")]
    NeedsEvenCover,
}

/// Slot substitution with the context's q and sqrt(q).
pub fn slot(ctx: &TameContext, f: &RatFun, s: Slot) -> RatFun {
    at_slot(f, s, ctx.q(), ctx.sqrt_q())
}

/// (chi(varpi) X)^k.
pub fn chi_x_pow(ctx: &TameContext, chi: &MultChar, k: i64) -> RatFun {
    RatFun::monomial(&ctx.zeta(chi.varpi_exp as i64 * k), k)
}

/// 1 - q^{-1} as a scalar.
pub fn one_minus_qinv(ctx: &TameContext) -> CycNumber {
    ctx.ratio(ctx.q() as i64 - 1, ctx.q() as i64)
}

/// The class of 2 in F*.
pub fn two_class(ctx: &TameContext) -> FStarClass {
    ctx.unit_class(ctx.field.from_int(2))
}

/// L(s, chi) = 1 / (1 - chi(varpi) X) for unramified chi, 1 otherwise.
pub fn l_factor(ctx: &TameContext, chi: &MultChar) -> RatFun {
    let field = ctx.cyc();
    if chi.is_ramified(ctx) {
        return RatFun::one(field);
    }
    RatFun::new(field, vec![CycNumber::one(field)], vec![CycNumber::one(field), -chi.at_varpi(ctx)])
}

/// sum over t in F_q^* of chi^{-1}(t) zeta_p^{Tr(c t)}, c a nonzero residue.
pub fn gauss_sum(ctx: &TameContext, chi: &MultChar, c: u64) -> CycNumber {
    let n = ctx.order as i64;
    let (step_u, step_p) = (n / ctx.qm1() as i64, n / ctx.p() as i64);
    let j = chi.unit_exp as i64;
    let terms = ctx.field.units().map(|t| {
        let lg = ctx.field.dlog(t).expect("unit") as i64;
        let tr = ctx.field.trace(ctx.field.mul(c, t)) as i64;
        (-j * lg * step_u + tr * step_p, 1)
    });
    CycNumber::root_sum(ctx.cyc(), terms)
}

/// epsilon(s, chi, psi_a), a monomial c X^{e(chi) - e(psi_a)}.
pub fn epsilon(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let base = if chi.is_ramified(ctx) {
        RatFun::monomial(&(&chi.at_varpi(ctx) * &gauss_sum(ctx, chi, 1)), 1)
    } else {
        RatFun::one(ctx.cyc())
    };
    twist_factor(ctx, chi, psi) * base
}

/// chi(a) |a|^{s - 1/2} = chi(a) sqrt(q)^{v(a)} X^{v(a)}.
fn twist_factor(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let a = psi.a;
    RatFun::monomial(&(&chi.eval(ctx, a) * &ctx.sqrt_q_pow(a.val)), a.val)
}

/// gamma(s, chi, psi_a) = epsilon L(1 - s, chi^{-1}) / L(s, chi).
pub fn tate_gamma(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let eps = epsilon(ctx, chi, psi);
    let num = slot(ctx, &l_factor(ctx, &chi.inv()), Slot::OneMinus);
    &(&eps * &num) / &l_factor(ctx, chi)
}

/// gamma(1 - s, chi^{-1}, psi_a).
pub fn gamma_dual(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    slot(ctx, &tate_gamma(ctx, &chi.inv(), psi), Slot::OneMinus)
}

// ---- Weil indices

/// sum over t in F_q of zeta_p^{Tr(t^2)}.
pub fn quadratic_gauss_sum(ctx: &TameContext) -> CycNumber {
    let step = (ctx.order / ctx.p()) as i64;
    let f = &ctx.field;
    CycNumber::root_sum(ctx.cyc(), f.elements().map(|t| (f.trace(f.mul(t, t)) as i64 * step, 1)))
}

/// gamma_psi(x) for the normalized psi.
fn gamma_psi_normalized(ctx: &TameContext, x: FStarClass) -> CycNumber {
    if x.val.rem_euclid(2) == 0 {
        return ctx.int(1);
    }
    let g = &quadratic_gauss_sum(ctx) * &ctx.sqrt_q().inv().expect("nonzero");
    let u = ctx.class(0, x.unit_dlog as i64);
    &g * &ctx.hilbert_symbol(2, ctx.varpi(), u)
}

/// The unnormalized index gamma_F(psi_a); gamma_F(psi) = 1 for the normalized psi.
pub fn gamma_f(ctx: &TameContext, psi: &AddCharTwist) -> CycNumber {
    gamma_psi_normalized(ctx, psi.a)
}

/// gamma_{psi_a}(x) = gamma_F(psi_{ax}) / gamma_F(psi_a).
pub fn weil_gamma_psi(ctx: &TameContext, psi: AddCharTwist, x: FStarClass) -> CycNumber {
    let num = gamma_psi_normalized(ctx, ctx.cmul(psi.a, x));
    let den = gamma_psi_normalized(ctx, psi.a);
    &num * &den.inv().expect("root of unity")
}

/// gamma_F(psi_a) together with gamma_{psi_a} on the four square classes.
#[derive(Debug, Clone)]
pub struct WeilIndex {
    pub gamma_f: CycNumber,
    pub table: Vec<(FStarClass, CycNumber)>,
}

pub fn weil_indices(ctx: &TameContext, psi: &AddCharTwist) -> WeilIndex {
    let table = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(v, u)| {
            let x = ctx.class(v, u);
            (x, weil_gamma_psi(ctx, *psi, x))
        })
        .collect();
    WeilIndex { gamma_f: gamma_f(ctx, psi), table }
}

// ---- metaplectic gamma

/// gammã(1 - s, chi^{-1}, psi_a)
///   = gamma_F(psi_{-a})^{-1} chi(-1) gamma(s + 1/2, chi, psi_a) / gamma(2s, chi^2, psi_{2a}).
pub fn meta_gamma_dual(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let weil = gamma_f(ctx, &psi.twist(ctx, ctx.minus_one())).inv().expect("root of unity");
    let c = &weil * &chi.eval(ctx, ctx.minus_one());
    let top = slot(ctx, &tate_gamma(ctx, chi, psi), Slot::PlusHalf);
    let psi2 = psi.twist(ctx, two_class(ctx));
    let bottom = slot(ctx, &tate_gamma(ctx, &chi.pow(2), &psi2), Slot::Times(2));
    (&top / &bottom).scale(&c)
}

/// gammã(s, chi, psi_a).
pub fn meta_gamma(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    slot(ctx, &meta_gamma_dual(ctx, &chi.inv(), psi), Slot::OneMinus)
}

// ---- partial factors

fn average(ctx: &TameContext, terms: Vec<(RatFun, CycNumber)>) -> RatFun {
    let d = terms.len() as i64;
    let mut acc = RatFun::zero(ctx.cyc());
    for (f, w) in terms {
        acc = &acc + &f.scale(&w);
    }
    acc.scale(&ctx.ratio(1, d))
}

fn check_k(ctx: &TameContext, l: &LagrangianDecomposition, k: FStarClass) -> Result<(), FactorError> {
    l.k_index(ctx, k).map(|_| ()).ok_or(FactorError::NotInK(k))
}

fn partial_with<F>(ctx: &TameContext, l: &LagrangianDecomposition, k: FStarClass, f: F) -> Result<RatFun, FactorError>
where
    F: Fn(&MultChar) -> RatFun,
{
    check_k(ctx, l, k)?;
    let kinv = ctx.cinv(k);
    let terms = l
        .jbar
        .iter()
        .map(|&j| {
            let eta = ctx.eta(j);
            (f(&eta), eta.eval(ctx, kinv))
        })
        .collect();
    Ok(average(ctx, terms))
}

/// gamma_J(s, chi, psi, k) = (1/#J) sum_j gamma(s, chi eta_j, psi) eta_j(k^{-1}).
pub fn partial_gamma(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    chi: &MultChar,
    psi: &AddCharTwist,
    k: FStarClass,
) -> Result<RatFun, FactorError> {
    partial_with(ctx, l, k, |eta| tate_gamma(ctx, &chi.mul(eta), psi))
}

/// gamma_J(1 - s, rho^{-1}, psi, k).
pub fn partial_gamma_dual(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    rho: &MultChar,
    psi: &AddCharTwist,
    k: FStarClass,
) -> Result<RatFun, FactorError> {
    partial_with(ctx, l, k, |eta| gamma_dual(ctx, &rho.mul(&eta.inv()), psi))
}

/// gammã_J(s, chi, psi, k).
pub fn partial_meta_gamma(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    chi: &MultChar,
    psi: &AddCharTwist,
    k: FStarClass,
) -> Result<RatFun, FactorError> {
    partial_with(ctx, l, k, |eta| meta_gamma(ctx, &chi.mul(eta), psi))
}

/// gammã_J(1 - s, rho^{-1}, psi, k).
pub fn partial_meta_gamma_dual(
    ctx: &TameContext,
    l: &LagrangianDecomposition,
    rho: &MultChar,
    psi: &AddCharTwist,
    k: FStarClass,
) -> Result<RatFun, FactorError> {
    partial_with(ctx, l, k, |eta| meta_gamma_dual(ctx, &rho.mul(&eta.inv()), psi))
}

fn require_normalized(ctx: &TameContext, psi: &AddCharTwist) -> Result<(), FactorError> {
    if psi.a == ctx.one_class() {
        Ok(())
    } else {
        Err(FactorError::NotNormalized)
    }
}

/// Closed form of gamma_J(1 - s, chi^{-1}, psi, k^t), k the class of varpi,
/// for the standard decomposition and an odd cover.
pub fn partial_gamma_closed(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist, t: i64) -> Result<RatFun, FactorError> {
    require_normalized(ctx, psi)?;
    if ctx.cover.even {
        return Err(FactorError::NeedsOddCover);
    }
    let n = ctx.n() as i64;
    if chi.is_ramified(ctx) {
        if (t - chi.conductor()).rem_euclid(n) != 0 {
            return Ok(RatFun::zero(ctx.cyc()));
        }
        return Ok(slot(ctx, &epsilon(ctx, &chi.inv(), psi), Slot::OneMinus));
    }
    // k^t = k^{-tt}
    let tt = (-t).rem_euclid(n);
    let lead = chi_x_pow(ctx, chi, tt);
    let chin = chi.pow(n);
    let rest = if tt <= n - 2 {
        slot(ctx, &l_factor(ctx, &chin), Slot::Times(n)).scale(&one_minus_qinv(ctx))
    } else {
        slot(ctx, &gamma_dual(ctx, &chin, psi), Slot::Times(n))
    };
    Ok(&lead * &rest)
}

/// chi(-1) epsilon(s + 1/2, chi, psi) / epsilon(2s, chi^2, psi_2).
pub fn meta_epsilon_ratio(ctx: &TameContext, chi: &MultChar, psi: &AddCharTwist) -> RatFun {
    let top = slot(ctx, &epsilon(ctx, chi, psi), Slot::PlusHalf);
    let bottom = slot(ctx, &epsilon(ctx, &chi.pow(2), &psi.twist(ctx, two_class(ctx))), Slot::Times(2));
    (&top / &bottom).scale(&chi.eval(ctx, ctx.minus_one()))
}

/// Closed form of gammã_J(1 - s, chi^{-1}, psi, k^t) for the standard
/// decomposition and n = 2 mod 4, in all three ramification cases.
pub fn partial_meta_gamma_closed(
    ctx: &TameContext,
    chi: &MultChar,
    psi: &AddCharTwist,
    t: i64,
) -> Result<RatFun, FactorError> {
    require_normalized(ctx, psi)?;
    if !ctx.cover.even {
        return Err(FactorError::NeedsEvenCover);
    }
    let d = ctx.d() as i64;
    let n = ctx.n() as i64;
    let half = (d + 1) / 2;
    let chin = chi.pow(n);
    if chi.pow(2).is_ramified(ctx) {
        if (t - chi.conductor()).rem_euclid(d) != 0 {
            return Ok(RatFun::zero(ctx.cyc()));
        }
        return Ok(meta_epsilon_ratio(ctx, chi, psi));
    }
    let lnn = slot(ctx, &l_factor(ctx, &chin), Slot::Times(n));
    let top = slot(ctx, &meta_gamma_dual(ctx, &chi.pow(d), psi), Slot::Times(d));
    if !chi.is_ramified(ctx) {
        // k^t = k^{-2 tt}
        let tt = (-t * half).rem_euclid(d);
        let lead = chi_x_pow(ctx, chi, 2 * tt);
        let rest = if tt != (d - 1) / 2 { lnn.scale(&one_minus_qinv(ctx)) } else { top };
        return Ok(&lead * &rest);
    }
    // k^t = k^{-(2 tt + 1)}
    let tt = ((-t - 1) * half).rem_euclid(d);
    if tt <= d - 2 {
        let eps = slot(ctx, &epsilon(ctx, chi, psi), Slot::PlusHalf);
        let c = &one_minus_qinv(ctx) * &chi.eval(ctx, ctx.minus_one());
        Ok(&(&chi_x_pow(ctx, chi, 2 * tt) * &eps) * &lnn.scale(&c))
    } else {
        Ok(&chi_x_pow(ctx, chi, d - 1) * &top)
    }
}

// ---- shell oracles over Q_p

fn oracle_checks(ctx: &TameContext, psi: &AddCharTwist, depth: u32) -> Result<(), FactorError> {
    if ctx.field.f != 1 {
        return Err(FactorError::NeedsPrimeField);
    }
    if psi.a.val.abs() > 1 {
        return Err(FactorError::TwistTooDeep(psi.a.val));
    }
    if !(1..=3).contains(&depth) {
        return Err(FactorError::BadDepth(depth));
    }
    Ok(())
}

/// gamma(1 - s, chi^{-1}, psi_a) as the shell sum of
/// lim_r int_{P^{-r}} chi_s(x) psi_a(x) d*x (f = 1, measure self-dual for psi_a).
/// Shells with v(ax) <= -2 are summed exactly down to -depth and must vanish.
pub fn shell_integral_gamma(
    ctx: &TameContext,
    chi: &MultChar,
    psi: &AddCharTwist,
    depth: u32,
) -> Result<RatFun, FactorError> {
    oracle_checks(ctx, psi, depth)?;
    let p = ctx.p() as i64;
    let n = ctx.order as i64;
    let v = psi.a.val;
    let c = ctx.field.exp(psi.a.unit_dlog as i64) as i64;
    let j = chi.unit_exp as i64;
    let step_u = n / ctx.qm1() as i64;
    let chi0 = |u: i64| -> i64 { j * ctx.field.dlog(u.rem_euclid(p) as u64).expect("unit") as i64 * step_u };
    for w in 2..=depth as i64 {
        let pw = p.pow(w as u32);
        let terms = (1..pw).filter(|u| u % p != 0).map(|u| (chi0(u), (c * u).rem_euclid(pw) * p.pow(depth - w as u32), 1));
        if !Ext::from_terms(ctx.cyc(), ctx.p(), depth, terms).is_zero() {
            return Err(FactorError::Unstable(-w - v));
        }
    }
    // shell v(x) = -1 - v: q^{-1} sum_t chi0(t) zeta_p^{c t}
    let s1 = CycNumber::root_sum(ctx.cyc(), (1..p).map(|t| (chi0(t) + (c * t) * (n / p), 1)));
    let mut total = chi_x_pow(ctx, chi, -1 - v).scale(&(&s1 * &ctx.q_pow(-1)));
    if !chi.is_ramified(ctx) {
        let tail = &chi_x_pow(ctx, chi, -v) * &l_factor(ctx, chi);
        total = &total + &tail.scale(&one_minus_qinv(ctx));
    }
    Ok(total.scale(&ctx.sqrt_q_pow(-v)))
}

/// gamma_F(psi_b) as the stabilized integral of psi_b(x^2) against the
/// measure self-dual for psi_{2b} (f = 1); shells with v(b x^2) <= -2 must vanish.
pub fn shell_weil_index(ctx: &TameContext, psi: &AddCharTwist, depth: u32) -> Result<CycNumber, FactorError> {
    oracle_checks(ctx, psi, depth)?;
    let p = ctx.p() as i64;
    let v = psi.a.val;
    let c = ctx.field.exp(psi.a.unit_dlog as i64) as i64;
    let field = ctx.cyc();
    // shells x = p^m u with w = v + 2m < 0
    let m0 = (-v).div_euclid(2) + if (-v).rem_euclid(2) == 1 { 1 } else { 0 };
    let mut total = ctx.q_pow(-m0);
    let mut m = m0 - 1;
    loop {
        let w = v + 2 * m;
        if w < -(depth as i64) {
            break;
        }
        let k = -w;
        let pk = p.pow(k as u32);
        let terms = (1..pk).filter(|u| u % p != 0).map(|u| (0, (c * u * u).rem_euclid(pk) * p.pow(depth - k as u32), 1));
        let s = Ext::from_terms(field, ctx.p(), depth, terms);
        if k >= 2 {
            if !s.is_zero() {
                return Err(FactorError::Unstable(m));
            }
        } else {
            let base = s.base().ok_or(FactorError::Unstable(m))?;
            total += &(&base * &ctx.q_pow(-m - k));
        }
        m -= 1;
    }
    Ok(&total * &ctx.sqrt_q_pow(-v))
}

/// The product identities over powers of xi = eta_u(varpi):
/// prod_m (1 - x xi^{-m}) = 1 - x^d and
/// prod_{m != l} (1 - x xi^{-m}) = sum_m x^m xi^{-lm}, as polynomials in x.
pub fn check_elementary_products(ctx: &TameContext) -> bool {
    use crate::ratfun::{poly_mul, Poly};
    let d = ctx.d() as i64;
    let xi = ctx.eta(ctx.class(0, 1)).at_varpi(ctx);
    let field = ctx.cyc();
    let lin = |m: i64| -> Poly { vec![CycNumber::one(field), -xi.pow(-m).expect("root")] };
    let mut full: Poly = vec![CycNumber::one(field)];
    for m in 0..d {
        full = poly_mul(&full, &lin(m));
    }
    let mut expect = vec![CycNumber::zero(field); d as usize + 1];
    expect[0] = CycNumber::one(field);
    expect[d as usize] = -CycNumber::one(field);
    if full != expect {
        return false;
    }
    for l in 0..d {
        let mut part: Poly = vec![CycNumber::one(field)];
        for m in (0..d).filter(|&m| m != l) {
            part = poly_mul(&part, &lin(m));
        }
        let rhs: Poly = (0..d).map(|m| xi.pow(-l * m).expect("root")).collect();
        if part != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::eta_prime;

    fn ctx(p: u64, f: u32, n: u64) -> TameContext {
        TameContext::new(p, f, n, None).unwrap()
    }

    fn chars(c: &TameContext) -> Vec<MultChar> {
        let n = c.order;
        let mut ks = vec![0, n / 2, 1, n / c.qm1()];
        ks.dedup();
        let mut out = Vec::new();
        for j in 0..c.qm1() {
            for &k in &ks {
                out.push(MultChar::new(c, j, k));
            }
        }
        out
    }

    fn classes(c: &TameContext, vals: std::ops::RangeInclusive<i64>) -> Vec<FStarClass> {
        let mut out = Vec::new();
        for v in vals {
            for u in 0..c.qm1() as i64 {
                out.push(c.class(v, u));
            }
        }
        out
    }

    fn square_classes(c: &TameContext) -> Vec<FStarClass> {
        vec![c.class(0, 0), c.class(0, 1), c.class(1, 0), c.class(1, 1)]
    }

    fn x(c: &TameContext) -> RatFun {
        RatFun::x(c.cyc())
    }

    /// |a|^{s - 1/2} = sqrt(q)^{v(a)} X^{v(a)}.
    fn abs_shift(c: &TameContext, a: FStarClass) -> RatFun {
        RatFun::monomial(&c.sqrt_q_pow(a.val), a.val)
    }

    #[test]
    fn l_factor_examples() {
        let c = ctx(7, 1, 3);
        let one = RatFun::one(c.cyc());
        let triv = l_factor(&c, &MultChar::trivial(&c));
        assert_eq!(triv, (&one - &x(&c)).inv().unwrap());
        let sign = MultChar::new(&c, 0, c.order / 2);
        assert_eq!(l_factor(&c, &sign), (&one + &x(&c)).inv().unwrap());
        assert!(l_factor(&c, &MultChar::new(&c, 1, 0)).is_one());
    }

    #[test]
    fn gauss_sums() {
        for (p, f, n) in [(7u64, 1u32, 3u64), (3, 2, 2), (11, 1, 5), (13, 1, 3)] {
            let c = ctx(p, f, n);
            let q = c.int(c.q() as i64);
            assert_eq!(gauss_sum(&c, &MultChar::trivial(&c), 1), c.int(-1));
            for j in 1..c.qm1() {
                let chi = MultChar::new(&c, j, 0);
                let g = gauss_sum(&c, &chi, 1);
                assert_eq!(&g * &g.conj(), q, "F_{} j = {}", c.q(), j);
                let h = gauss_sum(&c, &chi.inv(), 1);
                assert_eq!(&g * &h, &q * &chi.eval(&c, c.minus_one()));
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let c = ctx(7, 1, 3);
        let psi = AddCharTwist::normalized(&c);
        assert!(epsilon(&c, &MultChar::new(&c, 0, 5), &psi).is_one());
        for chi in chars(&c) {
            for a in classes(&c, -1..=2) {
                let psi = AddCharTwist::new(a);
                let (_, k) = epsilon(&c, &chi, &psi).as_monomial().unwrap();
                assert_eq!(k, chi.conductor() - psi.conductor());
            }
        }
    }

    #[test]
    fn gamma_times_dual_is_chi_minus_one() {
        for (p, f, n) in [(7u64, 1u32, 3u64), (3, 2, 2)] {
            let c = ctx(p, f, n);
            for chi in chars(&c) {
                for a in classes(&c, -1..=1) {
                    let psi = AddCharTwist::new(a);
                    let prod = &tate_gamma(&c, &chi, &psi) * &gamma_dual(&c, &chi, &psi);
                    assert_eq!(prod, RatFun::constant(&chi.eval(&c, c.minus_one())));
                    let e = &slot(&c, &epsilon(&c, &chi.inv(), &psi), Slot::OneMinus) * &epsilon(&c, &chi, &psi);
                    assert_eq!(e, RatFun::constant(&chi.eval(&c, c.minus_one())));
                }
            }
        }
    }

    #[test]
    fn gamma_change_of_psi() {
        let c = ctx(11, 1, 5);
        let psi = AddCharTwist::normalized(&c);
        for chi in chars(&c) {
            for a in classes(&c, -2..=2) {
                let lhs = tate_gamma(&c, &chi, &AddCharTwist::new(a));
                let rhs = (&abs_shift(&c, a) * &tate_gamma(&c, &chi, &psi)).scale(&chi.eval(&c, a));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn epsilon_old_twist() {
        let c = ctx(5, 1, 2);
        for chi in chars(&c) {
            for a in classes(&c, -1..=1) {
                let psi = AddCharTwist::new(a);
                let eps = epsilon(&c, &chi, &psi);
                let e = psi.conductor() - chi.conductor();
                for t in -2..=2 {
                    assert_eq!(slot(&c, &eps, Slot::Shift(t)), eps.scale(&c.q_pow(e * t)));
                }
                assert_eq!(slot(&c, &eps, Slot::PlusHalf), eps.scale(&c.sqrt_q_pow(e)));
            }
        }
    }

    #[test]
    fn epsilon_unramified_twist() {
        let c = ctx(7, 1, 3);
        for chi in chars(&c) {
            for k in [1, 7, c.order / 2] {
                let eta = MultChar::new(&c, 0, k);
                for a in classes(&c, -1..=1) {
                    let psi = AddCharTwist::new(a);
                    let w = eta.at_varpi(&c).pow(chi.conductor() - psi.conductor()).unwrap();
                    assert_eq!(epsilon(&c, &chi.mul(&eta), &psi), epsilon(&c, &chi, &psi).scale(&w));
                }
            }
        }
    }

    #[test]
    fn epsilon_twist_and_inverse() {
        let c = ctx(13, 1, 3);
        for chi in chars(&c) {
            for a in classes(&c, -1..=1) {
                let psi = AddCharTwist::new(a);
                let lhs = &slot(&c, &epsilon(&c, &chi.inv(), &psi), Slot::OneMinus)
                    * &slot(&c, &epsilon(&c, &chi, &psi), Slot::Shift(1));
                let rhs = &chi.eval(&c, c.minus_one()) * &c.q_pow(psi.conductor() - chi.conductor());
                assert_eq!(lhs, RatFun::constant(&rhs));
            }
        }
    }

    #[test]
    fn tate_integral_matches_shell_sums() {
        for (p, n, depth) in [(5u64, 2u64, 3u32), (7, 3, 2)] {
            let c = ctx(p, 1, n);
            for chi in chars(&c) {
                for a in classes(&c, -1..=1) {
                    let psi = AddCharTwist::new(a);
                    let shell = shell_integral_gamma(&c, &chi, &psi, depth).unwrap();
                    assert_eq!(shell, gamma_dual(&c, &chi, &psi), "p = {} chi = {:?} a = {:?}", p, chi, a);
                }
            }
        }
    }

    #[test]
    fn shell_oracle_rejects_bad_input() {
        let c = ctx(7, 1, 3);
        let chi = MultChar::trivial(&c);
        assert_eq!(
            shell_integral_gamma(&c, &chi, &AddCharTwist::new(c.class(2, 0)), 2),
            Err(FactorError::TwistTooDeep(2))
        );
        assert_eq!(shell_integral_gamma(&c, &chi, &AddCharTwist::normalized(&c), 4), Err(FactorError::BadDepth(4)));
        let c9 = ctx(3, 2, 2);
        assert_eq!(
            shell_weil_index(&c9, &AddCharTwist::normalized(&c9), 2),
            Err(FactorError::NeedsPrimeField)
        );
    }

    #[test]
    fn weil_index_matches_shell_sums() {
        for p in [5u64, 7, 11] {
            let c = ctx(p, 1, 2);
            for a in classes(&c, -1..=1) {
                let psi = AddCharTwist::new(a);
                assert_eq!(shell_weil_index(&c, &psi, 3).unwrap(), gamma_f(&c, &psi), "p = {} a = {:?}", p, a);
            }
        }
    }

    #[test]
    fn weil_index_identities() {
        for (p, f, n) in [(5u64, 1u32, 2u64), (7, 1, 3), (3, 2, 2), (11, 1, 5), (13, 1, 3)] {
            let c = ctx(p, f, n);
            let psi = AddCharTwist::normalized(&c);
            let gp = |x: FStarClass| weil_gamma_psi(&c, psi, x);
            let h = |x: FStarClass, y: FStarClass| c.hilbert_symbol(2, x, y);
            let m1 = c.minus_one();
            assert!(gamma_f(&c, &psi).is_one());
            for x in classes(&c, -1..=2) {
                assert_eq!(gp(x), gp(c.class(x.val.rem_euclid(2), (x.unit_dlog % 2) as i64)));
                assert_eq!(gp(x).pow(2).unwrap(), h(x, m1));
                assert_eq!(gp(x).inv().unwrap(), &h(m1, x) * &gp(x));
                let gf = gamma_f(&c, &AddCharTwist::new(x));
                assert!(gf.pow(8).unwrap().is_one());
                assert_eq!(gf.inv().unwrap(), gf.conj());
                assert_eq!(gf.inv().unwrap(), gamma_f(&c, &AddCharTwist::new(c.cmul(x, m1))));
                for y in square_classes(&c) {
                    assert_eq!(gp(c.cmul(x, y)), &(&gp(x) * &gp(y)) * &h(x, y));
                    for a in square_classes(&c) {
                        let twisted = weil_gamma_psi(&c, AddCharTwist::new(a), y);
                        assert_eq!(twisted, &h(a, y) * &gp(y));
                    }
                }
                if x.val == 0 {
                    assert!(gp(x).is_one());
                }
            }
            let gfm = gamma_f(&c, &AddCharTwist::new(m1));
            assert_eq!(gfm.pow(2).unwrap(), gp(m1));
            assert_eq!(&gfm.pow(-2).unwrap() * &gp(m1).inv().unwrap(), h(m1, m1));
            let table = weil_indices(&c, &psi);
            assert_eq!(table.table.len(), 4);
        }
    }

    #[test]
    fn weil_index_at_uniformizer() {
        // gamma_psi(varpi)^2 = (varpi, -1)_2 = (-1 | p)
        for p in [5u64, 7, 11, 13] {
            let c = ctx(p, 1, 2);
            let g = weil_gamma_psi(&c, AddCharTwist::normalized(&c), c.varpi());
            let leg = crate::exact_scalars::legendre(-1, p) as i64;
            assert_eq!(g.pow(2).unwrap(), c.int(leg));
        }
    }

    #[test]
    fn meta_gamma_unramified_formula() {
        for (p, f, n) in [(7u64, 1u32, 6u64), (3, 2, 2), (13, 1, 3)] {
            let c = ctx(p, f, n);
            let psi = AddCharTwist::normalized(&c);
            let r = c.sqrt_q_pow(-1);
            for k in [0, 1, c.order / 2, c.order / 4, 3] {
                let chi = MultChar::new(&c, 0, k);
                let z = chi.at_varpi(&c);
                let zi = z.inv().unwrap();
                let num = RatFun::laurent(c.cyc(), -1, vec![&r * &zi, one_minus_qinv(&c), -(&r * &z)]);
                let den = RatFun::from_poly(c.cyc(), vec![c.int(1), c.int(0), -(&z * &z)]);
                assert_eq!(meta_gamma_dual(&c, &chi, &psi), &num / &den);
            }
        }
    }

    #[test]
    fn meta_gamma_semi_unramified_formula() {
        for (p, f, n) in [(7u64, 1u32, 6u64), (3, 2, 2), (13, 1, 6)] {
            let c = ctx(p, f, n);
            let psi = AddCharTwist::normalized(&c);
            let half = c.qm1() / 2;
            for k in [0, 1, c.order / 2, 5] {
                let chi = MultChar::new(&c, half, k);
                let z2 = chi.pow(2).at_varpi(&c);
                let eps = slot(&c, &epsilon(&c, &chi, &psi), Slot::PlusHalf).scale(&chi.eval(&c, c.minus_one()));
                let top = RatFun::laurent(c.cyc(), -2, vec![-(&z2.inv().unwrap() * &c.q_pow(-1)), c.int(0), c.int(1)]);
                let den = RatFun::from_poly(c.cyc(), vec![c.int(1), c.int(0), -z2]);
                assert_eq!(meta_gamma_dual(&c, &chi, &psi), &(&eps * &top) / &den);
            }
        }
    }

    #[test]
    fn meta_gamma_monomial_when_square_ramified() {
        let c = ctx(13, 1, 6);
        let psi = AddCharTwist::normalized(&c);
        for chi in chars(&c) {
            if chi.pow(2).is_ramified(&c) {
                let g = meta_gamma_dual(&c, &chi, &psi);
                assert!(g.as_monomial().is_some());
                assert_eq!(g, meta_epsilon_ratio(&c, &chi, &psi));
            }
        }
    }

    #[test]
    fn meta_gamma_change_of_psi() {
        for (p, f, n) in [(7u64, 1u32, 6u64), (3, 2, 2), (11, 1, 2)] {
            let c = ctx(p, f, n);
            let psi = AddCharTwist::normalized(&c);
            for chi in chars(&c) {
                let base = meta_gamma(&c, &chi, &psi);
                for a in classes(&c, -1..=1) {
                    let w = &weil_gamma_psi(&c, psi, a) * &chi.eval(&c, a);
                    let rhs = (&abs_shift(&c, a) * &base).scale(&w);
                    assert_eq!(meta_gamma(&c, &chi, &AddCharTwist::new(a)), rhs);
                }
            }
        }
    }

    #[test]
    fn partial_gamma_trivial_cover() {
        let c = ctx(5, 1, 2);
        let l = LagrangianDecomposition::standard(&c);
        let psi = AddCharTwist::normalized(&c);
        for chi in chars(&c) {
            assert_eq!(partial_gamma(&c, &l, &chi, &psi, c.one_class()).unwrap(), tate_gamma(&c, &chi, &psi));
            assert_eq!(partial_meta_gamma(&c, &l, &chi, &psi, c.one_class()).unwrap(), meta_gamma(&c, &chi, &psi));
        }
    }

    #[test]
    fn partial_gamma_fourier_inversion() {
        for (p, n) in [(7u64, 3u64), (7, 6)] {
            let c = ctx(p, 1, n);
            let psi = AddCharTwist::normalized(&c);
            for l in [LagrangianDecomposition::standard(&c), LagrangianDecomposition::swapped(&c)] {
                for chi in chars(&c).into_iter().step_by(3) {
                    let parts: Vec<RatFun> =
                        l.kbar.iter().map(|&k| partial_gamma(&c, &l, &chi, &psi, k).unwrap()).collect();
                    for &j in &l.jbar {
                        let eta = c.eta(j);
                        let mut acc = RatFun::zero(c.cyc());
                        for (g, &k) in parts.iter().zip(&l.kbar) {
                            acc = &acc + &g.scale(&eta.eval(&c, k));
                        }
                        assert_eq!(acc, tate_gamma(&c, &chi.mul(&eta), &psi));
                    }
                }
            }
        }
    }

    #[test]
    fn partial_gamma_rejects_classes_outside_k() {
        let c = ctx(7, 1, 3);
        let l = LagrangianDecomposition::standard(&c);
        let psi = AddCharTwist::normalized(&c);
        let chi = MultChar::trivial(&c);
        let j = c.class(0, 1);
        assert_eq!(partial_gamma(&c, &l, &chi, &psi, j), Err(FactorError::NotInK(j)));
        let closed = partial_gamma_closed(&c, &chi, &AddCharTwist::new(j), 0);
        assert_eq!(closed, Err(FactorError::NotNormalized));
    }

    #[test]
    fn partial_gamma_closed_form_odd() {
        for (p, f, n) in [(7u64, 1u32, 3u64), (13, 1, 3), (11, 1, 5), (7, 1, 1)] {
            let c = ctx(p, f, n);
            let l = LagrangianDecomposition::standard(&c);
            let psi = AddCharTwist::normalized(&c);
            for chi in chars(&c) {
                for t in 0..c.n() as i64 {
                    let k = c.cpow(c.varpi(), t);
                    let def = partial_gamma_dual(&c, &l, &chi, &psi, k).unwrap();
                    let closed = partial_gamma_closed(&c, &chi, &psi, t).unwrap();
                    assert_eq!(def, closed, "q = {} n = {} chi = {:?} t = {}", c.q(), n, chi, t);
                }
            }
        }
    }

    #[test]
    fn partial_meta_gamma_closed_form_even() {
        for (p, f, n) in [(7u64, 1u32, 6u64), (5, 1, 2), (3, 2, 2), (13, 1, 6), (11, 1, 10)] {
            let c = ctx(p, f, n);
            let l = LagrangianDecomposition::standard(&c);
            let psi = AddCharTwist::normalized(&c);
            for chi in chars(&c) {
                for t in 0..c.d() as i64 {
                    let k = c.cpow(c.varpi(), t);
                    let def = partial_meta_gamma_dual(&c, &l, &chi, &psi, k).unwrap();
                    let closed = partial_meta_gamma_closed(&c, &chi, &psi, t).unwrap();
                    assert_eq!(def, closed, "q = {} n = {} chi = {:?} t = {}", c.q(), n, chi, t);
                }
            }
        }
    }

    #[test]
    fn partial_meta_gamma_uses_either_dual_parametrization() {
        let c = ctx(7, 1, 6);
        let l = LagrangianDecomposition::standard(&c);
        let psi = AddCharTwist::normalized(&c);
        for chi in chars(&c).into_iter().step_by(5) {
            for &k in &l.kbar {
                let kinv = c.cinv(k);
                let mut acc = RatFun::zero(c.cyc());
                for &j in &l.jbar {
                    let eta = eta_prime(&c, j).unwrap();
                    acc = &acc + &meta_gamma_dual(&c, &chi.mul(&eta.inv()), &psi).scale(&eta.eval(&c, kinv));
                }
                let avg = acc.scale(&c.ratio(1, c.d() as i64));
                assert_eq!(avg, partial_meta_gamma_dual(&c, &l, &chi, &psi, k).unwrap());
            }
        }
    }

    #[test]
    fn elementary_products() {
        for (p, f, n) in [(5u64, 1u32, 2u64), (7, 1, 3), (7, 1, 6), (11, 1, 5), (3, 2, 2), (13, 1, 3)] {
            assert!(check_elementary_products(&ctx(p, f, n)));
        }
    }
}
