//! Identity suites run by `slcm verify`. Every check is an exact equality.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::characters::{AddCharTwist, GenuineCharData, MultChar};
use crate::factors::{
    epsilon, gamma_dual, gamma_f, gauss_sum, l_factor, meta_gamma, partial_gamma, partial_gamma_closed,
    partial_gamma_dual, partial_meta_gamma, partial_meta_gamma_closed, partial_meta_gamma_dual, shell_integral_gamma,
    shell_weil_index, slot, tate_gamma, weil_gamma_psi, check_elementary_products,
};
use crate::lagrangian::{verify_lagrangian, LagrangianDecomposition};
use crate::ratfun::{RatFun, Slot};
use crate::schwartz::{random_schwartz, ExtRatFun};
use crate::slcm::{
    assemble_slcm, assemble_slcm_closed, central_at_minus_identity, conductor_identity, plancherel_harmonic_mean,
    plancherel_l_ratio, plancherel_plan_and_sum, plancherel_report, related_reps, trace_t_formula,
};
use crate::tame_field::{FStarClass, TameContext};

pub const SUITES: &[&str] = &[
    "fields",
    "factors",
    "weil",
    "partial",
    "slcm",
    "plancherel",
    "invariance",
    "reducibility",
    "conductor",
    "harmonic",
    "oracle",
];

/// The built-in (p, f, n) grid.
pub const GRID: &[(u64, u32, u64)] = &[(5, 1, 2), (7, 1, 3), (7, 1, 6), (11, 1, 5), (3, 2, 2), (13, 1, 3)];

const KEPT_FAILURES: usize = 5;

/// Case count and the first few failure descriptions of one identity.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn merge(&mut self, other: Outcome) {
        self.cases += other.cases;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub context: (u64, u32, u64),
    pub suite: &'static str,
    pub name: &'static str,
    pub outcome: Outcome,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let (p, f, n) = self.context;
        let mut s = format!(
            "{}  ({}, {}, {})  {:<12} {:<34} {} cases",
            if self.outcome.passed() { "PASS" } else { "FAIL" },
            p,
            f,
            n,
            self.suite,
            self.name,
            self.outcome.cases
        );
        if !self.outcome.passed() {
            s.push_str(&format!(", {} failed", self.outcome.failed));
            for d in &self.outcome.failures {
                s.push_str(&format!("\n      {}", d));
            }
        }
        s
    }

    pub fn json(&self) -> Value {
        json!({
            "context": [self.context.0, self.context.1, self.context.2],
            "suite": self.suite,
            "identity": self.name,
            "cases": self.outcome.cases,
            "failed": self.outcome.failed,
            "failures": self.outcome.failures,
        })
    }
}

// ---- sample sets

/// chi(varpi) = zeta_N^k for k in {0, N/2, N/4, N/3, N/(q-1), 1}, where defined.
pub fn varpi_exponents(ctx: &TameContext) -> Vec<u64> {
    let n = ctx.order;
    let mut out: Vec<u64> = [0, 2, 4, 3, ctx.qm1()].iter().filter(|&&m| m == 0 || n % m == 0).map(|&m| if m == 0 { 0 } else { n / m }).collect();
    out.push(1);
    out.sort();
    out.dedup();
    out
}

/// All unit exponents against every varpi value of `varpi_exponents`.
pub fn all_chars(ctx: &TameContext) -> Vec<MultChar> {
    let ks = varpi_exponents(ctx);
    (0..ctx.qm1()).flat_map(|j| ks.iter().map(move |&k| (j, k))).map(|(j, k)| MultChar::new(ctx, j, k)).collect()
}

/// One character for each ramification type of chi, chi^2, chi^d and chi^n.
pub fn representative_chars(ctx: &TameContext) -> Vec<MultChar> {
    let qm1 = ctx.qm1();
    let mut js = vec![0, 1, qm1 / ctx.n(), qm1 / ctx.d(), qm1 / 2];
    js.sort();
    js.dedup();
    let mut out = Vec::new();
    for j in js {
        for k in [0, ctx.order / ctx.n(), 1] {
            out.push(MultChar::new(ctx, j, k));
        }
    }
    out.dedup();
    out
}

/// Characters whose varpi value has order dividing 2n, plus one of infinite-looking order.
pub fn torsion_chars(ctx: &TameContext) -> Vec<MultChar> {
    let n2 = 2 * ctx.n();
    let mut ks: Vec<u64> = (0..ctx.order).filter(|k| (k * n2) % ctx.order == 0).collect();
    ks.push(1);
    ks.sort();
    ks.dedup();
    (0..ctx.qm1()).flat_map(|j| ks.iter().map(move |&k| (j, k))).map(|(j, k)| MultChar::new(ctx, j, k)).collect()
}

pub fn classes(ctx: &TameContext, vals: std::ops::RangeInclusive<i64>) -> Vec<FStarClass> {
    vals.flat_map(|v| (0..ctx.qm1() as i64).map(move |u| (v, u))).map(|(v, u)| ctx.class(v, u)).collect()
}

pub fn square_classes(ctx: &TameContext) -> Vec<FStarClass> {
    vec![ctx.class(0, 0), ctx.class(0, 1), ctx.class(1, 0), ctx.class(1, 1)]
}

/// |a|^{s - 1/2} = sqrt(q)^{v(a)} X^{v(a)}.
fn abs_shift(ctx: &TameContext, a: FStarClass) -> RatFun {
    RatFun::monomial(&ctx.sqrt_q_pow(a.val), a.val)
}

fn normalized(ctx: &TameContext) -> AddCharTwist {
    AddCharTwist::normalized(ctx)
}

fn tag(chi: &MultChar) -> String {
    format!("chi = ({}, {})", chi.unit_exp, chi.varpi_exp)
}

fn par_outcome<T: Sync, F>(items: &[T], f: F) -> Outcome
where
    F: Fn(&T, &mut Outcome) + Sync,
{
    items
        .par_iter()
        .map(|it| {
            let mut o = Outcome::default();
            f(it, &mut o);
            o
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Outcome::default(), |mut acc, o| {
            acc.merge(o);
            acc
        })
}

// ---- fields

pub fn hilbert_symbol_relations(ctx: &TameContext) -> Outcome {
    let mut o = Outcome::default();
    let group = ctx.class_group(ctx.d()).expect("d divides q - 1");
    let d = ctx.d();
    for &x in &group {
        let minus_x = ctx.cmul(x, ctx.minus_one());
        o.check(ctx.hilbert_symbol(d, x, minus_x).is_one(), || format!("(x, -x) != 1 at {:?}", x));
        for &y in &group {
            let prod = &ctx.hilbert_symbol(d, x, y) * &ctx.hilbert_symbol(d, y, x);
            o.check(prod.is_one(), || format!("skew symmetry fails at {:?}, {:?}", x, y));
        }
    }
    o
}

pub fn lagrangian_decompositions(ctx: &TameContext) -> Outcome {
    let mut o = Outcome::default();
    for l in [LagrangianDecomposition::standard(ctx), LagrangianDecomposition::swapped(ctx)] {
        let r = verify_lagrangian(ctx, &l);
        o.check(r.is_ok(), || format!("{:?}", r));
    }
    o
}

pub fn gauss_sum_modulus(ctx: &TameContext) -> Outcome {
    let mut o = Outcome::default();
    let q = ctx.int(ctx.q() as i64);
    for j in 1..ctx.qm1() {
        let g = gauss_sum(ctx, &MultChar::new(ctx, j, 0), 1);
        o.check(&g * &g.conj() == q, || format!("j = {}", j));
    }
    o
}

// ---- factors

pub fn gamma_from_epsilon(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let cls = classes(ctx, -1..=1);
    par_outcome(chars, |chi, o| {
        for &a in &cls {
            let psi = AddCharTwist::new(a);
            let g = tate_gamma(ctx, chi, &psi);
            let rhs = &epsilon(ctx, chi, &psi) * &slot(ctx, &l_factor(ctx, &chi.inv()), Slot::OneMinus);
            o.check(&g * &l_factor(ctx, chi) == rhs, || format!("{} a = {:?}", tag(chi), a));
            let prod = &g * &gamma_dual(ctx, chi, &psi);
            o.check(prod == RatFun::constant(&chi.eval(ctx, ctx.minus_one())), || format!("{} a = {:?} dual", tag(chi), a));
        }
    })
}

pub fn gamma_change_of_psi(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let cls = classes(ctx, -2..=2);
    let psi = normalized(ctx);
    par_outcome(chars, |chi, o| {
        let base = tate_gamma(ctx, chi, &psi);
        for &a in &cls {
            let rhs = (&abs_shift(ctx, a) * &base).scale(&chi.eval(ctx, a));
            o.check(tate_gamma(ctx, chi, &AddCharTwist::new(a)) == rhs, || format!("{} a = {:?}", tag(chi), a));
        }
    })
}

pub fn epsilon_conductor_shift(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let cls = classes(ctx, -1..=1);
    par_outcome(chars, |chi, o| {
        for &a in &cls {
            let psi = AddCharTwist::new(a);
            let eps = epsilon(ctx, chi, &psi);
            let e = psi.conductor() - chi.conductor();
            for t in -2..=2 {
                o.check(slot(ctx, &eps, Slot::Shift(t)) == eps.scale(&ctx.q_pow(e * t)), || {
                    format!("{} a = {:?} t = {}", tag(chi), a, t)
                });
            }
            o.check(slot(ctx, &eps, Slot::PlusHalf) == eps.scale(&ctx.sqrt_q_pow(e)), || {
                format!("{} a = {:?} t = 1/2", tag(chi), a)
            });
        }
    })
}

pub fn epsilon_unramified_twist(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let cls = classes(ctx, -1..=1);
    let etas: Vec<MultChar> = varpi_exponents(ctx).into_iter().map(|k| MultChar::unramified(ctx, k as i64)).collect();
    par_outcome(chars, |chi, o| {
        for eta in &etas {
            for &a in &cls {
                let psi = AddCharTwist::new(a);
                let w = eta.at_varpi(ctx).pow(chi.conductor() - psi.conductor()).expect("root of unity");
                o.check(epsilon(ctx, &chi.mul(eta), &psi) == epsilon(ctx, chi, &psi).scale(&w), || {
                    format!("{} eta = {:?} a = {:?}", tag(chi), eta.varpi_exp, a)
                });
            }
        }
    })
}

pub type EpsilonFn = dyn Fn(&TameContext, &MultChar, &AddCharTwist) -> RatFun + Sync;

/// epsilon(1 - s, chi^{-1}, psi) epsilon(s + 1, chi, psi) = chi(-1) q^{e(psi) - e(chi)},
/// for any epsilon implementation.
pub fn epsilon_twist_and_inverse_with(ctx: &TameContext, chars: &[MultChar], eps: &EpsilonFn) -> Outcome {
    let cls = classes(ctx, -1..=1);
    par_outcome(chars, |chi, o| {
        for &a in &cls {
            let psi = AddCharTwist::new(a);
            let lhs = &slot(ctx, &eps(ctx, &chi.inv(), &psi), Slot::OneMinus) * &slot(ctx, &eps(ctx, chi, &psi), Slot::Shift(1));
            let rhs = &chi.eval(ctx, ctx.minus_one()) * &ctx.q_pow(psi.conductor() - chi.conductor());
            o.check(lhs == RatFun::constant(&rhs), || format!("{} a = {:?}", tag(chi), a));
        }
    })
}

pub fn epsilon_twist_and_inverse(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    epsilon_twist_and_inverse_with(ctx, chars, &|c, chi, psi| epsilon(c, chi, psi))
}

// ---- Weil indices

pub fn weil_index_identities(ctx: &TameContext) -> Vec<(&'static str, Outcome)> {
    let psi = normalized(ctx);
    let gp = |x: FStarClass| weil_gamma_psi(ctx, psi, x);
    let h = |x: FStarClass, y: FStarClass| ctx.hilbert_symbol(2, x, y);
    let m1 = ctx.minus_one();
    let (mut product, mut square, mut change, mut inverse, mut conj, mut last) =
        (Outcome::default(), Outcome::default(), Outcome::default(), Outcome::default(), Outcome::default(), Outcome::default());
    let sq = square_classes(ctx);
    for x in classes(ctx, -1..=2) {
        square.check(gp(x).pow(2).expect("unit") == h(x, m1), || format!("x = {:?}", x));
        inverse.check(gp(x).inv().expect("unit") == &h(m1, x) * &gp(x), || format!("x = {:?}", x));
        let gf = gamma_f(ctx, &AddCharTwist::new(x));
        conj.check(gf.pow(8).expect("unit").is_one(), || format!("eighth root at {:?}", x));
        conj.check(gf.inv().expect("unit") == gf.conj(), || format!("conjugate at {:?}", x));
        conj.check(gf.inv().expect("unit") == gamma_f(ctx, &AddCharTwist::new(ctx.cmul(x, m1))), || format!("minus at {:?}", x));
        for &y in &sq {
            product.check(gp(ctx.cmul(x, y)) == &(&gp(x) * &gp(y)) * &h(x, y), || format!("x = {:?} y = {:?}", x, y));
            change.check(weil_gamma_psi(ctx, AddCharTwist::new(x), y) == &h(x, y) * &gp(y), || format!("a = {:?} y = {:?}", x, y));
        }
    }
    let gfm = gamma_f(ctx, &AddCharTwist::new(m1));
    last.check(gfm.pow(2).expect("unit") == gp(m1), || "gamma_F(psi_{-1})^2".into());
    last.check(&gfm.pow(-2).expect("unit") * &gp(m1).inv().expect("unit") == h(m1, m1), || "(-1, -1)_2".into());
    vec![
        ("weil_index_product", product),
        ("weil_index_square", square),
        ("weil_index_change_of_psi", change),
        ("weil_index_inverse", inverse),
        ("weil_index_conjugate_and_minus", conj),
        ("weil_index_last_twist", last),
    ]
}

pub fn meta_gamma_change_of_psi(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let psi = normalized(ctx);
    let cls = classes(ctx, -1..=1);
    par_outcome(chars, |chi, o| {
        let base = meta_gamma(ctx, chi, &psi);
        for &a in &cls {
            let w = &weil_gamma_psi(ctx, psi, a) * &chi.eval(ctx, a);
            let rhs = (&abs_shift(ctx, a) * &base).scale(&w);
            o.check(meta_gamma(ctx, chi, &AddCharTwist::new(a)) == rhs, || format!("{} a = {:?}", tag(chi), a));
        }
    })
}

// ---- partial factors

/// sum_k gamma_J(s, chi, psi, k) eta_j(k) = gamma(s, chi eta_j, psi), and the same for gammã.
pub fn partial_fourier_inversion(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let psi = normalized(ctx);
    let ls = [LagrangianDecomposition::standard(ctx), LagrangianDecomposition::swapped(ctx)];
    par_outcome(chars, |chi, o| {
        for l in &ls {
            let parts: Vec<RatFun> = l
                .kbar
                .iter()
                .map(|&k| {
                    if ctx.cover.even {
                        partial_meta_gamma(ctx, l, chi, &psi, k)
                    } else {
                        partial_gamma(ctx, l, chi, &psi, k)
                    }
                    .expect("k in K")
                })
                .collect();
            for &j in &l.jbar {
                let eta = ctx.eta(j);
                let acc = parts.iter().zip(&l.kbar).fold(RatFun::zero(ctx.cyc()), |acc, (g, &k)| &acc + &g.scale(&eta.eval(ctx, k)));
                let full = if ctx.cover.even { meta_gamma(ctx, &chi.mul(&eta), &psi) } else { tate_gamma(ctx, &chi.mul(&eta), &psi) };
                o.check(acc == full, || format!("{} {:?} j = {:?}", tag(chi), l.kind, j));
            }
        }
    })
}

/// Closed forms of the partial factors against their definition, for every t.
pub fn partial_closed_forms(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let psi = normalized(ctx);
    let l = LagrangianDecomposition::standard(ctx);
    par_outcome(chars, |chi, o| {
        for t in 0..ctx.d() as i64 {
            let k = ctx.cpow(ctx.varpi(), t);
            let (def, closed) = if ctx.cover.even {
                (partial_meta_gamma_dual(ctx, &l, chi, &psi, k), partial_meta_gamma_closed(ctx, chi, &psi, t))
            } else {
                (partial_gamma_dual(ctx, &l, chi, &psi, k), partial_gamma_closed(ctx, chi, &psi, t))
            };
            o.check(def.is_ok() && def == closed, || format!("{} t = {}", tag(chi), t));
        }
    })
}

// ---- Slcm

pub fn slcm_closed_forms(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    par_outcome(chars, |chi, o| {
        let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
        let def = assemble_slcm(ctx, &l, &data).expect("assembly");
        let closed = assemble_slcm_closed(ctx, &data).expect("closed forms");
        for r in 0..def.dim() {
            for c in 0..def.dim() {
                o.check(def.entries[r][c] == closed.entries[r][c], || format!("{} entry ({}, {})", tag(chi), r, c));
            }
        }
    })
}

/// For chi^n ramified the Slcm is supported on i - j = e(chi) mod (n odd) or mod d (n even).
pub fn ramified_sparsity(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    let modulus = ctx.d() as i64;
    let ramified: Vec<MultChar> = chars.iter().copied().filter(|c| c.pow(ctx.n() as i64).is_ramified(ctx)).collect();
    par_outcome(&ramified, |chi, o| {
        let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
        let m = assemble_slcm(ctx, &l, &data).expect("assembly");
        for (i, row) in m.support().iter().enumerate() {
            for (j, &nz) in row.iter().enumerate() {
                let expect = (i as i64 - j as i64 - chi.conductor()).rem_euclid(modulus) == 0;
                o.check(nz == expect, || format!("{} entry ({}, {})", tag(chi), i, j));
            }
        }
    })
}

fn psis(ctx: &TameContext) -> Vec<AddCharTwist> {
    vec![normalized(ctx), AddCharTwist::new(ctx.class(0, 1)), AddCharTwist::new(ctx.class(-1, 1))]
}

pub fn trace_and_linear_algebra(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let ls = [LagrangianDecomposition::standard(ctx), LagrangianDecomposition::swapped(ctx)];
    let ps = psis(ctx);
    par_outcome(chars, |chi, o| {
        for l in &ls {
            for psi in &ps {
                let data = GenuineCharData::new(*chi, *psi, ctx.cover);
                let m = assemble_slcm(ctx, l, &data).expect("assembly");
                let tr = m.trace();
                o.check(tr == trace_t_formula(ctx, &data).expect("trace"), || format!("{} {:?} trace formula", tag(chi), psi.a));
                let cp = m.charpoly();
                let d = m.dim();
                let det = m.det();
                o.check(cp[d - 1] == -&tr, || format!("{} charpoly trace", tag(chi)));
                o.check(cp[0] == if d % 2 == 0 { det } else { -det }, || format!("{} charpoly det", tag(chi)));
            }
        }
    })
}

// ---- Plancherel

pub fn plancherel_paths(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    let ps = psis(ctx);
    par_outcome(chars, |chi, o| {
        for psi in &ps {
            let data = GenuineCharData::new(*chi, *psi, ctx.cover);
            let rep = plancherel_report(ctx, &l, &data).expect("plancherel");
            for (name, v) in &rep.paths {
                o.check(*v == rep.mu_inverse, || format!("{} psi = {:?}: {} differs", tag(chi), psi.a, name));
            }
        }
    })
}

/// For unramified chi and normalized psi, mu^{-1} is the bare L-ratio.
pub fn unramified_explicit_formula(ctx: &TameContext) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    let chars: Vec<MultChar> = varpi_exponents(ctx).into_iter().map(|k| MultChar::unramified(ctx, k as i64)).collect();
    par_outcome(&chars, |chi, o| {
        let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
        let mu = plancherel_plan_and_sum(ctx, &l, &data).expect("plancherel");
        o.check(mu == plancherel_l_ratio(ctx, chi), || tag(chi));
    })
}

/// D(chi, s) D(chi^{-1}, -s) (mu chi_sigma(-I_2, (-1,-1)_n))^d = 1.
pub fn determinant_relation(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    par_outcome(chars, |chi, o| {
        let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
        let dual = GenuineCharData { chi: chi.inv(), ..data };
        let d1 = assemble_slcm(ctx, &l, &data).expect("assembly").det();
        let d2 = slot(ctx, &assemble_slcm(ctx, &l, &dual).expect("assembly").det(), Slot::Minus);
        let mu_inv = plancherel_plan_and_sum(ctx, &l, &data).expect("plancherel");
        let central = central_at_minus_identity(ctx, &data);
        let mu_central = mu_inv.inv().expect("nonzero").scale(&central);
        let lhs = &(&d1 * &d2) * &mu_central.pow(ctx.d() as i64).expect("nonzero");
        o.check(lhs.is_one(), || tag(chi));
    })
}

// ---- invariance

fn invariance_chars(ctx: &TameContext) -> Vec<MultChar> {
    let mut v = vec![MultChar::trivial(ctx), MultChar::new(ctx, 1, 0), MultChar::new(ctx, ctx.qm1() / ctx.d(), 1)];
    v.push(MultChar::new(ctx, ctx.qm1() / 2, ctx.order / 2));
    v.dedup();
    v
}

/// Charpoly, trace, determinant and mu^{-1} under chi -> chi eta_x for all x in F*/F*^d.
pub fn eta_twist_invariance(ctx: &TameContext) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    let group = ctx.class_group(ctx.d()).expect("d divides q - 1");
    let psi = normalized(ctx);
    let mut o = Outcome::default();
    for chi in invariance_chars(ctx) {
        let data = GenuineCharData::new(chi, psi, ctx.cover);
        let cp = assemble_slcm(ctx, &l, &data).expect("assembly").charpoly();
        let mu = plancherel_plan_and_sum(ctx, &l, &data).expect("plancherel");
        let part = par_outcome(&group, |&x, o| {
            let tw = GenuineCharData { chi: chi.mul(&ctx.eta(x)), ..data };
            let cp2 = assemble_slcm(ctx, &l, &tw).expect("assembly").charpoly();
            o.check(cp2 == cp, || format!("{} x = {:?} charpoly", tag(&chi), x));
            o.check(plancherel_plan_and_sum(ctx, &l, &tw).expect("plancherel") == mu, || format!("{} x = {:?} mu", tag(&chi), x));
        });
        o.merge(part);
    }
    o
}

pub fn decomposition_invariance(ctx: &TameContext) -> Outcome {
    let std = LagrangianDecomposition::standard(ctx);
    let swp = LagrangianDecomposition::swapped(ctx);
    let psi = normalized(ctx);
    par_outcome(&invariance_chars(ctx), |chi, o| {
        let data = GenuineCharData::new(*chi, psi, ctx.cover);
        let a = assemble_slcm(ctx, &std, &data).expect("assembly").charpoly();
        let b = assemble_slcm(ctx, &swp, &data).expect("assembly").charpoly();
        o.check(a == b, || format!("{} charpoly", tag(chi)));
        let ma = plancherel_plan_and_sum(ctx, &std, &data).expect("plancherel");
        let mb = plancherel_plan_and_sum(ctx, &swp, &data).expect("plancherel");
        o.check(ma == mb, || format!("{} mu", tag(chi)));
    })
}

// ---- reducibility

pub fn reducibility_checks(ctx: &TameContext, chars: &[MultChar]) -> Vec<(&'static str, Outcome)> {
    let l = LagrangianDecomposition::standard(ctx);
    let reports: Vec<(MultChar, crate::slcm::Reducibility)> = chars
        .par_iter()
        .map(|chi| {
            let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
            let mu = plancherel_plan_and_sum(ctx, &l, &data).expect("plancherel");
            (*chi, crate::slcm::reducibility(ctx, &data, &mu))
        })
        .collect();
    let mut matches = Outcome::default();
    let mut even = Outcome::default();
    for (chi, r) in &reports {
        matches.check(r.consistent(), || format!("{} {:?}", tag(chi), r));
        if ctx.cover.even {
            even.check(!r.reducible && (!r.self_dual || r.order_at_zero < 0), || format!("{} {:?}", tag(chi), r));
        }
    }
    let mut out = vec![("verdict_matches_pole_order", matches)];
    if ctx.cover.even {
        out.push(("even_cover_irreducible", even));
    }
    out
}

// ---- harmonic mean

/// Covers m | n with the parity of n, 4 not dividing m, and c | d.
pub fn related_covers(ctx: &TameContext) -> Vec<u64> {
    let n = ctx.n();
    (1..n)
        .filter(|&m| n % m == 0 && m % 2 == n % 2 && m % 4 != 0)
        .filter(|&m| ctx.d() % if m % 2 == 1 { m } else { m / 2 } == 0)
        .collect()
}

pub fn harmonic_mean(ctx: &TameContext, chars: &[MultChar]) -> Outcome {
    let l = LagrangianDecomposition::standard(ctx);
    let covers = related_covers(ctx);
    par_outcome(chars, |chi, o| {
        let data = GenuineCharData::new(*chi, normalized(ctx), ctx.cover);
        let mu = plancherel_plan_and_sum(ctx, &l, &data).expect("plancherel");
        for &m in &covers {
            let reps = related_reps(ctx, &data, m).map(|r| r.1.len());
            let c = if m % 2 == 1 { m } else { m / 2 };
            let expect = (ctx.d() / c).pow(2) as usize;
            o.check(reps == Ok(expect), || format!("{} m = {}: {:?} related representations", tag(chi), m, reps));
            let h = plancherel_harmonic_mean(ctx, &data, m);
            o.check(h.as_ref() == Ok(&mu), || format!("{} m = {}", tag(chi), m));
        }
    })
}

// ---- oracles (f = 1)

pub fn shell_gamma_oracle(ctx: &TameContext, chars: &[MultChar], depth: u32) -> Outcome {
    let cls = classes(ctx, -1..=1);
    par_outcome(chars, |chi, o| {
        for &a in &cls {
            let psi = AddCharTwist::new(a);
            let shell = shell_integral_gamma(ctx, chi, &psi, depth);
            o.check(shell.as_ref() == Ok(&gamma_dual(ctx, chi, &psi)), || format!("{} a = {:?}", tag(chi), a));
        }
    })
}

pub fn shell_weil_oracle(ctx: &TameContext, depth: u32) -> Outcome {
    let mut o = Outcome::default();
    for a in classes(ctx, -1..=1) {
        let psi = AddCharTwist::new(a);
        let shell = shell_weil_index(ctx, &psi, depth);
        o.check(shell.as_ref() == Ok(&gamma_f(ctx, &psi)), || format!("a = {:?}", a));
    }
    o
}

/// zeta(1 - s, chi^{-1}, phi^) = gamma(s, chi, psi) zeta(s, chi, phi) for pseudo-random phi.
pub fn tate_functional_equation(ctx: &TameContext, chars: &[MultChar], seeds: std::ops::Range<u64>) -> Outcome {
    let psi = normalized(ctx);
    let f = ctx.cyc();
    let seeds: Vec<u64> = seeds.collect();
    par_outcome(&seeds, |&seed, o| {
        let phi = random_schwartz(ctx, seed);
        let hat = phi.fourier(f).expect("fourier");
        let (zd, zh) = (phi.zeta_data(ctx).expect("zeta"), hat.zeta_data(ctx).expect("zeta"));
        for chi in chars {
            let lhs = zh.zeta(ctx, &chi.inv()).at_slot(ctx, Slot::OneMinus);
            let rhs = zd.zeta(ctx, chi).scale_by(&tate_gamma(ctx, chi, &psi));
            o.check(lhs == rhs, || format!("seed {} {}", seed, tag(chi)));
        }
    })
}

/// sum_k gamma_J(s, chi, psi, k^{-1} k0) zeta_J(s, chi, phi, k) = zeta_J(1 - s, chi^{-1}, phi^, k0^{-1}).
pub fn partial_functional_equation(ctx: &TameContext, chars: &[MultChar], seeds: std::ops::Range<u64>) -> Outcome {
    let psi = normalized(ctx);
    let f = ctx.cyc();
    let l = LagrangianDecomposition::standard(ctx);
    let seeds: Vec<u64> = seeds.collect();
    par_outcome(&seeds, |&seed, o| {
        let phi = random_schwartz(ctx, seed);
        let hat = phi.fourier(f).expect("fourier");
        let (zd, zh) = (phi.zeta_data(ctx).expect("zeta"), hat.zeta_data(ctx).expect("zeta"));
        for chi in chars {
            let parts: Vec<ExtRatFun> = l.kbar.iter().map(|&k| zd.partial_zeta(ctx, &l, chi, k).expect("k in K")).collect();
            for &k0 in &l.kbar {
                let mut lhs: Option<ExtRatFun> = None;
                for (z, &k) in parts.iter().zip(&l.kbar) {
                    let g = partial_gamma(ctx, &l, chi, &psi, ctx.cmul(ctx.cinv(k), k0)).expect("k in K");
                    let term = z.scale_by(&g);
                    lhs = Some(match lhs {
                        None => term,
                        Some(acc) => acc.add(&term),
                    });
                }
                let rhs = zh.partial_zeta(ctx, &l, &chi.inv(), ctx.cinv(k0)).expect("k in K").at_slot(ctx, Slot::OneMinus);
                o.check(lhs.as_ref() == Some(&rhs), || format!("seed {} {} k0 = {:?}", seed, tag(chi), k0));
            }
        }
    })
}

// ---- runner

fn wanted(only: &[String], suite: &str) -> bool {
    only.is_empty() || only.iter().any(|s| s == suite)
}

/// Runs the selected suites on one context.
pub fn run_context(ctx: &TameContext, only: &[String]) -> Vec<CheckResult> {
    let key = (ctx.p(), ctx.field.f, ctx.n());
    let mut out = Vec::new();
    let mut push = |suite: &'static str, name: &'static str, outcome: Outcome| {
        out.push(CheckResult { context: key, suite, name, outcome });
    };
    let all = all_chars(ctx);
    let reps = representative_chars(ctx);
    if wanted(only, "fields") {
        push("fields", "hilbert_symbol_relations", hilbert_symbol_relations(ctx));
        push("fields", "lagrangian_decompositions", lagrangian_decompositions(ctx));
        push("fields", "gauss_sum_modulus", gauss_sum_modulus(ctx));
        let mut e = Outcome::default();
        e.check(check_elementary_products(ctx), || "product identities".into());
        push("fields", "elementary_products", e);
    }
    if wanted(only, "factors") {
        push("factors", "gamma_from_epsilon_and_l", gamma_from_epsilon(ctx, &all));
        push("factors", "gamma_change_of_psi", gamma_change_of_psi(ctx, &all));
        push("factors", "epsilon_conductor_shift", epsilon_conductor_shift(ctx, &all));
        push("factors", "epsilon_unramified_twist", epsilon_unramified_twist(ctx, &all));
        push("factors", "epsilon_twist_and_inverse", epsilon_twist_and_inverse(ctx, &all));
    }
    if wanted(only, "weil") {
        for (name, o) in weil_index_identities(ctx) {
            push("weil", name, o);
        }
        if ctx.cover.even {
            push("weil", "meta_gamma_change_of_psi", meta_gamma_change_of_psi(ctx, &all));
        }
    }
    if wanted(only, "partial") {
        push("partial", "partial_fourier_inversion", partial_fourier_inversion(ctx, &reps));
        push("partial", "partial_closed_forms", partial_closed_forms(ctx, &all));
    }
    if wanted(only, "slcm") {
        push("slcm", "closed_forms_match_assembly", slcm_closed_forms(ctx, &all));
        push("slcm", "ramified_sparsity", ramified_sparsity(ctx, &all));
        push("slcm", "trace_formula_and_charpoly", trace_and_linear_algebra(ctx, &reps));
    }
    if wanted(only, "plancherel") {
        push("plancherel", "paths_agree", plancherel_paths(ctx, &reps));
        push("plancherel", "unramified_explicit_formula", unramified_explicit_formula(ctx));
        push("plancherel", "determinant_relation", determinant_relation(ctx, &reps));
    }
    if wanted(only, "invariance") {
        push("invariance", "eta_twist_invariance", eta_twist_invariance(ctx));
        push("invariance", "decomposition_invariance", decomposition_invariance(ctx));
    }
    if wanted(only, "reducibility") {
        for (name, o) in reducibility_checks(ctx, &torsion_chars(ctx)) {
            push("reducibility", name, o);
        }
    }
    if wanted(only, "conductor") && !ctx.cover.even {
        let (lhs, rhs) = conductor_identity(ctx);
        let mut o = Outcome::default();
        o.check(lhs == rhs, || format!("{} != {}", lhs.to_text(), rhs.to_text()));
        push("conductor", "conductor_identity", o);
    }
    if wanted(only, "harmonic") && !related_covers(ctx).is_empty() {
        push("harmonic", "harmonic_mean", harmonic_mean(ctx, &reps));
    }
    if wanted(only, "oracle") && ctx.field.f == 1 {
        push("oracle", "shell_integral_gamma", shell_gamma_oracle(ctx, &reps, 2));
        push("oracle", "shell_weil_index", shell_weil_oracle(ctx, 2));
        push("oracle", "tate_functional_equation", tate_functional_equation(ctx, &reps, 0..3));
        if ctx.d() > 1 && !ctx.cover.even {
            push("oracle", "partial_functional_equation", partial_functional_equation(ctx, &reps[..3], 0..2));
        }
    }
    out
}

/// Requested suite names that do not exist.
pub fn unknown_suites(only: &[String]) -> Vec<String> {
    only.iter().filter(|s| !SUITES.contains(&s.as_str())).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, f: u32, n: u64) -> TameContext {
        TameContext::new(p, f, n, None).unwrap()
    }

    #[test]
    fn corrupted_epsilon_sign_is_named() {
        let c = ctx(7, 1, 3);
        let chars = representative_chars(&c);
        assert!(epsilon_twist_and_inverse(&c, &chars).passed());
        let bad = epsilon_twist_and_inverse_with(&c, &chars, &|c, chi, psi| -epsilon(c, chi, psi));
        // a global sign cancels in the product
        assert!(bad.passed());
        let half = |c: &TameContext, chi: &MultChar, psi: &AddCharTwist| {
            let e = epsilon(c, chi, psi);
            if chi.unit_exp == 1 {
                -e
            } else {
                e
            }
        };
        let o = epsilon_twist_and_inverse_with(&c, &chars, &half);
        assert!(!o.passed());
        let r = CheckResult { context: (7, 1, 3), suite: "factors", name: "epsilon_twist_and_inverse", outcome: o };
        assert!(r.line().starts_with("FAIL  (7, 1, 3)  factors      epsilon_twist_and_inverse"));
    }

    #[test]
    fn sample_sets() {
        let c = ctx(7, 1, 3);
        assert_eq!(varpi_exponents(&c), vec![0, 1, 28, 42, 56, 84]);
        assert_eq!(all_chars(&c).len(), 36);
        let c = ctx(5, 1, 2);
        assert_eq!(varpi_exponents(&c), vec![0, 1, 10, 20]);
        assert_eq!(related_covers(&ctx(7, 1, 6)), vec![2]);
        assert_eq!(related_covers(&ctx(7, 1, 3)), vec![1]);
    }

    #[test]
    fn small_context_passes_every_suite() {
        let c = ctx(5, 1, 2);
        for r in run_context(&c, &[]) {
            assert!(r.outcome.passed(), "{}", r.line());
        }
        let only = vec!["conductor".to_string()];
        let r = run_context(&ctx(7, 1, 3), &only);
        assert_eq!(r.len(), 1);
        assert!(r[0].outcome.passed());
    }
}
