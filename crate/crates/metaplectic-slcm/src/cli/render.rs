//! Human-readable renderings; z stands for zeta_N and X for q^{-s}.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::characters::GenuineCharData;
use crate::exact_scalars::CycNumber;
use crate::ratfun::RatFun;
use crate::tame_field::{FStarClass, TameContext};

fn rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn power(var: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{}^{}", var, k),
    }
}

/// Sum of terms `c*v^k`, with signs folded in.
fn sum_of_terms(terms: Vec<(String, bool, String)>) -> String {
    let mut out = String::new();
    for (i, (coeff, negative, mon)) in terms.into_iter().enumerate() {
        let body = match (coeff.as_str(), mon.is_empty()) {
            ("1", false) => mon,
            (_, false) => format!("{}*{}", coeff, mon),
            (_, true) => coeff,
        };
        if i == 0 {
            out.push_str(if negative { "-" } else { "" });
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn cyc(c: &CycNumber) -> String {
    if let Some(r) = c.as_rational() {
        return rational(&r);
    }
    let terms = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(k, r)| (rational(&r.abs()), r.is_negative(), power("z", k)))
        .collect();
    sum_of_terms(terms)
}

fn poly(p: &[CycNumber]) -> String {
    let terms = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match c.as_rational() {
            Some(r) => (rational(&r.abs()), r.is_negative(), power("X", k)),
            None => (format!("({})", cyc(c)), false, power("X", k)),
        })
        .collect();
    sum_of_terms(terms)
}

pub fn ratfun(f: &RatFun) -> String {
    let num = poly(f.numer());
    let den = f.denom();
    if den.len() == 1 && den[0].as_rational().is_some_and(|r| r.is_one()) {
        return num;
    }
    let wrap = |s: String, p: &[CycNumber]| if p.iter().filter(|c| !c.is_zero()).count() > 1 { format!("({})", s) } else { s };
    format!("{} / {}", wrap(num, f.numer()), wrap(poly(den), den))
}

pub fn class(x: FStarClass) -> String {
    format!("varpi^{} g^{}", x.val, x.unit_dlog)
}

pub fn context_json(ctx: &TameContext) -> Value {
    json!({
        "p": ctx.p(),
        "f": ctx.field.f,
        "q": ctx.q(),
        "n": ctx.n(),
        "d": ctx.d(),
        "cyclotomic_order": ctx.order,
        "modulus": ctx.field.modulus(),
    })
}

pub fn data_json(ctx: &TameContext, data: &GenuineCharData) -> Value {
    json!({
        "chi": {
            "unit_exp": data.chi.unit_exp,
            "varpi_exp": data.chi.varpi_exp,
            "conductor": data.chi.conductor(),
            "chi_n_ramified": data.chi.pow(ctx.n() as i64).is_ramified(ctx),
        },
        "psi": {"val": data.psi.a.val, "unit_exp": data.psi.a.unit_dlog, "conductor": data.psi.conductor()},
    })
}

pub fn context_line(ctx: &TameContext) -> String {
    format!(
        "context  p = {}, f = {}, q = {}, n = {}, d = {}, z = zeta_{}",
        ctx.p(),
        ctx.field.f,
        ctx.q(),
        ctx.n(),
        ctx.d(),
        ctx.order
    )
}

pub fn data_lines(ctx: &TameContext, data: &GenuineCharData) -> String {
    format!(
        "chi      unit_exp = {}, chi(varpi) = z^{}, e(chi) = {}, chi^n {}\npsi      a = {}, e(psi) = {}",
        data.chi.unit_exp,
        data.chi.varpi_exp,
        data.chi.conductor(),
        if data.chi.pow(ctx.n() as i64).is_ramified(ctx) { "ramified" } else { "unramified" },
        class(data.psi.a),
        data.psi.conductor()
    )
}
