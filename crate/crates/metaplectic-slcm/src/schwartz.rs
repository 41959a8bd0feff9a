//! Exact Schwartz functions on Q_p, their Fourier transforms and (partial)
//! zeta integrals: an independent oracle for the Tate and partial functional
//! equations when f = 1.
//!
//! Values of psi(x) = exp(2 pi i {x}_p) on p^{-M} Z_p live in
//! Q(zeta_N)(zeta_{p^M}), realized by [`Ext`] with basis zeta_{p^M}^r,
//! 0 <= r < p^{M-1}, over Q(zeta_N) (p | N, so zeta_{p^M}^{p^{M-1}} = zeta_p).

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::characters::MultChar;
use crate::exact_scalars::{CycField, CycNumber};
use crate::lagrangian::LagrangianDecomposition;
use crate::ratfun::{RatFun, Slot};
use crate::tame_field::{FStarClass, TameContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchwartzError {
    #[error("the Schwartz oracle runs over Q_p only (f = 1)")]
    NeedsPrimeField,
    #[error("psi({0}) needs zeta_(p^{1}), beyond the configured depth")]
    TooDeep(String, u32),
    #[error("{0:?} is not a class of K")]
    NotInK(FStarClass),
}

// ---- Ext

/// sum_r c_r zeta_{p^M}^r with c_r in Q(zeta_N).
#[derive(Clone, PartialEq, Eq)]
pub struct Ext {
    p: u64,
    m: u32,
    c: Vec<CycNumber>,
}

impl std::fmt::Debug for Ext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ext(p^{}; {:?})", self.m, self.c)
    }
}

impl Ext {
    fn width(p: u64, m: u32) -> usize {
        p.pow(m.saturating_sub(1)) as usize
    }

    pub fn zero(field: &Arc<CycField>, p: u64, m: u32) -> Ext {
        assert!(m >= 1 && field.order() % p == 0);
        Ext { p, m, c: vec![CycNumber::zero(field); Self::width(p, m)] }
    }

    pub fn from_base(c: &CycNumber, p: u64, m: u32) -> Ext {
        let mut e = Self::zero(c.field(), p, m);
        e.c[0] = c.clone();
        e
    }

    pub fn one(field: &Arc<CycField>, p: u64, m: u32) -> Ext {
        Self::from_base(&CycNumber::one(field), p, m)
    }

    /// zeta_{p^M}^e.
    pub fn root(field: &Arc<CycField>, p: u64, m: u32, e: i64) -> Ext {
        Self::from_terms(field, p, m, std::iter::once((0, e, 1)))
    }

    /// sum of w zeta_N^{a} zeta_{p^M}^{b} over (a, b, w).
    pub fn from_terms<I: IntoIterator<Item = (i64, i64, i64)>>(field: &Arc<CycField>, p: u64, m: u32, terms: I) -> Ext {
        let width = Self::width(p, m) as i64;
        let pm = width * p as i64;
        let zp = (field.order() / p) as i64;
        let mut buckets: Vec<Vec<(i64, i64)>> = vec![Vec::new(); width as usize];
        for (a, b, w) in terms {
            let b = b.rem_euclid(pm);
            buckets[(b % width) as usize].push((a + (b / width) * zp, w));
        }
        let c = buckets.into_iter().map(|t| CycNumber::root_sum(field, t)).collect();
        Ext { p, m, c }
    }

    pub fn field(&self) -> &Arc<CycField> {
        self.c[0].field()
    }

    pub fn depth(&self) -> u32 {
        self.m
    }

    pub fn components(&self) -> &[CycNumber] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The value when it lies in Q(zeta_N).
    pub fn base(&self) -> Option<CycNumber> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, k: &CycNumber) -> Ext {
        Ext { p: self.p, m: self.m, c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn scale_rat(&self, r: &BigRational) -> Ext {
        Ext { p: self.p, m: self.m, c: self.c.iter().map(|x| x.scale(r)).collect() }
    }

    fn same(&self, o: &Ext) {
        assert!(self.p == o.p && self.m == o.m, "Ext depth mismatch");
    }
}

impl<'a> Add<&'a Ext> for &'a Ext {
    type Output = Ext;
    fn add(self, o: &'a Ext) -> Ext {
        self.same(o);
        Ext { p: self.p, m: self.m, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Ext> for &'a Ext {
    type Output = Ext;
    fn sub(self, o: &'a Ext) -> Ext {
        self + &(-o)
    }
}

impl<'a> Neg for &'a Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext { p: self.p, m: self.m, c: self.c.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul<&'a Ext> for &'a Ext {
    type Output = Ext;
    fn mul(self, o: &'a Ext) -> Ext {
        self.same(o);
        let w = self.c.len();
        let field = self.field().clone();
        let zp = CycNumber::root_of_unity(&field, (field.order() / self.p) as i64);
        let mut out = vec![CycNumber::zero(&field); w];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                if i + j < w {
                    out[i + j] += &prod;
                } else {
                    out[i + j - w] += &(&prod * &zp);
                }
            }
        }
        Ext { p: self.p, m: self.m, c: out }
    }
}

/// A vector of rational functions, one per Ext coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtRatFun {
    pub comps: Vec<RatFun>,
}

impl ExtRatFun {
    pub fn zero(field: &Arc<CycField>, width: usize) -> ExtRatFun {
        ExtRatFun { comps: vec![RatFun::zero(field); width] }
    }

    pub fn scale_by(&self, f: &RatFun) -> ExtRatFun {
        ExtRatFun { comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn add(&self, o: &ExtRatFun) -> ExtRatFun {
        ExtRatFun { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn at_slot(&self, ctx: &TameContext, s: Slot) -> ExtRatFun {
        ExtRatFun { comps: self.comps.iter().map(|c| crate::factors::slot(ctx, c, s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
}

// ---- p-adic rationals with p-power denominators

/// num / p^den_exp, with p not dividing num when den_exp > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Qp {
    pub num: i64,
    pub den_exp: u32,
}

impl Qp {
    pub fn new(num: i64, den_exp: u32, p: u64) -> Qp {
        let p = p as i64;
        let (mut num, mut e) = (num, den_exp);
        if num == 0 {
            return Qp { num: 0, den_exp: 0 };
        }
        while e > 0 && num % p == 0 {
            num /= p;
            e -= 1;
        }
        Qp { num, den_exp: e }
    }

    pub fn int(a: i64) -> Qp {
        Qp { num: a, den_exp: 0 }
    }

    pub fn zero() -> Qp {
        Qp { num: 0, den_exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// p-adic valuation; i64::MAX for zero.
    pub fn val(&self, p: u64) -> i64 {
        if self.num == 0 {
            return i64::MAX;
        }
        let mut v = 0;
        let mut x = self.num;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        v - self.den_exp as i64
    }

    pub fn add(&self, o: &Qp, p: u64) -> Qp {
        let e = self.den_exp.max(o.den_exp);
        let pi = p as i64;
        let n = self.num * pi.pow(e - self.den_exp) + o.num * pi.pow(e - o.den_exp);
        Qp::new(n, e, p)
    }

    pub fn neg(&self) -> Qp {
        Qp { num: -self.num, den_exp: self.den_exp }
    }

    pub fn sub(&self, o: &Qp, p: u64) -> Qp {
        self.add(&o.neg(), p)
    }

    pub fn mul(&self, o: &Qp, p: u64) -> Qp {
        Qp::new(self.num * o.num, self.den_exp + o.den_exp, p)
    }

    /// p^k.
    pub fn p_pow(k: i64, p: u64) -> Qp {
        if k >= 0 {
            Qp::int((p as i64).pow(k as u32))
        } else {
            Qp { num: 1, den_exp: (-k) as u32 }
        }
    }

    /// Whether self lies in a + p^k Z_p.
    pub fn in_coset(&self, a: &Qp, k: i64, p: u64) -> bool {
        self.sub(a, p).val(p) >= k
    }

    /// Canonical representative of a + p^k Z_p.
    pub fn reduce_mod(&self, k: i64, p: u64) -> Qp {
        if self.val(p) >= k {
            return Qp::zero();
        }
        // here k < den_exp'... num / p^e with e + k >= 1
        let e = self.den_exp as i64;
        let modulus = (p as i64).pow((e + k) as u32);
        Qp::new(self.num.rem_euclid(modulus), self.den_exp, p)
    }

    /// Exponent r with psi(x) = zeta_{p^M}^r.
    pub fn psi_exponent(&self, p: u64, m: u32) -> Result<i64, SchwartzError> {
        if self.den_exp == 0 {
            return Ok(0);
        }
        if self.den_exp > m {
            return Err(SchwartzError::TooDeep(format!("{}/{}^{}", self.num, p, self.den_exp), self.den_exp));
        }
        let pe = (p as i64).pow(self.den_exp);
        Ok(self.num.rem_euclid(pe) * (p as i64).pow(m - self.den_exp))
    }

    /// Residue in F_p^* of the unit part x / p^{v(x)}.
    pub fn unit_residue(&self, p: u64) -> u64 {
        let mut x = self.num;
        while x % p as i64 == 0 {
            x /= p as i64;
        }
        x.rem_euclid(p as i64) as u64
    }
}

// ---- Schwartz functions

/// x -> c psi(b x) 1_{a + p^k Z_p}(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub c: Ext,
    pub b: Qp,
    pub a: Qp,
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchwartzFn {
    pub p: u64,
    pub m: u32,
    pub terms: Vec<Term>,
}

fn p_rat(p: u64, k: i64) -> BigRational {
    let pk = num_bigint::BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(pk)
    } else {
        BigRational::new(1.into(), pk)
    }
}

impl SchwartzFn {
    pub fn new(p: u64, m: u32, terms: Vec<Term>) -> SchwartzFn {
        SchwartzFn { p, m, terms }
    }

    /// c 1_{a + p^k Z_p}.
    pub fn indicator(field: &Arc<CycField>, p: u64, m: u32, c: i64, a: Qp, k: i64) -> SchwartzFn {
        let c = Ext::from_base(&CycNumber::from_int(field, c), p, m);
        SchwartzFn { p, m, terms: vec![Term { c, b: Qp::zero(), a, k }] }
    }

    fn psi(&self, field: &Arc<CycField>, x: &Qp) -> Result<Ext, SchwartzError> {
        Ok(Ext::root(field, self.p, self.m, x.psi_exponent(self.p, self.m)?))
    }

    pub fn eval(&self, field: &Arc<CycField>, x: &Qp) -> Result<Ext, SchwartzError> {
        let mut acc = Ext::zero(field, self.p, self.m);
        for t in &self.terms {
            if x.in_coset(&t.a, t.k, self.p) {
                acc = &acc + &(&t.c * &self.psi(field, &t.b.mul(x, self.p))?);
            }
        }
        Ok(acc)
    }

    /// Step function on a common lattice p^K Z_p with disjoint supports.
    pub fn normalize(&self, field: &Arc<CycField>) -> Result<SchwartzFn, SchwartzError> {
        let p = self.p;
        let mut depth = i64::MIN;
        for t in &self.terms {
            let vb = t.b.val(p);
            let need = if vb == i64::MAX { t.k } else { t.k.max(-vb) };
            depth = depth.max(need);
        }
        let mut cells: std::collections::BTreeMap<(i64, u32), Ext> = std::collections::BTreeMap::new();
        for t in &self.terms {
            let a0 = t.a.reduce_mod(t.k, p);
            let split = (p as i64).pow((depth - t.k) as u32);
            let step = Qp::p_pow(t.k, p);
            for i in 0..split {
                let center = a0.add(&step.mul(&Qp::int(i), p), p).reduce_mod(depth, p);
                let val = &t.c * &self.psi(field, &t.b.mul(&center, p))?;
                let key = (center.num, center.den_exp);
                let entry = cells.entry(key).or_insert_with(|| Ext::zero(field, p, self.m));
                *entry = &*entry + &val;
            }
        }
        let terms = cells
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((num, e), c)| Term { c, b: Qp::zero(), a: Qp { num, den_exp: e }, k: depth })
            .collect();
        Ok(SchwartzFn { p, m: self.m, terms })
    }

    /// phî(y) = int phi(x) psi(x y) dx, dx self-dual (vol Z_p = 1).
    pub fn fourier(&self, field: &Arc<CycField>) -> Result<SchwartzFn, SchwartzError> {
        let p = self.p;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = (&t.c * &self.psi(field, &t.a.mul(&t.b, p))?).scale_rat(&p_rat(p, -t.k));
            terms.push(Term { c, b: t.a, a: t.b.neg(), k: -t.k });
        }
        Ok(SchwartzFn { p, m: self.m, terms })
    }

    /// int phi(x) dx.
    pub fn integral(&self, field: &Arc<CycField>) -> Result<Ext, SchwartzError> {
        let mut acc = Ext::zero(field, self.p, self.m);
        for t in &self.terms {
            acc = &acc + &self.coset_integral(field, t, &t.a, t.k)?;
        }
        Ok(acc)
    }

    /// int over c0 + p^depth Z_p of the term's c psi(b x) dx.
    fn coset_integral(&self, field: &Arc<CycField>, t: &Term, c0: &Qp, depth: i64) -> Result<Ext, SchwartzError> {
        let vb = t.b.val(self.p);
        if vb != i64::MAX && vb < -depth {
            return Ok(Ext::zero(field, self.p, self.m));
        }
        Ok((&t.c * &self.psi(field, &t.b.mul(c0, self.p))?).scale_rat(&p_rat(self.p, -depth)))
    }

    /// Shell data for the zeta integrals of this function.
    pub fn zeta_data(&self, ctx: &TameContext) -> Result<ZetaData, SchwartzError> {
        if ctx.field.f != 1 {
            return Err(SchwartzError::NeedsPrimeField);
        }
        let p = self.p;
        let field = ctx.cyc();
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for t in &self.terms {
            let va = t.a.val(p);
            lo = lo.min(t.k.min(va));
            let vb = t.b.val(p);
            let flat = if vb == i64::MAX { t.k } else { t.k.max(-vb) };
            hi = hi.max(if va >= t.k { flat } else { va + 1 });
        }
        if self.terms.is_empty() {
            lo = 0;
            hi = 0;
        }
        let mut table = Vec::new();
        for v in lo..hi {
            let mut row = Vec::with_capacity(p as usize - 1);
            for tt in 1..p as i64 {
                let center = Qp::p_pow(v, p).mul(&Qp::int(tt), p);
                let mut acc = Ext::zero(field, p, self.m);
                for t in &self.terms {
                    let piece = if t.k <= v + 1 {
                        if center.in_coset(&t.a, t.k, p) {
                            Some((center, v + 1))
                        } else {
                            None
                        }
                    } else if t.a.in_coset(&center, v + 1, p) {
                        Some((t.a, t.k))
                    } else {
                        None
                    };
                    if let Some((c0, depth)) = piece {
                        acc = &acc + &self.coset_integral(field, t, &c0, depth)?;
                    }
                }
                // d*x = dx / |x| = p^v dx on the shell
                row.push(acc.scale_rat(&p_rat(p, v)));
            }
            table.push(row);
        }
        let mut flat = Ext::zero(field, p, self.m);
        for t in &self.terms {
            if t.a.val(p) >= t.k {
                flat = &flat + &t.c;
            }
        }
        Ok(ZetaData { p, m: self.m, lo, hi, table, flat })
    }
}

/// int over p^v (t + p Z_p) of phi d*x for lo <= v < hi, and the constant
/// value of phi on p^hi Z_p.
#[derive(Debug, Clone)]
pub struct ZetaData {
    pub p: u64,
    pub m: u32,
    pub lo: i64,
    pub hi: i64,
    pub table: Vec<Vec<Ext>>,
    pub flat: Ext,
}

impl ZetaData {
    fn width(&self) -> usize {
        self.flat.components().len()
    }

    /// sum over (v, t) with keep(v, t) of chi_s on the shell pieces, with the
    /// tail v >= hi summed as a geometric series of period `period`.
    fn restricted<F>(&self, ctx: &TameContext, chi: &MultChar, period: i64, keep: F) -> ExtRatFun
    where
        F: Fn(i64, u64) -> bool,
    {
        let field = ctx.cyc();
        let n = ctx.order as i64;
        let step = n / ctx.qm1() as i64;
        let p = self.p;
        let w = self.width();
        let chi0 = |t: u64| -> CycNumber {
            ctx.zeta(chi.unit_exp as i64 * ctx.field.dlog(t).expect("unit") as i64 * step)
        };
        let chi0s: Vec<CycNumber> = (1..p).map(chi0).collect();
        let mut low: Vec<Vec<CycNumber>> = vec![Vec::new(); w];
        for (iv, row) in self.table.iter().enumerate() {
            let v = self.lo + iv as i64;
            let cv = ctx.zeta(chi.varpi_exp as i64 * v);
            let mut sums = vec![CycNumber::zero(field); w];
            for (it, e) in row.iter().enumerate() {
                let t = it as u64 + 1;
                if !keep(v, t) || e.is_zero() {
                    continue;
                }
                for (s, c) in sums.iter_mut().zip(e.components()) {
                    if !c.is_zero() {
                        *s += &(c * &chi0s[it]);
                    }
                }
            }
            for (r, s) in sums.into_iter().enumerate() {
                low[r].push(&s * &cv);
            }
        }
        // tail: phi = flat on p^hi Z_p, measure of p^v (t + p Z_p) is 1/p
        let mut tail: Vec<Vec<CycNumber>> = vec![Vec::new(); w];
        let pinv = ctx.ratio(1, p as i64);
        for v in self.hi..self.hi + period {
            let mut s = CycNumber::zero(field);
            for t in 1..p {
                if keep(v, t) {
                    s += &chi0s[t as usize - 1];
                }
            }
            let s = &(&s * &pinv) * &ctx.zeta(chi.varpi_exp as i64 * v);
            for (r, c) in self.flat.components().iter().enumerate() {
                tail[r].push(c * &s);
            }
        }
        let one = CycNumber::one(field);
        let mut den = vec![CycNumber::zero(field); period as usize + 1];
        den[0] = one.clone();
        den[period as usize] = -ctx.zeta(chi.varpi_exp as i64 * period);
        let den = RatFun::new(field, vec![one], den);
        let comps = (0..w)
            .map(|r| {
                let a = RatFun::laurent(field, self.lo, low[r].clone());
                let b = &RatFun::laurent(field, self.hi, tail[r].clone()) * &den;
                &a + &b
            })
            .collect();
        ExtRatFun { comps }
    }

    /// zeta(s, chi, phi).
    pub fn zeta(&self, ctx: &TameContext, chi: &MultChar) -> ExtRatFun {
        self.restricted(ctx, chi, 1, |_, _| true)
    }

    /// zeta_J(s, chi, phi, k): the integral over J k.
    pub fn partial_zeta(
        &self,
        ctx: &TameContext,
        l: &LagrangianDecomposition,
        chi: &MultChar,
        k: FStarClass,
    ) -> Result<ExtRatFun, SchwartzError> {
        if l.k_index(ctx, k).is_none() {
            return Err(SchwartzError::NotInK(k));
        }
        let dl = |t: u64| ctx.field.dlog(t).expect("unit") as i64;
        Ok(self.restricted(ctx, chi, l.d as i64, |v, t| l.in_coset(ctx, ctx.class(v, dl(t)), k)))
    }
}

/// A pseudo-random Schwartz function with a, b in p^{-1} Z_p, so that all
/// values (and those of its transform) live in Ext of depth 2.
pub fn random_schwartz(ctx: &TameContext, seed: u64) -> SchwartzFn {
    let p = ctx.p();
    let m = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=4);
    let pp = (p * p * p) as i64;
    let terms = (0..count)
        .map(|_| {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-3..=3);
            }
            let a = Qp::new(rng.gen_range(0..pp), rng.gen_range(0..=1), p);
            let b = if rng.gen_bool(0.3) { Qp::zero() } else { Qp::new(rng.gen_range(0..pp), rng.gen_range(0..=1), p) };
            let k = rng.gen_range(-1..=2);
            Term { c: Ext::from_base(&ctx.int(c), p, m), b, a: a.reduce_mod(k, p), k }
        })
        .collect();
    SchwartzFn::new(p, m, terms)
}
