//! Residue field F_q, discrete logs, classes of F* modulo 1+P and the tame
//! Hilbert symbol.
//!
//! F_q elements are coded as integers c = sum c_i p^i (coordinates in the
//! basis 1, y, ..., y^{f-1} of F_p[y]/(modulus)).

use std::sync::Arc;

use thiserror::Error;

use crate::characters::MultChar;
use crate::exact_scalars::{is_prime, make_order, sqrt_q, CycField, CycNumber, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("modulus must be monic of degree {0} and irreducible over F_p")]
    BadModulus(u32),
    #[error("inversion of zero in the residue field")]
    ZeroInverse,
    #[error("{0} does not divide q - 1")]
    BadDivisor(u64),
}

/// The residue field with its generator and discrete-log tables.
#[derive(Debug, Clone)]
pub struct TameField {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    modulus: Vec<u64>,
    g: u64,
    dlog: Vec<u64>,
    exp: Vec<u64>,
    trace_tab: Vec<u64>,
}

fn digits(mut c: u64, p: u64, f: u32) -> Vec<u64> {
    let mut out = vec![0; f as usize];
    for d in out.iter_mut() {
        *d = c % p;
        c /= p;
    }
    out
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * f];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (f..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        for j in 0..=f {
            prod[i - f + j] = (prod[i - f + j] + (p - c) * modulus[j]) % p;
        }
    }
    prod.truncate(f);
    prod
}

fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let f = modulus.len() - 1;
    if f <= 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=f/2
    for k in 1..=f / 2 {
        for code in 0..p.pow(k as u32) {
            let mut div = digits(code, p, k as u32);
            div.push(1);
            let mut r = modulus.to_vec();
            for i in (0..=(f - k)).rev() {
                let c = r[i + k];
                if c == 0 {
                    continue;
                }
                for j in 0..=k {
                    r[i + j] = (r[i + j] + (p - c) * div[j]) % p;
                }
            }
            if r[..k].iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl TameField {
    pub fn new(p: u64, f: u32, modulus: Option<Vec<u64>>) -> Result<TameField, ContextError> {
        if p == 2 || !is_prime(p) {
            return Err(ScalarError::BadPrime(p).into());
        }
        if f == 0 {
            return Err(ScalarError::BadDegree.into());
        }
        let q = p.pow(f);
        let modulus = match modulus {
            Some(m) => {
                if m.len() != f as usize + 1 || m[f as usize] != 1 || m.iter().any(|&c| c >= p) || !is_irreducible(&m, p) {
                    return Err(ContextError::BadModulus(f));
                }
                m
            }
            None if f == 1 => vec![0, 1],
            None => (0..p.pow(f))
                .map(|code| {
                    let mut m = digits(code, p, f);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .expect("irreducible polynomials exist"),
        };
        let mul = |a: u64, b: u64| -> u64 {
            if f == 1 {
                a * b % p
            } else {
                undigits(&poly_mulmod(&digits(a, p, f), &digits(b, p, f), &modulus, p), p)
            }
        };
        let g = (1..q)
            .find(|&c| {
                let mut x = c;
                let mut k = 1;
                while x != 1 {
                    x = mul(x, c);
                    k += 1;
                }
                k == q - 1
            })
            .unwrap();
        let mut dlog = vec![u64::MAX; q as usize];
        let mut exp = vec![0u64; (q - 1) as usize];
        let mut x = 1u64;
        for k in 0..q - 1 {
            exp[k as usize] = x;
            dlog[x as usize] = k;
            x = mul(x, g);
        }
        let mut field = TameField { p, f, q, modulus, g, dlog, exp, trace_tab: vec![] };
        let trace_tab = (0..q).map(|c| field.trace_slow(c)).collect();
        field.trace_tab = trace_tab;
        Ok(field)
    }

    fn trace_slow(&self, t: u64) -> u64 {
        // t + t^p + ... + t^{p^{f-1}}
        let mut acc = 0;
        let mut x = t;
        for _ in 0..self.f {
            acc = self.add(acc, x);
            x = self.pow(x, self.p);
        }
        debug_assert!(acc < self.p);
        acc
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn from_int(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (digits(a, self.p, self.f), digits(b, self.p, self.f));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let s: Vec<u64> = digits(a, self.p, self.f).iter().map(|x| (self.p - x) % self.p).collect();
        undigits(&s, self.p)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.dlog[a as usize] + self.dlog[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.dlog[a as usize] as u128 * e as u128 % (self.q - 1) as u128) as u64;
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u64) -> Result<u64, ContextError> {
        if a == 0 {
            return Err(ContextError::ZeroInverse);
        }
        let k = (self.q - 1 - self.dlog[a as usize]) % (self.q - 1);
        Ok(self.exp[k as usize])
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: u64) -> u64 {
        self.trace_tab[a as usize]
    }

    pub fn dlog(&self, a: u64) -> Result<u64, ContextError> {
        if a == 0 {
            return Err(ContextError::ZeroInverse);
        }
        Ok(self.dlog[a as usize])
    }

    /// g^k.
    pub fn exp(&self, k: i64) -> u64 {
        self.exp[k.rem_euclid(self.q as i64 - 1) as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    pub fn units(&self) -> impl Iterator<Item = u64> {
        1..self.q
    }
}

/// Cover degree n with d = n (n odd) or n/2 (n = 2 mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverParams {
    pub n: u64,
    pub d: u64,
    pub even: bool,
}

impl CoverParams {
    pub fn new(n: u64) -> Result<CoverParams, ContextError> {
        if n == 0 {
            return Err(ScalarError::NotDividing { n, qm1: 0 }.into());
        }
        if n % 4 == 0 {
            return Err(ScalarError::DivisibleByFour(n).into());
        }
        let even = n % 2 == 0;
        Ok(CoverParams { n, d: if even { n / 2 } else { n }, even })
    }
}

/// A class of F* modulo 1+P: valuation and discrete log of the unit part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FStarClass {
    pub val: i64,
    pub unit_dlog: u64,
}

/// The arithmetic context shared by every computation.
#[derive(Debug, Clone)]
pub struct TameContext {
    pub field: TameField,
    pub cover: CoverParams,
    pub order: u64,
    cyc: Arc<CycField>,
    sqrt_q: CycNumber,
}

impl TameContext {
    pub fn new(p: u64, f: u32, n: u64, modulus: Option<Vec<u64>>) -> Result<TameContext, ContextError> {
        let order = make_order(p, f, n)?;
        let field = TameField::new(p, f, modulus)?;
        let cover = CoverParams::new(n)?;
        let cyc = CycField::get(order);
        let sq = sqrt_q(&cyc, p, f);
        Ok(TameContext { field, cover, order, cyc, sqrt_q: sq })
    }

    pub fn cyc(&self) -> &Arc<CycField> {
        &self.cyc
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn q(&self) -> u64 {
        self.field.q
    }

    pub fn qm1(&self) -> u64 {
        self.field.q - 1
    }

    pub fn n(&self) -> u64 {
        self.cover.n
    }

    pub fn d(&self) -> u64 {
        self.cover.d
    }

    pub fn sqrt_q(&self) -> &CycNumber {
        &self.sqrt_q
    }

    /// zeta_N^k.
    pub fn zeta(&self, k: i64) -> CycNumber {
        CycNumber::root_of_unity(&self.cyc, k)
    }

    /// zeta_m^k for m | N.
    pub fn root(&self, m: u64, k: i64) -> CycNumber {
        assert!(self.order % m == 0, "{} does not divide {}", m, self.order);
        self.zeta(k.rem_euclid(m as i64) * (self.order / m) as i64)
    }

    pub fn int(&self, a: i64) -> CycNumber {
        CycNumber::from_int(&self.cyc, a)
    }

    pub fn ratio(&self, a: i64, b: i64) -> CycNumber {
        CycNumber::from_ratio(&self.cyc, a, b)
    }

    /// q^k for any integer k.
    pub fn q_pow(&self, k: i64) -> CycNumber {
        let qk = num_bigint::BigInt::from(self.q()).pow(k.unsigned_abs() as u32);
        let r = if k >= 0 {
            num_rational::BigRational::from_integer(qk)
        } else {
            num_rational::BigRational::new(1.into(), qk)
        };
        CycNumber::from_rational(&self.cyc, &r)
    }

    /// sqrt(q)^k for any integer k.
    pub fn sqrt_q_pow(&self, k: i64) -> CycNumber {
        let base = self.q_pow(k.div_euclid(2));
        if k.rem_euclid(2) == 1 {
            &base * &self.sqrt_q
        } else {
            base
        }
    }

    /// iota(t) = zeta_{q-1}^{dlog t}.
    pub fn iota(&self, t: u64) -> Result<CycNumber, ContextError> {
        let k = self.field.dlog(t)?;
        Ok(self.root(self.qm1(), k as i64))
    }

    /// zeta_p^{Tr t}, the residue additive character.
    pub fn psi_bar(&self, t: u64) -> CycNumber {
        self.root(self.p(), self.field.trace(t) as i64)
    }

    // ---- classes

    pub fn class(&self, val: i64, unit_dlog: i64) -> FStarClass {
        FStarClass { val, unit_dlog: unit_dlog.rem_euclid(self.qm1() as i64) as u64 }
    }

    pub fn one_class(&self) -> FStarClass {
        self.class(0, 0)
    }

    pub fn varpi(&self) -> FStarClass {
        self.class(1, 0)
    }

    /// Class of the Teichmuller lift of a residue unit.
    pub fn unit_class(&self, t: u64) -> FStarClass {
        self.class(0, self.field.dlog(t).expect("unit") as i64)
    }

    pub fn minus_one(&self) -> FStarClass {
        self.class(0, (self.qm1() / 2) as i64)
    }

    pub fn cmul(&self, x: FStarClass, y: FStarClass) -> FStarClass {
        self.class(x.val + y.val, (x.unit_dlog + y.unit_dlog) as i64)
    }

    pub fn cinv(&self, x: FStarClass) -> FStarClass {
        self.class(-x.val, -(x.unit_dlog as i64))
    }

    pub fn cpow(&self, x: FStarClass, e: i64) -> FStarClass {
        self.class(x.val * e, (x.unit_dlog as i64).wrapping_mul(e).rem_euclid(self.qm1() as i64))
    }

    /// Representative of x F*^m with 0 <= val, unit_dlog < m.
    pub fn reduce_class(&self, x: FStarClass, m: u64) -> FStarClass {
        assert!(self.qm1() % m == 0);
        FStarClass { val: x.val.rem_euclid(m as i64), unit_dlog: x.unit_dlog % m }
    }

    pub fn is_mth_power(&self, x: FStarClass, m: u64) -> bool {
        self.reduce_class(x, m) == self.one_class()
    }

    /// The m^2 classes varpi^i u^j of F*/F*^m, u the class of g.
    pub fn class_group(&self, m: u64) -> Result<Vec<FStarClass>, ContextError> {
        if m == 0 || self.qm1() % m != 0 {
            return Err(ContextError::BadDivisor(m));
        }
        let mut out = Vec::with_capacity((m * m) as usize);
        for i in 0..m as i64 {
            for j in 0..m as i64 {
                out.push(self.class(i, j));
            }
        }
        Ok(out)
    }

    /// Exponent e with (x,y)_m = zeta_m^e.
    pub fn hilbert_exponent(&self, m: u64, x: FStarClass, y: FStarClass) -> u64 {
        assert!(self.qm1() % m == 0, "{} does not divide q - 1", m);
        let qm1 = self.qm1() as i128;
        let (vx, vy) = (x.val as i128, y.val as i128);
        let sign = if (vx * vy).rem_euclid(2) == 1 { qm1 / 2 } else { 0 };
        let w = sign + x.unit_dlog as i128 * vy - y.unit_dlog as i128 * vx;
        (w.rem_euclid(qm1) as u64) % m
    }

    /// Tame m-th power Hilbert symbol as a root of unity.
    pub fn hilbert_symbol(&self, m: u64, x: FStarClass, y: FStarClass) -> CycNumber {
        self.root(m, self.hilbert_exponent(m, x, y) as i64)
    }

    /// eta_x(y) = (x, y)_d as a multiplicative character.
    pub fn eta(&self, x: FStarClass) -> MultChar {
        self.eta_m(x, self.d())
    }

    /// y -> (x, y)_m.
    pub fn eta_m(&self, x: FStarClass, m: u64) -> MultChar {
        let qm1 = self.qm1() as i128;
        let a = x.val as i128;
        let b = x.unit_dlog as i128;
        let at_varpi = ((qm1 / 2) * a + b).rem_euclid(m as i128);
        let n = self.order as i128;
        MultChar::new(
            self,
            (-a * (qm1 / m as i128)).rem_euclid(qm1) as u64,
            (at_varpi * (n / m as i128)).rem_euclid(n) as u64,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::MultChar;

    fn ctx(p: u64, f: u32, n: u64) -> TameContext {
        TameContext::new(p, f, n, None).unwrap()
    }

    #[test]
    fn residue_field_basics() {
        let c = ctx(7, 1, 3);
        assert_eq!(c.field.add(3, 5), 1);
        assert_eq!(c.field.generator(), 3);
        assert_eq!(c.field.dlog(2), Ok(2));
        assert_eq!(c.field.dlog(1), Ok(0));
        assert_eq!(c.field.dlog(3), Ok(1));
        assert_eq!(c.field.dlog(0), Err(ContextError::ZeroInverse));
        assert_eq!(c.iota(6).unwrap(), c.int(-1));
        assert!(c.iota(1).unwrap().is_one());
        assert!(c.iota(3).unwrap().pow(6).unwrap().is_one());
        assert_eq!(c.field.inv(0), Err(ContextError::ZeroInverse));
    }

    #[test]
    fn f9_trace() {
        let c = ctx(3, 2, 2);
        assert_eq!(c.field.modulus(), &[1, 0, 1]);
        // y has code 3
        assert_eq!(c.field.trace(3), 0);
        assert_eq!(c.field.trace(1), 2);
        // trace is onto and F_p linear
        for a in c.field.elements() {
            for b in c.field.elements() {
                assert_eq!(c.field.trace(c.field.add(a, b)), (c.field.trace(a) + c.field.trace(b)) % 3);
            }
        }
    }

    #[test]
    fn additive_character_sums_vanish() {
        for (p, f) in [(7, 1), (3, 2), (13, 1)] {
            let c = ctx(p, f, 2);
            let mut s = c.int(0);
            for t in c.field.elements() {
                s = s + c.psi_bar(t);
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn rejects_bad_modulus() {
        // y^2 + 2 = y^2 - 1 is reducible over F_3
        assert!(TameField::new(3, 2, Some(vec![2, 0, 1])).is_err());
        assert!(TameField::new(3, 2, Some(vec![1, 0, 1])).is_ok());
    }

    #[test]
    fn hilbert_example() {
        let c = ctx(7, 1, 3);
        let x = c.unit_class(3);
        assert_eq!(c.hilbert_symbol(3, x, c.varpi()), c.root(3, 1));
    }

    fn grid_contexts() -> Vec<TameContext> {
        vec![ctx(5, 1, 2), ctx(7, 1, 3), ctx(7, 1, 6), ctx(3, 2, 2), ctx(13, 1, 3), ctx(11, 1, 5)]
    }

    fn divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|m| n % m == 0).collect()
    }

    #[test]
    fn symbol_laws_on_grids() {
        for c in grid_contexts() {
            for m in divisors(c.qm1()) {
                let cls = c.class_group(m).unwrap();
                let h = |x, y| c.hilbert_exponent(m, x, y);
                for &x in &cls {
                    // (x, -x) = 1 and (x, x) = (-1, x)
                    let mx = c.cmul(c.minus_one(), x);
                    assert_eq!(h(x, mx), 0);
                    assert_eq!(h(x, x), h(c.minus_one(), x));
                    let mut kernel = true;
                    for &y in &cls {
                        assert_eq!((h(x, y) + h(y, x)) % m, 0);
                        for &z in &cls {
                            assert_eq!(h(c.cmul(x, y), z), (h(x, z) + h(y, z)) % m);
                        }
                        if h(x, y) != 0 {
                            kernel = false;
                        }
                    }
                    // kernel is exactly F*^m and the pairing is non-degenerate
                    assert_eq!(kernel, c.is_mth_power(x, m));
                    // well defined modulo m-th powers
                    let shifted = c.cmul(x, c.class(m as i64, 3 * m as i64));
                    for &y in &cls {
                        assert_eq!(h(shifted, y), h(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn power_compatibility() {
        // (x,y)_n^m = (x,y)_l for n = m l
        for c in grid_contexts() {
            let nn = c.qm1();
            for m in divisors(nn) {
                let l = nn / m;
                for x in c.class_group(nn).unwrap() {
                    for y in c.class_group(nn).unwrap() {
                        let lhs = c.hilbert_symbol(nn, x, y).pow(m as i64).unwrap();
                        assert_eq!(lhs, c.hilbert_symbol(l, x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn self_pairing_trivial_for_d() {
        for c in grid_contexts() {
            let d = c.d();
            for x in c.class_group(d).unwrap() {
                assert_eq!(c.hilbert_exponent(d, x, x), 0);
            }
        }
    }

    #[test]
    fn units_pair_trivially() {
        for c in grid_contexts() {
            let n = c.n();
            for a in 0..c.qm1() as i64 {
                for b in 0..c.qm1() as i64 {
                    let (x, y) = (c.class(0, a), c.class(0, b));
                    let expect = if c.cover.even { c.hilbert_symbol(2, x, y) } else { c.int(1) };
                    assert_eq!(c.hilbert_symbol(n, x, y), expect);
                }
            }
        }
    }

    #[test]
    fn eta_characters() {
        for c in grid_contexts() {
            let d = c.d();
            assert!(c.eta(c.one_class()).is_trivial());
            for x in c.class_group(d).unwrap() {
                let e = c.eta(x);
                for y in c.class_group(d).unwrap() {
                    assert_eq!(e.eval(&c, y), c.hilbert_symbol(d, x, y));
                }
                let moved = c.cmul(x, c.cpow(c.class(1, 2), d as i64));
                assert_eq!(c.eta(moved), e);
            }
            for j in 0..d as i64 {
                let u = c.class(0, j);
                assert!(!c.eta(u).is_ramified(&c));
            }
            let ev = c.eta(c.varpi());
            assert!(ev.eval(&c, c.varpi()).is_one());
            assert_eq!(MultChar::unit_order(&ev, &c), d);
        }
    }
}
