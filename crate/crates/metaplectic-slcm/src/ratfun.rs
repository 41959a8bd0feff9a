//! Rational functions in X = q^{-s} over Q(zeta_N).
//!
//! A `RatFun` is always stored as num/den with gcd(num, den) = 1 and den
//! monic, so structural equality is equality of functions. Negative powers
//! of X never appear; they are moved into the denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::exact_scalars::{poly_divrem_mod, trim_mod, CycField, CycNumber, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatFunError {
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("evaluation at a pole")]
    Pole,
    #[error("order of the zero function is undefined")]
    ZeroFunction,
    #[error("zero scale in substitution")]
    ZeroScale,
    #[error("substitution exponent must be nonzero")]
    ZeroExponent,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("malformed rational function: {0}")]
    Parse(String),
}

/// Dense polynomial, constant term first, no trailing zeros.
pub type Poly = Vec<CycNumber>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn deg(p: &Poly) -> isize {
    p.len() as isize - 1
}

pub fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.clone();
    for (o, c) in out.iter_mut().zip(short) {
        *o = &*o + c;
    }
    trim(&mut out);
    out
}

pub fn poly_neg(a: &Poly) -> Poly {
    a.iter().map(|c| -c).collect()
}

pub fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    poly_add(a, &poly_neg(b))
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let field = a[0].field().clone();
    let mut out = vec![CycNumber::zero(&field); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    trim(&mut out);
    out
}

pub fn poly_scale(a: &Poly, c: &CycNumber) -> Poly {
    if c.is_zero() {
        return vec![];
    }
    if c.is_one() {
        return a.clone();
    }
    a.iter().map(|x| x * c).collect()
}

/// Quotient and remainder; b nonzero.
pub fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let field = b[0].field().clone();
    let db = b.len() - 1;
    let lc = &b[db];
    let lc_inv = if lc.is_one() { None } else { Some(lc.inv().expect("nonzero leading coefficient")) };
    let mut q = vec![CycNumber::zero(&field); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = match &lc_inv {
            None => r[i + db].clone(),
            Some(li) => &r[i + db] * li,
        };
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                r[i + j] = &r[i + j] - &(&c * bj);
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn poly_make_monic(a: &Poly) -> Poly {
    match a.last() {
        None => vec![],
        Some(lc) if lc.is_one() => a.clone(),
        Some(lc) => poly_scale(a, &lc.inv().expect("nonzero")),
    }
}

pub fn poly_eval(a: &Poly, x: &CycNumber) -> CycNumber {
    let mut acc = CycNumber::zero(x.field());
    for c in a.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn poly_image(a: &Poly) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(a.len());
    for c in a {
        out.push(c.mod_image()?);
    }
    trim_mod(&mut out);
    Some(out)
}

fn gcd_image_degree(a: &[u64], b: &[u64], m: u64) -> usize {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    while !r1.is_empty() {
        let (_, r) = poly_divrem_mod(&r0, &r1, m);
        r0 = std::mem::replace(&mut r1, r);
    }
    r0.len().saturating_sub(1)
}

/// Monic gcd over Q(zeta_N); a modular image rules out common factors cheaply.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() {
        return poly_make_monic(b);
    }
    if b.is_empty() {
        return poly_make_monic(a);
    }
    let field = a[0].field().clone();
    let one = vec![CycNumber::one(&field)];
    if a.len() == 1 || b.len() == 1 {
        return one;
    }
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if let (Some(ia), Some(ib)) = (poly_image(a), poly_image(b)) {
        if ia.len() == a.len() || ib.len() == b.len() {
            let m = field.image_prime();
            let g = gcd_image_degree(&ia, &ib, m);
            if g == 0 {
                return one;
            }
            if g + 1 == short.len() && poly_divrem(long, short).1.is_empty() {
                return poly_make_monic(short);
            }
        }
    }
    let (mut r0, mut r1) = (long.clone(), short.clone());
    r1 = poly_make_monic(&r1);
    while !r1.is_empty() {
        let (_, r) = poly_divrem(&r0, &r1);
        r0 = std::mem::replace(&mut r1, poly_make_monic(&r));
    }
    r0
}

/// Exact quotient a / b, b | a.
pub fn poly_divexact(a: &Poly, b: &Poly) -> Poly {
    let (q, r) = poly_divrem(a, b);
    debug_assert!(r.is_empty());
    q
}

fn low_zeros(a: &Poly) -> usize {
    a.iter().take_while(|c| c.is_zero()).count()
}

/// A rational function of X = q^{-s}.
#[derive(Clone)]
pub struct RatFun {
    field: Arc<CycField>,
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Canonical form of num/den; den must be nonzero.
    pub fn new(field: &Arc<CycField>, mut num: Poly, mut den: Poly) -> RatFun {
        trim(&mut num);
        trim(&mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFun::zero(field);
        }
        let z = low_zeros(&num).min(low_zeros(&den));
        if z > 0 {
            num.drain(..z);
            den.drain(..z);
        }
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = poly_divexact(&num, &g);
            den = poly_divexact(&den, &g);
        }
        Self::monic_den(field, num, den)
    }

    /// num / base^k, cancelling one factor of base at a time.
    pub fn over_power(field: &Arc<CycField>, num: Poly, base: &Poly, k: usize) -> RatFun {
        let mut r = RatFun::from_poly(field, num);
        let step = RatFun::new(field, vec![CycNumber::one(field)], base.clone());
        for _ in 0..k {
            r = &r * &step;
        }
        r
    }

    fn monic_den(field: &Arc<CycField>, num: Poly, den: Poly) -> RatFun {
        let lc = den.last().unwrap();
        if lc.is_one() {
            return RatFun { field: field.clone(), num, den };
        }
        let li = lc.inv().expect("nonzero");
        RatFun { field: field.clone(), num: poly_scale(&num, &li), den: poly_scale(&den, &li) }
    }

    pub fn zero(field: &Arc<CycField>) -> RatFun {
        RatFun { field: field.clone(), num: vec![], den: vec![CycNumber::one(field)] }
    }

    pub fn one(field: &Arc<CycField>) -> RatFun {
        Self::constant(&CycNumber::one(field))
    }

    pub fn constant(c: &CycNumber) -> RatFun {
        let field = c.field().clone();
        let num = if c.is_zero() { vec![] } else { vec![c.clone()] };
        RatFun { num, den: vec![CycNumber::one(&field)], field }
    }

    /// c * X^k for any integer k.
    pub fn monomial(c: &CycNumber, k: i64) -> RatFun {
        let field = c.field().clone();
        if c.is_zero() {
            return Self::zero(&field);
        }
        let zero = CycNumber::zero(&field);
        let mut num = vec![zero.clone(); k.max(0) as usize];
        num.push(c.clone());
        let mut den = vec![zero; (-k).max(0) as usize];
        den.push(CycNumber::one(&field));
        RatFun { field, num, den }
    }

    /// The variable X.
    pub fn x(field: &Arc<CycField>) -> RatFun {
        Self::monomial(&CycNumber::one(field), 1)
    }

    pub fn from_poly(field: &Arc<CycField>, p: Poly) -> RatFun {
        Self::new(field, p, vec![CycNumber::one(field)])
    }

    /// A Laurent polynomial sum_i c_i X^{low + i}.
    pub fn laurent(field: &Arc<CycField>, low: i64, coeffs: Poly) -> RatFun {
        let one = vec![CycNumber::one(field)];
        let base = Self::new(field, coeffs, one);
        if low == 0 {
            base
        } else {
            &base * &Self::monomial(&CycNumber::one(field), low)
        }
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.den.len() == 1 && self.num.len() == 1 && self.num[0].is_one()
    }

    /// The value if the function is constant.
    pub fn as_constant(&self) -> Option<CycNumber> {
        if self.den.len() != 1 {
            return None;
        }
        match self.num.len() {
            0 => Some(CycNumber::zero(&self.field)),
            1 => Some(self.num[0].clone()),
            _ => None,
        }
    }

    /// (c, k) when the function is c * X^k.
    pub fn as_monomial(&self) -> Option<(CycNumber, i64)> {
        let nz = self.num.iter().filter(|c| !c.is_zero()).count();
        let dz = self.den.iter().filter(|c| !c.is_zero()).count();
        if nz != 1 || dz != 1 {
            return None;
        }
        Some((self.num.last().unwrap().clone(), deg(&self.num) as i64 - deg(&self.den) as i64))
    }

    fn check(&self, other: &RatFun) -> Result<(), RatFunError> {
        if self.field.order() != other.field.order() {
            Err(ScalarError::MixedOrders(self.field.order(), other.field.order()).into())
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &RatFun) -> Result<RatFun, RatFunError> {
        self.check(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            let num = poly_add(&self.num, &other.num);
            if num.is_empty() {
                return Ok(Self::zero(&self.field));
            }
            if self.den.len() == 1 {
                return Ok(RatFun { field: self.field.clone(), num, den: self.den.clone() });
            }
            return Ok(Self::new(&self.field, num, self.den.clone()));
        }
        let g = poly_gcd(&self.den, &other.den);
        let (da, db) = if g.len() > 1 {
            (poly_divexact(&self.den, &g), poly_divexact(&other.den, &g))
        } else {
            (self.den.clone(), other.den.clone())
        };
        let num = poly_add(&poly_mul(&self.num, &db), &poly_mul(&other.num, &da));
        let den = poly_mul(&self.den, &db);
        Ok(Self::new(&self.field, num, den))
    }

    pub fn try_mul(&self, other: &RatFun) -> Result<RatFun, RatFunError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c));
        }
        if let Some(c) = self.as_constant() {
            return Ok(other.scale(&c));
        }
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let (an, bd) = if g1.len() > 1 {
            (poly_divexact(&self.num, &g1), poly_divexact(&other.den, &g1))
        } else {
            (self.num.clone(), other.den.clone())
        };
        let (bn, ad) = if g2.len() > 1 {
            (poly_divexact(&other.num, &g2), poly_divexact(&self.den, &g2))
        } else {
            (other.num.clone(), self.den.clone())
        };
        let num = poly_mul(&an, &bn);
        let den = poly_mul(&ad, &bd);
        // both factors were monic and coprime pairs were cancelled
        Ok(RatFun { field: self.field.clone(), num, den })
    }

    pub fn inv(&self) -> Result<RatFun, RatFunError> {
        if self.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(Self::monic_den(&self.field, self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &RatFun) -> Result<RatFun, RatFunError> {
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, c: &CycNumber) -> RatFun {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        RatFun { field: self.field.clone(), num: poly_scale(&self.num, c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<RatFun, RatFunError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(&self.field);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// f(c * X^e).
    pub fn substitute(&self, c: &CycNumber, e: i64) -> Result<RatFun, RatFunError> {
        if c.is_zero() {
            return Err(RatFunError::ZeroScale);
        }
        if e == 0 {
            return Err(RatFunError::ZeroExponent);
        }
        let field = &self.field;
        let sub = |p: &Poly| -> Poly {
            // sum p_i c^i X^{i|e|}
            let step = e.unsigned_abs() as usize;
            let zero = CycNumber::zero(field);
            let mut out = vec![zero; if p.is_empty() { 0 } else { (p.len() - 1) * step + 1 }];
            let mut cp = CycNumber::one(field);
            for (i, pi) in p.iter().enumerate() {
                if !pi.is_zero() {
                    out[i * step] = pi * &cp;
                }
                if i + 1 < p.len() {
                    cp = &cp * c;
                }
            }
            out
        };
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut n = sub(&self.num);
        let mut d = sub(&self.den);
        if e < 0 {
            // p(cX^{-k}) = X^{-k deg p} * rev
            let shift = (deg(&self.den) - deg(&self.num)) * e.unsigned_abs() as isize;
            n.reverse();
            d.reverse();
            let zero = CycNumber::zero(field);
            if shift > 0 {
                let mut v = vec![zero; shift as usize];
                v.extend(n);
                n = v;
            } else if shift < 0 {
                let mut v = vec![zero; (-shift) as usize];
                v.extend(d);
                d = v;
            }
            return Ok(Self::new(field, n, d));
        }
        // gcd is preserved by X -> cX^e with e > 0
        trim(&mut n);
        trim(&mut d);
        Ok(Self::monic_den(field, n, d))
    }

    pub fn evaluate(&self, x: &CycNumber) -> Result<CycNumber, RatFunError> {
        let dv = poly_eval(&self.den, x);
        if dv.is_zero() {
            return Err(RatFunError::Pole);
        }
        Ok(&poly_eval(&self.num, x) * &dv.inv()?)
    }

    /// Order of vanishing at X = x; negative for poles.
    pub fn order_at(&self, x: &CycNumber) -> Result<i64, RatFunError> {
        if self.is_zero() {
            return Err(RatFunError::ZeroFunction);
        }
        let root = vec![-x, CycNumber::one(&self.field)];
        let mult = |p: &Poly| -> i64 {
            let mut p = p.clone();
            let mut k = 0;
            loop {
                let (q, r) = poly_divrem(&p, &root);
                if !r.is_empty() {
                    return k;
                }
                p = q;
                k += 1;
            }
        };
        Ok(mult(&self.num) - mult(&self.den))
    }

    /// Text form "([coeffs])/([coeffs])".
    pub fn to_text(&self) -> String {
        let enc = |p: &Poly| -> String {
            let v: Vec<String> = p.iter().map(|c| c.to_text()).collect();
            format!("([{}])", v.join(","))
        };
        format!("{}/{}", enc(&self.num), enc(&self.den))
    }

    pub fn parse(s: &str) -> Result<RatFun, RatFunError> {
        let err = || RatFunError::Parse(s.to_string());
        let s = s.trim();
        let (a, b) = s.split_once(")/(").ok_or_else(err)?;
        let a = a.strip_prefix('(').ok_or_else(err)?;
        let b = b.strip_suffix(')').ok_or_else(err)?;
        let list = |t: &str| -> Result<Vec<CycNumber>, RatFunError> {
            let body = t.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
            let mut out = Vec::new();
            let mut depth = 0;
            let mut start = 0;
            for (i, ch) in body.char_indices() {
                match ch {
                    '[' => depth += 1,
                    ']' => depth -= 1,
                    ',' if depth == 0 => {
                        out.push(CycNumber::parse(&body[start..i])?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if !body[start..].trim().is_empty() {
                out.push(CycNumber::parse(&body[start..])?);
            }
            Ok(out)
        };
        let num = list(a)?;
        let den = list(b)?;
        let field = num.first().or(den.first()).ok_or_else(err)?.field().clone();
        if num.iter().chain(&den).any(|c| c.order() != field.order()) {
            return Err(err());
        }
        let mut dt = den.clone();
        trim(&mut dt);
        if dt.is_empty() {
            return Err(err());
        }
        Ok(Self::new(&field, num, den))
    }

    /// Equality by cross multiplication, independent of representation.
    pub fn equals(&self, other: &RatFun) -> bool {
        if self.field.order() != other.field.order() {
            return false;
        }
        if self.num == other.num && self.den == other.den {
            return true;
        }
        poly_mul(&self.num, &other.den) == poly_mul(&other.num, &self.den)
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}
impl Eq for RatFun {}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a RatFun> for &'a RatFun {
            type Output = RatFun;
            fn $m(self, rhs: &'a RatFun) -> RatFun {
                let f: fn(&RatFun, &RatFun) -> Result<RatFun, RatFunError> = $body;
                f(self, rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, rhs: RatFun) -> RatFun {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, rhs: &'a RatFun) -> RatFun {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.try_add(b));
forward_binop!(Sub, sub, |a, b| a.try_add(&-b));
forward_binop!(Mul, mul, |a, b| a.try_mul(b));
forward_binop!(Div, div, |a, b| a.try_div(b));

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { field: self.field.clone(), num: poly_neg(&self.num), den: self.den.clone() }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

/// The named substitutions of the variable s, realized on X = q^{-s}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// s -> 1 - s : X -> q^{-1} X^{-1}
    OneMinus,
    /// s -> -s : X -> X^{-1}
    Minus,
    /// s -> n s : X -> X^n
    Times(i64),
    /// s -> s + 1/2 : X -> q^{-1/2} X
    PlusHalf,
    /// s -> s + t, t integer : X -> q^{-t} X
    Shift(i64),
}

/// Substitution helper shared by all modules; `q` and `sqrt_q` come from the context.
pub fn at_slot(f: &RatFun, slot: Slot, q: u64, sqrt_q: &CycNumber) -> RatFun {
    let field = f.field();
    let qi = |k: i64| -> CycNumber {
        let r = num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(q).pow(k as u32));
        CycNumber::from_rational(field, &r)
    };
    let res = match slot {
        Slot::OneMinus => f.substitute(&qi(1), -1),
        Slot::Minus => f.substitute(&CycNumber::one(field), -1),
        Slot::Times(n) => f.substitute(&CycNumber::one(field), n),
        Slot::PlusHalf => f.substitute(&sqrt_q.inv().expect("nonzero"), 1),
        Slot::Shift(t) => {
            let c = if t >= 0 {
                qi(t)
            } else {
                CycNumber::from_bigint(field, num_bigint::BigInt::from(q).pow((-t) as u32))
            };
            f.substitute(&c, 1)
        }
    };
    res.expect("valid substitution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f168() -> Arc<CycField> {
        CycField::get(168)
    }

    fn c(field: &Arc<CycField>, a: i64) -> CycNumber {
        CycNumber::from_int(field, a)
    }

    fn one_minus_x(field: &Arc<CycField>) -> RatFun {
        RatFun::from_poly(field, vec![c(field, 1), c(field, -1)])
    }

    #[test]
    fn basic_identities() {
        let f = f168();
        let l = one_minus_x(&f).inv().unwrap();
        assert!((&l * &one_minus_x(&f)).is_one());
        let x = RatFun::x(&f);
        let lhs = &(&x * &l) + &RatFun::one(&f);
        assert_eq!(lhs.to_text(), l.to_text());
        assert!(RatFun::one(&f).try_div(&RatFun::zero(&f)).is_err());
    }

    #[test]
    fn substitution_examples() {
        let f = f168();
        let qinv = CycNumber::from_ratio(&f, 1, 7);
        let s = one_minus_x(&f).substitute(&qinv, -1).unwrap();
        // (X - 1/7) / X
        let expect = RatFun::new(&f, vec![-&qinv, c(&f, 1)], vec![c(&f, 0), c(&f, 1)]);
        assert_eq!(s.to_text(), expect.to_text());
        let x3 = RatFun::x(&f).substitute(&c(&f, 1), 3).unwrap();
        assert_eq!(x3.as_monomial(), Some((c(&f, 1), 3)));
    }

    #[test]
    fn evaluation_and_orders() {
        let f = f168();
        let z3 = CycNumber::root_of_unity(&f, 56);
        let l = one_minus_x(&f).inv().unwrap();
        assert_eq!(l.evaluate(&z3).unwrap(), (c(&f, 1) - &z3).inv().unwrap());
        assert_eq!(l.evaluate(&c(&f, 1)), Err(RatFunError::Pole));
        let x2 = RatFun::monomial(&c(&f, 1), 2);
        assert!(x2.evaluate(&c(&f, -1)).unwrap().is_one());
        assert_eq!(l.order_at(&c(&f, 1)), Ok(-1));
        let sq = &one_minus_x(&f) * &one_minus_x(&f);
        assert_eq!(sq.order_at(&c(&f, 1)), Ok(2));
        assert_eq!(RatFun::zero(&f).order_at(&c(&f, 1)), Err(RatFunError::ZeroFunction));
    }

    #[test]
    fn text_round_trip() {
        let f = CycField::get(24);
        let a = RatFun::new(
            &f,
            vec![CycNumber::root_of_unity(&f, 5), CycNumber::from_ratio(&f, 2, 3)],
            vec![c(&f, 1), CycNumber::root_of_unity(&f, 7), c(&f, 4)],
        );
        assert_eq!(RatFun::parse(&a.to_text()).unwrap().to_text(), a.to_text());
    }

    fn arb_ratfun() -> impl Strategy<Value = RatFun> {
        let f = CycField::get(24);
        let coeff = (-3i64..4, 0i64..24);
        (prop::collection::vec(coeff.clone(), 0..4), prop::collection::vec(coeff, 1..4)).prop_map(
            move |(n, d)| {
                let mk = |v: &[(i64, i64)]| -> Poly {
                    v.iter().map(|&(a, k)| CycNumber::root_of_unity(&f, k).scale_int(a)).collect()
                };
                let mut den = mk(&d);
                den.push(CycNumber::one(&f));
                RatFun::new(&f, mk(&n), den)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn distributive(a in arb_ratfun(), b in arb_ratfun(), c in arb_ratfun()) {
            let lhs = &a * &(&b + &c);
            let rhs = &(&a * &b) + &(&a * &c);
            prop_assert_eq!(lhs.to_text(), rhs.to_text());
        }

        #[test]
        fn substitution_laws(a in arb_ratfun(), b in arb_ratfun(), k1 in 0i64..24, e1 in -2i64..3, k2 in 0i64..24, e2 in -2i64..3) {
            prop_assume!(e1 != 0 && e2 != 0);
            let f = a.field().clone();
            let c1 = CycNumber::root_of_unity(&f, k1).scale_int(2);
            let c2 = CycNumber::root_of_unity(&f, k2);
            let s = |g: &RatFun| g.substitute(&c1, e1).unwrap();
            prop_assert_eq!(s(&(&a + &b)).to_text(), (&s(&a) + &s(&b)).to_text());
            prop_assert_eq!(s(&(&a * &b)).to_text(), (&s(&a) * &s(&b)).to_text());
            // g(X) = a(c1 X^e1); g(c2 X^e2) = a(c1 c2^e1 X^{e1 e2})
            let twice = s(&a).substitute(&c2, e2).unwrap();
            let once = a.substitute(&(&c1 * &c2.pow(e1).unwrap()), e1 * e2).unwrap();
            prop_assert_eq!(twice.to_text(), once.to_text());
        }

        #[test]
        fn evaluation_multiplicative(a in arb_ratfun(), b in arb_ratfun(), k in 0i64..24) {
            let f = a.field().clone();
            let x = CycNumber::root_of_unity(&f, k).scale_int(3);
            if let (Ok(u), Ok(v)) = (a.evaluate(&x), b.evaluate(&x)) {
                prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), &u * &v);
            }
            if !a.is_zero() && !b.is_zero() {
                let one = CycNumber::one(&f);
                prop_assert_eq!((&a * &b).order_at(&one).unwrap(), a.order_at(&one).unwrap() + b.order_at(&one).unwrap());
            }
        }
    }
}
