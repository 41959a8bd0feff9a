//! Exact arithmetic in the cyclotomic field Q(zeta_N).
//!
//! Elements are stored as an integer vector over the power basis together
//! with one positive common denominator, kept in lowest terms. The public
//! coordinate view is `coeffs()`, which yields reduced rationals.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("extension degree must be positive")]
    BadDegree,
    #[error("n = {n} does not divide q - 1 = {qm1}")]
    NotDividing { n: u64, qm1: u64 },
    #[error("n = {0} is divisible by 4")]
    DivisibleByFour(u64),
    #[error("mixed cyclotomic orders {0} and {1}")]
    MixedOrders(u64, u64),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("malformed cyclotomic number: {0}")]
    Parse(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    // m prime
    pow_mod(a, m - 2, m)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// Legendre symbol (t|p) for an odd prime p.
pub fn legendre(t: i64, p: u64) -> i32 {
    let t = t.rem_euclid(p as i64) as u64;
    if t == 0 {
        return 0;
    }
    if pow_mod(t, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// The universal order N = lcm(8, p, q - 1) for the tame context (p, f, n).
pub fn make_order(p: u64, f: u32, n: u64) -> Result<u64, ScalarError> {
    if p == 2 || !is_prime(p) {
        return Err(ScalarError::BadPrime(p));
    }
    if f == 0 {
        return Err(ScalarError::BadDegree);
    }
    let q = p.pow(f);
    if n == 0 || (q - 1) % n != 0 {
        return Err(ScalarError::NotDividing { n, qm1: q - 1 });
    }
    if n % 4 == 0 {
        return Err(ScalarError::DivisibleByFour(n));
    }
    Ok(8u64.lcm(&p).lcm(&(q - 1)))
}

fn poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![BigInt::zero(); r.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = r[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            r[i + j] -= &c * dj;
        }
        quo[i] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    quo
}

/// Coefficients of Phi_N, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    fn go(n: u64, memo: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
        if let Some(v) = memo.get(&n) {
            return v.clone();
        }
        let mut p = vec![BigInt::zero(); n as usize + 1];
        p[0] = BigInt::from(-1);
        p[n as usize] = BigInt::one();
        for m in 1..n {
            if n % m == 0 {
                let phi_m = go(m, memo);
                p = poly_divexact(&p, &phi_m);
            }
        }
        memo.insert(n, p.clone());
        p
    }
    go(n, &mut HashMap::new())
}

/// Shared tables for Q(zeta_N).
pub struct CycField {
    order: u64,
    phi: usize,
    cyclo_low: Vec<(usize, i64)>,
    powers: Vec<Vec<i64>>,
    ell: u64,
    omega_pows: Vec<u64>,
}

impl fmt::Debug for CycField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.order)
    }
}

static FIELDS: OnceLock<Mutex<HashMap<u64, Arc<CycField>>>> = OnceLock::new();

impl CycField {
    /// Field of order N, built once per process and shared.
    pub fn get(order: u64) -> Arc<CycField> {
        let cache = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(order)
            .or_insert_with(|| Arc::new(CycField::build(order)))
            .clone()
    }

    fn build(order: u64) -> CycField {
        assert!(order >= 1);
        let cyclo = cyclotomic_polynomial(order);
        let phi = cyclo.len() - 1;
        let cyclo_low: Vec<(usize, i64)> = cyclo[..phi]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.to_i64().expect("cyclotomic coefficient overflow")))
            .collect();
        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
            if top != 0 {
                for &(j, cj) in &cyclo_low {
                    next[j] = next[j]
                        .checked_sub(top.checked_mul(cj).expect("power table overflow"))
                        .expect("power table overflow");
                }
            }
            cur = next;
        }
        // prime ell = 1 mod N with an element of exact order N
        let mut t = ((1u64 << 62) - 1) / order;
        let ell = loop {
            let c = t * order + 1;
            if is_prime(c) {
                break c;
            }
            t -= 1;
        };
        let pf = prime_factors(order);
        let mut g = 2u64;
        let omega = loop {
            let w = pow_mod(g, (ell - 1) / order, ell);
            if pf.iter().all(|r| pow_mod(w, order / r, ell) != 1) {
                break w;
            }
            g += 1;
        };
        let mut omega_pows = Vec::with_capacity(phi);
        let mut w = 1u64;
        for _ in 0..phi {
            omega_pows.push(w);
            w = mul_mod(w, omega, ell);
        }
        CycField { order, phi, cyclo_low, powers, ell, omega_pows }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    /// Prime used for modular images, with ell = 1 mod N.
    pub(crate) fn image_prime(&self) -> u64 {
        self.ell
    }

    fn reduce_i128(&self, buf: &mut [i128]) -> Option<()> {
        let phi = self.phi;
        for i in (phi..buf.len()).rev() {
            let c = buf[i];
            if c == 0 {
                continue;
            }
            for &(j, pj) in &self.cyclo_low {
                let idx = i - phi + j;
                buf[idx] = buf[idx].checked_sub(c.checked_mul(pj as i128)?)?;
            }
            buf[i] = 0;
        }
        Some(())
    }

    fn reduce_big(&self, buf: &mut [BigInt]) {
        let phi = self.phi;
        for i in (phi..buf.len()).rev() {
            if buf[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut buf[i]);
            for &(j, pj) in &self.cyclo_low {
                buf[i - phi + j] -= &c * pj;
            }
        }
    }
}

/// An element of Q(zeta_N).
#[derive(Clone)]
pub struct CycNumber {
    field: Arc<CycField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.den == other.den && self.num == other.num
    }
}
impl Eq for CycNumber {}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn to_small(v: &[BigInt]) -> Option<(Vec<i64>, u64)> {
    let mut out = Vec::with_capacity(v.len());
    let mut bits = 0;
    for c in v {
        let x = c.to_i64()?;
        bits = bits.max(64 - x.unsigned_abs().leading_zeros() as u64);
        out.push(x);
    }
    Some((out, bits))
}

impl CycNumber {
    fn from_parts(field: Arc<CycField>, mut num: Vec<BigInt>, mut den: BigInt) -> CycNumber {
        if num.iter().all(|c| c.is_zero()) {
            return CycNumber { field, num, den: BigInt::one() };
        }
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                for c in num.iter_mut() {
                    if !c.is_zero() {
                        *c /= &g;
                    }
                }
                den /= &g;
            }
        }
        CycNumber { field, num, den }
    }

    pub fn zero(field: &Arc<CycField>) -> CycNumber {
        CycNumber { field: field.clone(), num: vec![BigInt::zero(); field.phi], den: BigInt::one() }
    }

    pub fn one(field: &Arc<CycField>) -> CycNumber {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Arc<CycField>, v: i64) -> CycNumber {
        Self::from_bigint(field, BigInt::from(v))
    }

    pub fn from_bigint(field: &Arc<CycField>, v: BigInt) -> CycNumber {
        let mut num = vec![BigInt::zero(); field.phi];
        num[0] = v;
        CycNumber { field: field.clone(), num, den: BigInt::one() }
    }

    pub fn from_rational(field: &Arc<CycField>, r: &BigRational) -> CycNumber {
        let mut num = vec![BigInt::zero(); field.phi];
        num[0] = r.numer().clone();
        Self::from_parts(field.clone(), num, r.denom().clone())
    }

    pub fn from_ratio(field: &Arc<CycField>, a: i64, b: i64) -> CycNumber {
        Self::from_rational(field, &BigRational::new(a.into(), b.into()))
    }

    /// Build from rational coordinates in the power basis (length at most phi(N)).
    pub fn from_coeffs(field: &Arc<CycField>, coeffs: &[BigRational]) -> CycNumber {
        assert!(coeffs.len() <= field.phi, "too many coordinates");
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); field.phi];
        for (i, c) in coeffs.iter().enumerate() {
            num[i] = c.numer() * (&den / c.denom());
        }
        Self::from_parts(field.clone(), num, den)
    }

    /// zeta_N^k.
    pub fn root_of_unity(field: &Arc<CycField>, k: i64) -> CycNumber {
        let k = k.rem_euclid(field.order as i64) as usize;
        let num = field.powers[k].iter().map(|&c| BigInt::from(c)).collect();
        CycNumber { field: field.clone(), num, den: BigInt::one() }
    }

    /// Sum of w * zeta_N^e over (e, w) pairs.
    pub fn root_sum<I: IntoIterator<Item = (i64, i64)>>(field: &Arc<CycField>, terms: I) -> CycNumber {
        let n = field.order as i64;
        let mut acc = vec![0i128; field.phi];
        for (e, w) in terms {
            if w == 0 {
                continue;
            }
            let row = &field.powers[e.rem_euclid(n) as usize];
            for (a, &r) in acc.iter_mut().zip(row) {
                *a += (r as i128) * (w as i128);
            }
        }
        let num = acc.into_iter().map(BigInt::from).collect();
        Self::from_parts(field.clone(), num, BigInt::one())
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// The value as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check(&self, other: &CycNumber) -> Result<(), ScalarError> {
        if self.field.order != other.field.order {
            Err(ScalarError::MixedOrders(self.field.order, other.field.order))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &CycNumber) -> Result<CycNumber, ScalarError> {
        self.check(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            return Ok(Self::from_parts(self.field.clone(), num, self.den.clone()));
        }
        let l = self.den.lcm(&other.den);
        let sa = &l / &self.den;
        let sb = &l / &other.den;
        let num = self.num.iter().zip(&other.num).map(|(a, b)| a * &sa + b * &sb).collect();
        Ok(Self::from_parts(self.field.clone(), num, l))
    }

    pub fn try_mul(&self, other: &CycNumber) -> Result<CycNumber, ScalarError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let num = mul_vectors(&self.field, &self.num, &other.num);
        Ok(Self::from_parts(self.field.clone(), num, &self.den * &other.den))
    }

    pub fn scale(&self, r: &BigRational) -> CycNumber {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Self::from_parts(self.field.clone(), num, &self.den * r.denom())
    }

    pub fn scale_int(&self, k: i64) -> CycNumber {
        let num = self.num.iter().map(|c| c * k).collect();
        Self::from_parts(self.field.clone(), num, self.den.clone())
    }

    pub fn inv(&self) -> Result<CycNumber, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        let support: Vec<usize> = (0..self.field.phi).filter(|&i| !self.num[i].is_zero()).collect();
        if support.len() == 1 {
            // c * zeta^i
            let i = support[0];
            let c = BigRational::new(self.den.clone(), self.num[i].clone());
            let r = Self::root_of_unity(&self.field, -(i as i64));
            return Ok(r.scale(&c));
        }
        let inv_num = modular_inverse(&self.field, &self.num);
        Ok(inv_num.scale(&BigRational::from_integer(self.den.clone())))
    }

    pub fn pow(&self, e: i64) -> Result<CycNumber, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Complex conjugation zeta -> zeta^{-1}.
    pub fn conj(&self) -> CycNumber {
        let n = self.field.order as usize;
        let mut out = vec![BigInt::zero(); self.field.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &self.field.powers[(n - i) % n];
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += c * r;
                }
            }
        }
        Self::from_parts(self.field.clone(), out, self.den.clone())
    }

    /// Image in F_ell under zeta_N -> omega; None when the denominator vanishes there.
    pub(crate) fn mod_image(&self) -> Option<u64> {
        let ell = self.field.ell;
        let lb = BigInt::from(ell);
        let den = self.den.mod_floor(&lb).to_u64().unwrap();
        if den == 0 {
            return None;
        }
        let mut acc = 0u64;
        for (c, &w) in self.num.iter().zip(&self.field.omega_pows) {
            if c.is_zero() {
                continue;
            }
            let cm = c.mod_floor(&lb).to_u64().unwrap();
            acc = (acc + mul_mod(cm, w, ell)) % ell;
        }
        Some(mul_mod(acc, inv_mod(den, ell), ell))
    }

    /// Canonical text "N:[c0,c1,...]" with every coordinate as num/den.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .coeffs()
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        format!("{}:[{}]", self.field.order, parts.join(","))
    }

    pub fn parse(s: &str) -> Result<CycNumber, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let (n, rest) = s.trim().split_once(':').ok_or_else(err)?;
        let order: u64 = n.trim().parse().map_err(|_| err())?;
        if order == 0 {
            return Err(err());
        }
        let body = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
        let field = CycField::get(order);
        let mut coeffs = Vec::new();
        if !body.trim().is_empty() {
            for item in body.split(',') {
                let (a, b) = match item.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (item.trim(), "1"),
                };
                let a: BigInt = a.parse().map_err(|_| err())?;
                let b: BigInt = b.parse().map_err(|_| err())?;
                if b.is_zero() {
                    return Err(err());
                }
                coeffs.push(BigRational::new(a, b));
            }
        }
        if coeffs.len() > field.phi {
            return Err(err());
        }
        Ok(Self::from_coeffs(&field, &coeffs))
    }

    /// Floating-point value under zeta_N = exp(2 pi i / N); for display only.
    pub fn approx(&self) -> (f64, f64) {
        let n = self.field.order as f64;
        let d = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.num.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN) / d;
            let a = 2.0 * std::f64::consts::PI * i as f64 / n;
            re += v * a.cos();
            im += v * a.sin();
        }
        (re, im)
    }
}

fn mul_vectors(field: &CycField, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let phi = field.phi;
    if let (Some((x, bx)), Some((y, by))) = (to_small(a), to_small(b)) {
        let logphi = 64 - (phi as u64).leading_zeros() as u64;
        if bx + by + logphi < 110 {
            let mut buf = vec![0i128; 2 * phi - 1];
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                let xi = xi as i128;
                for (j, &yj) in y.iter().enumerate() {
                    if yj != 0 {
                        buf[i + j] += xi * yj as i128;
                    }
                }
            }
            if field.reduce_i128(&mut buf).is_some() {
                return buf[..phi].iter().map(|&c| BigInt::from(c)).collect();
            }
        }
    }
    let mut buf = vec![BigInt::zero(); 2 * phi - 1];
    for (i, xi) in a.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in b.iter().enumerate() {
            if !yj.is_zero() {
                buf[i + j] += xi * yj;
            }
        }
    }
    field.reduce_big(&mut buf);
    buf.truncate(phi);
    buf
}

// ---- modular inverse: Euclid against Phi_N modulo word primes, CRT, rational reconstruction

fn word_primes() -> &'static Vec<u64> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = (1u64 << 62) - 1;
        while out.len() < 256 {
            if is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

pub(crate) fn trim_mod(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub(crate) fn poly_divrem_mod(a: &[u64], b: &[u64], m: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim_mod(&mut r);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let db = b.len() - 1;
    let lc_inv = inv_mod(b[db], m);
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = mul_mod(r[i + db], lc_inv, m);
        if c == 0 {
            continue;
        }
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + m - mul_mod(c, bj, m)) % m;
        }
    }
    trim_mod(&mut r);
    (q, r)
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, m)) % m;
        }
    }
    trim_mod(&mut out);
    out
}

fn poly_sub_mod(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + m - y) % m;
    }
    trim_mod(&mut out);
    out
}

/// Inverse of `a` modulo (Phi_N, m), if it exists.
fn inverse_mod_prime(field: &CycField, a: &[BigInt], m: u64) -> Option<Vec<u64>> {
    let mb = BigInt::from(m);
    let mut r1: Vec<u64> = a.iter().map(|c| c.mod_floor(&mb).to_u64().unwrap()).collect();
    trim_mod(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut r0 = vec![0u64; field.phi + 1];
    r0[field.phi] = 1;
    for &(j, cj) in &field.cyclo_low {
        r0[j] = (cj as i128).rem_euclid(m as i128) as u64;
    }
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while r1.len() > 1 {
        let (q, r) = poly_divrem_mod(&r0, &r1, m);
        let s = poly_sub_mod(&s0, &poly_mul_mod(&q, &s1, m), m);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        if r1.is_empty() {
            return None;
        }
    }
    let c = inv_mod(r1[0], m);
    let mut out: Vec<u64> = s1.iter().map(|&x| mul_mod(x, c, m)).collect();
    out.resize(field.phi, 0);
    Some(out)
}

fn rational_reconstruct(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn modular_inverse(field: &Arc<CycField>, a: &[BigInt]) -> CycNumber {
    let primes = word_primes();
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); field.phi];
    let mut used = 0usize;
    let mut target = 2usize;
    let a_num = CycNumber::from_parts(field.clone(), a.to_vec(), BigInt::one());
    let mut idx = 0usize;
    loop {
        while used < target {
            let m = if idx < primes.len() {
                primes[idx]
            } else {
                let mut c = primes[primes.len() - 1] - 2 * (idx - primes.len() + 1) as u64;
                while !is_prime(c) {
                    c -= 2;
                }
                c
            };
            idx += 1;
            let Some(inv) = inverse_mod_prime(field, a, m) else { continue };
            let mb = BigInt::from(m);
            let minv = BigInt::from(inv_mod((&modulus).mod_floor(&mb).to_u64().unwrap(), m));
            for (res, &v) in residues.iter_mut().zip(&inv) {
                let diff = (BigInt::from(v) - &*res).mod_floor(&mb);
                let t = (diff * &minv).mod_floor(&mb);
                *res += &modulus * t;
            }
            modulus *= &mb;
            used += 1;
        }
        let bound = (&modulus / 2u32).sqrt();
        let mut den = BigInt::one();
        let mut nums: Vec<BigInt> = Vec::with_capacity(field.phi);
        let mut ok = true;
        for res in &residues {
            let w = (res * &den).mod_floor(&modulus);
            match rational_reconstruct(&w, &modulus, &bound) {
                Some((r, t)) => {
                    if !t.is_one() {
                        for x in nums.iter_mut() {
                            *x *= &t;
                        }
                        den *= &t;
                    }
                    nums.push(r);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let cand = CycNumber::from_parts(field.clone(), nums, den);
            if (&cand * &a_num).is_one() {
                return cand;
            }
        }
        target *= 2;
    }
}

/// Positive square root of q = p^f inside Q(zeta_N); requires p | N and 8 | N when f is odd.
pub fn sqrt_q(field: &Arc<CycField>, p: u64, f: u32) -> CycNumber {
    let half = BigInt::from(p).pow(f / 2);
    if f % 2 == 0 {
        return CycNumber::from_bigint(field, half);
    }
    let n = field.order();
    assert!(n % p == 0 && n % 8 == 0, "order {} cannot hold sqrt({})", n, p);
    let step = (n / p) as i64;
    let mut s = CycNumber::zero(field);
    for t in 1..p as i64 {
        let z = CycNumber::root_of_unity(field, t * step);
        if legendre(t, p) == 1 {
            s += &z;
        } else {
            s -= &z;
        }
    }
    if p % 4 == 3 {
        // -zeta_8^2 = -i
        s = -(&s * &CycNumber::root_of_unity(field, 2 * (n / 8) as i64));
    }
    s.scale(&BigRational::from_integer(half))
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a CycNumber> for &'a CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: &'a CycNumber) -> CycNumber {
                let f: fn(&CycNumber, &CycNumber) -> Result<CycNumber, ScalarError> = $body;
                f(self, rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: CycNumber) -> CycNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: &'a CycNumber) -> CycNumber {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.try_add(b));
forward_binop!(Sub, sub, |a, b| a.try_add(&-b));
forward_binop!(Mul, mul, |a, b| a.try_mul(b));

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

impl AddAssign<&CycNumber> for CycNumber {
    fn add_assign(&mut self, rhs: &CycNumber) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycNumber> for CycNumber {
    fn sub_assign(&mut self, rhs: &CycNumber) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycNumber> for CycNumber {
    fn mul_assign(&mut self, rhs: &CycNumber) {
        *self = &*self * rhs;
    }
}
