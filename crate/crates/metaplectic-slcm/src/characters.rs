//! Tame multiplicative characters, twisted additive characters and the
//! genuine-character data (chi, psi, cover) standing for sigma.

use thiserror::Error;

use crate::exact_scalars::CycNumber;
use crate::factors::weil_gamma_psi;
use crate::tame_field::{CoverParams, FStarClass, TameContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("eta' is only defined for n = 2 mod 4")]
    OddCover,
    #[error("varpi value zeta_N^(num*N/den) needs den | N, got den = {0}")]
    BadVarpi(i64),
}

/// chi(varpi^v [t]) = zeta_N^{varpi_exp v} zeta_{q-1}^{unit_exp dlog t}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultChar {
    pub unit_exp: u64,
    pub varpi_exp: u64,
    qm1: u64,
    order: u64,
}

impl MultChar {
    pub fn new(ctx: &TameContext, unit_exp: u64, varpi_exp: u64) -> MultChar {
        MultChar { unit_exp: unit_exp % ctx.qm1(), varpi_exp: varpi_exp % ctx.order, qm1: ctx.qm1(), order: ctx.order }
    }

    pub fn trivial(ctx: &TameContext) -> MultChar {
        Self::new(ctx, 0, 0)
    }

    /// Character with chi(varpi) = zeta_N^{num N / den}.
    pub fn from_config(ctx: &TameContext, unit_exp: i64, varpi_num: i64, varpi_den: i64) -> Result<MultChar, CharError> {
        let n = ctx.order as i64;
        if varpi_den <= 0 || n % varpi_den != 0 {
            return Err(CharError::BadVarpi(varpi_den));
        }
        let k = (varpi_num * (n / varpi_den)).rem_euclid(n);
        Ok(Self::new(ctx, unit_exp.rem_euclid(ctx.qm1() as i64) as u64, k as u64))
    }

    /// Unramified character with chi(varpi) = zeta_N^k.
    pub fn unramified(ctx: &TameContext, k: i64) -> MultChar {
        Self::new(ctx, 0, k.rem_euclid(ctx.order as i64) as u64)
    }

    /// Exponent e with chi(x) = zeta_N^e.
    pub fn exponent_at(&self, x: FStarClass) -> u64 {
        let n = self.order as i128;
        let step = n / self.qm1 as i128;
        let e = self.varpi_exp as i128 * x.val as i128 + self.unit_exp as i128 * x.unit_dlog as i128 * step;
        e.rem_euclid(n) as u64
    }

    pub fn eval(&self, ctx: &TameContext, x: FStarClass) -> CycNumber {
        ctx.zeta(self.exponent_at(x) as i64)
    }

    pub fn at_varpi(&self, ctx: &TameContext) -> CycNumber {
        ctx.zeta(self.varpi_exp as i64)
    }

    pub fn mul(&self, o: &MultChar) -> MultChar {
        MultChar {
            unit_exp: (self.unit_exp + o.unit_exp) % self.qm1,
            varpi_exp: (self.varpi_exp + o.varpi_exp) % self.order,
            qm1: self.qm1,
            order: self.order,
        }
    }

    pub fn inv(&self) -> MultChar {
        self.pow(-1)
    }

    pub fn pow(&self, e: i64) -> MultChar {
        MultChar {
            unit_exp: (self.unit_exp as i128 * e as i128).rem_euclid(self.qm1 as i128) as u64,
            varpi_exp: (self.varpi_exp as i128 * e as i128).rem_euclid(self.order as i128) as u64,
            qm1: self.qm1,
            order: self.order,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.unit_exp == 0 && self.varpi_exp == 0
    }

    pub fn is_ramified(&self, _ctx: &TameContext) -> bool {
        self.unit_exp != 0
    }

    /// e(chi) in {0, 1}.
    pub fn conductor(&self) -> i64 {
        if self.unit_exp == 0 {
            0
        } else {
            1
        }
    }

    /// Order of the restriction to the units.
    pub fn unit_order(&self, _ctx: &TameContext) -> u64 {
        self.qm1 / num_integer::gcd(self.unit_exp, self.qm1)
    }

    /// Whether chi is trivial on F*^m, and the order of chi restricted to F*^m.
    pub fn restriction_tests(&self, m: u64) -> (bool, u64) {
        let dk = (m as u128 * self.varpi_exp as u128 % self.order as u128) as u64;
        let dj = (m as u128 * self.unit_exp as u128 % self.qm1 as u128) as u64;
        let ok = self.order / num_integer::gcd(dk, self.order);
        let oj = self.qm1 / num_integer::gcd(dj, self.qm1);
        (dk == 0 && dj == 0, num_integer::lcm(ok, oj))
    }
}

/// psi_a(x) = psi(a x) relative to the normalized psi with residue character zeta_p^{Tr}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AddCharTwist {
    pub a: FStarClass,
}

impl AddCharTwist {
    pub fn normalized(ctx: &TameContext) -> AddCharTwist {
        AddCharTwist { a: ctx.one_class() }
    }

    pub fn new(a: FStarClass) -> AddCharTwist {
        AddCharTwist { a }
    }

    /// e(psi_a) = -v(a).
    pub fn conductor(&self) -> i64 {
        -self.a.val
    }

    /// (psi_a)_b = psi_{ab}.
    pub fn twist(&self, ctx: &TameContext, b: FStarClass) -> AddCharTwist {
        AddCharTwist { a: ctx.cmul(self.a, b) }
    }
}

/// The inducing data of sigma: chi, psi and the cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenuineCharData {
    pub chi: MultChar,
    pub psi: AddCharTwist,
    pub cover: CoverParams,
}

impl GenuineCharData {
    pub fn new(chi: MultChar, psi: AddCharTwist, cover: CoverParams) -> GenuineCharData {
        GenuineCharData { chi, psi, cover }
    }

    /// chi_psi as a function on F*.
    pub fn chi_psi_eval(&self, ctx: &TameContext, x: FStarClass) -> CycNumber {
        let v = self.chi.eval(ctx, x);
        if self.cover.even {
            &v * &weil_gamma_psi(ctx, self.psi, x).inv().expect("root of unity")
        } else {
            v
        }
    }

    /// Same sigma: the restrictions to F*^d agree.
    pub fn same_sigma(&self, other: &GenuineCharData, ctx: &TameContext) -> bool {
        self.psi == other.psi && ctx.n() == self.cover.n && self.chi.mul(&other.chi.inv()).restriction_tests(self.cover.d).0
    }
}

/// eta'_x = eta_x^{(d+1)/2}, defined for n = 2 mod 4.
pub fn eta_prime(ctx: &TameContext, x: FStarClass) -> Result<MultChar, CharError> {
    if !ctx.cover.even {
        return Err(CharError::OddCover);
    }
    Ok(ctx.eta(x).pow(((ctx.d() + 1) / 2) as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ctx(p: u64, f: u32, n: u64) -> TameContext {
        TameContext::new(p, f, n, None).unwrap()
    }

    #[test]
    fn evaluation() {
        let c = ctx(7, 1, 3);
        let triv = MultChar::trivial(&c);
        assert!(triv.eval(&c, c.class(3, 4)).is_one());
        let quad = MultChar::new(&c, 3, 0);
        assert_eq!(quad.eval(&c, c.unit_class(c.field.generator())), c.int(-1));
        for a in 0..6 {
            for b in 0..6 {
                let chi = MultChar::new(&c, 1, 5);
                let (x, y) = (c.class(a - 2, b), c.class(b, a * 2));
                assert_eq!(chi.eval(&c, c.cmul(x, y)), chi.eval(&c, x) * chi.eval(&c, y));
            }
        }
    }

    #[test]
    fn conductors() {
        let c = ctx(7, 1, 3);
        assert_eq!(MultChar::unramified(&c, 5).conductor(), 0);
        for j in 1..6 {
            assert_eq!(MultChar::new(&c, j, 0).conductor(), 1);
        }
        assert_eq!(AddCharTwist::new(c.class(-2, 0)).conductor(), 2);
        assert_eq!(AddCharTwist::normalized(&c).conductor(), 0);
    }

    #[test]
    fn restrictions() {
        let c = ctx(7, 1, 3);
        assert_eq!(MultChar::trivial(&c).restriction_tests(3), (true, 1));
        for x in c.class_group(3).unwrap() {
            assert!(c.eta(x).restriction_tests(3).0);
        }
        // chi'' of order 2 exactly when chi^3 is quadratic; oracle by direct evaluation on cubes
        for j in 0..6u64 {
            let chi = MultChar::new(&c, j, 0);
            let (_, ord) = chi.restriction_tests(3);
            let mut brute = 1;
            while !(0..6).all(|u| chi.eval(&c, c.cpow(c.class(1, u), 3)).pow(brute).unwrap().is_one()) {
                brute += 1;
            }
            assert_eq!(ord as i64, brute);
            assert_eq!(ord == 2, chi.pow(3).unit_order(&c) == 2);
        }
    }

    #[test]
    fn from_config_validation() {
        let c = ctx(7, 1, 3);
        let chi = MultChar::from_config(&c, 1, 1, 6).unwrap();
        assert_eq!(chi.at_varpi(&c), c.root(6, 1));
        assert!(MultChar::from_config(&c, 1, 1, 5).is_err());
    }

    #[test]
    fn eta_prime_properties() {
        let c = ctx(7, 1, 6);
        assert!(eta_prime(&c, c.one_class()).unwrap().is_trivial());
        let mut seen = HashSet::new();
        let cls = c.class_group(c.d()).unwrap();
        for &x in &cls {
            let e = eta_prime(&c, x).unwrap();
            for &y in &cls {
                assert_eq!(e.pow(2).eval(&c, y), c.eta(x).eval(&c, y));
            }
            seen.insert(cls.iter().map(|&y| e.exponent_at(y)).collect::<Vec<_>>());
        }
        assert_eq!(seen.len(), cls.len());
        assert_eq!(eta_prime(&ctx(7, 1, 3), c.one_class()), Err(CharError::OddCover));
    }

    #[test]
    fn extensions_exhausted() {
        // {chi eta_y} is the set of all characters agreeing with chi on F*^d
        for (p, n) in [(7u64, 3u64), (7, 6), (5, 2)] {
            let c = ctx(p, 1, n);
            let d = c.d();
            let chi = MultChar::new(&c, 1, 0);
            let twists: HashSet<MultChar> = c.class_group(d).unwrap().iter().map(|&y| chi.mul(&c.eta(y))).collect();
            let mut all = HashSet::new();
            for j in 0..c.qm1() {
                for k in 0..c.order {
                    let other = MultChar::new(&c, j, k);
                    if other.mul(&chi.inv()).restriction_tests(d).0 {
                        all.insert(other);
                    }
                }
            }
            assert_eq!(twists, all);
            assert_eq!(all.len() as u64, d * d);
        }
    }

    #[test]
    fn chi_psi_quasi_linear() {
        for (p, f, n) in [(7u64, 1u32, 6u64), (5, 1, 2), (3, 2, 2), (11, 1, 10)] {
            let c = ctx(p, f, n);
            let data = GenuineCharData::new(MultChar::new(&c, 1, 3), AddCharTwist::normalized(&c), c.cover);
            for x in c.class_group(2).unwrap() {
                if x.val == 0 {
                    assert_eq!(data.chi_psi_eval(&c, x), data.chi.eval(&c, x));
                }
                for y in c.class_group(2).unwrap() {
                    let lhs = data.chi_psi_eval(&c, c.cmul(x, y));
                    let rhs = data.chi_psi_eval(&c, x)
                        * data.chi_psi_eval(&c, y)
                        * c.hilbert_symbol(2, x, y).inv().unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let c = ctx(7, 1, 3);
        let data = GenuineCharData::new(MultChar::new(&c, 2, 1), AddCharTwist::normalized(&c), c.cover);
        assert_eq!(data.chi_psi_eval(&c, c.class(1, 1)), data.chi.eval(&c, c.class(1, 1)));
    }

    #[test]
    fn chi_psi_twisted_psi() {
        // chi_{psi_x} = ((.,x)_2 chi)_psi
        for (p, f, n) in [(7u64, 1u32, 6u64), (3, 2, 2), (13, 1, 6)] {
            let c = ctx(p, f, n);
            let chi = MultChar::new(&c, 1, 2);
            for x in c.class_group(2).unwrap() {
                let lhs = GenuineCharData::new(chi, AddCharTwist::new(x), c.cover);
                let twisted = chi.mul(&c.eta_m(x, 2).inv());
                let rhs = GenuineCharData::new(twisted, AddCharTwist::normalized(&c), c.cover);
                for y in c.class_group(2).unwrap() {
                    for extra in [c.one_class(), c.class(2, 0), c.class(0, 2)] {
                        let z = c.cmul(y, extra);
                        assert_eq!(lhs.chi_psi_eval(&c, z), rhs.chi_psi_eval(&c, z));
                    }
                }
            }
        }
    }
}
