//! Finite fields GF(q) and GF(q^v) in discrete-log form.
//!
//! Elements of GF(q^v) are exponents of a fixed primitive root `g` of the
//! modulus, with a tagged zero. Addition goes through a Zech table:
//! `g^zech(i) = g^i + 1`. The base field GF(q), q = p^e, is built first and
//! the extension coefficients live over it.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest multiplicative order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 26;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("modulus is not irreducible")]
    NotIrreducible,
    #[error("root of the modulus is not primitive")]
    NotPrimitive,
    #[error("multiplicative order {0} exceeds the table guard")]
    TooLarge(u64),
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("division by zero")]
    DivideByZero,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo a prime `p`.
pub fn smallest_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p as u64 - 1);
    (2..p)
        .find(|&r| {
            factors
                .iter()
                .all(|&f| pow_mod(r as u64, (p as u64 - 1) / f, p as u64) != 1)
        })
        .expect("every prime has a primitive root")
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Coefficient arithmetic used by the polynomial routines.
trait Coeffs {
    fn size(&self) -> u64;
    fn add(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

struct PrimeField(u32);

impl Coeffs for PrimeField {
    fn size(&self) -> u64 {
        self.0 as u64
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }
    fn neg(&self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.0 as u64) as u32
    }
    fn inv(&self, a: u32) -> u32 {
        pow_mod(a as u64, self.0 as u64 - 2, self.0 as u64) as u32
    }
}

// Dense polynomials, little-endian, no trailing zeros (zero polynomial = []).

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem<C: Coeffs>(c: &C, a: &[u32], f: &[u32]) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = c.inv(f[df]);
    while r.len() > df {
        let top = r.len() - 1;
        let factor = c.mul(r[top], lead_inv);
        let shift = top - df;
        for (i, &fi) in f.iter().enumerate() {
            r[shift + i] = c.sub(r[shift + i], c.mul(factor, fi));
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod<C: Coeffs>(c: &C, a: &[u32], b: &[u32], f: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = c.add(out[i + j], c.mul(x, y));
        }
    }
    poly_rem(c, &out, f)
}

fn poly_powmod<C: Coeffs>(c: &C, base: &[u32], mut e: u64, f: &[u32]) -> Vec<u32> {
    let mut result = poly_rem(c, &[1], f);
    let mut b = poly_rem(c, base, f);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(c, &result, &b, f);
        }
        b = poly_mulmod(c, &b, &b, f);
        e >>= 1;
    }
    result
}

fn poly_gcd<C: Coeffs>(c: &C, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(c, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test for a monic polynomial of degree n ≥ 1.
fn is_irreducible<C: Coeffs>(c: &C, f: &[u32]) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut powers = Vec::with_capacity(n + 1);
    let mut h = poly_rem(c, &x, f);
    powers.push(h.clone());
    for _ in 0..n {
        h = poly_powmod(c, &h, c.size(), f);
        powers.push(h.clone());
    }
    if powers[n] != poly_rem(c, &x, f) {
        return false;
    }
    for r in prime_factors(n as u64) {
        let hi = &powers[n / r as usize];
        let mut diff = hi.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = c.sub(diff[1], 1);
        let g = poly_gcd(c, &trim(diff), f);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn encode(digits: &[u32], q: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * q + d)
}

/// Powers of x modulo `f` as coefficient codes, or `None` when x does not
/// have order `size^deg - 1`.
fn power_table<C: Coeffs>(c: &C, f: &[u32]) -> Option<Vec<u32>> {
    let n = f.len() - 1;
    let q = c.size() as u32;
    let order = (c.size().pow(n as u32) - 1) as usize;
    let mut exp = Vec::with_capacity(order);
    let mut digits = vec![0u32; n];
    digits[0] = 1;
    for i in 0..order {
        let code = encode(&digits, q);
        if i > 0 && code == 1 {
            return None;
        }
        exp.push(code);
        let top = digits[n - 1];
        for j in (1..n).rev() {
            digits[j] = digits[j - 1];
        }
        digits[0] = 0;
        if top != 0 {
            for (j, d) in digits.iter_mut().enumerate() {
                *d = c.sub(*d, c.mul(top, f[j]));
            }
        }
    }
    if encode(&digits, q) != 1 {
        return None;
    }
    Some(exp)
}

fn invert_table(exp: &[u32], size: usize) -> Vec<u32> {
    let mut log = vec![NONE; size];
    for (i, &code) in exp.iter().enumerate() {
        log[code as usize] = i as u32;
    }
    log
}

/// GF(q) with q = p^e. Elements are coefficient codes `sum c_i p^i` over the
/// basis 1, b, .., b^(e-1) where b is a root of the base modulus; code 0 is
/// zero and code 1 is one.
#[derive(Debug, Clone)]
pub struct BaseField {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl BaseField {
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::BadModulus("base degree must be positive".into()));
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 - 1 > MAX_ORDER {
            return Err(FieldError::TooLarge(q64 - 1));
        }
        let q = q64 as u32;
        let pf = PrimeField(p);
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 || m[e as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus(format!(
                        "base modulus must be monic of degree {e} with residues below {p}"
                    )));
                }
                m.to_vec()
            }
            None if e == 1 => vec![p - smallest_primitive_root(p), 1],
            None => Self::first_primitive(p, e)?,
        };
        if !is_irreducible(&pf, &modulus) {
            return Err(FieldError::NotIrreducible);
        }
        let exp = power_table(&pf, &modulus).ok_or(FieldError::NotPrimitive)?;
        let log = invert_table(&exp, q as usize);
        Ok(BaseField { p, e, q, modulus, exp, log })
    }

    /// First primitive polynomial of degree e over GF(p), ordered by the code
    /// of its lower coefficients.
    fn first_primitive(p: u32, e: u32) -> Result<Vec<u32>, FieldError> {
        let pf = PrimeField(p);
        let count = p.pow(e);
        for code in 1..count {
            let mut m: Vec<u32> = (0..e).map(|i| code / p.pow(i) % p).collect();
            if m[0] == 0 {
                continue;
            }
            m.push(1);
            if is_irreducible(&pf, &m) && power_table(&pf, &m).is_some() {
                return Ok(m);
            }
        }
        Err(FieldError::NotPrimitive)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// b^i as a code.
    pub fn power(&self, i: u32) -> u32 {
        self.exp[(i % (self.q - 1)) as usize]
    }

    /// Discrete log of a nonzero code.
    pub fn log(&self, code: u32) -> Option<u32> {
        match self.log.get(code as usize) {
            Some(&l) if l != NONE => Some(l),
            _ => None,
        }
    }
}

impl Coeffs for BaseField {
    fn size(&self) -> u64 {
        self.q as u64
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.e {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }
    fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        for _ in 0..self.e {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.q as u64 - 1)) as usize]
    }
    fn inv(&self, a: u32) -> u32 {
        let l = self.log[a as usize];
        self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]
    }
}

/// Serializable description of GF(q^v): `modulus` lists c_0..c_v, each the
/// exponent of the coefficient with respect to the base generator, `null`
/// meaning zero. `base_modulus` (residues mod p, c_0..c_e) is only read when
/// e > 1; without it the first primitive polynomial is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub e: u32,
    pub v: u32,
    pub modulus: Vec<Option<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_modulus: Option<Vec<u32>>,
}

impl FieldDescriptor {
    /// Descriptor for GF(p^v) from plain residues c_0..c_v.
    pub fn prime(p: u32, v: u32, coeffs: &[u32]) -> Result<Self, FieldError> {
        let base = BaseField::new(p, 1, None)?;
        let modulus = coeffs
            .iter()
            .map(|&c| if c % p == 0 { None } else { base.log(c % p) })
            .collect::<Vec<_>>();
        Ok(FieldDescriptor { p, e: 1, v, modulus, base_modulus: None })
    }

    pub fn build(&self) -> Result<FieldContext, FieldError> {
        FieldContext::build(self.clone())
    }
}

/// GF(q^v) with a primitive modulus and eager log, antilog and Zech tables.
#[derive(Debug, Clone)]
pub struct FieldContext {
    id: u64,
    descriptor: FieldDescriptor,
    base: BaseField,
    v: u32,
    modulus: Vec<u32>,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rep {
    Zero,
    Exp(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    ctx: u64,
    rep: Rep,
}

impl FieldElement {
    pub fn rep(&self) -> Rep {
        self.rep
    }
    pub fn exponent(&self) -> Option<u32> {
        match self.rep {
            Rep::Zero => None,
            Rep::Exp(i) => Some(i),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.rep == Rep::Zero
    }
}

/// Builds GF(q^v), q = p^e, from exponent-or-zero coefficients c_0..c_v.
pub fn build_field(p: u32, e: u32, v: u32, modulus: &[Option<u32>]) -> Result<FieldContext, FieldError> {
    FieldContext::build(FieldDescriptor { p, e, v, modulus: modulus.to_vec(), base_modulus: None })
}

impl FieldContext {
    pub fn build(descriptor: FieldDescriptor) -> Result<Self, FieldError> {
        let FieldDescriptor { p, e, v, .. } = descriptor;
        if v == 0 {
            return Err(FieldError::BadModulus("extension degree must be positive".into()));
        }
        let base = BaseField::new(p, e, descriptor.base_modulus.as_deref().filter(|_| e > 1))?;
        let q = base.q as u64;
        let order = q.checked_pow(v).map(|n| n - 1).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        if descriptor.modulus.len() != v as usize + 1 {
            return Err(FieldError::BadModulus(format!(
                "expected {} coefficients, got {}",
                v + 1,
                descriptor.modulus.len()
            )));
        }
        let modulus: Vec<u32> = descriptor
            .modulus
            .iter()
            .map(|c| c.map_or(0, |i| base.power(i)))
            .collect();
        if modulus[v as usize] != 1 {
            return Err(FieldError::BadModulus("modulus must be monic".into()));
        }
        if modulus[0] == 0 {
            return Err(FieldError::NotIrreducible);
        }
        if !is_irreducible(&base, &modulus) {
            return Err(FieldError::NotIrreducible);
        }
        let exp = power_table(&base, &modulus).ok_or(FieldError::NotPrimitive)?;
        let log = invert_table(&exp, order as usize + 1);
        let zech: Vec<u32> = exp
            .iter()
            .map(|&code| {
                let d0 = code % base.q;
                log[(code - d0 + base.add(d0, 1)) as usize]
            })
            .collect();
        let mut h = DefaultHasher::new();
        (p, e, v, &modulus, base.modulus()).hash(&mut h);
        Ok(FieldContext {
            id: h.finish(),
            descriptor,
            base,
            v,
            modulus,
            order: order as u32,
            exp,
            log,
            zech,
        })
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.descriptor
    }
    pub fn base(&self) -> &BaseField {
        &self.base
    }
    pub fn p(&self) -> u32 {
        self.base.p
    }
    pub fn q(&self) -> u32 {
        self.base.q
    }
    pub fn v(&self) -> u32 {
        self.v
    }
    /// q^v - 1.
    pub fn order(&self) -> u32 {
        self.order
    }
    /// Modulus coefficients as base-field codes.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn generator_exponent(&self) -> u32 {
        1
    }

    /// z with g^z = g^i + 1, or `None` when g^i = -1.
    #[inline]
    pub fn zech(&self, i: u32) -> Option<u32> {
        let z = self.zech[(i % self.order) as usize];
        (z != NONE).then_some(z)
    }

    /// g^a + g^b in exponent form; `None` is zero.
    #[inline]
    pub fn add_exp(&self, a: u32, b: u32) -> Option<u32> {
        let d = (b + self.order - a % self.order) % self.order;
        self.zech(d).map(|z| ((a as u64 + z as u64) % self.order as u64) as u32)
    }

    /// Exponent of -1.
    pub fn minus_one(&self) -> u32 {
        if self.p() == 2 {
            0
        } else {
            self.order / 2
        }
    }

    /// Coefficients of g^i over the base field (codes, c_0..c_{v-1}).
    pub fn coefficients(&self, i: u32) -> Vec<u32> {
        let mut code = self.exp[(i % self.order) as usize];
        (0..self.v)
            .map(|_| {
                let d = code % self.base.q;
                code /= self.base.q;
                d
            })
            .collect()
    }

    /// Element with the given coefficient codes.
    pub fn from_coefficients(&self, coeffs: &[u32]) -> FieldElement {
        let code = encode(coeffs, self.base.q);
        let rep = match self.log.get(code as usize) {
            Some(&l) if l != NONE => Rep::Exp(l),
            _ => Rep::Zero,
        };
        FieldElement { ctx: self.id, rep }
    }

    /// Exponents of the nonzero elements of GF(q) inside GF(q^v), ascending.
    pub fn scalar_exponents(&self) -> Vec<u32> {
        let mut s: Vec<u32> = (1..self.base.q).map(|c| self.log[c as usize]).collect();
        s.sort_unstable();
        s
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { ctx: self.id, rep: Rep::Zero }
    }
    pub fn one(&self) -> FieldElement {
        self.element(0)
    }
    pub fn generator(&self) -> FieldElement {
        self.element(1)
    }
    pub fn element(&self, i: u64) -> FieldElement {
        FieldElement { ctx: self.id, rep: Rep::Exp((i % self.order as u64) as u32) }
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.ctx == self.id {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        let rep = match (a.rep, b.rep) {
            (Rep::Zero, r) | (r, Rep::Zero) => r,
            (Rep::Exp(x), Rep::Exp(y)) => self.add_exp(x, y).map_or(Rep::Zero, Rep::Exp),
        };
        Ok(FieldElement { ctx: self.id, rep })
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        Ok(match a.rep {
            Rep::Zero => a,
            Rep::Exp(x) => self.element(x as u64 + self.minus_one() as u64),
        })
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(match (a.rep, b.rep) {
            (Rep::Exp(x), Rep::Exp(y)) => self.element(x as u64 + y as u64),
            _ => self.zero(),
        })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        match a.rep {
            Rep::Zero => Err(FieldError::DivideByZero),
            Rep::Exp(x) => Ok(self.element((self.order - x) as u64)),
        }
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> Result<FieldElement, FieldError> {
        self.check(&a)?;
        Ok(match a.rep {
            Rep::Zero if n == 0 => self.one(),
            Rep::Zero => a,
            Rep::Exp(x) => self.element(x as u64 * (n % self.order as u64)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2(v: u32, ones: &[u32]) -> FieldContext {
        let mut c = vec![0u32; v as usize + 1];
        for &i in ones {
            c[i as usize] = 1;
        }
        FieldDescriptor::prime(2, v, &c).unwrap().build().unwrap()
    }

    #[test]
    fn gf128_rules() {
        let f = f2(7, &[0, 1, 7]);
        assert_eq!(f.order(), 127);
        assert_eq!(f.zech(1), Some(7));
        assert_eq!(f.zech(0), None);
        let g2 = f.element(2);
        assert_eq!(f.add(g2, f.one()).unwrap(), f.element(14));
        assert_eq!(f.add(g2, f.zero()).unwrap(), g2);
        assert_eq!(f.inv(f.generator()).unwrap(), f.element(126));
        assert_eq!(f.mul(f.element(5), f.element(9)).unwrap(), f.element(14));
    }

    #[test]
    fn gf243_rules() {
        let f = FieldDescriptor::prime(3, 5, &[1, 2, 0, 0, 0, 1]).unwrap().build().unwrap();
        assert_eq!(f.order(), 242);
        let g = f.generator();
        let two = f.add(f.one(), f.one()).unwrap();
        assert_eq!(f.add(g, two).unwrap(), f.element(5));
        assert_eq!(f.add(f.element(3), g).unwrap(), f.element(47));
        assert_eq!(f.minus_one(), 121);
    }

    #[test]
    fn trivial_field() {
        let f = FieldDescriptor::prime(2, 1, &[1, 1]).unwrap().build().unwrap();
        assert_eq!(f.order(), 1);
        assert_eq!(f.zech(0), None);
    }

    #[test]
    fn gf8192_power() {
        let f = f2(13, &[0, 9, 10, 12, 13]);
        assert_eq!(f.pow(f.generator(), 8191).unwrap(), f.one());
    }

    #[test]
    fn rejects_bad_moduli() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible with a root of order 5.
        let d = FieldDescriptor::prime(2, 4, &[1, 1, 1, 1, 1]).unwrap();
        assert_eq!(d.build().unwrap_err(), FieldError::NotPrimitive);
        let d = FieldDescriptor::prime(2, 4, &[1, 0, 1, 0, 1]).unwrap();
        assert_eq!(d.build().unwrap_err(), FieldError::NotIrreducible);
        let d = FieldDescriptor::prime(2, 27, &[1; 28]).unwrap();
        assert!(matches!(d.build().unwrap_err(), FieldError::TooLarge(_)));
    }

    #[test]
    fn context_mismatch() {
        let a = f2(4, &[0, 1, 4]);
        let b = f2(4, &[0, 3, 4]);
        assert_eq!(a.add(a.one(), b.one()).unwrap_err(), FieldError::ContextMismatch);
        assert_eq!(a.inv(a.zero()).unwrap_err(), FieldError::DivideByZero);
    }

    #[test]
    fn tower_over_gf4() {
        let base = BaseField::new(2, 2, None).unwrap();
        assert_eq!(base.modulus(), &[1, 1, 1]);
        // x^2 + x + b over GF(4), b a root of the base modulus.
        let f = FieldContext::build(FieldDescriptor {
            p: 2,
            e: 2,
            v: 2,
            modulus: vec![Some(1), Some(0), Some(0)],
            base_modulus: None,
        })
        .unwrap();
        assert_eq!(f.order(), 15);
        assert_eq!(f.scalar_exponents(), vec![0, 5, 10]);
    }
}
