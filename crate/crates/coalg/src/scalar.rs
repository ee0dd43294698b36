//! Exact commutative coefficient rings.
//!
//! A [`RingSpec`] names one of five ring kinds: the integers, the
//! rationals, modular residues `Z/n`, sparse polynomial rings over a
//! ground ring, and monomial quotients `R[x,..]/(x^p)`. A [`Scalar`] is
//! an element of such a ring in canonical normal form, so equal ring
//! elements compare equal structurally.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{CoalgError, Result};

/// Description of a coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    Integers,
    Rationals,
    /// Residues modulo `n`, stored in `[0, n)`.
    Modular(u64),
    /// Sparse polynomials over a ground ring in the named variables.
    Poly { base: Box<RingSpec>, vars: Vec<String> },
    /// `base[vars]/(var^power)` where `base` is a `Poly` spec.
    MonomialQuotient {
        base: Box<RingSpec>,
        var: String,
        power: u32,
    },
}

impl RingSpec {
    pub fn modular(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(CoalgError::BadParameter(format!("modulus {n} < 2")));
        }
        Ok(RingSpec::Modular(n))
    }

    pub fn poly(base: RingSpec, vars: &[&str]) -> Result<Self> {
        if vars.is_empty() {
            return Err(CoalgError::BadParameter("polynomial ring needs at least one variable".into()));
        }
        if !base.is_ground() {
            return Err(CoalgError::BadParameter("polynomial base ring must be a ground ring".into()));
        }
        let mut names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let n = names.len();
        names.dedup();
        if names.len() != n {
            return Err(CoalgError::BadParameter("duplicate polynomial variable".into()));
        }
        Ok(RingSpec::Poly { base: Box::new(base), vars: vars.iter().map(|s| s.to_string()).collect() })
    }

    pub fn monomial_quotient(base: RingSpec, var: &str, power: u32) -> Result<Self> {
        if power < 1 {
            return Err(CoalgError::BadParameter("quotient power must be >= 1".into()));
        }
        match &base {
            RingSpec::Poly { vars, .. } if vars.iter().any(|v| v == var) => Ok(RingSpec::MonomialQuotient {
                base: Box::new(base),
                var: var.to_string(),
                power,
            }),
            RingSpec::Poly { .. } => Err(CoalgError::BadParameter(format!("quotient variable {var} not in base ring"))),
            _ => Err(CoalgError::BadParameter("monomial quotient base must be a polynomial ring".into())),
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, RingSpec::Integers | RingSpec::Rationals | RingSpec::Modular(_))
    }

    /// Variables of polynomial-like rings, empty for ground rings.
    pub fn vars(&self) -> &[String] {
        match self {
            RingSpec::Poly { vars, .. } => vars,
            RingSpec::MonomialQuotient { base, .. } => base.vars(),
            _ => &[],
        }
    }

    /// The ground ring at the bottom of the spec.
    pub fn ground(&self) -> &RingSpec {
        match self {
            RingSpec::Poly { base, .. } => base,
            RingSpec::MonomialQuotient { base, .. } => base.ground(),
            other => other,
        }
    }

    /// Index and power of the quotient variable, if any.
    fn quotient_rule(&self) -> Option<(usize, u32)> {
        match self {
            RingSpec::MonomialQuotient { base, var, power } => {
                let idx = base.vars().iter().position(|v| v == var)?;
                Some((idx, *power))
            }
            _ => None,
        }
    }

    /// Characteristic of the ring (0 for Z, Q and polynomial rings over them).
    pub fn characteristic(&self) -> u64 {
        match self {
            RingSpec::Integers | RingSpec::Rationals => 0,
            RingSpec::Modular(n) => *n,
            RingSpec::Poly { base, .. } => base.characteristic(),
            RingSpec::MonomialQuotient { base, .. } => base.characteristic(),
        }
    }

    /// True for rings known to be integral domains.
    pub fn is_integral_domain(&self) -> bool {
        match self {
            RingSpec::Integers | RingSpec::Rationals => true,
            RingSpec::Modular(n) => is_prime(*n),
            RingSpec::Poly { base, .. } => base.is_integral_domain(),
            RingSpec::MonomialQuotient { .. } => false,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingSpec::Rationals) || matches!(self, RingSpec::Modular(n) if is_prime(*n))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "ZZ"),
            RingSpec::Rationals => write!(f, "QQ"),
            RingSpec::Modular(n) => write!(f, "Z/{n}"),
            RingSpec::Poly { base, vars } => write!(f, "{}[{}]", base, vars.join(",")),
            RingSpec::MonomialQuotient { base, var, power } => {
                write!(f, "{}/({}^{})", base, var, power)
            }
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Canonical internal representation of a ring element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Repr {
    Int(BigInt),
    Rat(BigRational),
    Mod(u64),
    /// Sparse polynomial: exponent vector (aligned with the ring's
    /// variable list) to nonzero ground coefficient.
    Poly(BTreeMap<Vec<u32>, Repr>),
}

/// An exact element of a declared coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    ring: Arc<RingSpec>,
    repr: Repr,
}

/// Verdict of the regular-element oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    ZeroDivisor(Scalar),
    Unknown,
}

fn mod_reduce(x: &BigInt, n: u64) -> u64 {
    let m = BigInt::from(n);
    let r = x.mod_floor(&m);
    let (_, digits) = r.to_u64_digits();
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

// Ground-ring arithmetic on bare representations.
fn ground_zero(g: &RingSpec) -> Repr {
    match g {
        RingSpec::Integers => Repr::Int(BigInt::zero()),
        RingSpec::Rationals => Repr::Rat(BigRational::zero()),
        RingSpec::Modular(_) => Repr::Mod(0),
        _ => unreachable!("ground ring expected"),
    }
}

fn ground_from_rat(g: &RingSpec, q: &BigRational) -> Result<Repr> {
    match g {
        RingSpec::Integers => {
            if q.denom().is_one() {
                Ok(Repr::Int(q.numer().clone()))
            } else {
                Err(CoalgError::Parse(format!("{q} is not an integer")))
            }
        }
        RingSpec::Rationals => Ok(Repr::Rat(q.clone())),
        RingSpec::Modular(n) => {
            let num = mod_reduce(q.numer(), *n);
            if q.denom().is_one() {
                return Ok(Repr::Mod(num));
            }
            let den = mod_reduce(q.denom(), *n);
            match mod_inverse(den, *n) {
                Some(inv) => Ok(Repr::Mod(mod_mul(num, inv, *n))),
                None => Err(CoalgError::Parse(format!("denominator {} is not invertible mod {}", q.denom(), n))),
            }
        }
        _ => unreachable!("ground ring expected"),
    }
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    // extended Euclid on (a, n)
    let (mut r0, mut r1) = (a as i128, n as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

fn ground_add(g: &RingSpec, a: &Repr, b: &Repr) -> Repr {
    match (g, a, b) {
        (RingSpec::Integers, Repr::Int(x), Repr::Int(y)) => Repr::Int(x + y),
        (RingSpec::Rationals, Repr::Rat(x), Repr::Rat(y)) => Repr::Rat(x + y),
        (RingSpec::Modular(n), Repr::Mod(x), Repr::Mod(y)) => Repr::Mod(((x + y) as u128 % *n as u128) as u64),
        _ => unreachable!("mismatched ground representation"),
    }
}

fn ground_neg(g: &RingSpec, a: &Repr) -> Repr {
    match (g, a) {
        (RingSpec::Integers, Repr::Int(x)) => Repr::Int(-x),
        (RingSpec::Rationals, Repr::Rat(x)) => Repr::Rat(-x),
        (RingSpec::Modular(n), Repr::Mod(x)) => Repr::Mod(if *x == 0 { 0 } else { n - x }),
        _ => unreachable!("mismatched ground representation"),
    }
}

fn ground_mul(g: &RingSpec, a: &Repr, b: &Repr) -> Repr {
    match (g, a, b) {
        (RingSpec::Integers, Repr::Int(x), Repr::Int(y)) => Repr::Int(x * y),
        (RingSpec::Rationals, Repr::Rat(x), Repr::Rat(y)) => Repr::Rat(x * y),
        (RingSpec::Modular(n), Repr::Mod(x), Repr::Mod(y)) => Repr::Mod(mod_mul(*x, *y, *n)),
        _ => unreachable!("mismatched ground representation"),
    }
}

fn ground_is_zero(a: &Repr) -> bool {
    match a {
        Repr::Int(x) => x.is_zero(),
        Repr::Rat(x) => x.is_zero(),
        Repr::Mod(x) => *x == 0,
        Repr::Poly(_) => unreachable!("ground representation expected"),
    }
}

fn poly_normalize(terms: BTreeMap<Vec<u32>, Repr>, quot: Option<(usize, u32)>) -> BTreeMap<Vec<u32>, Repr> {
    terms
        .into_iter()
        .filter(|(exps, coeff)| {
            if ground_is_zero(coeff) {
                return false;
            }
            match quot {
                Some((idx, power)) => exps[idx] < power,
                None => true,
            }
        })
        .collect()
}

impl Scalar {
    fn new(ring: Arc<RingSpec>, repr: Repr) -> Self {
        Scalar { ring, repr }
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn zero(ring: &Arc<RingSpec>) -> Self {
        let repr = match ring.as_ref() {
            g if g.is_ground() => ground_zero(g),
            _ => Repr::Poly(BTreeMap::new()),
        };
        Scalar::new(ring.clone(), repr)
    }

    pub fn one(ring: &Arc<RingSpec>) -> Self {
        Scalar::from_i64(ring, 1)
    }

    pub fn from_i64(ring: &Arc<RingSpec>, value: i64) -> Self {
        Scalar::from_bigint(ring, &BigInt::from(value))
    }

    pub fn from_bigint(ring: &Arc<RingSpec>, value: &BigInt) -> Self {
        let q = BigRational::from(value.clone());
        Scalar::from_rational(ring, &q).expect("integers embed in every ring")
    }

    /// Embed a rational constant; fails when the denominator is not
    /// invertible in the target ring.
    pub fn from_rational(ring: &Arc<RingSpec>, q: &BigRational) -> Result<Self> {
        let repr = match ring.as_ref() {
            g if g.is_ground() => ground_from_rat(g, q)?,
            poly => {
                let ground = poly.ground();
                let c = ground_from_rat(ground, q)?;
                if ground_is_zero(&c) {
                    Repr::Poly(BTreeMap::new())
                } else {
                    let exps = vec![0u32; poly.vars().len()];
                    Repr::Poly(BTreeMap::from([(exps, c)]))
                }
            }
        };
        Ok(Scalar::new(ring.clone(), repr))
    }

    /// The monomial `var^exp` with coefficient 1.
    pub fn monomial(ring: &Arc<RingSpec>, var: &str, exp: u32) -> Result<Self> {
        let vars = ring.vars();
        let idx = vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| CoalgError::BadParameter(format!("unknown variable {var} in {ring}")))?;
        let mut exps = vec![0u32; vars.len()];
        exps[idx] = exp;
        if let Some((qidx, power)) = ring.quotient_rule() {
            if qidx == idx && exp >= power {
                return Ok(Scalar::zero(ring));
            }
        }
        let one = ground_from_rat(ring.ground(), &BigRational::one())?;
        Ok(Scalar::new(ring.clone(), Repr::Poly(BTreeMap::from([(exps, one)]))))
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Poly(m) => m.is_empty(),
            r => ground_is_zero(r),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one(&self.ring)
    }

    fn check_ring(&self, other: &Scalar) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(CoalgError::RingMismatch(self.ring.to_string(), other.ring.to_string()))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Poly(a), Repr::Poly(b)) => {
                let g = self.ring.ground();
                let mut out = a.clone();
                for (exps, coeff) in b {
                    let entry = out.entry(exps.clone()).or_insert_with(|| ground_zero(g));
                    *entry = ground_add(g, entry, coeff);
                }
                Repr::Poly(poly_normalize(out, self.ring.quotient_rule()))
            }
            (a, b) => ground_add(&self.ring, a, b),
        };
        Ok(Scalar::new(self.ring.clone(), repr))
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            Repr::Poly(a) => {
                let g = self.ring.ground();
                Repr::Poly(a.iter().map(|(e, c)| (e.clone(), ground_neg(g, c))).collect())
            }
            r => ground_neg(&self.ring, r),
        };
        Scalar::new(self.ring.clone(), repr)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Poly(a), Repr::Poly(b)) => {
                let g = self.ring.ground();
                let quot = self.ring.quotient_rule();
                let mut out: BTreeMap<Vec<u32>, Repr> = BTreeMap::new();
                for (ea, ca) in a {
                    for (eb, cb) in b {
                        let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        if let Some((idx, power)) = quot {
                            if exps[idx] >= power {
                                continue;
                            }
                        }
                        let c = ground_mul(g, ca, cb);
                        let entry = out.entry(exps).or_insert_with(|| ground_zero(g));
                        *entry = ground_add(g, entry, &c);
                    }
                }
                Repr::Poly(poly_normalize(out, quot))
            }
            (a, b) => ground_mul(&self.ring, a, b),
        };
        Ok(Scalar::new(self.ring.clone(), repr))
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one(&self.ring);
        for _ in 0..n {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Multiplicative inverse, when one exists and is recognised.
    pub fn inverse(&self) -> Option<Scalar> {
        match (&*self.ring, &self.repr) {
            (RingSpec::Integers, Repr::Int(x)) => {
                if x.is_one() || (-x).is_one() {
                    Some(self.clone())
                } else {
                    None
                }
            }
            (RingSpec::Rationals, Repr::Rat(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::new(self.ring.clone(), Repr::Rat(x.recip())))
                }
            }
            (RingSpec::Modular(n), Repr::Mod(x)) => {
                mod_inverse(*x, *n).map(|inv| Scalar::new(self.ring.clone(), Repr::Mod(inv)))
            }
            _ => {
                // constant polynomials invert through the ground ring
                let c = self.constant_coefficient()?;
                let inv = c.inverse()?;
                Scalar::from_rational_ground(&self.ring, &inv)
            }
        }
    }

    /// For polynomial rings: the constant term as a ground-ring scalar,
    /// `None` when the element is not constant.
    fn constant_coefficient(&self) -> Option<Scalar> {
        if let Repr::Poly(m) = &self.repr {
            let ground = Arc::new(self.ring.ground().clone());
            if m.is_empty() {
                return Some(Scalar::zero(&ground));
            }
            if m.len() == 1 {
                let (exps, c) = m.iter().next().unwrap();
                if exps.iter().all(|e| *e == 0) {
                    return Some(Scalar::new(ground, c.clone()));
                }
            }
            None
        } else {
            None
        }
    }

    fn from_rational_ground(ring: &Arc<RingSpec>, ground_value: &Scalar) -> Option<Scalar> {
        let exps = vec![0u32; ring.vars().len()];
        if ground_value.is_zero() {
            return Some(Scalar::zero(ring));
        }
        Some(Scalar::new(ring.clone(), Repr::Poly(BTreeMap::from([(exps, ground_value.repr.clone())]))))
    }

    /// Smallest `i >= 1` with `self^i = 0`, if the element is nilpotent.
    pub fn nilpotency_order(&self, max: u32) -> Option<u32> {
        let mut acc = self.clone();
        for i in 1..=max {
            if acc.is_zero() {
                return Some(i);
            }
            acc = acc.mul(self).expect("same ring");
        }
        if acc.is_zero() {
            Some(max + 1)
        } else {
            None
        }
    }

    /// Regular-element oracle. `Regular` and `ZeroDivisor` verdicts are
    /// proven; `Unknown` makes no claim.
    pub fn is_regular(&self) -> Regularity {
        if self.is_zero() {
            return Regularity::ZeroDivisor(Scalar::one(&self.ring));
        }
        match (&*self.ring, &self.repr) {
            (RingSpec::Integers, _) | (RingSpec::Rationals, _) => Regularity::Regular,
            (RingSpec::Modular(n), Repr::Mod(x)) => {
                let g = x.gcd(n);
                if g == 1 {
                    Regularity::Regular
                } else {
                    Regularity::ZeroDivisor(Scalar::new(self.ring.clone(), Repr::Mod(n / g)))
                }
            }
            (RingSpec::Poly { base, .. }, Repr::Poly(terms)) => {
                match poly_regularity(base, terms) {
                    PolyRegularity::Regular => Regularity::Regular,
                    PolyRegularity::Annihilator(c) => {
                        Regularity::ZeroDivisor(Scalar::from_rational_ground(&self.ring, &Scalar::new(Arc::new((**base).clone()), c)).unwrap())
                    }
                }
            }
            (RingSpec::MonomialQuotient { base, var, power }, Repr::Poly(terms)) => {
                let vars = base.vars();
                let idx = vars.iter().position(|v| v == var).expect("validated");
                let witness_monomial = Scalar::monomial(&self.ring, var, power - 1).expect("quotient var");
                // lowest slice in the quotient variable
                let low: BTreeMap<Vec<u32>, Repr> = terms
                    .iter()
                    .filter(|(e, _)| e[idx] == 0)
                    .map(|(e, c)| (e.clone(), c.clone()))
                    .collect();
                if low.is_empty() {
                    // self = var * (...) so self * var^(power-1) = 0
                    return Regularity::ZeroDivisor(witness_monomial);
                }
                match poly_regularity(base.ground(), &low) {
                    PolyRegularity::Regular => Regularity::Regular,
                    PolyRegularity::Annihilator(c) => {
                        let cs = Scalar::from_rational_ground(&self.ring, &Scalar::new(Arc::new(base.ground().clone()), c)).unwrap();
                        Regularity::ZeroDivisor(cs.mul(&witness_monomial).expect("same ring"))
                    }
                }
            }
            _ => Regularity::Unknown,
        }
    }

    /// Idempotents of `Z/n`, used by the monoid grouplike criterion.
    pub fn idempotents(ring: &Arc<RingSpec>) -> Vec<Scalar> {
        match ring.as_ref() {
            RingSpec::Modular(n) => (0..*n)
                .filter(|r| mod_mul(*r, *r, *n) == *r)
                .map(|r| Scalar::new(ring.clone(), Repr::Mod(r)))
                .collect(),
            RingSpec::Integers | RingSpec::Rationals => {
                vec![Scalar::zero(ring), Scalar::one(ring)]
            }
            _ => vec![Scalar::zero(ring), Scalar::one(ring)],
        }
    }

    /// Exact conversion to a rational, for field computations over Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Int(x) => Some(BigRational::from(x.clone())),
            Repr::Rat(x) => Some(x.clone()),
            _ => None,
        }
    }
}

enum PolyRegularity {
    Regular,
    Annihilator(Repr),
}

/// McCoy-style regularity of a polynomial over a ground ring: over a
/// domain a nonzero polynomial is regular, and over `Z/n` a polynomial
/// is a zero divisor exactly when a single ground constant kills every
/// coefficient.
fn poly_regularity(ground: &RingSpec, terms: &BTreeMap<Vec<u32>, Repr>) -> PolyRegularity {
    match ground {
        RingSpec::Integers | RingSpec::Rationals => PolyRegularity::Regular,
        RingSpec::Modular(n) => {
            let mut d = *n;
            for coeff in terms.values() {
                if let Repr::Mod(c) = coeff {
                    d = d.gcd(c);
                }
            }
            if d == 1 {
                PolyRegularity::Regular
            } else {
                PolyRegularity::Annihilator(Repr::Mod(n / d))
            }
        }
        _ => unreachable!("ground ring expected"),
    }
}

// ---------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------

fn fmt_ground(repr: &Repr) -> String {
    match repr {
        Repr::Int(x) => x.to_string(),
        Repr::Rat(x) => {
            if x.denom().is_one() {
                x.numer().to_string()
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }
        Repr::Mod(x) => x.to_string(),
        Repr::Poly(_) => unreachable!(),
    }
}

fn ground_is_negative(repr: &Repr) -> bool {
    match repr {
        Repr::Int(x) => x.is_negative(),
        Repr::Rat(x) => x.is_negative(),
        _ => false,
    }
}

fn fmt_monomial(vars: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, e)| **e > 0)
        .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Poly(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                let vars = self.ring.vars();
                // descending graded-lex order
                let mut keys: Vec<&Vec<u32>> = terms.keys().collect();
                keys.sort_by(|a, b| {
                    let da: u64 = a.iter().map(|e| *e as u64).sum();
                    let db: u64 = b.iter().map(|e| *e as u64).sum();
                    db.cmp(&da).then_with(|| a.cmp(b))
                });
                let mut out = String::new();
                for (i, key) in keys.iter().enumerate() {
                    let coeff = &terms[*key];
                    let neg = ground_is_negative(coeff);
                    let abs = if neg { ground_neg(self.ring.ground(), coeff) } else { coeff.clone() };
                    let cstr = fmt_ground(&abs);
                    let mono = fmt_monomial(vars, key);
                    let body = if mono == "1" {
                        cstr
                    } else if cstr == "1" {
                        mono
                    } else {
                        format!("{cstr}*{mono}")
                    };
                    if i == 0 {
                        if neg {
                            out.push('-');
                        }
                        out.push_str(&body);
                    } else {
                        out.push_str(if neg { " - " } else { " + " });
                        out.push_str(&body);
                    }
                }
                write!(f, "{out}")
            }
            r => write!(f, "{}", fmt_ground(r)),
        }
    }
}

// ---------------------------------------------------------------------
// Parsing: the textual scalar grammar
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            tokens.push(Token::Int(text.parse().map_err(|_| CoalgError::Parse(format!("bad integer {text}")))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            tokens.push(Token::Ident(text));
        } else {
            let tok = match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '*' => Token::Star,
                '/' => Token::Slash,
                '^' => Token::Caret,
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => return Err(CoalgError::Parse(format!("unexpected character '{c}'"))),
            };
            tokens.push(tok);
            i += 1;
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ring: Arc<RingSpec>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn parse_expr(&mut self) -> Result<Scalar> {
        let mut negate = false;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Minus => {
                    negate = !negate;
                    self.pos += 1;
                }
                Token::Plus => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus | Token::Minus => {
                    let minus = matches!(tok, Token::Minus);
                    self.pos += 1;
                    let term = self.parse_term()?;
                    acc = if minus { acc.sub(&term)? } else { acc.add(&term)? };
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Scalar> {
        let mut acc = self.parse_atom()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.pos += 1;
            let rhs = self.parse_atom()?;
            acc = acc.mul(&rhs)?;
        }
        Ok(acc)
    }

    fn parse_atom(&mut self) -> Result<Scalar> {
        match self.bump().cloned() {
            Some(Token::Int(n)) => {
                // rational "a/b", or the "r mod n" form for modular rings
                if matches!(self.peek(), Some(Token::Slash)) {
                    self.pos += 1;
                    match self.bump().cloned() {
                        Some(Token::Int(d)) => {
                            if d.is_zero() {
                                return Err(CoalgError::Parse("zero denominator".into()));
                            }
                            Scalar::from_rational(&self.ring, &BigRational::new(n, d))
                        }
                        _ => Err(CoalgError::Parse("expected denominator".into())),
                    }
                } else if matches!(self.peek(), Some(Token::Ident(w)) if w == "mod") {
                    self.pos += 1;
                    match self.bump().cloned() {
                        Some(Token::Int(m)) => match &*self.ring {
                            RingSpec::Modular(rn) if BigInt::from(*rn) == m => {
                                Ok(Scalar::from_bigint(&self.ring, &n))
                            }
                            _ => Err(CoalgError::Parse(format!("modulus {m} does not match ring {}", self.ring))),
                        },
                        _ => Err(CoalgError::Parse("expected modulus".into())),
                    }
                } else {
                    Ok(Scalar::from_bigint(&self.ring, &n))
                }
            }
            Some(Token::Ident(name)) => {
                let exp = if matches!(self.peek(), Some(Token::Caret)) {
                    self.pos += 1;
                    match self.bump().cloned() {
                        Some(Token::Int(e)) => {
                            let (_, digits) = e.to_u64_digits();
                            if e.is_negative() || digits.len() > 1 {
                                return Err(CoalgError::Parse("bad exponent".into()));
                            }
                            if digits.is_empty() {
                                0u32
                            } else {
                                digits[0] as u32
                            }
                        }
                        _ => return Err(CoalgError::Parse("expected exponent".into())),
                    }
                } else {
                    1
                };
                Scalar::monomial(&self.ring, &name, exp)
            }
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(CoalgError::Parse("expected ')'".into())),
                }
            }
            other => Err(CoalgError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl Scalar {
    /// Parse the textual scalar grammar within a declared ring.
    pub fn parse(ring: &Arc<RingSpec>, input: &str) -> Result<Scalar> {
        let tokens = tokenize(input)?;
        if tokens.is_empty() {
            return Err(CoalgError::Parse("empty scalar".into()));
        }
        let mut parser = Parser { tokens: &tokens, pos: 0, ring: ring.clone() };
        let value = parser.parse_expr()?;
        if parser.pos != tokens.len() {
            return Err(CoalgError::Parse(format!("trailing input in '{input}'")));
        }
        Ok(value)
    }
}

/// A small random element of the ring, for randomized suites.
pub fn random_scalar(rng: &mut impl rand::Rng, ring: &Arc<RingSpec>) -> Scalar {
    match ring.as_ref() {
        RingSpec::Integers => Scalar::from_i64(ring, rng.gen_range(-9i64..=9)),
        RingSpec::Rationals => {
            let n = rng.gen_range(-9i64..=9);
            let d = rng.gen_range(1i64..=9);
            Scalar::from_rational(ring, &BigRational::new(BigInt::from(n), BigInt::from(d))).unwrap()
        }
        RingSpec::Modular(n) => Scalar::from_i64(ring, rng.gen_range(0..*n) as i64),
        _ => {
            let vars: Vec<String> = ring.vars().to_vec();
            let mut s = Scalar::zero(ring);
            for _ in 0..3 {
                let v = &vars[rng.gen_range(0..vars.len())];
                let e = rng.gen_range(0..4u32);
                let c = rng.gen_range(-4i64..=4);
                let term = Scalar::from_i64(ring, c)
                    .mul(&Scalar::monomial(ring, v, e).unwrap())
                    .unwrap();
                s = s.add(&term).unwrap();
            }
            s
        }
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Multinomial coefficient `m! / (i! j! k!)` for `i + j + k = m`.
pub fn trinomial(i: u64, j: u64, k: u64) -> BigInt {
    binomial(i + j + k, i) * binomial(j + k, j)
}
