//! The convolution algebra `Hom(C, A)` and the id-unipotence calculus:
//! convolution powers, `(ηε − id)^{⊛n}`, the Δ₊ maps, binomial
//! transforms of sequence windows, m-polynomiality, and degree-upper
//! bounds with structural certificates.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::basis::BasisIndex;
use crate::bialgebra::{
    iterated_delta, BialgebraDescriptor, Element, Family, Iterated, MonoidKind, TensorK,
};
use crate::scalar::{binomial, RingSpec, Scalar};
use crate::{CoalgError, Result};

// ---------------------------------------------------------------------
// Linear map rules
// ---------------------------------------------------------------------

/// Target of a linear map rule: the bialgebra itself, or the
/// coefficient ring (dual functionals).
#[derive(Debug, Clone, PartialEq)]
pub enum MapTarget {
    Bialgebra(Arc<BialgebraDescriptor>),
    Ring(Arc<RingSpec>),
}

/// A value of such a map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapValue {
    Element(Element),
    Scalar(Scalar),
}

impl MapValue {
    pub fn is_zero(&self) -> bool {
        match self {
            MapValue::Element(e) => e.is_zero(),
            MapValue::Scalar(s) => s.is_zero(),
        }
    }

    fn add(&self, other: &MapValue) -> Result<MapValue> {
        match (self, other) {
            (MapValue::Element(a), MapValue::Element(b)) => Ok(MapValue::Element(a.add(b)?)),
            (MapValue::Scalar(a), MapValue::Scalar(b)) => Ok(MapValue::Scalar(a.add(b)?)),
            _ => Err(CoalgError::SourceMismatch),
        }
    }

    fn mul(&self, other: &MapValue) -> Result<MapValue> {
        match (self, other) {
            (MapValue::Element(a), MapValue::Element(b)) => Ok(MapValue::Element(a.mul(b)?)),
            (MapValue::Scalar(a), MapValue::Scalar(b)) => Ok(MapValue::Scalar(a.mul(b)?)),
            _ => Err(CoalgError::SourceMismatch),
        }
    }

    fn scale(&self, factor: &Scalar) -> Result<MapValue> {
        match self {
            MapValue::Element(a) => Ok(MapValue::Element(a.scale(factor)?)),
            MapValue::Scalar(a) => Ok(MapValue::Scalar(a.mul(factor)?)),
        }
    }

    fn neg(&self) -> MapValue {
        match self {
            MapValue::Element(a) => MapValue::Element(a.neg()),
            MapValue::Scalar(a) => MapValue::Scalar(a.neg()),
        }
    }

    pub fn into_element(self) -> Result<Element> {
        match self {
            MapValue::Element(e) => Ok(e),
            MapValue::Scalar(_) => Err(CoalgError::SourceMismatch),
        }
    }

    pub fn into_scalar(self) -> Result<Scalar> {
        match self {
            MapValue::Scalar(s) => Ok(s),
            MapValue::Element(_) => Err(CoalgError::SourceMismatch),
        }
    }
}

fn target_zero(target: &MapTarget) -> MapValue {
    match target {
        MapTarget::Bialgebra(d) => MapValue::Element(Element::zero(d)),
        MapTarget::Ring(r) => MapValue::Scalar(Scalar::zero(r)),
    }
}

fn target_unit(target: &MapTarget) -> Result<MapValue> {
    match target {
        MapTarget::Bialgebra(d) => {
            if !d.has_multiplication() {
                return Err(CoalgError::NoMultiplication);
            }
            Ok(MapValue::Element(Element::one(d)))
        }
        MapTarget::Ring(r) => Ok(MapValue::Scalar(Scalar::one(r))),
    }
}

/// A linear map from a bialgebra to a target algebra, stored as a
/// finite rule on every source basis index up to a domain degree.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapRule {
    source: Arc<BialgebraDescriptor>,
    target: MapTarget,
    domain_degree: i64,
    rule: BTreeMap<BasisIndex, MapValue>,
}

fn domain_degree_default(source: &Arc<BialgebraDescriptor>) -> Result<i64> {
    match source.truncation() {
        Some(d) => Ok(d),
        None => match source.family() {
            Family::FrobeniusQuotient { p, .. } => Ok(*p as i64 - 1),
            Family::MonoidDiag(MonoidKind::Finite(_)) | Family::FiniteDual(_) => Ok(1),
            _ => Err(CoalgError::BadParameter(
                "total rules need a truncation degree on the source".into(),
            )),
        },
    }
}

impl LinearMapRule {
    /// Build a total rule from a function on basis indices, defined on
    /// every index of degree at most `domain_degree`.
    pub fn from_fn(
        source: &Arc<BialgebraDescriptor>,
        target: MapTarget,
        domain_degree: Option<i64>,
        mut f: impl FnMut(&BasisIndex) -> Result<MapValue>,
    ) -> Result<Self> {
        let d = match domain_degree {
            Some(d) => d,
            None => domain_degree_default(source)?,
        };
        let mut rule = BTreeMap::new();
        for idx in source.basis_up_to(d) {
            rule.insert(idx.clone(), f(&idx)?);
        }
        Ok(LinearMapRule { source: source.clone(), target, domain_degree: d, rule })
    }

    /// The identity map of the bialgebra.
    pub fn identity(source: &Arc<BialgebraDescriptor>) -> Result<Self> {
        let target = MapTarget::Bialgebra(source.clone());
        LinearMapRule::from_fn(source, target, None, |idx| {
            Ok(MapValue::Element(Element::basis(source, idx.clone())?))
        })
    }

    /// The convolution unit `ηε`.
    pub fn eta_eps(source: &Arc<BialgebraDescriptor>, target: MapTarget) -> Result<Self> {
        let unit = target_unit(&target)?;
        LinearMapRule::from_fn(source, target.clone(), None, |idx| {
            unit.scale(&source.counit_basis(idx)?)
        })
    }

    /// The dual-basis functional of one index.
    pub fn dual_basis(source: &Arc<BialgebraDescriptor>, index: &BasisIndex) -> Result<Self> {
        source.check_index(index)?;
        let ring = source.ring().clone();
        LinearMapRule::from_fn(source, MapTarget::Ring(ring.clone()), None, |idx| {
            Ok(MapValue::Scalar(if idx == index {
                Scalar::one(&ring)
            } else {
                Scalar::zero(&ring)
            }))
        })
    }

    pub fn source(&self) -> &Arc<BialgebraDescriptor> {
        &self.source
    }

    pub fn target(&self) -> &MapTarget {
        &self.target
    }

    pub fn domain_degree(&self) -> i64 {
        self.domain_degree
    }

    pub fn rule(&self) -> &BTreeMap<BasisIndex, MapValue> {
        &self.rule
    }

    pub fn value(&self, index: &BasisIndex) -> Result<&MapValue> {
        self.rule.get(index).ok_or(CoalgError::TruncationExceeded {
            degree: index.degree(),
            limit: self.domain_degree,
        })
    }

    /// Evaluate on an element by linearity.
    pub fn apply(&self, e: &Element) -> Result<MapValue> {
        let mut acc = target_zero(&self.target);
        for (idx, c) in e.terms() {
            acc = acc.add(&self.value(idx)?.scale(c)?)?;
        }
        Ok(acc)
    }

    fn check_compatible(&self, other: &LinearMapRule) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(CoalgError::SourceMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &LinearMapRule) -> Result<LinearMapRule> {
        self.check_compatible(other)?;
        let d = self.domain_degree.min(other.domain_degree);
        let mut rule = BTreeMap::new();
        for idx in self.source.basis_up_to(d) {
            rule.insert(idx.clone(), self.value(&idx)?.add(other.value(&idx)?)?);
        }
        Ok(LinearMapRule { source: self.source.clone(), target: self.target.clone(), domain_degree: d, rule })
    }

    pub fn neg(&self) -> LinearMapRule {
        let rule = self.rule.iter().map(|(i, v)| (i.clone(), v.neg())).collect();
        LinearMapRule { source: self.source.clone(), target: self.target.clone(), domain_degree: self.domain_degree, rule }
    }

    pub fn sub(&self, other: &LinearMapRule) -> Result<LinearMapRule> {
        self.add(&other.neg())
    }

    /// Convolution `f ⊛ g = μ ∘ (f ⊗ g) ∘ Δ` as a total rule on the
    /// common domain.
    pub fn convolve(&self, other: &LinearMapRule) -> Result<LinearMapRule> {
        self.check_compatible(other)?;
        let d = self.domain_degree.min(other.domain_degree);
        let mut rule = BTreeMap::new();
        for idx in self.source.basis_up_to(d) {
            let mut acc = target_zero(&self.target);
            for (u, v, c) in self.source.delta_basis(&idx)? {
                let fu = self.value(&u)?;
                let gv = other.value(&v)?;
                acc = acc.add(&fu.mul(gv)?.scale(&c)?)?;
            }
            rule.insert(idx, acc);
        }
        Ok(LinearMapRule { source: self.source.clone(), target: self.target.clone(), domain_degree: d, rule })
    }

    /// Convolution power: `f^{⊛0} = ηε`, `f^{⊛(n+1)} = f ⊛ f^{⊛n}`.
    pub fn conv_power(&self, n: u32) -> Result<LinearMapRule> {
        let mut acc = LinearMapRule::eta_eps(&self.source, self.target.clone())?;
        acc.domain_degree = self.domain_degree;
        acc.rule.retain(|idx, _| idx.degree() <= self.domain_degree);
        for _ in 0..n {
            acc = self.convolve(&acc)?;
        }
        Ok(acc)
    }
}

/// Pointwise value of `f^{⊛n}` on an element, computed by the
/// recursion `f^{⊛(n+1)}(b) = Σ f(b₁) · f^{⊛n}(b₂)` over `Δ(b)`, with
/// memoization on (power, basis index). Only the indices reachable
/// from `e` are ever touched.
pub fn conv_power_apply(f: &LinearMapRule, n: u32, e: &Element) -> Result<MapValue> {
    let mut memo: HashMap<(u32, BasisIndex), MapValue> = HashMap::new();
    let mut acc = target_zero(&f.target);
    for (idx, c) in e.terms() {
        let v = conv_power_basis(f, n, idx, &mut memo)?;
        acc = acc.add(&v.scale(c)?)?;
    }
    Ok(acc)
}

fn conv_power_basis(
    f: &LinearMapRule,
    n: u32,
    index: &BasisIndex,
    memo: &mut HashMap<(u32, BasisIndex), MapValue>,
) -> Result<MapValue> {
    if n == 0 {
        return target_unit(&f.target)?.scale(&f.source.counit_basis(index)?);
    }
    if let Some(hit) = memo.get(&(n, index.clone())) {
        return Ok(hit.clone());
    }
    let mut acc = target_zero(&f.target);
    for (u, v, c) in f.source.delta_basis(index)? {
        let fu = f.value(&u)?.clone();
        let rest = conv_power_basis(f, n - 1, &v, memo)?;
        acc = acc.add(&fu.mul(&rest)?.scale(&c)?)?;
    }
    memo.insert((n, index.clone()), acc.clone());
    Ok(acc)
}

/// The sequence `id^{⊛0}(b), …, id^{⊛H}(b)` with one shared memo.
pub fn id_power_sequence(b: &Element, horizon: u32) -> Result<Vec<Element>> {
    let descr = b.descriptor().clone();
    if !descr.has_multiplication() {
        return Err(CoalgError::NoMultiplication);
    }
    let id = LinearMapRule::identity(&descr)?;
    let mut memo: HashMap<(u32, BasisIndex), MapValue> = HashMap::new();
    let mut out = Vec::with_capacity(horizon as usize + 1);
    for n in 0..=horizon {
        let mut acc = Element::zero(&descr);
        for (idx, c) in b.terms() {
            let v = conv_power_basis(&id, n, idx, &mut memo)?;
            acc = acc.add(&v.into_element()?.scale(c)?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `(ηε − id)^{⊛n}(b)`, exactly.
pub fn eta_eps_minus_id_power(b: &Element, n: u32) -> Result<Element> {
    let descr = b.descriptor().clone();
    if !descr.has_multiplication() {
        return Err(CoalgError::NoMultiplication);
    }
    let id = LinearMapRule::identity(&descr)?;
    let h = LinearMapRule::eta_eps(&descr, MapTarget::Bialgebra(descr.clone()))?.sub(&id)?;
    conv_power_apply(&h, n, b)?.into_element()
}

/// `Δ₊^{(k)} = id̄^{⊗(k+1)} ∘ Δ^{(k)}`: the iterated coproduct with the
/// ε-component removed on every leg.
pub fn delta_plus(e: &Element, k: i64) -> Result<TensorK> {
    if k < 0 {
        return Err(CoalgError::BadParameter("delta_plus needs k >= 0".into()));
    }
    if !e.descriptor().has_multiplication() {
        // the leg projection id − ηε needs the unit map
        return Err(CoalgError::NoMultiplication);
    }
    let t = match iterated_delta(e, k)? {
        Iterated::Tensor(t) => t,
        Iterated::Scalar(_) => unreachable!("k >= 0 yields a tensor"),
    };
    let descr = e.descriptor().clone();
    let unit = descr.unit_index();
    let mut current = t;
    for leg in 0..=(k as usize) {
        let mut next = TensorK::zero(&descr, current.arity());
        for (key, c) in current.terms() {
            // id̄(b) = b − ε(b)·1 on the chosen leg
            next.add_term(key.clone(), c.clone())?;
            let eps = descr.counit_basis(&key[leg])?;
            if !eps.is_zero() {
                let mut killed = key.clone();
                killed[leg] = unit.clone();
                next.add_term(killed, c.mul(&eps)?.neg())?;
            }
        }
        current = next;
    }
    Ok(current)
}

/// Iterated multiplication `μ^{(n−1)}`: multiply the legs of each pure
/// tensor left to right.
pub fn mu_iterated(t: &TensorK) -> Result<Element> {
    let descr = t.descriptor().clone();
    if !descr.has_multiplication() {
        return Err(CoalgError::NoMultiplication);
    }
    let mut acc = Element::zero(&descr);
    for (key, c) in t.terms() {
        let mut prod = Element::basis(&descr, key[0].clone())?;
        for leg in &key[1..] {
            prod = prod.mul(&Element::basis(&descr, leg.clone())?)?;
        }
        acc = acc.add(&prod.scale(c)?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------
// Sequence windows and m-polynomiality
// ---------------------------------------------------------------------

/// Entries a sequence window can carry: an abelian group with an
/// integer action and (for product lemmas) a multiplication.
pub trait Carrier: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn int_scale(&self, n: &BigInt) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Carrier for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn int_scale(&self, n: &BigInt) -> Self {
        self * n
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Carrier for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other).expect("same ring")
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn int_scale(&self, n: &BigInt) -> Self {
        self.mul(&Scalar::from_bigint(self.ring(), n)).expect("same ring")
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other).expect("same ring")
    }
}

impl Carrier for Element {
    fn zero_like(&self) -> Self {
        Element::zero(self.descriptor())
    }
    fn add(&self, other: &Self) -> Self {
        Element::add(self, other).expect("same descriptor")
    }
    fn neg(&self) -> Self {
        Element::neg(self)
    }
    fn is_zero(&self) -> bool {
        Element::is_zero(self)
    }
    fn int_scale(&self, n: &BigInt) -> Self {
        Element::int_scale(self, n)
    }
    fn mul(&self, other: &Self) -> Self {
        Element::mul(self, other).expect("same descriptor")
    }
}

/// Carriers with a multiplicative unit, for empty products.
pub trait CarrierOne: Carrier {
    fn one_like(&self) -> Self;
}

impl CarrierOne for BigInt {
    fn one_like(&self) -> Self {
        use num_traits::One;
        BigInt::one()
    }
}

impl CarrierOne for Scalar {
    fn one_like(&self) -> Self {
        Scalar::one(self.ring())
    }
}

impl CarrierOne for Element {
    fn one_like(&self) -> Self {
        Element::one(self.descriptor())
    }
}

/// A finite window `a_0, …, a_H` of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceWindow<T: Carrier> {
    pub entries: Vec<T>,
}

impl<T: Carrier> SequenceWindow<T> {
    pub fn new(entries: Vec<T>) -> Self {
        SequenceWindow { entries }
    }

    pub fn horizon(&self) -> i64 {
        self.entries.len() as i64 - 1
    }
}

/// Entrywise alternating binomial transform
/// `b_n = Σ_{i=0}^{n} (−1)^i C(n,i) a_i`; an involution.
pub fn binomial_transform<T: Carrier>(a: &SequenceWindow<T>) -> SequenceWindow<T> {
    let mut out = Vec::with_capacity(a.entries.len());
    for n in 0..a.entries.len() {
        let mut acc = match a.entries.first() {
            Some(first) => first.zero_like(),
            None => break,
        };
        for (i, entry) in a.entries.iter().enumerate().take(n + 1) {
            let mut c = binomial(n as u64, i as u64);
            if i % 2 == 1 {
                c = -c;
            }
            acc = acc.add(&entry.int_scale(&c));
        }
        out.push(acc);
    }
    SequenceWindow::new(out)
}

/// Result of the m-polynomiality check.
#[derive(Debug, Clone, PartialEq)]
pub enum MPolyCheck<T: Carrier> {
    /// The alternating sums vanish for `m < n ≤ H`; the witness
    /// coefficients `c_i` reproduce `a_n = Σ C(n,i) c_i` on the window.
    HoldsToHorizon { witness: Vec<T> },
    FailsAt(i64),
}

/// Check m-polynomiality of a window: the alternating binomial sums
/// vanish beyond index m; on success the witness of the equivalent
/// closed form is returned (`c_i = (−1)^i b_i`).
pub fn is_m_polynomial<T: Carrier>(a: &SequenceWindow<T>, m: i64) -> MPolyCheck<T> {
    let b = binomial_transform(a);
    for n in 0..b.entries.len() as i64 {
        if n > m && !b.entries[n as usize].is_zero() {
            return MPolyCheck::FailsAt(n);
        }
    }
    let mut witness = Vec::new();
    for i in 0..=m {
        if i as usize >= b.entries.len() {
            break;
        }
        let mut c = b.entries[i as usize].clone();
        if i % 2 == 1 {
            c = c.neg();
        }
        witness.push(c);
    }
    // the witness must reproduce the window
    for (n, a_n) in a.entries.iter().enumerate() {
        let mut acc = a_n.zero_like();
        for (i, c) in witness.iter().enumerate() {
            acc = acc.add(&c.int_scale(&binomial(n as u64, i as u64)));
        }
        assert!(acc == *a_n, "witness fails to reproduce entry {n}");
    }
    MPolyCheck::HoldsToHorizon { witness }
}

// ---------------------------------------------------------------------
// Degree-upper bounds for id-unipotence
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// A structural vanishing bound covers every n beyond the horizon.
    Certified,
    /// Vanishing observed on the horizon only.
    HorizonOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnipotenceBound {
    Bound { m: i64, mode: BoundMode },
    NotIdUnipotentWithinHorizon,
}

/// Structural vanishing bound for `(ηε − id)^{⊛n}(b)`, when the family
/// provides one: graded-connected degree bounds, the quotient exponent
/// of the Frobenius family, or the nilpotency order of the infiltration
/// parameter.
pub fn structural_bound(b: &Element) -> Option<i64> {
    if b.is_zero() {
        return Some(-1);
    }
    let max_deg = b.terms().keys().map(|i| i.degree()).max().unwrap_or(0);
    match b.descriptor().family() {
        Family::PolynomialPrimitive | Family::TensorConc { .. } => Some(max_deg),
        Family::InfiltrationQ { q } => {
            if q.is_zero() {
                Some(max_deg)
            } else {
                q.nilpotency_order(64).map(|r| max_deg * r as i64)
            }
        }
        Family::FrobeniusQuotient { p, .. } => Some(max_deg * (*p as i64 - 1)),
        Family::GxQuotient => {
            let pure_x = b.terms().keys().all(|i| match i {
                BasisIndex::Monomial(e) => e[0] == 0,
                _ => false,
            });
            if pure_x {
                Some(max_deg)
            } else {
                None
            }
        }
        Family::MonoidDiag(_) => {
            let unit = b.descriptor().unit_index();
            if b.terms().keys().all(|i| *i == unit) {
                Some(0)
            } else {
                None
            }
        }
        Family::TensorProduct { left, right } => {
            let unit_l = left.unit_index();
            let unit_r = right.unit_index();
            let left_trivial = b.terms().keys().all(|i| matches!(i, BasisIndex::Pair(a, _) if **a == unit_l));
            let right_trivial = b.terms().keys().all(|i| matches!(i, BasisIndex::Pair(_, c) if **c == unit_r));
            if left_trivial {
                let projected = project_tensor_factor(b, right, false).ok()?;
                structural_bound(&projected)
            } else if right_trivial {
                let projected = project_tensor_factor(b, left, true).ok()?;
                structural_bound(&projected)
            } else {
                None
            }
        }
        Family::FiniteDual(_) => None,
    }
}

fn project_tensor_factor(
    b: &Element,
    factor: &Arc<BialgebraDescriptor>,
    take_left: bool,
) -> Result<Element> {
    let mut out = Element::zero(factor);
    for (idx, c) in b.terms() {
        if let BasisIndex::Pair(l, r) = idx {
            let key = if take_left { (**l).clone() } else { (**r).clone() };
            out.add_term(key, c.clone())?;
        }
    }
    Ok(out)
}

/// Search the smallest verified degree-upper bound of `b` within the
/// horizon: the least m with `(ηε − id)^{⊛n}(b) = 0` for all
/// `m < n ≤ H`. The mode records whether a structural bound covers the
/// tail beyond the horizon.
pub fn degree_upper_bound(b: &Element, horizon: u32) -> Result<UnipotenceBound> {
    let powers = id_power_sequence(b, horizon)?;
    let values = binomial_transform(&SequenceWindow::new(powers));
    let mut last_nonzero: i64 = -1;
    for (n, v) in values.entries.iter().enumerate() {
        if !v.is_zero() {
            last_nonzero = n as i64;
        }
    }
    if last_nonzero == horizon as i64 && !b.is_zero() {
        return Ok(UnipotenceBound::NotIdUnipotentWithinHorizon);
    }
    let mode = match structural_bound(b) {
        Some(s) if s <= horizon as i64 => BoundMode::Certified,
        _ => BoundMode::HorizonOnly,
    };
    Ok(UnipotenceBound::Bound { m: last_nonzero, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialgebra::{is_grouplike, random_element, FiniteMonoid};
    use crate::scalar::random_scalar;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qq() -> Arc<RingSpec> {
        Arc::new(RingSpec::Rationals)
    }

    fn zmod(n: u64) -> Arc<RingSpec> {
        Arc::new(RingSpec::modular(n).unwrap())
    }

    fn infiltration_generic(trunc: i64) -> Arc<BialgebraDescriptor> {
        let ring = Arc::new(RingSpec::poly(RingSpec::Rationals, &["q"]).unwrap());
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        BialgebraDescriptor::infiltration(&ring, q, trunc).unwrap()
    }

    fn x_power(descr: &Arc<BialgebraDescriptor>, n: i64) -> Element {
        Element::basis(descr, BasisIndex::Monomial(vec![n])).unwrap()
    }

    fn grouplike_one_plus_qx(descr: &Arc<BialgebraDescriptor>, q: &Scalar) -> Element {
        Element::from_terms(
            descr,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(descr.ring())),
                (BasisIndex::Monomial(vec![1]), q.clone()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eta_eps_is_neutral() {
        let descr = infiltration_generic(8);
        let target = MapTarget::Bialgebra(descr.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let f = LinearMapRule::from_fn(&descr, target.clone(), None, |_| {
                Ok(MapValue::Element(random_element(&mut rng, &descr, 1, 2)))
            })
            .unwrap();
            let e = LinearMapRule::eta_eps(&descr, target.clone()).unwrap();
            assert_eq!(f.convolve(&e).unwrap(), f);
            assert_eq!(e.convolve(&f).unwrap(), f);
        }
    }

    #[test]
    fn convolution_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let descr = infiltration_generic(8);
        // element-valued rules with low-degree values
        for _ in 0..5 {
            let make = |rng: &mut ChaCha8Rng| {
                let vals: Vec<Element> = descr
                    .basis_up_to(8)
                    .iter()
                    .map(|_| random_element(rng, &descr, 1, 2))
                    .collect();
                let mut i = 0;
                LinearMapRule::from_fn(&descr, MapTarget::Bialgebra(descr.clone()), None, |_| {
                    let v = vals[i % vals.len()].clone();
                    i += 1;
                    Ok(MapValue::Element(v))
                })
                .unwrap()
            };
            let f = make(&mut rng);
            let g = make(&mut rng);
            let h = make(&mut rng);
            assert_eq!(
                f.convolve(&g).unwrap().convolve(&h).unwrap(),
                f.convolve(&g.convolve(&h).unwrap()).unwrap()
            );
        }
        // scalar-valued rules
        let ring = descr.ring().clone();
        for _ in 0..5 {
            let make = |rng: &mut ChaCha8Rng| {
                LinearMapRule::from_fn(&descr, MapTarget::Ring(ring.clone()), None, |_| {
                    Ok(MapValue::Scalar(random_scalar(rng, &ring)))
                })
                .unwrap()
            };
            let f = make(&mut rng);
            let g = make(&mut rng);
            let h = make(&mut rng);
            assert_eq!(
                f.convolve(&g).unwrap().convolve(&h).unwrap(),
                f.convolve(&g.convolve(&h).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn id_convolution_on_grouplikes() {
        let z4 = zmod(4);
        let q = Scalar::from_i64(&z4, 2);
        let descr = BialgebraDescriptor::infiltration(&z4, q.clone(), 8).unwrap();
        let g = grouplike_one_plus_qx(&descr, &q);
        assert!(is_grouplike(&g).unwrap());
        let id = LinearMapRule::identity(&descr).unwrap();
        // id ⊛ id on a grouplike is its square
        let sq = id.convolve(&id).unwrap().apply(&g).unwrap().into_element().unwrap();
        assert_eq!(sq, g.pow(2).unwrap());
        // id^{⊛k}(g) = g^k
        for k in 0..=5u32 {
            let v = conv_power_apply(&id, k, &g).unwrap().into_element().unwrap();
            assert_eq!(v, g.pow(k).unwrap());
        }
    }

    #[test]
    fn dual_functional_convolution() {
        let descr = BialgebraDescriptor::polynomial_primitive(&qq(), 8).unwrap();
        let xdual = LinearMapRule::dual_basis(&descr, &BasisIndex::Monomial(vec![1])).unwrap();
        let prod = xdual.convolve(&xdual).unwrap();
        // x^∨ ⊛ x^∨ = 2 (x²)^∨
        for idx in descr.basis_up_to(8) {
            let expect = if idx == BasisIndex::Monomial(vec![2]) { 2 } else { 0 };
            assert_eq!(
                prod.value(&idx).unwrap().clone().into_scalar().unwrap(),
                Scalar::from_i64(descr.ring(), expect)
            );
        }
    }

    #[test]
    fn conv_power_closed_form_on_x() {
        // id^{⊛n}(x) = Σ_{k≥1} C(n,k) q^{k−1} x^k over Q[q], from
        // id^{⊛n}(1+qx) = (1+qx)^n
        let descr = infiltration_generic(8);
        let ring = descr.ring().clone();
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        let id = LinearMapRule::identity(&descr).unwrap();
        let x = x_power(&descr, 1);
        for n in 0..=6u32 {
            let got = conv_power_apply(&id, n, &x).unwrap().into_element().unwrap();
            let mut expect = Element::zero(&descr);
            for k in 1..=n as u64 {
                let c = Scalar::from_bigint(&ring, &binomial(n as u64, k)).mul(&q.pow(k as u32 - 1)).unwrap();
                expect
                    .add_term(BasisIndex::Monomial(vec![k as i64]), c)
                    .unwrap();
            }
            assert_eq!(got, expect, "n = {n}");
        }
        // n = 0 gives ηε
        let p0 = id.conv_power(0).unwrap();
        let eta = LinearMapRule::eta_eps(&descr, MapTarget::Bialgebra(descr.clone())).unwrap();
        assert_eq!(p0, eta);
    }

    #[test]
    fn eta_eps_minus_id_powers() {
        // infiltration over Q[q]: −(−q)^{n−1} x^n
        let descr = infiltration_generic(10);
        let ring = descr.ring().clone();
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        let x = x_power(&descr, 1);
        for n in 1..=8u32 {
            let got = eta_eps_minus_id_power(&x, n).unwrap();
            let coeff = q.pow(n - 1).neg();
            let coeff = if (n - 1) % 2 == 1 { coeff.neg() } else { coeff };
            let mut expect = Element::zero(&descr);
            expect.add_term(BasisIndex::Monomial(vec![n as i64]), coeff).unwrap();
            assert_eq!(got, expect, "n = {n}");
        }

        // Frobenius quotient p = 3: zero from n = 3 on
        let f3 = zmod(3);
        let frob = BialgebraDescriptor::frobenius_quotient(&f3, 3, Scalar::one(&f3)).unwrap();
        let xbar = x_power(&frob, 1);
        for n in 3..=8u32 {
            assert!(eta_eps_minus_id_power(&xbar, n).unwrap().is_zero());
        }
        assert!(!eta_eps_minus_id_power(&xbar, 2).unwrap().is_zero());

        // the unit dies instantly in every family
        let one = Element::one(&descr);
        assert!(eta_eps_minus_id_power(&one, 1).unwrap().is_zero());
    }

    #[test]
    fn delta_plus_examples() {
        let std = BialgebraDescriptor::polynomial_primitive(&qq(), 8).unwrap();
        let x = x_power(&std, 1);
        assert!(delta_plus(&x, 1).unwrap().is_zero());
        assert!(delta_plus(&Element::one(&std), 0).unwrap().is_zero());

        // grouplike g ≠ 1 in a monoid bialgebra: (g−1)⊗(g−1)
        let c2 = Arc::new(FiniteMonoid::cyclic(2));
        let descr = BialgebraDescriptor::monoid_diag(&qq(), MonoidKind::Finite(c2), None).unwrap();
        let g = Element::basis(&descr, BasisIndex::Word(vec![1])).unwrap();
        let got = delta_plus(&g, 1).unwrap();
        let gm1 = g.sub(&Element::one(&descr)).unwrap();
        let mut expect = TensorK::zero(&descr, 2);
        for (a, ca) in gm1.terms() {
            for (b, cb) in gm1.terms() {
                expect
                    .add_term(vec![a.clone(), b.clone()], ca.mul(cb).unwrap())
                    .unwrap();
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn delta_plus_recovers_eta_eps_minus_id_powers() {
        // (ηε − id)^{⊛n} = (−1)^n μ^{(n−1)} ∘ Δ₊^{(n−1)}
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let z4 = zmod(4);
        let descrs = vec![
            BialgebraDescriptor::infiltration(&z4, Scalar::from_i64(&z4, 2), 24).unwrap(),
            BialgebraDescriptor::polynomial_primitive(&qq(), 24).unwrap(),
        ];
        for descr in descrs {
            for _ in 0..5 {
                let b = random_element(&mut rng, &descr, 2, 2);
                for n in 1..=5i64 {
                    let lhs = eta_eps_minus_id_power(&b, n as u32).unwrap();
                    let mut rhs = mu_iterated(&delta_plus(&b, n - 1).unwrap()).unwrap();
                    if n % 2 == 1 {
                        rhs = rhs.neg();
                    }
                    assert_eq!(lhs, rhs, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn mu_iterated_examples() {
        let std = BialgebraDescriptor::polynomial_primitive(&qq(), 8).unwrap();
        let mut t = TensorK::zero(&std, 3);
        t.add_term(
            vec![
                BasisIndex::Monomial(vec![1]),
                BasisIndex::Monomial(vec![0]),
                BasisIndex::Monomial(vec![1]),
            ],
            Scalar::one(&qq()),
        )
        .unwrap();
        assert_eq!(mu_iterated(&t).unwrap(), x_power(&std, 2));

        let gx = BialgebraDescriptor::gx_quotient(&qq(), 8).unwrap();
        let mut t2 = TensorK::zero(&gx, 2);
        t2.add_term(
            vec![BasisIndex::Monomial(vec![1, 0]), BasisIndex::Monomial(vec![0, 1])],
            Scalar::one(&qq()),
        )
        .unwrap();
        assert!(mu_iterated(&t2).unwrap().is_zero());
    }

    #[test]
    fn algebra_hom_convolution_is_algebra_hom() {
        // rules sending x to a chosen element extend multiplicatively;
        // the convolution of two of them is again multiplicative
        let descr = BialgebraDescriptor::polynomial_primitive(&qq(), 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let e1 = random_element(&mut rng, &descr, 1, 2);
            let e2 = random_element(&mut rng, &descr, 1, 2);
            let hom = |gen: Element| {
                LinearMapRule::from_fn(&descr, MapTarget::Bialgebra(descr.clone()), Some(4), |idx| {
                    let BasisIndex::Monomial(e) = idx else { unreachable!() };
                    Ok(MapValue::Element(gen.pow(e[0] as u32)?))
                })
                .unwrap()
            };
            let p = hom(e1);
            let q = hom(e2);
            let pq = p.convolve(&q).unwrap();
            for _ in 0..5 {
                let a = random_element(&mut rng, &descr, 2, 2);
                let b = random_element(&mut rng, &descr, 2, 2);
                let lhs = pq.apply(&a.mul(&b).unwrap()).unwrap().into_element().unwrap();
                let rhs = pq
                    .apply(&a)
                    .unwrap()
                    .into_element()
                    .unwrap()
                    .mul(&pq.apply(&b).unwrap().into_element().unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
            // unital
            let one = Element::one(&descr);
            assert_eq!(pq.apply(&one).unwrap().into_element().unwrap(), one);
        }
    }

    #[test]
    fn id_powers_are_algebra_homs() {
        let z4 = zmod(4);
        let descr = BialgebraDescriptor::infiltration(&z4, Scalar::from_i64(&z4, 2), 24).unwrap();
        let id = LinearMapRule::identity(&descr).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for k in 0..=5u32 {
            for _ in 0..5 {
                let a = random_element(&mut rng, &descr, 2, 2);
                let b = random_element(&mut rng, &descr, 2, 2);
                let lhs = conv_power_apply(&id, k, &a.mul(&b).unwrap()).unwrap().into_element().unwrap();
                let rhs = conv_power_apply(&id, k, &a)
                    .unwrap()
                    .into_element()
                    .unwrap()
                    .mul(&conv_power_apply(&id, k, &b).unwrap().into_element().unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs, "k = {k}");
            }
        }
    }

    #[test]
    fn binomial_transform_examples() {
        let ring = qq();
        let one = Scalar::one(&ring);
        let zero = Scalar::zero(&ring);
        // (1,0,0,…) → (1,1,1,…)
        let delta0 = SequenceWindow::new(vec![one.clone(), zero.clone(), zero.clone(), zero.clone()]);
        assert_eq!(binomial_transform(&delta0).entries, vec![one.clone(); 4]);
        // constants → (c,0,0,…)
        let c = Scalar::from_i64(&ring, 7);
        let constant = SequenceWindow::new(vec![c.clone(); 5]);
        let mut expect = vec![zero.clone(); 5];
        expect[0] = c;
        assert_eq!(binomial_transform(&constant).entries, expect);
        // empty window
        let empty: SequenceWindow<Scalar> = SequenceWindow::new(vec![]);
        assert_eq!(binomial_transform(&empty).entries.len(), 0);
    }

    #[test]
    fn binomial_transform_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..30 {
            let len = rng.gen_range(0..=20);
            let entries: Vec<BigInt> = (0..len).map(|_| BigInt::from(rng.gen_range(-50i64..=50))).collect();
            let w = SequenceWindow::new(entries.clone());
            assert_eq!(binomial_transform(&binomial_transform(&w)).entries, entries);
        }
    }

    #[test]
    fn binomial_product_identity() {
        // C(m,a) C(m,b) = Σ_{i=a}^{a+b} C(i,a) C(a, a+b−i) C(m,i)
        for a in 0..=10u64 {
            for b in 0..=10u64 {
                for m in 0..=10u64 {
                    let lhs = binomial(m, a) * binomial(m, b);
                    let mut rhs = BigInt::zero();
                    for i in a..=(a + b) {
                        rhs += binomial(i, a) * binomial(a, a + b - i) * binomial(m, i);
                    }
                    assert_eq!(lhs, rhs, "a={a} b={b} m={m}");
                }
            }
        }
    }

    #[test]
    fn m_polynomial_checks() {
        // a_n = C(n,2) is 2-polynomial with witness (0,0,1)
        let window = SequenceWindow::new((0..=12).map(|n| binomial(n, 2)).collect::<Vec<_>>());
        match is_m_polynomial(&window, 2) {
            MPolyCheck::HoldsToHorizon { witness } => {
                assert_eq!(witness, vec![BigInt::zero(), BigInt::zero(), BigInt::from(1)]);
            }
            other => panic!("expected holds, got {other:?}"),
        }
        // a_n = n² is not 1-polynomial: the second difference is 2
        let squares = SequenceWindow::new((0..=8i64).map(BigInt::from).map(|n| n.clone() * n).collect::<Vec<_>>());
        assert_eq!(is_m_polynomial(&squares, 1), MPolyCheck::FailsAt(2));
        // product of two 1-polynomial sequences is 2-polynomial
        let product = SequenceWindow::new((0..=12i64).map(|n| BigInt::from(n * n)).collect::<Vec<_>>());
        assert!(matches!(is_m_polynomial(&product, 2), MPolyCheck::HoldsToHorizon { .. }));
    }

    #[test]
    fn degree_upper_bound_examples() {
        let z4 = zmod(4);
        let descr = BialgebraDescriptor::infiltration(&z4, Scalar::from_i64(&z4, 2), 12).unwrap();
        let x = x_power(&descr, 1);
        assert_eq!(
            degree_upper_bound(&x, 10).unwrap(),
            UnipotenceBound::Bound { m: 2, mode: BoundMode::Certified }
        );

        let f3 = zmod(3);
        let frob = BialgebraDescriptor::frobenius_quotient(&f3, 3, Scalar::one(&f3)).unwrap();
        let xbar = x_power(&frob, 1);
        assert_eq!(
            degree_upper_bound(&xbar, 10).unwrap(),
            UnipotenceBound::Bound { m: 2, mode: BoundMode::Certified }
        );

        let one = Element::one(&descr);
        assert_eq!(
            degree_upper_bound(&one, 10).unwrap(),
            UnipotenceBound::Bound { m: 0, mode: BoundMode::Certified }
        );
        let zero = Element::zero(&descr);
        assert_eq!(
            degree_upper_bound(&zero, 10).unwrap(),
            UnipotenceBound::Bound { m: -1, mode: BoundMode::Certified }
        );

        // a monoid grouplike other than 1 is not id-unipotent
        let c3 = Arc::new(FiniteMonoid::cyclic(3));
        let md = BialgebraDescriptor::monoid_diag(&qq(), MonoidKind::Finite(c3), None).unwrap();
        let g = Element::basis(&md, BasisIndex::Word(vec![1])).unwrap();
        assert_eq!(degree_upper_bound(&g, 8).unwrap(), UnipotenceBound::NotIdUnipotentWithinHorizon);
    }

    #[test]
    fn generating_function_identity_for_bounds() {
        // (1−t)^{m+1} Σ_k id^{⊛k}(b) t^k ≡ Σ_{k≤m} (−1)^k (ηε−id)^{⊛k}(b) t^k (1−t)^{m−k}
        // truncated at degree H−m
        let z8 = zmod(8);
        let descr = BialgebraDescriptor::infiltration(&z8, Scalar::from_i64(&z8, 2), 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let horizon = 12u32;
        for _ in 0..5 {
            let b = random_element(&mut rng, &descr, 2, 2);
            let bound = degree_upper_bound(&b, horizon).unwrap();
            let UnipotenceBound::Bound { m, .. } = bound else {
                continue;
            };
            if m < 0 {
                continue;
            }
            let m = m as usize;
            let powers = id_power_sequence(&b, horizon).unwrap();
            // lhs: coefficients of (1−t)^{m+1} Σ id^{⊛k}(b) t^k
            let lhs = poly_mul_one_minus_t(&powers, m + 1, &descr);
            // rhs: Σ_{k=0}^{m} (−1)^k v_k t^k (1−t)^{m−k}
            let mut rhs = vec![Element::zero(&descr); horizon as usize + 1];
            for k in 0..=m {
                let mut vk = eta_eps_minus_id_power(&b, k as u32).unwrap();
                if k % 2 == 1 {
                    vk = vk.neg();
                }
                let shifted = {
                    let mut v = vec![Element::zero(&descr); horizon as usize + 1];
                    if k <= horizon as usize {
                        v[k] = vk;
                    }
                    v
                };
                let term = poly_mul_one_minus_t(&shifted, m - k, &descr);
                for (i, t) in term.into_iter().enumerate() {
                    if i <= horizon as usize {
                        rhs[i] = rhs[i].add(&t).unwrap();
                    }
                }
            }
            for deg in 0..=(horizon as usize - m) {
                assert_eq!(lhs[deg], rhs[deg], "t^{deg}");
            }
        }
    }

    fn poly_mul_one_minus_t(
        coeffs: &[Element],
        power: usize,
        descr: &Arc<BialgebraDescriptor>,
    ) -> Vec<Element> {
        // multiply an Element-coefficient polynomial by (1−t)^power
        let mut out = vec![Element::zero(descr); coeffs.len()];
        for (i, c) in coeffs.iter().enumerate() {
            for j in 0..=power {
                if i + j >= out.len() {
                    break;
                }
                let mut b = binomial(power as u64, j as u64);
                if j % 2 == 1 {
                    b = -b;
                }
                out[i + j] = out[i + j].add(&c.int_scale(&b)).unwrap();
            }
        }
        out
    }

    #[test]
    fn bound_additivity_and_subalgebra_closure() {
        // degree bounds add on products, and sums/products of certified
        // id-unipotents stay certified within the horizon
        let z8 = zmod(8);
        let descr = BialgebraDescriptor::infiltration(&z8, Scalar::from_i64(&z8, 2), 30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..10 {
            let b = random_element(&mut rng, &descr, 2, 2);
            let c = random_element(&mut rng, &descr, 2, 2);
            let (Ok(UnipotenceBound::Bound { m: p, mode: BoundMode::Certified }), Ok(UnipotenceBound::Bound { m: q, mode: BoundMode::Certified })) =
                (degree_upper_bound(&b, 12), degree_upper_bound(&c, 12))
            else {
                continue;
            };
            if p + q < -1 {
                continue;
            }
            let bc = b.mul(&c).unwrap();
            let horizon = (p + q + 2).max(2) as u32;
            // p+q passes the bound check for bc
            let powers = id_power_sequence(&bc, horizon).unwrap();
            let check = is_m_polynomial(&SequenceWindow::new(powers), p + q);
            assert!(matches!(check, MPolyCheck::HoldsToHorizon { .. }), "p={p} q={q}");
            // closure: product and sum are certified id-unipotent once
            // the horizon reaches the structural bound
            assert!(matches!(
                degree_upper_bound(&bc, 14).unwrap(),
                UnipotenceBound::Bound { mode: BoundMode::Certified, .. }
            ));
            let sum = b.add(&c).unwrap();
            assert!(matches!(
                degree_upper_bound(&sum, 12).unwrap(),
                UnipotenceBound::Bound { mode: BoundMode::Certified, .. }
            ));
        }
    }
}
