//! Verifiers for the grouplike independence statements: the power-sum
//! identity in a commutative ring, its lift to the symmetric algebra,
//! linear independence of distinct grouplikes over a field, and
//! independence over id-unipotents with regularity assumptions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::BasisIndex;
use crate::bialgebra::{is_grouplike, Element, Family, MonoidKind, TensorK};
use crate::convolution::{degree_upper_bound, BoundMode, Carrier, UnipotenceBound};
use crate::linalg;
use crate::scalar::{RingSpec, Scalar};
use crate::{CoalgError, Result};

// ---------------------------------------------------------------------
// The symmetric algebra on the basis of a based free coalgebra
// ---------------------------------------------------------------------

/// Element of `Sym C`: a commutative polynomial in indeterminates
/// `Y_i` indexed by basis indices, in canonical sorted-monomial form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymElement {
    ring: Arc<RingSpec>,
    /// monomial (index → positive exponent) to nonzero coefficient
    terms: BTreeMap<BTreeMap<BasisIndex, u32>, Scalar>,
}

impl SymElement {
    pub fn zero(ring: &Arc<RingSpec>) -> Self {
        SymElement { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<RingSpec>) -> Self {
        let mut s = SymElement::zero(ring);
        s.add_term(BTreeMap::new(), Scalar::one(ring));
        s
    }

    /// The embedding `C → Sym C` sending basis index i to `Y_i`.
    pub fn from_element(e: &Element) -> Self {
        let mut s = SymElement::zero(e.descriptor().ring());
        for (idx, c) in e.terms() {
            s.add_term(BTreeMap::from([(idx.clone(), 1)]), c.clone());
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<BTreeMap<BasisIndex, u32>, Scalar> {
        &self.terms
    }

    fn add_term(&mut self, monomial: BTreeMap<BasisIndex, u32>, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(monomial.clone())
            .or_insert_with(|| Scalar::zero(&self.ring));
        *entry = entry.add(&coeff).expect("same ring");
        if entry.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn add(&self, other: &SymElement) -> SymElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SymElement {
        SymElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &SymElement) -> SymElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &Scalar) -> SymElement {
        let mut out = SymElement::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(factor).expect("same ring"));
        }
        out
    }

    pub fn mul(&self, other: &SymElement) -> SymElement {
        let mut out = SymElement::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (idx, e) in mb {
                    *m.entry(idx.clone()).or_insert(0) += e;
                }
                out.add_term(m, ca.mul(cb).expect("same ring"));
            }
        }
        out
    }
}

/// Canonical projection `T(C) → Sym C`: a pure tensor maps to the
/// commutative product of its legs.
pub fn sym_project(t: &TensorK) -> SymElement {
    let mut out = SymElement::zero(t.descriptor().ring());
    for (key, c) in t.terms() {
        let mut monomial: BTreeMap<BasisIndex, u32> = BTreeMap::new();
        for leg in key {
            *monomial.entry(leg.clone()).or_insert(0) += 1;
        }
        out.add_term(monomial, c.clone());
    }
    out
}

// ---------------------------------------------------------------------
// Power-sum identity in a commutative ring
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisMode {
    /// The power tuples repeat within the horizon, so the checked
    /// window covers all exponents.
    Certified,
    HorizonOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumReport {
    pub hypothesis_holds: bool,
    pub hypothesis_failure_k: Option<u32>,
    pub hypothesis_mode: HypothesisMode,
    pub conclusion_holds: bool,
    /// indices i where `c_i · Π_{j≠i}(g_i − g_j) ≠ 0`
    pub conclusion_failures: Vec<usize>,
}

/// Check the hypothesis `Σ c_i g_i^k = 0` for `k ≤ horizon` and the
/// conclusion `c_i Π_{j≠i}(g_i − g_j) = 0` in any commutative carrier.
/// The hypothesis is flagged `Certified` when the tuple of powers
/// repeats within the horizon, which makes the finite window cover all
/// of N.
pub fn verify_power_sum_identity<T>(
    gs: &[T],
    cs: &[T],
    horizon: u32,
) -> Result<PowerSumReport>
where
    T: Carrier + crate::convolution::CarrierOne,
{
    if gs.len() != cs.len() || gs.is_empty() {
        return Err(CoalgError::LengthMismatch);
    }
    let mut powers: Vec<T> = gs.iter().map(|g| g.one_like()).collect();
    let mut seen: Vec<Vec<T>> = vec![powers.clone()];
    let mut failure: Option<u32> = None;
    let mut cycle = false;
    for k in 0..=horizon {
        if k > 0 {
            powers = powers.iter().zip(gs).map(|(p, g)| p.mul(g)).collect();
            if seen.iter().any(|t| t == &powers) {
                cycle = true;
            }
            seen.push(powers.clone());
        }
        let mut sum = cs[0].zero_like();
        for (c, p) in cs.iter().zip(&powers) {
            sum = sum.add(&c.mul(p));
        }
        if !sum.is_zero() && failure.is_none() {
            failure = Some(k);
        }
    }
    let mut conclusion_failures = Vec::new();
    for i in 0..gs.len() {
        let mut prod = gs[i].one_like();
        for (j, gj) in gs.iter().enumerate() {
            if j != i {
                prod = prod.mul(&gs[i].add(&gj.neg()));
            }
        }
        if !cs[i].mul(&prod).is_zero() {
            conclusion_failures.push(i);
        }
    }
    Ok(PowerSumReport {
        hypothesis_holds: failure.is_none(),
        hypothesis_failure_k: failure,
        hypothesis_mode: if cycle && failure.is_none() {
            HypothesisMode::Certified
        } else {
            HypothesisMode::HorizonOnly
        },
        conclusion_holds: conclusion_failures.is_empty(),
        conclusion_failures,
    })
}

// ---------------------------------------------------------------------
// Grouplike independence in Sym C
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SymIndependenceReport {
    /// indices i with `c_i Π_{j≠i}(Y(g_i) − Y(g_j)) ≠ 0` in Sym C;
    /// the theorem asserts this list is empty.
    pub nonzero_products: Vec<usize>,
    pub conclusion_holds: bool,
}

/// For grouplikes `g_i` and scalars `c_i` with `Σ c_i g_i = 0`,
/// evaluate `c_i Π_{j≠i}(g_i − g_j)` in the symmetric algebra and
/// report exact vanishing.
pub fn verify_grouplike_sym_independence(
    gs: &[Element],
    cs: &[Scalar],
) -> Result<SymIndependenceReport> {
    if gs.len() != cs.len() || gs.is_empty() {
        return Err(CoalgError::LengthMismatch);
    }
    for (i, g) in gs.iter().enumerate() {
        if !is_grouplike(g)? {
            return Err(CoalgError::NotGrouplike(i));
        }
    }
    let descr = gs[0].descriptor().clone();
    let mut sum = Element::zero(&descr);
    for (g, c) in gs.iter().zip(cs) {
        sum = sum.add(&g.scale(c)?)?;
    }
    if !sum.is_zero() {
        return Err(CoalgError::HypothesisFails("sum of c_i g_i is not zero".into()));
    }
    let images: Vec<SymElement> = gs.iter().map(SymElement::from_element).collect();
    let mut nonzero_products = Vec::new();
    for i in 0..gs.len() {
        let mut prod = SymElement::one(descr.ring());
        for (j, img) in images.iter().enumerate() {
            if j != i {
                prod = prod.mul(&images[i].sub(img));
            }
        }
        if !prod.scale(&cs[i]).is_zero() {
            nonzero_products.push(i);
        }
    }
    Ok(SymIndependenceReport {
        conclusion_holds: nonzero_products.is_empty(),
        nonzero_products,
    })
}

/// Exact rank of the coefficient matrix of a family of grouplikes over
/// a field (Q or F_p). Distinct grouplikes must give full rank.
pub fn grouplike_rank(gs: &[Element]) -> Result<usize> {
    if gs.is_empty() {
        return Ok(0);
    }
    let ring = gs[0].descriptor().ring().clone();
    if !ring.is_field() {
        return Err(CoalgError::NotAField(ring.to_string()));
    }
    for (i, g) in gs.iter().enumerate() {
        if !is_grouplike(g)? {
            return Err(CoalgError::NotGrouplike(i));
        }
    }
    let mut columns: Vec<BasisIndex> = gs
        .iter()
        .flat_map(|g| g.terms().keys().cloned())
        .collect();
    columns.sort();
    columns.dedup();
    let matrix: Vec<Vec<Scalar>> = gs
        .iter()
        .map(|g| columns.iter().map(|idx| g.coeff(idx)).collect())
        .collect();
    linalg::rank(&matrix, &ring)
}

// ---------------------------------------------------------------------
// Regularity of bialgebra elements
// ---------------------------------------------------------------------

/// Tri-state regularity verdict for an element of a bialgebra, with a
/// nonzero annihilating witness in the zero-divisor case.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementRegularity {
    Regular,
    ZeroDivisor(Element),
    Unknown,
}

/// Per-family regular-element oracle. `Regular` and `ZeroDivisor`
/// verdicts are proven; `Unknown` makes no claim.
pub fn element_regularity(e: &Element) -> Result<ElementRegularity> {
    let descr = e.descriptor().clone();
    if !descr.has_multiplication() {
        return Err(CoalgError::NoMultiplication);
    }
    if e.is_zero() {
        return Ok(ElementRegularity::ZeroDivisor(Element::one(&descr)));
    }
    if descr.algebra_is_domain() {
        return Ok(ElementRegularity::Regular);
    }
    match descr.family() {
        Family::FrobeniusQuotient { p, .. } => {
            let constant = e.coeff(&BasisIndex::Monomial(vec![0]));
            let top = Element::basis(&descr, BasisIndex::Monomial(vec![*p as i64 - 1]))?;
            if constant.is_zero() {
                debug_assert!(e.mul(&top)?.is_zero());
                return Ok(ElementRegularity::ZeroDivisor(top));
            }
            if descr.ring().is_integral_domain() {
                return Ok(ElementRegularity::Regular);
            }
            Ok(ElementRegularity::Unknown)
        }
        Family::GxQuotient => {
            let constant = e.coeff(&BasisIndex::Monomial(vec![0, 0]));
            let has_g = e.terms().keys().any(|i| matches!(i, BasisIndex::Monomial(v) if v[0] > 0));
            let has_x = e.terms().keys().any(|i| matches!(i, BasisIndex::Monomial(v) if v[1] > 0));
            // the algebra is the fiber product of k[g] and k[x] over k
            if constant.is_zero() && !has_g {
                let g = Element::basis(&descr, BasisIndex::Monomial(vec![1, 0]))?;
                debug_assert!(e.mul(&g)?.is_zero());
                return Ok(ElementRegularity::ZeroDivisor(g));
            }
            if constant.is_zero() && !has_x {
                let x = Element::basis(&descr, BasisIndex::Monomial(vec![0, 1]))?;
                debug_assert!(e.mul(&x)?.is_zero());
                return Ok(ElementRegularity::ZeroDivisor(x));
            }
            if descr.ring().is_integral_domain() {
                return Ok(ElementRegularity::Regular);
            }
            Ok(ElementRegularity::Unknown)
        }
        Family::MonoidDiag(MonoidKind::Finite(monoid)) if descr.ring().is_field() => {
            // kernel of the multiplication operator on k[M]
            let n = monoid.len();
            let ring = descr.ring().clone();
            let mut matrix = vec![vec![Scalar::zero(&ring); n]; n];
            for j in 0..n {
                let ej = Element::basis(&descr, BasisIndex::Word(vec![j as u16]))?;
                let image = e.mul(&ej)?;
                for (idx, c) in image.terms() {
                    let BasisIndex::Word(w) = idx else { unreachable!() };
                    matrix[w[0] as usize][j] = c.clone();
                }
            }
            let kernel = linalg::kernel_basis(&matrix, n, &ring)?;
            match kernel.first() {
                None => Ok(ElementRegularity::Regular),
                Some(v) => {
                    let mut witness = Element::zero(&descr);
                    for (j, c) in v.iter().enumerate() {
                        witness.add_term(BasisIndex::Word(vec![j as u16]), c.clone())?;
                    }
                    debug_assert!(e.mul(&witness)?.is_zero());
                    Ok(ElementRegularity::ZeroDivisor(witness))
                }
            }
        }
        _ => Ok(ElementRegularity::Unknown),
    }
}

// ---------------------------------------------------------------------
// Independence over id-unipotents
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndependenceVerdict {
    /// Σ b_i g_i ≠ 0: the instance tests nothing.
    NoRelation,
    /// the assumptions hold, every bound is certified, and all b_i = 0.
    ConsistentAllZero,
    /// some regularity assumption fails or is undecided; no claim made.
    AssumptionsNotMet,
    /// some coefficient is not certified id-unipotent within the
    /// horizon; no claim made.
    BoundsNotCertified,
    /// the assumptions hold yet a nonzero coefficient satisfies the
    /// relation: this would falsify the implementation.
    TheoremViolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    /// regularity of each g_i (Assumption 2)
    pub grouplike_regularity: Vec<ElementRegularity>,
    /// regularity of each difference g_i − g_j for i < j (Assumption 1)
    pub difference_regularity: Vec<((usize, usize), ElementRegularity)>,
    /// degree-upper bounds of the coefficients b_i
    pub bounds: Vec<UnipotenceBound>,
    pub sum_is_zero: bool,
    pub coefficients_zero: Vec<bool>,
    pub verdict: IndependenceVerdict,
}

/// Verify one instance of grouplike independence over id-unipotents in
/// a commutative bialgebra: report the regularity oracle results, the
/// id-unipotence certificates, and a verdict consistent with the
/// statement.
pub fn verify_grouplike_unipotent_independence(
    gs: &[Element],
    bs: &[Element],
    horizon: u32,
) -> Result<IndependenceReport> {
    if gs.len() != bs.len() || gs.is_empty() {
        return Err(CoalgError::LengthMismatch);
    }
    let descr = gs[0].descriptor().clone();
    if !descr.is_commutative() {
        return Err(CoalgError::NotCommutativeFamily);
    }
    for (i, g) in gs.iter().enumerate() {
        if !is_grouplike(g)? {
            return Err(CoalgError::NotGrouplike(i));
        }
    }

    let grouplike_regularity: Vec<ElementRegularity> =
        gs.iter().map(element_regularity).collect::<Result<_>>()?;
    let mut difference_regularity = Vec::new();
    for i in 0..gs.len() {
        for j in (i + 1)..gs.len() {
            let diff = gs[i].sub(&gs[j])?;
            difference_regularity.push(((i, j), element_regularity(&diff)?));
        }
    }
    let bounds: Vec<UnipotenceBound> = bs
        .iter()
        .map(|b| degree_upper_bound(b, horizon))
        .collect::<Result<_>>()?;

    let mut sum = Element::zero(&descr);
    for (b, g) in bs.iter().zip(gs) {
        sum = sum.add(&b.mul(g)?)?;
    }
    let sum_is_zero = sum.is_zero();
    let coefficients_zero: Vec<bool> = bs.iter().map(Element::is_zero).collect();

    let assumptions_ok = grouplike_regularity
        .iter()
        .chain(difference_regularity.iter().map(|(_, r)| r))
        .all(|r| matches!(r, ElementRegularity::Regular));
    let bounds_certified = bounds
        .iter()
        .all(|b| matches!(b, UnipotenceBound::Bound { mode: BoundMode::Certified, .. }));

    let verdict = if !sum_is_zero {
        IndependenceVerdict::NoRelation
    } else if !assumptions_ok {
        IndependenceVerdict::AssumptionsNotMet
    } else if !bounds_certified {
        IndependenceVerdict::BoundsNotCertified
    } else if coefficients_zero.iter().all(|z| *z) {
        IndependenceVerdict::ConsistentAllZero
    } else {
        IndependenceVerdict::TheoremViolated
    };

    Ok(IndependenceReport {
        grouplike_regularity,
        difference_regularity,
        bounds,
        sum_is_zero,
        coefficients_zero,
        verdict,
    })
}
