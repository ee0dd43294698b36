//! The dual algebra of a graded bialgebra, truncated to a degree
//! window: the filtration by annihilators of powers of the
//! augmentation ideal, the shift action `⟨u▷f|v⟩ = ⟨f|vu⟩`, the
//! Leibniz-type shift identity, character convolution, and the finite
//! independence systems for characters over the filtered dual.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::One;

use crate::basis::BasisIndex;
use crate::bialgebra::{counit, BialgebraDescriptor, Element, Family};
use crate::linalg;
use crate::scalar::{RingSpec, Scalar};
use crate::{CoalgError, Result};

fn require_graded(descriptor: &Arc<BialgebraDescriptor>) -> Result<()> {
    match descriptor.family() {
        Family::PolynomialPrimitive | Family::InfiltrationQ { .. } | Family::TensorConc { .. } => Ok(()),
        _ => Err(CoalgError::NotGradedFamily),
    }
}

/// A linear form on a graded bialgebra, stored by its values on basis
/// indices up to a truncation degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    descriptor: Arc<BialgebraDescriptor>,
    truncation: i64,
    coeffs: BTreeMap<BasisIndex, Scalar>,
}

impl DualFunctional {
    pub fn zero(descriptor: &Arc<BialgebraDescriptor>, truncation: i64) -> Result<Self> {
        require_graded(descriptor)?;
        if truncation < 0 || truncation > descriptor.truncation().unwrap_or(i64::MAX) {
            return Err(CoalgError::TruncationExceeded {
                degree: truncation,
                limit: descriptor.truncation().unwrap_or(i64::MAX),
            });
        }
        Ok(DualFunctional { descriptor: descriptor.clone(), truncation, coeffs: BTreeMap::new() })
    }

    /// Build from values on every basis index of degree ≤ truncation.
    pub fn from_fn(
        descriptor: &Arc<BialgebraDescriptor>,
        truncation: i64,
        mut f: impl FnMut(&BasisIndex) -> Result<Scalar>,
    ) -> Result<Self> {
        let mut out = DualFunctional::zero(descriptor, truncation)?;
        for idx in descriptor.basis_up_to(truncation) {
            let v = f(&idx)?;
            if !v.is_zero() {
                out.coeffs.insert(idx, v);
            }
        }
        Ok(out)
    }

    /// The counit as a functional: the convolution unit of the dual.
    pub fn eps(descriptor: &Arc<BialgebraDescriptor>, truncation: i64) -> Result<Self> {
        DualFunctional::from_fn(descriptor, truncation, |idx| descriptor.counit_basis(idx))
    }

    /// The dual-basis functional of one index.
    pub fn dual_basis(
        descriptor: &Arc<BialgebraDescriptor>,
        index: &BasisIndex,
        truncation: i64,
    ) -> Result<Self> {
        descriptor.check_index(index)?;
        let ring = descriptor.ring().clone();
        DualFunctional::from_fn(descriptor, truncation, |idx| {
            Ok(if idx == index { Scalar::one(&ring) } else { Scalar::zero(&ring) })
        })
    }

    /// The character of `k[x]`-type families determined by `x ↦ α`:
    /// the truncated Kleene star `(αx)*`.
    pub fn character_x(
        descriptor: &Arc<BialgebraDescriptor>,
        alpha: &Scalar,
        truncation: i64,
    ) -> Result<Self> {
        if !matches!(
            descriptor.family(),
            Family::PolynomialPrimitive | Family::InfiltrationQ { .. }
        ) {
            return Err(CoalgError::BadParameter("character_x needs a univariate family".into()));
        }
        DualFunctional::from_fn(descriptor, truncation, |idx| {
            let BasisIndex::Monomial(e) = idx else { unreachable!() };
            Ok(alpha.pow(e[0] as u32))
        })
    }

    /// The character of the tensor (conc) bialgebra determined by its
    /// values on letters.
    pub fn character_words(
        descriptor: &Arc<BialgebraDescriptor>,
        letter_values: &[Scalar],
        truncation: i64,
    ) -> Result<Self> {
        let Family::TensorConc { alphabet } = descriptor.family() else {
            return Err(CoalgError::BadParameter("character_words needs the conc family".into()));
        };
        if letter_values.len() != alphabet.len() {
            return Err(CoalgError::LengthMismatch);
        }
        DualFunctional::from_fn(descriptor, truncation, |idx| {
            let BasisIndex::Word(w) = idx else { unreachable!() };
            let mut acc = Scalar::one(descriptor.ring());
            for &l in w {
                acc = acc.mul(&letter_values[l as usize])?;
            }
            Ok(acc)
        })
    }

    pub fn descriptor(&self) -> &Arc<BialgebraDescriptor> {
        &self.descriptor
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn coeffs(&self) -> &BTreeMap<BasisIndex, Scalar> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value on a basis index within the truncation window.
    pub fn value(&self, index: &BasisIndex) -> Result<Scalar> {
        if index.degree() > self.truncation {
            return Err(CoalgError::TruncationExceeded {
                degree: index.degree(),
                limit: self.truncation,
            });
        }
        Ok(self
            .coeffs
            .get(index)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.descriptor.ring())))
    }

    /// Pairing `⟨f|v⟩` with an element of degree within the window.
    pub fn pair(&self, v: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero(self.descriptor.ring());
        for (idx, c) in v.terms() {
            acc = acc.add(&self.value(idx)?.mul(c)?)?;
        }
        Ok(acc)
    }

    fn check_compatible(&self, other: &DualFunctional) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(CoalgError::DescriptorMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &DualFunctional) -> Result<DualFunctional> {
        self.check_compatible(other)?;
        let t = self.truncation.min(other.truncation);
        DualFunctional::from_fn(&self.descriptor, t, |idx| self.value(idx)?.add(&other.value(idx)?))
    }

    pub fn neg(&self) -> DualFunctional {
        DualFunctional {
            descriptor: self.descriptor.clone(),
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|(i, c)| (i.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &DualFunctional) -> Result<DualFunctional> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &Scalar) -> Result<DualFunctional> {
        let t = self.truncation;
        DualFunctional::from_fn(&self.descriptor, t, |idx| self.value(idx)?.mul(factor))
    }

    /// Termwise agreement on every basis index of degree ≤ `up_to`.
    pub fn agrees_with(&self, other: &DualFunctional, up_to: i64) -> Result<bool> {
        self.check_compatible(other)?;
        for idx in self.descriptor.basis_up_to(up_to) {
            if self.value(&idx)? != other.value(&idx)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Convolution on the dual: `(f ⊛ g)(b) = Σ f(b₁) g(b₂)`.
    pub fn convolve(&self, other: &DualFunctional) -> Result<DualFunctional> {
        self.check_compatible(other)?;
        let t = self.truncation.min(other.truncation);
        DualFunctional::from_fn(&self.descriptor, t, |idx| {
            let mut acc = Scalar::zero(self.descriptor.ring());
            for (u, v, c) in self.descriptor.delta_basis(idx)? {
                acc = acc.add(&self.value(&u)?.mul(&other.value(&v)?)?.mul(&c)?)?;
            }
            Ok(acc)
        })
    }

    pub fn conv_power(&self, n: u32) -> Result<DualFunctional> {
        let mut acc = DualFunctional::eps(&self.descriptor, self.truncation)?;
        for _ in 0..n {
            acc = self.convolve(&acc)?;
        }
        Ok(acc)
    }
}

/// Filtration degree: these graded families have `B₊^N` spanned by the
/// degrees ≥ N, so the degree of a functional is the maximal degree in
/// its support (−1 for the zero functional).
pub fn filtration_degree(f: &DualFunctional) -> Result<i64> {
    require_graded(f.descriptor())?;
    Ok(f.coeffs.keys().map(|i| i.degree()).max().unwrap_or(-1))
}

/// The left shift `⟨u▷f|v⟩ = ⟨f|vu⟩`, valid up to the truncation of
/// `f` minus the degree of `u`.
pub fn shift(u: &Element, f: &DualFunctional) -> Result<DualFunctional> {
    let deg_u = u.terms().keys().map(|i| i.degree()).max().unwrap_or(0);
    if deg_u > f.truncation {
        return Err(CoalgError::TruncationExceeded { degree: deg_u, limit: f.truncation });
    }
    let out_trunc = f.truncation - deg_u;
    DualFunctional::from_fn(f.descriptor(), out_trunc, |idx| {
        let v = Element::basis(f.descriptor(), idx.clone())?;
        f.pair(&v.mul(u)?)
    })
}

/// The mirrored right shift `⟨f◁u|v⟩ = ⟨f|uv⟩`.
pub fn shift_right(u: &Element, f: &DualFunctional) -> Result<DualFunctional> {
    let deg_u = u.terms().keys().map(|i| i.degree()).max().unwrap_or(0);
    if deg_u > f.truncation {
        return Err(CoalgError::TruncationExceeded { degree: deg_u, limit: f.truncation });
    }
    let out_trunc = f.truncation - deg_u;
    DualFunctional::from_fn(f.descriptor(), out_trunc, |idx| {
        let v = Element::basis(f.descriptor(), idx.clone())?;
        f.pair(&u.mul(&v)?)
    })
}

/// Check the shift identity
/// `u▷(f₁⊛f₂) = (u▷f₁)⊛f₂ + f₁⊛(u▷f₂) + Σ (u⁽¹⁾▷f₁)⊛(u⁽²⁾▷f₂)`
/// for `u` in the augmentation ideal, where the correction sum runs
/// over `Δ(u) − u⊗1 − 1⊗u`. Both sides are compared exactly on all
/// basis indices within the shifted window.
pub fn leibniz_shift_check(u: &Element, f1: &DualFunctional, f2: &DualFunctional) -> Result<bool> {
    if !counit(u)?.is_zero() {
        return Err(CoalgError::NotInAugmentationIdeal);
    }
    f1.check_compatible(f2)?;
    let descr = f1.descriptor().clone();
    let lhs = shift(u, &f1.convolve(f2)?)?;
    let mut rhs = shift(u, f1)?.convolve(f2)?.add(&f1.convolve(&shift(u, f2)?)?)?;
    // correction terms from Δ(u) − u⊗1 − 1⊗u
    let mut correction = crate::bialgebra::delta(u)?;
    let unit_key = descr.unit_index();
    for (idx, c) in u.terms() {
        let mut t1 = crate::bialgebra::TensorK::zero(&descr, 2);
        t1.add_term(vec![idx.clone(), unit_key.clone()], c.clone())?;
        let mut t2 = crate::bialgebra::TensorK::zero(&descr, 2);
        t2.add_term(vec![unit_key.clone(), idx.clone()], c.clone())?;
        correction = correction.sub(&t1)?.sub(&t2)?;
    }
    for (key, c) in correction.terms() {
        let u1 = Element::basis(&descr, key[0].clone())?;
        let u2 = Element::basis(&descr, key[1].clone())?;
        let term = shift(&u1, f1)?.convolve(&shift(&u2, f2)?)?.scale(c)?;
        rhs = rhs.add(&term)?;
    }
    let window = lhs.truncation().min(rhs.truncation());
    lhs.agrees_with(&rhs, window)
}

/// Check that convolution respects the dual filtration:
/// `deg(f ⊛ g) ≤ deg f + deg g`.
pub fn verify_filtration_product(f: &DualFunctional, g: &DualFunctional) -> Result<bool> {
    let df = filtration_degree(f)?;
    let dg = filtration_degree(g)?;
    let dfg = filtration_degree(&f.convolve(g)?)?;
    Ok(dfg <= df + dg)
}

/// Report of the infiltration character product `(αx)* ↑q (βx)*`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterProductReport {
    pub product: DualFunctional,
    pub expected: DualFunctional,
    pub matches: bool,
}

/// Convolve the characters `(αx)*` and `(βx)*` of the q-infiltration
/// bialgebra and compare termwise with `((qαβ+α+β)x)*`.
pub fn infiltration_character_product(
    alpha: &Scalar,
    beta: &Scalar,
    q: &Scalar,
    truncation: i64,
) -> Result<CharacterProductReport> {
    let ring = alpha.ring().clone();
    let descr = BialgebraDescriptor::infiltration(&ring, q.clone(), truncation)?;
    let f = DualFunctional::character_x(&descr, alpha, truncation)?;
    let g = DualFunctional::character_x(&descr, beta, truncation)?;
    let product = f.convolve(&g)?;
    let gamma = q.mul(alpha)?.mul(beta)?.add(alpha)?.add(beta)?;
    let expected = DualFunctional::character_x(&descr, &gamma, truncation)?;
    let matches = product.agrees_with(&expected, truncation)?;
    Ok(CharacterProductReport { product, expected, matches })
}

/// Outcome of a character independence system.
#[derive(Debug, Clone, PartialEq)]
pub enum IndependenceSystemOutcome {
    /// Only the zero tuple of polynomial coefficients satisfies
    /// `Σ p_g ⊛ g = 0` within the window.
    TrivialOnly,
    /// A nonzero relation: the functional coefficients `p_g`, indexed
    /// like the input characters, with `Σ p_g ⊛ g = 0` verified
    /// termwise.
    Witness(Vec<DualFunctional>),
}

/// The exact linear system behind the character independence check:
/// one row per pairing equation `⟨Σ p_g ⊛ g | b⟩ = 0`, one column per
/// unknown coefficient `λ_{g,i}` of `p_g` on the dual basis index `i`.
pub struct CharacterSystem {
    pub matrix: Vec<Vec<Scalar>>,
    /// column labels: (character position, unknown basis index)
    pub columns: Vec<(usize, BasisIndex)>,
    pub unknown_basis: Vec<BasisIndex>,
    pub truncation: i64,
}

/// Assemble the system over Q for relations `Σ_g p_g ⊛ g = 0` with
/// `p_g` supported in degrees ≤ `max_deg`.
pub fn assemble_character_system(
    chars: &[DualFunctional],
    max_deg: i64,
) -> Result<CharacterSystem> {
    if chars.is_empty() {
        return Err(CoalgError::LengthMismatch);
    }
    let descr = chars[0].descriptor().clone();
    let ring = descr.ring().clone();
    if !matches!(&*ring, RingSpec::Rationals | RingSpec::Integers) {
        return Err(CoalgError::NotIntegralDomain);
    }
    for c in chars {
        c.check_compatible(&chars[0])?;
    }
    for i in 0..chars.len() {
        for j in (i + 1)..chars.len() {
            let window = chars[i].truncation().min(chars[j].truncation());
            if chars[i].agrees_with(&chars[j], window)? {
                return Err(CoalgError::BadParameter("characters must be pairwise distinct".into()));
            }
        }
    }
    let trunc = chars.iter().map(|c| c.truncation()).min().unwrap();
    let unknown_basis = descr.basis_up_to(max_deg.min(trunc));
    let equations = descr.basis_up_to(trunc);
    let rationals: Arc<RingSpec> = Arc::new(RingSpec::Rationals);
    let mut matrix: Vec<Vec<Scalar>> = Vec::with_capacity(equations.len());
    for b in &equations {
        let mut row = Vec::with_capacity(chars.len() * unknown_basis.len());
        let expansion = descr.delta_basis(b)?;
        for g in chars {
            for i in &unknown_basis {
                // coefficient of λ_{g,i}: (e_i^∨ ⊛ g)(b)
                let mut acc = Scalar::zero(&ring);
                for (u, v, c) in &expansion {
                    if u == i {
                        acc = acc.add(&g.value(v)?.mul(c)?)?;
                    }
                }
                let q = acc
                    .to_rational()
                    .ok_or_else(|| CoalgError::BadParameter("rational lift failed".into()))?;
                row.push(Scalar::from_rational(&rationals, &q)?);
            }
        }
        matrix.push(row);
    }
    let mut columns = Vec::new();
    for g in 0..chars.len() {
        for i in &unknown_basis {
            columns.push((g, i.clone()));
        }
    }
    Ok(CharacterSystem { matrix, columns, unknown_basis, truncation: trunc })
}

/// Plain text form of the assembled system, one row per line with
/// whitespace-separated rational entries, for external checking.
pub fn character_system_text(chars: &[DualFunctional], max_deg: i64) -> Result<String> {
    let system = assemble_character_system(chars, max_deg)?;
    let mut out = String::new();
    for row in &system.matrix {
        let line: Vec<String> = row.iter().map(Scalar::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Assemble and solve the exact linear system for relations
/// `Σ_g p_g ⊛ g = 0` with `p_g` supported in degrees ≤ `max_deg`,
/// tested against all basis indices of degree ≤ the common truncation.
pub fn character_independence_system(
    chars: &[DualFunctional],
    max_deg: i64,
) -> Result<IndependenceSystemOutcome> {
    let system = assemble_character_system(chars, max_deg)?;
    let descr = chars[0].descriptor().clone();
    let ring = descr.ring().clone();
    let CharacterSystem { matrix, unknown_basis, truncation: trunc, .. } = system;
    let rationals: Arc<RingSpec> = Arc::new(RingSpec::Rationals);
    let cols = chars.len() * unknown_basis.len();
    let kernel = linalg::kernel_basis(&matrix, cols, &rationals)?;
    let Some(vector) = kernel.first() else {
        return Ok(IndependenceSystemOutcome::TrivialOnly);
    };
    // scale to the coefficient ring (clear denominators over Z)
    let mut lcm = num_bigint::BigInt::one();
    for s in vector {
        let q = s.to_rational().unwrap();
        lcm = lcm.lcm(q.denom());
    }
    let scale = num_rational::BigRational::from(lcm);
    let mut witness = Vec::with_capacity(chars.len());
    for (gi, _g) in chars.iter().enumerate() {
        let mut p = DualFunctional::zero(&descr, trunc)?;
        for (ii, idx) in unknown_basis.iter().enumerate() {
            let q = vector[gi * unknown_basis.len() + ii].to_rational().unwrap() * &scale;
            let c = Scalar::from_rational(&ring, &q)?;
            if !c.is_zero() {
                p.coeffs.insert(idx.clone(), c);
            }
        }
        witness.push(p);
    }
    // verify the relation termwise before returning it
    let mut sum = DualFunctional::zero(&descr, trunc)?;
    for (p, g) in witness.iter().zip(chars) {
        sum = sum.add(&p.convolve(g)?)?;
    }
    assert!(sum.is_zero(), "kernel vector fails to satisfy the relation");
    assert!(witness.iter().any(|p| !p.is_zero()));
    Ok(IndependenceSystemOutcome::Witness(witness))
}

/// Invertibility of the character `(αx)*` in the convolution monoid of
/// a univariate family. Under the shuffle (q = 0) the character monoid
/// is the additive group of the ring, so every character is
/// invertible; for a general infiltration parameter the monoid is the
/// multiplicative one through `(αx)* ↦ 1 + qα`, so `(αx)*` is
/// invertible exactly when `1 + qα` is a unit.
pub fn character_x_is_invertible(
    descriptor: &Arc<BialgebraDescriptor>,
    alpha: &Scalar,
) -> Result<bool> {
    match descriptor.family() {
        Family::PolynomialPrimitive => Ok(true),
        Family::InfiltrationQ { q } => {
            if q.is_zero() {
                Ok(true)
            } else {
                let shifted = q.mul(alpha)?.add(&Scalar::one(descriptor.ring()))?;
                Ok(shifted.inverse().is_some())
            }
        }
        _ => Err(CoalgError::BadParameter(
            "character invertibility is classified for univariate families".into(),
        )),
    }
}

/// Injectivity of the monomial map on star characters in the shuffle
/// setting: all values `Σ α_i c_i` over exponent vectors `α` with
/// entries ≤ `bound` must be pairwise distinct.
pub fn monomial_map_injectivity(cs: &[Scalar], bound: u32) -> Result<bool> {
    if cs.is_empty() {
        return Ok(true);
    }
    let ring = cs[0].ring().clone();
    if !ring.is_integral_domain() {
        return Err(CoalgError::NotIntegralDomain);
    }
    let mut values: Vec<Scalar> = Vec::new();
    let mut exps = vec![0u32; cs.len()];
    loop {
        let mut v = Scalar::zero(&ring);
        for (e, c) in exps.iter().zip(cs) {
            v = v.add(&c.mul(&Scalar::from_i64(&ring, *e as i64))?)?;
        }
        values.push(v);
        let mut pos = 0;
        loop {
            if pos == exps.len() {
                break;
            }
            exps[pos] += 1;
            if exps[pos] <= bound {
                break;
            }
            exps[pos] = 0;
            pos += 1;
        }
        if pos == exps.len() {
            break;
        }
    }
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if values[i] == values[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialgebra::random_element;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qq() -> Arc<RingSpec> {
        Arc::new(RingSpec::Rationals)
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(&qq(), &BigRational::new(BigInt::from(n), BigInt::from(d))).unwrap()
    }

    fn standard(trunc: i64) -> Arc<BialgebraDescriptor> {
        BialgebraDescriptor::polynomial_primitive(&qq(), trunc).unwrap()
    }

    fn infiltration_q1(trunc: i64) -> Arc<BialgebraDescriptor> {
        BialgebraDescriptor::infiltration(&qq(), Scalar::one(&qq()), trunc).unwrap()
    }

    fn mono(n: i64) -> BasisIndex {
        BasisIndex::Monomial(vec![n])
    }

    #[test]
    fn filtration_degree_examples() {
        let descr = standard(8);
        let eps = DualFunctional::eps(&descr, 8).unwrap();
        assert_eq!(filtration_degree(&eps).unwrap(), 0);
        let xdual = DualFunctional::dual_basis(&descr, &mono(1), 8).unwrap();
        assert_eq!(filtration_degree(&xdual).unwrap(), 1);
        let zero = DualFunctional::zero(&descr, 8).unwrap();
        assert_eq!(filtration_degree(&zero).unwrap(), -1);
    }

    #[test]
    fn shift_examples() {
        let descr = standard(8);
        let x = Element::basis(&descr, mono(1)).unwrap();
        // x ▷ (x²)^∨ = (x)^∨
        let x2dual = DualFunctional::dual_basis(&descr, &mono(2), 8).unwrap();
        let shifted = shift(&x, &x2dual).unwrap();
        let expected = DualFunctional::dual_basis(&descr, &mono(1), 7).unwrap();
        assert!(shifted.agrees_with(&expected, 7).unwrap());
        // x ▷ ε = 0
        let eps = DualFunctional::eps(&descr, 8).unwrap();
        assert!(shift(&x, &eps).unwrap().is_zero());
        // a character eats its own value: x ▷ (αx)* = α (αx)*
        let alpha = q(2, 3);
        let star = DualFunctional::character_x(&descr, &alpha, 8).unwrap();
        let shifted = shift(&x, &star).unwrap();
        let scaled = star.scale(&alpha).unwrap();
        assert!(shifted.agrees_with(&scaled, 7).unwrap());
    }

    #[test]
    fn shift_is_a_left_action_and_lowers_degree() {
        let descr = infiltration_q1(12);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let f = DualFunctional::from_fn(&descr, 12, |idx| {
                Ok(if idx.degree() <= 5 {
                    crate::scalar::random_scalar(&mut rng.clone(), &qq())
                } else {
                    Scalar::zero(&qq())
                })
            })
            .unwrap();
            let u = random_element(&mut rng, &descr, 2, 2);
            let v = random_element(&mut rng, &descr, 2, 2);
            let uv = u.mul(&v).unwrap();
            let lhs = shift(&uv, &f).unwrap();
            let rhs = shift(&u, &shift(&v, &f).unwrap()).unwrap();
            let window = lhs.truncation().min(rhs.truncation());
            assert!(lhs.agrees_with(&rhs, window).unwrap());

            // degree drop for u in the augmentation ideal
            let mut u_plus = u.clone();
            let eps_u = counit(&u_plus).unwrap();
            u_plus = u_plus
                .sub(&Element::one(&descr).scale(&eps_u).unwrap())
                .unwrap();
            if u_plus.is_zero() {
                continue;
            }
            let df = filtration_degree(&f).unwrap();
            if df >= 0 {
                let dropped = shift(&u_plus, &f).unwrap();
                assert!(filtration_degree(&dropped).unwrap() < df);
            }
        }
    }

    #[test]
    fn right_shift_smoke() {
        let descr = standard(8);
        let x = Element::basis(&descr, mono(1)).unwrap();
        let x2dual = DualFunctional::dual_basis(&descr, &mono(2), 8).unwrap();
        // k[x] is commutative, so both shifts agree
        let left = shift(&x, &x2dual).unwrap();
        let right = shift_right(&x, &x2dual).unwrap();
        assert!(left.agrees_with(&right, 7).unwrap());
        assert!(filtration_degree(&right).unwrap() < filtration_degree(&x2dual).unwrap());
    }

    #[test]
    fn leibniz_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        // standard family: x is primitive, the correction sum vanishes
        let std = standard(12);
        let x = Element::basis(&std, mono(1)).unwrap();
        for _ in 0..10 {
            let f1 = random_functional(&mut rng, &std, 5, 12);
            let f2 = random_functional(&mut rng, &std, 5, 12);
            assert!(leibniz_shift_check(&x, &f1, &f2).unwrap());
        }
        // infiltration: a single correction term q·x⊗x
        let inf = infiltration_q1(12);
        let xq = Element::basis(&inf, mono(1)).unwrap();
        for _ in 0..10 {
            let f1 = random_functional(&mut rng, &inf, 5, 12);
            let f2 = random_functional(&mut rng, &inf, 5, 12);
            assert!(leibniz_shift_check(&xq, &f1, &f2).unwrap());
        }
        // f2 = ε: both sides reduce to u▷f1
        let f1 = random_functional(&mut rng, &std, 5, 12);
        let eps = DualFunctional::eps(&std, 12).unwrap();
        assert!(leibniz_shift_check(&x, &f1, &eps).unwrap());
        // u outside the augmentation ideal is rejected
        let one = Element::one(&std);
        assert!(matches!(
            leibniz_shift_check(&one, &f1, &eps),
            Err(CoalgError::NotInAugmentationIdeal)
        ));
    }

    fn random_functional(
        rng: &mut ChaCha8Rng,
        descr: &Arc<BialgebraDescriptor>,
        max_deg: i64,
        trunc: i64,
    ) -> DualFunctional {
        let mut f = DualFunctional::zero(descr, trunc).unwrap();
        for idx in descr.basis_up_to(max_deg) {
            if rng.gen_bool(0.6) {
                let c = crate::scalar::random_scalar(rng, descr.ring());
                if !c.is_zero() {
                    f.coeffs.insert(idx, c);
                }
            }
        }
        f
    }

    #[test]
    fn filtration_product_examples() {
        let descr = standard(12);
        let xdual = DualFunctional::dual_basis(&descr, &mono(1), 12).unwrap();
        let prod = xdual.convolve(&xdual).unwrap();
        // the shuffle square of x^∨ is 2 (x²)^∨
        assert_eq!(prod.value(&mono(2)).unwrap(), Scalar::from_i64(&qq(), 2));
        assert_eq!(filtration_degree(&prod).unwrap(), 2);
        assert!(verify_filtration_product(&xdual, &xdual).unwrap());

        // ε is neutral and preserves the degree
        let eps = DualFunctional::eps(&descr, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let f = random_functional(&mut rng, &descr, 5, 12);
        let ef = eps.convolve(&f).unwrap();
        assert!(ef.agrees_with(&f, 12).unwrap());
        assert_eq!(filtration_degree(&ef).unwrap(), filtration_degree(&f).unwrap());
    }

    #[test]
    fn character_convolution_is_a_character() {
        // the convolution of two characters is multiplicative
        let descr = infiltration_q1(12);
        let f = DualFunctional::character_x(&descr, &q(1, 2), 12).unwrap();
        let g = DualFunctional::character_x(&descr, &q(3, 1), 12).unwrap();
        let fg = f.convolve(&g).unwrap();
        for a in 0..=6i64 {
            for b in 0..=(6 - a) {
                let lhs = fg.value(&mono(a + b)).unwrap();
                let rhs = fg.value(&mono(a)).unwrap().mul(&fg.value(&mono(b)).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // so it is again a star: its parameter is its value on x
        let gamma = fg.value(&mono(1)).unwrap();
        let star = DualFunctional::character_x(&descr, &gamma, 12).unwrap();
        assert!(fg.agrees_with(&star, 12).unwrap());
    }

    #[test]
    fn infiltration_character_product_examples() {
        // q = 0: the shuffle law (α+β)
        let r = infiltration_character_product(&q(2, 1), &q(5, 1), &q(0, 1), 10).unwrap();
        assert!(r.matches);
        assert_eq!(r.product.value(&mono(1)).unwrap(), q(7, 1));
        // q = 1, α = β = 1: parameter 3
        let r = infiltration_character_product(&q(1, 1), &q(1, 1), &q(1, 1), 10).unwrap();
        assert!(r.matches);
        assert_eq!(r.product.value(&mono(1)).unwrap(), q(3, 1));
        // β = 0 gives ε-neutrality
        let r = infiltration_character_product(&q(4, 3), &q(0, 1), &q(1, 1), 10).unwrap();
        assert!(r.matches);
        assert_eq!(r.product.value(&mono(1)).unwrap(), q(4, 3));
    }

    #[test]
    fn shuffle_powers_scale_the_parameter() {
        let descr = standard(10);
        let alpha = q(2, 7);
        let star = DualFunctional::character_x(&descr, &alpha, 10).unwrap();
        for n in 0..=5u32 {
            let powered = star.conv_power(n).unwrap();
            let expected = DualFunctional::character_x(
                &descr,
                &alpha.mul(&Scalar::from_i64(&qq(), n as i64)).unwrap(),
                10,
            )
            .unwrap();
            assert!(powered.agrees_with(&expected, 10).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn conc_characters_add_under_convolution() {
        let descr = BialgebraDescriptor::tensor_conc(&qq(), &["x", "y"], 6).unwrap();
        let phi1 = [q(1, 2), q(3, 1)];
        let phi2 = [q(-2, 1), q(1, 3)];
        let c1 = DualFunctional::character_words(&descr, &phi1, 6).unwrap();
        let c2 = DualFunctional::character_words(&descr, &phi2, 6).unwrap();
        let sum_values = [
            phi1[0].add(&phi2[0]).unwrap(),
            phi1[1].add(&phi2[1]).unwrap(),
        ];
        let expected = DualFunctional::character_words(&descr, &sum_values, 6).unwrap();
        assert!(c1.convolve(&c2).unwrap().agrees_with(&expected, 6).unwrap());
    }

    #[test]
    fn character_independence_trivial_cases() {
        let descr = standard(8);
        let chars = vec![
            DualFunctional::character_x(&descr, &q(1, 1), 8).unwrap(),
            DualFunctional::character_x(&descr, &q(2, 1), 8).unwrap(),
        ];
        assert_eq!(
            character_independence_system(&chars, 2).unwrap(),
            IndependenceSystemOutcome::TrivialOnly
        );
        // a single ε: p ⊛ ε = p forces p = 0
        let eps = vec![DualFunctional::eps(&descr, 8).unwrap()];
        assert_eq!(
            character_independence_system(&eps, 3).unwrap(),
            IndependenceSystemOutcome::TrivialOnly
        );
    }

    #[test]
    fn character_independence_witness_for_all_characters() {
        // with q = 1 the non-invertible character (−x)* admits the
        // annihilating functional x^∨
        let descr = infiltration_q1(12);
        let g = DualFunctional::character_x(&descr, &q(-1, 1), 12).unwrap();
        match character_independence_system(std::slice::from_ref(&g), 2).unwrap() {
            IndependenceSystemOutcome::Witness(ps) => {
                assert_eq!(ps.len(), 1);
                assert!(!ps[0].is_zero());
                assert!(ps[0].convolve(&g).unwrap().is_zero());
            }
            other => panic!("expected witness, got {other:?}"),
        }
        // the specific δ_{n,1} functional also annihilates it
        let f = DualFunctional::dual_basis(&descr, &mono(1), 12).unwrap();
        assert!(f.convolve(&g).unwrap().is_zero());
    }

    #[test]
    fn monomial_map_examples() {
        assert!(monomial_map_injectivity(&[q(1, 1)], 3).unwrap());
        assert!(!monomial_map_injectivity(&[q(1, 1), q(2, 1)], 3).unwrap());
        assert!(monomial_map_injectivity(&[q(1, 1), q(10, 1)], 3).unwrap());
    }

    #[test]
    fn monomial_map_collisions_are_star_power_identities() {
        // a collision of the monomial map over the shuffle is an exact
        // relation between star powers: with c = (1, 2) the vectors
        // (2, 0) and (0, 1) collide, so (1x)*^{⧢2} = (2x)*
        let std = standard(10);
        assert!(!monomial_map_injectivity(&[q(1, 1), q(2, 1)], 3).unwrap());
        let one_star = DualFunctional::character_x(&std, &q(1, 1), 10).unwrap();
        let two_star = DualFunctional::character_x(&std, &q(2, 1), 10).unwrap();
        assert!(one_star.conv_power(2).unwrap().agrees_with(&two_star, 10).unwrap());

        // an injective parameter family yields pairwise distinct
        // star monomials within the window
        let cs = [q(1, 1), q(10, 1)];
        assert!(monomial_map_injectivity(&cs, 3).unwrap());
        let mut seen: Vec<DualFunctional> = Vec::new();
        for e0 in 0..=3u32 {
            for e1 in 0..=3u32 {
                let f = DualFunctional::character_x(&std, &cs[0], 10)
                    .unwrap()
                    .conv_power(e0)
                    .unwrap()
                    .convolve(&DualFunctional::character_x(&std, &cs[1], 10).unwrap().conv_power(e1).unwrap())
                    .unwrap();
                for old in &seen {
                    assert!(!f.agrees_with(old, 10).unwrap());
                }
                seen.push(f);
            }
        }
    }

    #[test]
    fn character_invertibility_classification() {
        // under the shuffle every character is invertible
        let std = standard(8);
        assert!(character_x_is_invertible(&std, &q(7, 3)).unwrap());
        // with q = 1 over Q: (αx)* is invertible iff 1 + α ≠ 0
        let inf = infiltration_q1(8);
        assert!(character_x_is_invertible(&inf, &q(2, 1)).unwrap());
        assert!(!character_x_is_invertible(&inf, &q(-1, 1)).unwrap());
        // over Z with q = 2: 1 + 2α must be ±1
        let zz: Arc<RingSpec> = Arc::new(RingSpec::Integers);
        let inf_z = BialgebraDescriptor::infiltration(&zz, Scalar::from_i64(&zz, 2), 8).unwrap();
        assert!(character_x_is_invertible(&inf_z, &Scalar::from_i64(&zz, -1)).unwrap());
        assert!(!character_x_is_invertible(&inf_z, &Scalar::from_i64(&zz, 3)).unwrap());
    }
}
