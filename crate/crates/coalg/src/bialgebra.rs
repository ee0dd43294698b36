//! Concrete bialgebra families realized as structure rules on basis
//! indices, with sparse elements and tensors.
//!
//! Shipped families: the primitive polynomial bialgebra `k[x]` with
//! `Δ(x) = x⊗1 + 1⊗x`, the q-infiltration bialgebra with
//! `Δ(x) = x⊗1 + 1⊗x + q·x⊗x`, its Frobenius quotient `k[x]/(x^p)` in
//! characteristic p, the quotient `k[g,x]/(gx)` with grouplike `g` and
//! primitive `x`, monoid bialgebras with the diagonal coproduct, the
//! tensor (conc) bialgebra on words with primitive letters, tensor
//! products, and finite dual coalgebras of multiplication tables.
//!
//! Infinite-basis families carry a truncation degree `D`; any operation
//! that would produce a key of degree above `D` fails with
//! `TruncationExceeded` rather than dropping terms.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::basis::BasisIndex;
use crate::monoid::TraceMonoid;
use crate::scalar::{binomial, is_prime, RingSpec, Scalar};
use crate::{CoalgError, Result};

// ---------------------------------------------------------------------
// Monoids for the diagonal bialgebra
// ---------------------------------------------------------------------

/// A finite monoid given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    names: Vec<String>,
    /// table[i][j] = index of the product of elements i and j.
    table: Vec<Vec<usize>>,
    unit: usize,
}

impl FiniteMonoid {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(CoalgError::BadParameter("malformed monoid table".into()));
        }
        if table.iter().flatten().any(|&k| k >= n) {
            return Err(CoalgError::BadParameter("monoid table entry out of range".into()));
        }
        let m = FiniteMonoid { names, table, unit };
        for i in 0..n {
            if m.table[m.unit][i] != i || m.table[i][m.unit] != i {
                return Err(CoalgError::NotUnital);
            }
            for j in 0..n {
                for k in 0..n {
                    if m.table[m.table[i][j]][k] != m.table[i][m.table[j][k]] {
                        return Err(CoalgError::NotAssociative);
                    }
                }
            }
        }
        Ok(m)
    }

    /// The cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteMonoid { names, table, unit: 0 }
    }

    /// The chain monoid `{1, t, …, t^(n-1)}` with absorbing top power.
    pub fn truncated_chain(n: usize) -> Self {
        let names = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j).min(n - 1)).collect())
            .collect();
        FiniteMonoid { names, table, unit: 0 }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }
}

/// The carrier monoid of a diagonal (monoid) bialgebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoidKind {
    /// Trace monoid; free and free-abelian monoids are the edge-set
    /// extremes.
    Trace(Arc<TraceMonoid>),
    /// Finite monoid by table.
    Finite(Arc<FiniteMonoid>),
    /// The infinite cyclic group, basis `g^k` for `k ∈ Z`.
    GroupZ { symbol: String },
}

// ---------------------------------------------------------------------
// Finite dual input: an algebra on a finite free module
// ---------------------------------------------------------------------

/// A unital associative algebra on a finite free module, given by
/// structure constants. Input of the finite-dual construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlgebra {
    ring: Arc<RingSpec>,
    names: Vec<String>,
    /// e_i · e_j = Σ_k table[i][j][k] · e_k
    table: Vec<Vec<Vec<Scalar>>>,
    /// coordinates of the unit element
    unit: Vec<Scalar>,
}

impl FiniteAlgebra {
    pub fn new(
        ring: Arc<RingSpec>,
        names: Vec<String>,
        table: Vec<Vec<Vec<Scalar>>>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > 12 {
            return Err(CoalgError::BadParameter(format!("algebra rank {n} outside 1..=12")));
        }
        if table.len() != n
            || table.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n))
            || unit.len() != n
        {
            return Err(CoalgError::BadParameter("malformed multiplication table".into()));
        }
        let a = FiniteAlgebra { ring, names, table, unit };
        // unitality: 1 · e_i = e_i · 1 = e_i
        for i in 0..n {
            let ei = a.coord_vector(i);
            if a.vec_mul(&a.unit, &ei)? != ei || a.vec_mul(&ei, &a.unit)? != ei {
                return Err(CoalgError::NotUnital);
            }
        }
        // associativity on basis triples
        for i in 0..n {
            for j in 0..n {
                let ij = a.table[i][j].clone();
                for k in 0..n {
                    let jk = a.table[j][k].clone();
                    let left = a.vec_mul(&ij, &a.coord_vector(k))?;
                    let right = a.vec_mul(&a.coord_vector(i), &jk)?;
                    if left != right {
                        return Err(CoalgError::NotAssociative);
                    }
                }
            }
        }
        Ok(a)
    }

    /// The split algebra `k × k × … × k` with the coordinatewise product.
    pub fn diagonal(ring: &Arc<RingSpec>, n: usize) -> Result<Self> {
        let names = (0..n).map(|i| format!("e{}", i + 1)).collect();
        let zero = Scalar::zero(ring);
        let one = Scalar::one(ring);
        let mut table = vec![vec![vec![zero.clone(); n]; n]; n];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i == j {
                    cell[i] = one.clone();
                }
            }
        }
        FiniteAlgebra::new(ring.clone(), names, table, vec![one; n])
    }

    /// The dual numbers `k[x]/(x^2)` on the basis (1, x).
    pub fn dual_numbers(ring: &Arc<RingSpec>) -> Result<Self> {
        let zero = Scalar::zero(ring);
        let one = Scalar::one(ring);
        let names = vec!["1".to_string(), "x".to_string()];
        let table = vec![
            vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            vec![vec![zero.clone(), one.clone()], vec![zero.clone(), zero.clone()]],
        ];
        FiniteAlgebra::new(ring.clone(), names, table, vec![one, zero])
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit_coords(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.table[i][j][k]
    }

    fn coord_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(&self.ring); self.rank()];
        v[i] = Scalar::one(&self.ring);
        v
    }

    /// Product of two coordinate vectors through the table.
    pub fn vec_mul(&self, a: &[Scalar], b: &[Scalar]) -> Result<Vec<Scalar>> {
        let n = self.rank();
        let mut out = vec![Scalar::zero(&self.ring); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let c = a[i].mul(&b[j])?;
                for (k, out_k) in out.iter_mut().enumerate() {
                    *out_k = out_k.add(&c.mul(&self.table[i][j][k])?)?;
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------
// Descriptor
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    PolynomialPrimitive,
    InfiltrationQ { q: Scalar },
    FrobeniusQuotient { p: u32, q: Scalar },
    GxQuotient,
    MonoidDiag(MonoidKind),
    TensorConc { alphabet: Vec<String> },
    TensorProduct {
        left: Arc<BialgebraDescriptor>,
        right: Arc<BialgebraDescriptor>,
    },
    FiniteDual(Arc<FiniteAlgebra>),
}

/// A named bialgebra family over a coefficient ring, with the rules for
/// μ, Δ, ε realized on basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BialgebraDescriptor {
    ring: Arc<RingSpec>,
    family: Family,
    truncation: Option<i64>,
}

impl BialgebraDescriptor {
    pub fn polynomial_primitive(ring: &Arc<RingSpec>, truncation: i64) -> Result<Arc<Self>> {
        Ok(Arc::new(BialgebraDescriptor {
            ring: ring.clone(),
            family: Family::PolynomialPrimitive,
            truncation: Some(truncation),
        }))
    }

    pub fn infiltration(ring: &Arc<RingSpec>, q: Scalar, truncation: i64) -> Result<Arc<Self>> {
        if q.ring() != ring {
            return Err(CoalgError::BadParameter("q must live in the coefficient ring".into()));
        }
        Ok(Arc::new(BialgebraDescriptor {
            ring: ring.clone(),
            family: Family::InfiltrationQ { q },
            truncation: Some(truncation),
        }))
    }

    pub fn frobenius_quotient(ring: &Arc<RingSpec>, p: u32, q: Scalar) -> Result<Arc<Self>> {
        if !is_prime(p as u64) {
            return Err(CoalgError::BadParameter(format!("{p} is not prime")));
        }
        if ring.characteristic() != p as u64 {
            return Err(CoalgError::BadParameter(format!(
                "ring {ring} does not have characteristic {p}"
            )));
        }
        if q.ring() != ring {
            return Err(CoalgError::BadParameter("q must live in the coefficient ring".into()));
        }
        Ok(Arc::new(BialgebraDescriptor {
            ring: ring.clone(),
            family: Family::FrobeniusQuotient { p, q },
            truncation: None,
        }))
    }

    pub fn gx_quotient(ring: &Arc<RingSpec>, truncation: i64) -> Result<Arc<Self>> {
        Ok(Arc::new(BialgebraDescriptor {
            ring: ring.clone(),
            family: Family::GxQuotient,
            truncation: Some(truncation),
        }))
    }

    pub fn monoid_diag(ring: &Arc<RingSpec>, kind: MonoidKind, truncation: Option<i64>) -> Result<Arc<Self>> {
        let needs_truncation = !matches!(kind, MonoidKind::Finite(_));
        if needs_truncation && truncation.is_none() {
            return Err(CoalgError::BadParameter(
                "infinite monoid bialgebras need a truncation degree".into(),
            ));
        }
        Ok(Arc::new(BialgebraDescriptor { ring: ring.clone(), family: Family::MonoidDiag(kind), truncation }))
    }

    pub fn tensor_conc(ring: &Arc<RingSpec>, alphabet: &[&str], truncation: i64) -> Result<Arc<Self>> {
        if alphabet.is_empty() {
            return Err(CoalgError::BadParameter("empty alphabet".into()));
        }
        Ok(Arc::new(BialgebraDescriptor {
            ring: ring.clone(),
            family: Family::TensorConc { alphabet: alphabet.iter().map(|s| s.to_string()).collect() },
            truncation: Some(truncation),
        }))
    }

    /// Componentwise tensor product of two bialgebras over one ring,
    /// with the middle-swap coproduct.
    pub fn tensor_product(left: &Arc<Self>, right: &Arc<Self>) -> Result<Arc<Self>> {
        if left.ring != right.ring {
            return Err(CoalgError::RingMismatch(left.ring.to_string(), right.ring.to_string()));
        }
        // pair degrees are bounded by the factor truncations
        let truncation = match (left.truncation, right.truncation) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(Arc::new(BialgebraDescriptor {
            ring: left.ring.clone(),
            family: Family::TensorProduct { left: left.clone(), right: right.clone() },
            truncation,
        }))
    }

    /// Dual coalgebra of a finite free algebra: Δ dual to the
    /// multiplication, ε dual to the unit.
    pub fn finite_dual(algebra: FiniteAlgebra) -> Arc<Self> {
        Arc::new(BialgebraDescriptor {
            ring: algebra.ring.clone(),
            family: Family::FiniteDual(Arc::new(algebra)),
            truncation: None,
        })
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    pub fn has_multiplication(&self) -> bool {
        !matches!(self.family, Family::FiniteDual(_))
    }

    pub fn is_commutative(&self) -> bool {
        match &self.family {
            Family::PolynomialPrimitive
            | Family::InfiltrationQ { .. }
            | Family::FrobeniusQuotient { .. }
            | Family::GxQuotient => true,
            Family::MonoidDiag(kind) => match kind {
                MonoidKind::Trace(m) => {
                    let n = m.alphabet().len() as u16;
                    (0..n).all(|i| (i + 1..n).all(|j| m.commutes(i, j)))
                }
                MonoidKind::Finite(m) => m.is_commutative(),
                MonoidKind::GroupZ { .. } => true,
            },
            Family::TensorConc { alphabet } => alphabet.len() <= 1,
            Family::TensorProduct { left, right } => left.is_commutative() && right.is_commutative(),
            Family::FiniteDual(_) => false,
        }
    }

    /// True when the underlying algebra is known to be an integral
    /// domain, so every nonzero element is regular.
    pub fn algebra_is_domain(&self) -> bool {
        if !self.ring.is_integral_domain() {
            return false;
        }
        self.monomial_like()
    }

    /// Families whose algebra is a monoid algebra of a cancellative
    /// totally orderable commutative-or-free monoid (N, Z, N^k, words),
    /// hence a domain over a domain ring.
    fn monomial_like(&self) -> bool {
        match &self.family {
            Family::PolynomialPrimitive | Family::InfiltrationQ { .. } => true,
            Family::MonoidDiag(kind) => match kind {
                MonoidKind::GroupZ { .. } => true,
                MonoidKind::Trace(m) => {
                    let n = m.alphabet().len() as u16;
                    let complete = (0..n).all(|i| (i + 1..n).all(|j| m.commutes(i, j)));
                    let free = m.edges().is_empty();
                    complete || free
                }
                MonoidKind::Finite(_) => false,
            },
            Family::TensorConc { .. } => true,
            Family::TensorProduct { left, right } => left.monomial_like() && right.monomial_like(),
            _ => false,
        }
    }

    /// Basis index of the algebra unit.
    pub fn unit_index(&self) -> BasisIndex {
        match &self.family {
            Family::PolynomialPrimitive | Family::InfiltrationQ { .. } | Family::FrobeniusQuotient { .. } => {
                BasisIndex::Monomial(vec![0])
            }
            Family::GxQuotient => BasisIndex::Monomial(vec![0, 0]),
            Family::MonoidDiag(kind) => match kind {
                MonoidKind::Trace(_) => BasisIndex::TraceNF(Vec::new()),
                MonoidKind::Finite(m) => BasisIndex::Word(vec![m.unit() as u16]),
                MonoidKind::GroupZ { .. } => BasisIndex::Monomial(vec![0]),
            },
            Family::TensorConc { .. } => BasisIndex::Word(Vec::new()),
            Family::TensorProduct { left, right } => {
                BasisIndex::Pair(Box::new(left.unit_index()), Box::new(right.unit_index()))
            }
            Family::FiniteDual(_) => panic!("finite dual coalgebras have no unit"),
        }
    }

    /// Validate that an index belongs to this family and respects the
    /// truncation degree.
    pub fn check_index(&self, index: &BasisIndex) -> Result<()> {
        let ok = match (&self.family, index) {
            (Family::PolynomialPrimitive | Family::InfiltrationQ { .. }, BasisIndex::Monomial(e)) => {
                e.len() == 1 && e[0] >= 0
            }
            (Family::FrobeniusQuotient { p, .. }, BasisIndex::Monomial(e)) => {
                e.len() == 1 && e[0] >= 0 && e[0] < *p as i64
            }
            (Family::GxQuotient, BasisIndex::Monomial(e)) => {
                e.len() == 2 && e[0] >= 0 && e[1] >= 0 && (e[0] == 0 || e[1] == 0)
            }
            (Family::MonoidDiag(MonoidKind::Trace(m)), BasisIndex::TraceNF(w)) => {
                w.iter().all(|&l| (l as usize) < m.alphabet().len()) && m.normal_form(w) == *w
            }
            (Family::MonoidDiag(MonoidKind::Finite(m)), BasisIndex::Word(w)) => {
                w.len() == 1 && (w[0] as usize) < m.len()
            }
            (Family::MonoidDiag(MonoidKind::GroupZ { .. }), BasisIndex::Monomial(e)) => e.len() == 1,
            (Family::TensorConc { alphabet }, BasisIndex::Word(w)) => {
                w.iter().all(|&l| (l as usize) < alphabet.len())
            }
            (Family::TensorProduct { left, right }, BasisIndex::Pair(a, b)) => {
                left.check_index(a)?;
                right.check_index(b)?;
                true
            }
            (Family::FiniteDual(a), BasisIndex::Word(w)) => w.len() == 1 && (w[0] as usize) < a.rank(),
            _ => false,
        };
        if !ok {
            return Err(CoalgError::BadParameter(format!(
                "index {index:?} does not belong to this family"
            )));
        }
        if let Some(limit) = self.truncation {
            let degree = index.degree();
            if degree > limit {
                return Err(CoalgError::TruncationExceeded { degree, limit });
            }
        }
        Ok(())
    }

    /// Product of two basis elements, as an element (quotient rules and
    /// bilinear expansions may produce sums or zero).
    pub fn basis_mul(self: &Arc<Self>, a: &BasisIndex, b: &BasisIndex) -> Result<Element> {
        if !self.has_multiplication() {
            return Err(CoalgError::NoMultiplication);
        }
        match (&self.family, a, b) {
            (
                Family::PolynomialPrimitive | Family::InfiltrationQ { .. },
                BasisIndex::Monomial(x),
                BasisIndex::Monomial(y),
            ) => Element::basis(self, BasisIndex::Monomial(vec![x[0] + y[0]])),
            (Family::FrobeniusQuotient { p, .. }, BasisIndex::Monomial(x), BasisIndex::Monomial(y)) => {
                let e = x[0] + y[0];
                if e >= *p as i64 {
                    Ok(Element::zero(self))
                } else {
                    Element::basis(self, BasisIndex::Monomial(vec![e]))
                }
            }
            (Family::GxQuotient, BasisIndex::Monomial(x), BasisIndex::Monomial(y)) => {
                let g = x[0] + y[0];
                let xx = x[1] + y[1];
                if g > 0 && xx > 0 {
                    Ok(Element::zero(self))
                } else {
                    Element::basis(self, BasisIndex::Monomial(vec![g, xx]))
                }
            }
            (Family::MonoidDiag(MonoidKind::Trace(m)), BasisIndex::TraceNF(u), BasisIndex::TraceNF(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                Element::basis(self, BasisIndex::TraceNF(m.normal_form(&w)))
            }
            (Family::MonoidDiag(MonoidKind::Finite(m)), BasisIndex::Word(u), BasisIndex::Word(v)) => {
                let k = m.mul(u[0] as usize, v[0] as usize);
                Element::basis(self, BasisIndex::Word(vec![k as u16]))
            }
            (Family::MonoidDiag(MonoidKind::GroupZ { .. }), BasisIndex::Monomial(x), BasisIndex::Monomial(y)) => {
                Element::basis(self, BasisIndex::Monomial(vec![x[0] + y[0]]))
            }
            (Family::TensorConc { .. }, BasisIndex::Word(u), BasisIndex::Word(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                Element::basis(self, BasisIndex::Word(w))
            }
            (Family::TensorProduct { left, right }, BasisIndex::Pair(a1, b1), BasisIndex::Pair(a2, b2)) => {
                let lhs = left.basis_mul(a1, a2)?;
                let rhs = right.basis_mul(b1, b2)?;
                let mut out = Element::zero(self);
                for (u, cu) in lhs.terms() {
                    for (v, cv) in rhs.terms() {
                        let key = BasisIndex::Pair(Box::new(u.clone()), Box::new(v.clone()));
                        out.add_term(key, cu.mul(cv)?)?;
                    }
                }
                Ok(out)
            }
            _ => Err(CoalgError::BadParameter("index does not match family".into())),
        }
    }

    /// The coproduct of a basis element, as a list of
    /// (left leg, right leg, coefficient) triples.
    pub fn delta_basis(self: &Arc<Self>, index: &BasisIndex) -> Result<Vec<(BasisIndex, BasisIndex, Scalar)>> {
        self.check_index(index)?;
        let one = Scalar::one(&self.ring);
        match (&self.family, index) {
            (Family::PolynomialPrimitive, BasisIndex::Monomial(e)) => {
                Ok(self.delta_x_power(e[0] as u64, &Scalar::zero(&self.ring), None))
            }
            (Family::InfiltrationQ { q }, BasisIndex::Monomial(e)) => {
                Ok(self.delta_x_power(e[0] as u64, q, None))
            }
            (Family::FrobeniusQuotient { p, q }, BasisIndex::Monomial(e)) => {
                Ok(self.delta_x_power(e[0] as u64, q, Some(*p as i64)))
            }
            (Family::GxQuotient, BasisIndex::Monomial(e)) => {
                if e[0] > 0 {
                    // powers of the grouplike generator stay diagonal
                    Ok(vec![(index.clone(), index.clone(), one)])
                } else {
                    // binomial expansion of the primitive generator's power
                    let b = e[1] as u64;
                    let mut out = Vec::new();
                    for i in 0..=b {
                        let c = Scalar::from_bigint(&self.ring, &binomial(b, i));
                        if !c.is_zero() {
                            out.push((
                                BasisIndex::Monomial(vec![0, i as i64]),
                                BasisIndex::Monomial(vec![0, (b - i) as i64]),
                                c,
                            ));
                        }
                    }
                    Ok(out)
                }
            }
            (Family::MonoidDiag(_), _) => Ok(vec![(index.clone(), index.clone(), one)]),
            (Family::TensorConc { .. }, BasisIndex::Word(w)) => {
                // unshuffle: split positions into complementary subsequences
                let n = w.len();
                let mut acc: BTreeMap<(Vec<u16>, Vec<u16>), Scalar> = BTreeMap::new();
                for mask in 0..(1u64 << n) {
                    let mut lhs = Vec::new();
                    let mut rhs = Vec::new();
                    for (i, &letter) in w.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            lhs.push(letter);
                        } else {
                            rhs.push(letter);
                        }
                    }
                    let entry = acc.entry((lhs, rhs)).or_insert_with(|| Scalar::zero(&self.ring));
                    *entry = entry.add(&one)?;
                }
                Ok(acc
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((l, r), c)| (BasisIndex::Word(l), BasisIndex::Word(r), c))
                    .collect())
            }
            (Family::TensorProduct { left, right }, BasisIndex::Pair(a, b)) => {
                let dl = left.delta_basis(a)?;
                let dr = right.delta_basis(b)?;
                let mut out = Vec::new();
                for (a1, a2, ca) in &dl {
                    for (b1, b2, cb) in &dr {
                        out.push((
                            BasisIndex::Pair(Box::new(a1.clone()), Box::new(b1.clone())),
                            BasisIndex::Pair(Box::new(a2.clone()), Box::new(b2.clone())),
                            ca.mul(cb)?,
                        ));
                    }
                }
                Ok(out)
            }
            (Family::FiniteDual(alg), BasisIndex::Word(w)) => {
                let k = w[0] as usize;
                let mut out = Vec::new();
                for i in 0..alg.rank() {
                    for j in 0..alg.rank() {
                        let c = alg.structure_constant(i, j, k);
                        if !c.is_zero() {
                            out.push((
                                BasisIndex::Word(vec![i as u16]),
                                BasisIndex::Word(vec![j as u16]),
                                c.clone(),
                            ));
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(CoalgError::BadParameter("index does not match family".into())),
        }
    }

    /// Δ(x^n) computed by multiplicativity: the n-th power of
    /// `x⊗1 + 1⊗x + q·x⊗x` in the tensor square.
    fn delta_x_power(
        self: &Arc<Self>,
        n: u64,
        q: &Scalar,
        quotient: Option<i64>,
    ) -> Vec<(BasisIndex, BasisIndex, Scalar)> {
        let one = Scalar::one(&self.ring);
        let mut gens: Vec<(i64, i64, Scalar)> = vec![(1, 0, one.clone()), (0, 1, one.clone())];
        if !q.is_zero() {
            gens.push((1, 1, q.clone()));
        }
        let mut acc: BTreeMap<(i64, i64), Scalar> = BTreeMap::from([((0, 0), one)]);
        for _ in 0..n {
            let mut next: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
            for ((a, b), c) in &acc {
                for (da, db, dc) in &gens {
                    let key = (a + da, b + db);
                    if let Some(p) = quotient {
                        if key.0 >= p || key.1 >= p {
                            continue;
                        }
                    }
                    let add = c.mul(dc).expect("same ring");
                    let entry = next.entry(key).or_insert_with(|| Scalar::zero(&self.ring));
                    *entry = entry.add(&add).expect("same ring");
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        acc.into_iter()
            .map(|((a, b), c)| {
                (
                    BasisIndex::Monomial(vec![a]),
                    BasisIndex::Monomial(vec![b]),
                    c,
                )
            })
            .collect()
    }

    pub fn counit_basis(&self, index: &BasisIndex) -> Result<Scalar> {
        self.check_index(index)?;
        let one = Scalar::one(&self.ring);
        let zero = Scalar::zero(&self.ring);
        Ok(match (&self.family, index) {
            (
                Family::PolynomialPrimitive | Family::InfiltrationQ { .. } | Family::FrobeniusQuotient { .. },
                BasisIndex::Monomial(e),
            ) => {
                if e[0] == 0 {
                    one
                } else {
                    zero
                }
            }
            (Family::GxQuotient, BasisIndex::Monomial(e)) => {
                if e[1] == 0 {
                    one
                } else {
                    zero
                }
            }
            (Family::MonoidDiag(_), _) => one,
            (Family::TensorConc { .. }, BasisIndex::Word(w)) => {
                if w.is_empty() {
                    one
                } else {
                    zero
                }
            }
            (Family::TensorProduct { left, right }, BasisIndex::Pair(a, b)) => {
                left.counit_basis(a)?.mul(&right.counit_basis(b)?)?
            }
            (Family::FiniteDual(alg), BasisIndex::Word(w)) => alg.unit_coords()[w[0] as usize].clone(),
            _ => return Err(CoalgError::BadParameter("index does not match family".into())),
        })
    }

    /// All basis indices of degree at most `max_degree` (clipped at the
    /// truncation degree when one is set).
    pub fn basis_up_to(&self, max_degree: i64) -> Vec<BasisIndex> {
        let d = match self.truncation {
            Some(t) => max_degree.min(t),
            None => max_degree,
        };
        match &self.family {
            Family::PolynomialPrimitive | Family::InfiltrationQ { .. } => {
                (0..=d.max(0)).map(|n| BasisIndex::Monomial(vec![n])).collect()
            }
            Family::FrobeniusQuotient { p, .. } => (0..=d.min(*p as i64 - 1).max(0))
                .map(|n| BasisIndex::Monomial(vec![n]))
                .collect(),
            Family::GxQuotient => {
                let mut out = vec![BasisIndex::Monomial(vec![0, 0])];
                for n in 1..=d.max(0) {
                    out.push(BasisIndex::Monomial(vec![n, 0]));
                    out.push(BasisIndex::Monomial(vec![0, n]));
                }
                out.sort();
                out
            }
            Family::MonoidDiag(kind) => match kind {
                MonoidKind::Trace(m) => m
                    .normal_forms_up_to(d.max(0) as u32)
                    .into_iter()
                    .map(BasisIndex::TraceNF)
                    .collect(),
                MonoidKind::Finite(m) => (0..m.len()).map(|i| BasisIndex::Word(vec![i as u16])).collect(),
                MonoidKind::GroupZ { .. } => {
                    let mut out: Vec<BasisIndex> =
                        (-d.max(0)..=d.max(0)).map(|k| BasisIndex::Monomial(vec![k])).collect();
                    out.sort();
                    out
                }
            },
            Family::TensorConc { alphabet } => {
                let mut out = vec![BasisIndex::Word(Vec::new())];
                let mut layer: Vec<Vec<u16>> = vec![Vec::new()];
                for _ in 0..d.max(0) {
                    let mut next = Vec::new();
                    for w in &layer {
                        for l in 0..alphabet.len() as u16 {
                            let mut e = w.clone();
                            e.push(l);
                            next.push(e);
                        }
                    }
                    out.extend(next.iter().cloned().map(BasisIndex::Word));
                    layer = next;
                }
                out
            }
            Family::TensorProduct { left, right } => {
                let mut out = Vec::new();
                for a in left.basis_up_to(d) {
                    for b in right.basis_up_to(d - a.degree()) {
                        if a.degree() + b.degree() <= d {
                            out.push(BasisIndex::Pair(Box::new(a.clone()), Box::new(b)));
                        }
                    }
                }
                out.sort();
                out
            }
            Family::FiniteDual(alg) => (0..alg.rank()).map(|i| BasisIndex::Word(vec![i as u16])).collect(),
        }
    }

    /// Printable form of a basis index in this family's grammar.
    pub fn basis_string(&self, index: &BasisIndex) -> String {
        match (&self.family, index) {
            (
                Family::PolynomialPrimitive | Family::InfiltrationQ { .. } | Family::FrobeniusQuotient { .. },
                BasisIndex::Monomial(e),
            ) => power_string("x", e[0]),
            (Family::GxQuotient, BasisIndex::Monomial(e)) => {
                if e[0] > 0 {
                    power_string("g", e[0])
                } else {
                    power_string("x", e[1])
                }
            }
            (Family::MonoidDiag(MonoidKind::Trace(m)), BasisIndex::TraceNF(w)) => {
                if w.is_empty() {
                    "1".into()
                } else if m.alphabet().iter().all(|l| l.chars().count() == 1) {
                    w.iter().map(|&l| m.alphabet()[l as usize].clone()).collect()
                } else {
                    m.word_string(w)
                }
            }
            (Family::MonoidDiag(MonoidKind::Finite(m)), BasisIndex::Word(w)) => {
                m.names()[w[0] as usize].clone()
            }
            (Family::MonoidDiag(MonoidKind::GroupZ { symbol }), BasisIndex::Monomial(e)) => {
                power_string(symbol, e[0])
            }
            (Family::TensorConc { alphabet }, BasisIndex::Word(w)) => {
                if w.is_empty() {
                    "1".into()
                } else {
                    w.iter().map(|&l| alphabet[l as usize].clone()).collect()
                }
            }
            (Family::TensorProduct { left, right }, BasisIndex::Pair(a, b)) => {
                format!("({}|{})", left.basis_string(a), right.basis_string(b))
            }
            (Family::FiniteDual(alg), BasisIndex::Word(w)) => alg.names()[w[0] as usize].clone(),
            _ => format!("{index:?}"),
        }
    }

    /// Parse a basis index in this family's grammar.
    pub fn parse_basis(&self, text: &str) -> Result<BasisIndex> {
        let text = text.trim();
        let index = match &self.family {
            Family::PolynomialPrimitive | Family::InfiltrationQ { .. } | Family::FrobeniusQuotient { .. } => {
                BasisIndex::Monomial(vec![parse_power(text, "x")?])
            }
            Family::GxQuotient => {
                if text == "1" {
                    BasisIndex::Monomial(vec![0, 0])
                } else if text.starts_with('g') {
                    BasisIndex::Monomial(vec![parse_power(text, "g")?, 0])
                } else {
                    BasisIndex::Monomial(vec![0, parse_power(text, "x")?])
                }
            }
            Family::MonoidDiag(MonoidKind::Trace(m)) => {
                BasisIndex::TraceNF(m.normal_form(&m.parse_word(text)?))
            }
            Family::MonoidDiag(MonoidKind::Finite(m)) => {
                let i = m
                    .names()
                    .iter()
                    .position(|n| n == text)
                    .ok_or_else(|| CoalgError::Parse(format!("unknown monoid element {text}")))?;
                BasisIndex::Word(vec![i as u16])
            }
            Family::MonoidDiag(MonoidKind::GroupZ { symbol }) => {
                BasisIndex::Monomial(vec![parse_power(text, symbol)?])
            }
            Family::TensorConc { alphabet } => {
                if text == "1" {
                    BasisIndex::Word(Vec::new())
                } else {
                    let mut w = Vec::new();
                    for ch in text.chars() {
                        let i = alphabet
                            .iter()
                            .position(|l| l == &ch.to_string())
                            .ok_or_else(|| CoalgError::UnknownLetter(ch.to_string()))?;
                        w.push(i as u16);
                    }
                    BasisIndex::Word(w)
                }
            }
            Family::TensorProduct { left, right } => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| CoalgError::Parse(format!("expected (a|b), got {text}")))?;
                let (a, b) = split_pair(inner)?;
                BasisIndex::Pair(Box::new(left.parse_basis(a)?), Box::new(right.parse_basis(b)?))
            }
            Family::FiniteDual(alg) => {
                let i = alg
                    .names()
                    .iter()
                    .position(|n| n == text)
                    .ok_or_else(|| CoalgError::Parse(format!("unknown dual basis element {text}")))?;
                BasisIndex::Word(vec![i as u16])
            }
        };
        self.check_index(&index)?;
        Ok(index)
    }
}

fn power_string(symbol: &str, exp: i64) -> String {
    match exp {
        0 => "1".into(),
        1 => symbol.into(),
        e => format!("{symbol}^{e}"),
    }
}

fn parse_power(text: &str, symbol: &str) -> Result<i64> {
    if text == "1" {
        return Ok(0);
    }
    if text == symbol {
        return Ok(1);
    }
    let rest = text
        .strip_prefix(symbol)
        .and_then(|t| t.strip_prefix('^'))
        .ok_or_else(|| CoalgError::Parse(format!("expected a power of {symbol}, got {text}")))?;
    rest.parse::<i64>()
        .map_err(|_| CoalgError::Parse(format!("bad exponent in {text}")))
}

/// Split "a|b" at the top-level bar (pairs may nest).
fn split_pair(text: &str) -> Result<(&str, &str)> {
    let mut depth = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => return Ok((&text[..i], &text[i + 1..])),
            _ => {}
        }
    }
    Err(CoalgError::Parse(format!("expected a|b, got {text}")))
}

// ---------------------------------------------------------------------
// Elements and tensors
// ---------------------------------------------------------------------

/// Sparse element of a bialgebra: a finitely supported map from basis
/// indices to scalars with no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    descriptor: Arc<BialgebraDescriptor>,
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero(descriptor: &Arc<BialgebraDescriptor>) -> Self {
        Element { descriptor: descriptor.clone(), terms: BTreeMap::new() }
    }

    pub fn one(descriptor: &Arc<BialgebraDescriptor>) -> Self {
        Element::basis(descriptor, descriptor.unit_index()).expect("unit index is valid")
    }

    pub fn basis(descriptor: &Arc<BialgebraDescriptor>, index: BasisIndex) -> Result<Self> {
        descriptor.check_index(&index)?;
        let mut terms = BTreeMap::new();
        terms.insert(index, Scalar::one(descriptor.ring()));
        Ok(Element { descriptor: descriptor.clone(), terms })
    }

    pub fn from_terms(
        descriptor: &Arc<BialgebraDescriptor>,
        entries: impl IntoIterator<Item = (BasisIndex, Scalar)>,
    ) -> Result<Self> {
        let mut out = Element::zero(descriptor);
        for (index, coeff) in entries {
            out.add_term(index, coeff)?;
        }
        Ok(out)
    }

    pub fn descriptor(&self) -> &Arc<BialgebraDescriptor> {
        &self.descriptor
    }

    pub fn terms(&self) -> &BTreeMap<BasisIndex, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, index: &BasisIndex) -> Scalar {
        self.terms
            .get(index)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.descriptor.ring()))
    }

    pub fn add_term(&mut self, index: BasisIndex, coeff: Scalar) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        self.descriptor.check_index(&index)?;
        if coeff.ring() != self.descriptor.ring() {
            return Err(CoalgError::RingMismatch(
                coeff.ring().to_string(),
                self.descriptor.ring().to_string(),
            ));
        }
        let entry = self
            .terms
            .entry(index.clone())
            .or_insert_with(|| Scalar::zero(self.descriptor.ring()));
        *entry = entry.add(&coeff)?;
        if entry.is_zero() {
            self.terms.remove(&index);
        }
        Ok(())
    }

    fn check_descriptor(&self, other: &Element) -> Result<()> {
        if self.descriptor == other.descriptor {
            Ok(())
        } else {
            Err(CoalgError::DescriptorMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_descriptor(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Element {
        let terms = self.terms.iter().map(|(i, c)| (i.clone(), c.neg())).collect();
        Element { descriptor: self.descriptor.clone(), terms }
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &Scalar) -> Result<Element> {
        let mut out = Element::zero(&self.descriptor);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.mul(factor)?)?;
        }
        Ok(out)
    }

    pub fn int_scale(&self, factor: &BigInt) -> Element {
        if factor.is_zero() {
            return Element::zero(&self.descriptor);
        }
        let s = Scalar::from_bigint(self.descriptor.ring(), factor);
        self.scale(&s).expect("same ring")
    }

    /// Bilinear extension of the family's basis product.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.check_descriptor(other)?;
        let mut out = Element::zero(&self.descriptor);
        for (i, ci) in &self.terms {
            for (j, cj) in &other.terms {
                let prod = self.descriptor.basis_mul(i, j)?;
                let c = ci.mul(cj)?;
                for (k, ck) in prod.terms() {
                    out.add_term(k.clone(), ck.mul(&c)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Element> {
        if !self.descriptor.has_multiplication() {
            return Err(CoalgError::NoMultiplication);
        }
        let mut acc = Element::one(&self.descriptor);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(i, c)| format!("{} {}", c, self.descriptor.basis_string(i)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Sparse tensor in `C^{⊗k}`: flat tuples of basis indices, explicit
/// arity.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorK {
    descriptor: Arc<BialgebraDescriptor>,
    arity: usize,
    terms: BTreeMap<Vec<BasisIndex>, Scalar>,
}

impl TensorK {
    pub fn zero(descriptor: &Arc<BialgebraDescriptor>, arity: usize) -> Self {
        assert!(arity >= 1, "tensor arity must be at least 1");
        TensorK { descriptor: descriptor.clone(), arity, terms: BTreeMap::new() }
    }

    pub fn descriptor(&self) -> &Arc<BialgebraDescriptor> {
        &self.descriptor
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<BasisIndex>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<BasisIndex>, coeff: Scalar) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        if key.len() != self.arity {
            return Err(CoalgError::BadParameter(format!(
                "tensor key of length {} in arity-{} tensor",
                key.len(),
                self.arity
            )));
        }
        for leg in &key {
            self.descriptor.check_index(leg)?;
        }
        let entry = self
            .terms
            .entry(key.clone())
            .or_insert_with(|| Scalar::zero(self.descriptor.ring()));
        *entry = entry.add(&coeff)?;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorK) -> Result<TensorK> {
        if self.descriptor != other.descriptor || self.arity != other.arity {
            return Err(CoalgError::DescriptorMismatch);
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorK) -> Result<TensorK> {
        let neg = TensorK {
            descriptor: other.descriptor.clone(),
            arity: other.arity,
            terms: other.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        };
        self.add(&neg)
    }

    pub fn scale(&self, factor: &Scalar) -> Result<TensorK> {
        let mut out = TensorK::zero(&self.descriptor, self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.mul(factor)?)?;
        }
        Ok(out)
    }

    pub fn from_element(e: &Element) -> TensorK {
        let mut out = TensorK::zero(e.descriptor(), 1);
        for (i, c) in e.terms() {
            out.add_term(vec![i.clone()], c.clone()).expect("valid element key");
        }
        out
    }

    /// Pure tensor power `e ⊗ e ⊗ … ⊗ e`.
    pub fn tensor_power(e: &Element, k: usize) -> Result<TensorK> {
        assert!(k >= 1);
        let mut out = TensorK::zero(e.descriptor(), k);
        let keys: Vec<(&BasisIndex, &Scalar)> = e.terms().iter().collect();
        let mut stack: Vec<(Vec<BasisIndex>, Scalar)> = vec![(Vec::new(), Scalar::one(e.descriptor().ring()))];
        for _ in 0..k {
            let mut next = Vec::new();
            for (prefix, coeff) in &stack {
                for (i, c) in &keys {
                    let mut key = prefix.clone();
                    key.push((*i).clone());
                    next.push((key, coeff.mul(c)?));
                }
            }
            stack = next;
        }
        for (key, coeff) in stack {
            out.add_term(key, coeff)?;
        }
        Ok(out)
    }

    /// Componentwise product in `B^{⊗k}`.
    pub fn mul(&self, other: &TensorK) -> Result<TensorK> {
        if self.descriptor != other.descriptor || self.arity != other.arity {
            return Err(CoalgError::DescriptorMismatch);
        }
        let mut out = TensorK::zero(&self.descriptor, self.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                // expand the legwise products
                let mut partial: Vec<(Vec<BasisIndex>, Scalar)> =
                    vec![(Vec::new(), ca.mul(cb)?)];
                for leg in 0..self.arity {
                    let prod = self.descriptor.basis_mul(&ka[leg], &kb[leg])?;
                    let mut next = Vec::new();
                    for (prefix, coeff) in &partial {
                        for (idx, c) in prod.terms() {
                            let mut key = prefix.clone();
                            key.push(idx.clone());
                            next.push((key, coeff.mul(c)?));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (key, coeff) in partial {
                    out.add_term(key, coeff)?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<TensorK> {
        if !self.descriptor.has_multiplication() {
            return Err(CoalgError::NoMultiplication);
        }
        let mut acc = TensorK::zero(&self.descriptor, self.arity);
        let unit_key: Vec<BasisIndex> = (0..self.arity).map(|_| self.descriptor.unit_index()).collect();
        acc.add_term(unit_key, Scalar::one(self.descriptor.ring()))?;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------
// Coalgebra operations
// ---------------------------------------------------------------------

/// Comultiplication, linear in the element.
pub fn delta(e: &Element) -> Result<TensorK> {
    let mut out = TensorK::zero(e.descriptor(), 2);
    for (i, c) in e.terms() {
        for (a, b, w) in e.descriptor().delta_basis(i)? {
            out.add_term(vec![a, b], w.mul(c)?)?;
        }
    }
    Ok(out)
}

/// Counit, a k-algebra homomorphism to the coefficient ring.
pub fn counit(e: &Element) -> Result<Scalar> {
    let mut acc = Scalar::zero(e.descriptor().ring());
    for (i, c) in e.terms() {
        acc = acc.add(&e.descriptor().counit_basis(i)?.mul(c)?)?;
    }
    Ok(acc)
}

/// Value of an iterated comultiplication: a scalar for k = −1, a tensor
/// of arity k+1 otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Iterated {
    Scalar(Scalar),
    Tensor(TensorK),
}

/// Iterated comultiplication `Δ^(k)`, with `Δ^(−1) = ε`, `Δ^(0) = id`
/// and `Δ^(k) = (id ⊗ Δ^(k−1)) ∘ Δ`.
pub fn iterated_delta(e: &Element, k: i64) -> Result<Iterated> {
    if k < -1 {
        return Err(CoalgError::BadParameter(format!("iterated delta needs k >= -1, got {k}")));
    }
    if k == -1 {
        return Ok(Iterated::Scalar(counit(e)?));
    }
    let mut memo: IterDeltaMemo = HashMap::new();
    let mut out = TensorK::zero(e.descriptor(), (k + 1) as usize);
    for (i, c) in e.terms() {
        for (key, w) in iter_delta_basis(e.descriptor(), i, k, &mut memo)? {
            out.add_term(key, w.mul(c)?)?;
        }
    }
    Ok(Iterated::Tensor(out))
}

type IterDeltaMemo = HashMap<(i64, BasisIndex), Vec<(Vec<BasisIndex>, Scalar)>>;

fn iter_delta_basis(
    descriptor: &Arc<BialgebraDescriptor>,
    index: &BasisIndex,
    k: i64,
    memo: &mut IterDeltaMemo,
) -> Result<Vec<(Vec<BasisIndex>, Scalar)>> {
    if k == 0 {
        return Ok(vec![(vec![index.clone()], Scalar::one(descriptor.ring()))]);
    }
    if let Some(hit) = memo.get(&(k, index.clone())) {
        return Ok(hit.clone());
    }
    let mut acc: BTreeMap<Vec<BasisIndex>, Scalar> = BTreeMap::new();
    for (a, b, c) in descriptor.delta_basis(index)? {
        for (rest, w) in iter_delta_basis(descriptor, &b, k - 1, memo)? {
            let mut key = Vec::with_capacity(rest.len() + 1);
            key.push(a.clone());
            key.extend(rest);
            let add = c.mul(&w)?;
            let entry = acc.entry(key).or_insert_with(|| Scalar::zero(descriptor.ring()));
            *entry = entry.add(&add)?;
        }
    }
    let result: Vec<(Vec<BasisIndex>, Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    memo.insert((k, index.clone()), result.clone());
    Ok(result)
}

/// Apply Δ to one leg of a tensor, raising the arity by one.
pub fn delta_on_leg(t: &TensorK, leg: usize) -> Result<TensorK> {
    let mut out = TensorK::zero(t.descriptor(), t.arity() + 1);
    for (key, c) in t.terms() {
        for (a, b, w) in t.descriptor().delta_basis(&key[leg])? {
            let mut new_key = Vec::with_capacity(key.len() + 1);
            new_key.extend_from_slice(&key[..leg]);
            new_key.push(a);
            new_key.push(b);
            new_key.extend_from_slice(&key[leg + 1..]);
            out.add_term(new_key, c.mul(&w)?)?;
        }
    }
    Ok(out)
}

/// Apply ε to one leg of a tensor, lowering the arity by one.
pub fn counit_on_leg(t: &TensorK, leg: usize) -> Result<TensorK> {
    assert!(t.arity() >= 2, "counit on a leg needs arity >= 2");
    let mut out = TensorK::zero(t.descriptor(), t.arity() - 1);
    for (key, c) in t.terms() {
        let e = t.descriptor().counit_basis(&key[leg])?;
        if e.is_zero() {
            continue;
        }
        let mut new_key = Vec::with_capacity(key.len() - 1);
        new_key.extend_from_slice(&key[..leg]);
        new_key.extend_from_slice(&key[leg + 1..]);
        out.add_term(new_key, c.mul(&e)?)?;
    }
    Ok(out)
}

/// True exactly when `Δ(g) = g ⊗ g` and `ε(g) = 1`.
pub fn is_grouplike(e: &Element) -> Result<bool> {
    if !counit(e)?.is_one() {
        return Ok(false);
    }
    Ok(delta(e)? == TensorK::tensor_power(e, 2)?)
}

/// Orthogonal-idempotent criterion for grouplikes of a monoid
/// bialgebra: every coefficient is idempotent, distinct coefficients
/// multiply to zero, and the coefficients sum to 1.
pub fn monoid_grouplike_criterion(e: &Element) -> Result<bool> {
    if !matches!(e.descriptor().family(), Family::MonoidDiag(_)) {
        return Err(CoalgError::BadParameter("criterion applies to monoid bialgebras".into()));
    }
    let ring = e.descriptor().ring();
    let coeffs: Vec<&Scalar> = e.terms().values().collect();
    for (i, a) in coeffs.iter().enumerate() {
        if a.mul(a)? != **a {
            return Ok(false);
        }
        for b in coeffs.iter().skip(i + 1) {
            if !a.mul(b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    let mut sum = Scalar::zero(ring);
    for a in &coeffs {
        sum = sum.add(a)?;
    }
    Ok(sum.is_one())
}

/// All grouplikes of a finite monoid bialgebra, by enumerating the
/// families of orthogonal idempotents of the coefficient ring that sum
/// to 1.
pub fn enumerate_monoid_grouplikes(descriptor: &Arc<BialgebraDescriptor>) -> Result<Vec<Element>> {
    let monoid = match descriptor.family() {
        Family::MonoidDiag(MonoidKind::Finite(m)) => m.clone(),
        _ => {
            return Err(CoalgError::BadParameter(
                "grouplike enumeration needs a finite monoid bialgebra".into(),
            ))
        }
    };
    let ring = descriptor.ring();
    let idempotents = Scalar::idempotents(ring);
    let mut out = Vec::new();
    // assignment[i] = idempotent for monoid element i
    let mut assignment: Vec<Scalar> = Vec::new();
    fn search(
        monoid_len: usize,
        idempotents: &[Scalar],
        assignment: &mut Vec<Scalar>,
        out: &mut Vec<Vec<Scalar>>,
    ) {
        if assignment.len() == monoid_len {
            out.push(assignment.clone());
            return;
        }
        'candidates: for cand in idempotents {
            for prev in assignment.iter() {
                if !prev.mul(cand).expect("same ring").is_zero() {
                    continue 'candidates;
                }
            }
            assignment.push(cand.clone());
            search(monoid_len, idempotents, assignment, out);
            assignment.pop();
        }
    }
    let mut assignments = Vec::new();
    search(monoid.len(), &idempotents, &mut assignment, &mut assignments);
    for coeffs in assignments {
        let mut sum = Scalar::zero(ring);
        for c in &coeffs {
            sum = sum.add(c)?;
        }
        if !sum.is_one() {
            continue;
        }
        let mut e = Element::zero(descriptor);
        for (i, c) in coeffs.iter().enumerate() {
            e.add_term(BasisIndex::Word(vec![i as u16]), c.clone())?;
        }
        debug_assert!(is_grouplike(&e)?);
        out.push(e);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Characters of a finite algebra: the grouplikes of its finite dual
// ---------------------------------------------------------------------

impl FiniteAlgebra {
    /// All characters (algebra maps to the coefficient field Q),
    /// computed from per-basis-element minimal polynomials: a character
    /// value on e_i must be a rational root of the minimal polynomial
    /// of e_i, and every candidate tuple is verified against the table.
    pub fn characters(&self) -> Result<Vec<Vec<Scalar>>> {
        if !matches!(&*self.ring as &RingSpec, RingSpec::Rationals) {
            return Err(CoalgError::BadParameter(
                "character enumeration is implemented over the rationals".into(),
            ));
        }
        let n = self.rank();
        let mut candidates: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 0..n {
            let minpoly = self.minimal_polynomial(i)?;
            candidates.push(crate::linalg::rational_roots(&minpoly, &self.ring)?);
        }
        let space: usize = candidates.iter().map(|c| c.len().max(1)).product();
        if space > 1_000_000 {
            return Err(CoalgError::BadParameter("too many candidate character tuples".into()));
        }
        let mut out = Vec::new();
        let mut tuple: Vec<Scalar> = Vec::new();
        self.extend_character(&candidates, &mut tuple, &mut out)?;
        Ok(out)
    }

    fn extend_character(
        &self,
        candidates: &[Vec<Scalar>],
        tuple: &mut Vec<Scalar>,
        out: &mut Vec<Vec<Scalar>>,
    ) -> Result<()> {
        let n = self.rank();
        let filled = tuple.len();
        if filled == n {
            // unit equation: λ(1) = 1
            let mut unit_value = Scalar::zero(&self.ring);
            for (k, u) in self.unit.iter().enumerate() {
                unit_value = unit_value.add(&u.mul(&tuple[k])?)?;
            }
            if unit_value.is_one() {
                out.push(tuple.clone());
            }
            return Ok(());
        }
        'next: for cand in &candidates[filled] {
            tuple.push(cand.clone());
            // check all multiplicativity equations among assigned indices
            for i in 0..=filled {
                for j in 0..=filled {
                    let mut rhs = Scalar::zero(&self.ring);
                    let mut decided = true;
                    for k in 0..n {
                        let c = &self.table[i][j][k];
                        if c.is_zero() {
                            continue;
                        }
                        if k > filled {
                            decided = false;
                            break;
                        }
                        rhs = rhs.add(&c.mul(&tuple[k])?)?;
                    }
                    if decided && tuple[i].mul(&tuple[j])? != rhs {
                        tuple.pop();
                        continue 'next;
                    }
                }
            }
            self.extend_character(candidates, tuple, out)?;
            tuple.pop();
        }
        Ok(())
    }

    /// Monic minimal polynomial of basis element `e_i`, low degree
    /// first, by a Krylov-style dependency search on its powers.
    fn minimal_polynomial(&self, i: usize) -> Result<Vec<Scalar>> {
        let n = self.rank();
        let mut powers: Vec<Vec<Scalar>> = vec![self.unit.clone()];
        let ei = self.coord_vector(i);
        loop {
            // look for a dependency among the powers collected so far
            if let Some(coeffs) = crate::linalg::linear_dependency(&powers, &self.ring)? {
                return Ok(coeffs);
            }
            if powers.len() > n {
                return Err(CoalgError::BadParameter("minimal polynomial not found".into()));
            }
            let next = self.vec_mul(powers.last().unwrap(), &ei)?;
            powers.push(next);
        }
    }
}

/// Grouplikes of a finite dual coalgebra: exactly the characters of the
/// input algebra, returned as elements of the dual basis.
pub fn finite_dual_grouplikes(descriptor: &Arc<BialgebraDescriptor>) -> Result<Vec<Element>> {
    let algebra = match descriptor.family() {
        Family::FiniteDual(a) => a.clone(),
        _ => return Err(CoalgError::BadParameter("expected a finite dual coalgebra".into())),
    };
    let mut out = Vec::new();
    for values in algebra.characters()? {
        let mut e = Element::zero(descriptor);
        for (i, v) in values.iter().enumerate() {
            e.add_term(BasisIndex::Word(vec![i as u16]), v.clone())?;
        }
        out.push(e);
    }
    Ok(out)
}

/// A random element supported in degrees at most `max_degree`, for
/// randomized suites.
pub fn random_element(
    rng: &mut impl rand::Rng,
    descriptor: &Arc<BialgebraDescriptor>,
    max_degree: i64,
    terms: usize,
) -> Element {
    let basis = descriptor.basis_up_to(max_degree);
    let mut out = Element::zero(descriptor);
    for _ in 0..terms {
        let idx = basis[rng.gen_range(0..basis.len())].clone();
        let c = crate::scalar::random_scalar(rng, descriptor.ring());
        out.add_term(idx, c).expect("basis is valid");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::trinomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qq() -> Arc<RingSpec> {
        Arc::new(RingSpec::Rationals)
    }

    fn zmod(n: u64) -> Arc<RingSpec> {
        Arc::new(RingSpec::modular(n).unwrap())
    }

    fn x_power(descr: &Arc<BialgebraDescriptor>, n: i64) -> Element {
        Element::basis(descr, BasisIndex::Monomial(vec![n])).unwrap()
    }

    fn infiltration_z4() -> Arc<BialgebraDescriptor> {
        let ring = zmod(4);
        let q = Scalar::from_i64(&ring, 2);
        BialgebraDescriptor::infiltration(&ring, q, 12).unwrap()
    }

    /// Q[q] with q the infiltration parameter.
    fn infiltration_generic(trunc: i64) -> Arc<BialgebraDescriptor> {
        let ring = Arc::new(RingSpec::poly(RingSpec::Rationals, &["q"]).unwrap());
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        BialgebraDescriptor::infiltration(&ring, q, trunc).unwrap()
    }

    #[test]
    fn infiltration_delta_on_x() {
        let descr = infiltration_z4();
        let ring = descr.ring().clone();
        let d = delta(&x_power(&descr, 1)).unwrap();
        let x = BasisIndex::Monomial(vec![1]);
        let one = BasisIndex::Monomial(vec![0]);
        assert_eq!(d.terms().len(), 3);
        assert_eq!(d.terms()[&vec![x.clone(), one.clone()]], Scalar::one(&ring));
        assert_eq!(d.terms()[&vec![one.clone(), x.clone()]], Scalar::one(&ring));
        assert_eq!(d.terms()[&vec![x.clone(), x.clone()]], Scalar::from_i64(&ring, 2));
    }

    #[test]
    fn one_plus_qx_is_grouplike() {
        let descr = infiltration_z4();
        let ring = descr.ring().clone();
        let g = Element::from_terms(
            &descr,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(&ring)),
                (BasisIndex::Monomial(vec![1]), Scalar::from_i64(&ring, 2)),
            ],
        )
        .unwrap();
        assert!(is_grouplike(&g).unwrap());
        assert_eq!(delta(&g).unwrap(), TensorK::tensor_power(&g, 2).unwrap());
        assert!(counit(&g).unwrap().is_one());
    }

    #[test]
    fn one_plus_ux_grouplike_in_standard_family_when_u_squares_to_zero() {
        let ring = zmod(4);
        let descr = BialgebraDescriptor::polynomial_primitive(&ring, 8).unwrap();
        let g = Element::from_terms(
            &descr,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(&ring)),
                (BasisIndex::Monomial(vec![1]), Scalar::from_i64(&ring, 2)),
            ],
        )
        .unwrap();
        assert!(is_grouplike(&g).unwrap());

        let descr_q = BialgebraDescriptor::polynomial_primitive(&qq(), 8).unwrap();
        let x = x_power(&descr_q, 1);
        assert!(!is_grouplike(&x).unwrap());
    }

    #[test]
    fn infiltration_delta_of_x_squared_matches_multinomial_formula() {
        // the coproduct computed by multiplicativity against the
        // closed-form multinomial expansion, over Q[q]
        let descr = infiltration_generic(10);
        let ring = descr.ring().clone();
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        for m in 0..=8u64 {
            let computed = delta(&x_power(&descr, m as i64)).unwrap();
            let mut expected = TensorK::zero(&descr, 2);
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let k = m - i - j;
                    let c = Scalar::from_bigint(&ring, &trinomial(i, j, k)).mul(&q.pow(j as u32)).unwrap();
                    expected
                        .add_term(
                            vec![
                                BasisIndex::Monomial(vec![(i + j) as i64]),
                                BasisIndex::Monomial(vec![(j + k) as i64]),
                            ],
                            c,
                        )
                        .unwrap();
                }
            }
            assert_eq!(computed, expected, "mismatch at m = {m}");
        }
        // the m = 2 expansion from squaring x⊗1 + 1⊗x + q·x⊗x directly
        let d2 = delta(&x_power(&descr, 2)).unwrap();
        let idx = |a: i64, b: i64| vec![BasisIndex::Monomial(vec![a]), BasisIndex::Monomial(vec![b])];
        assert_eq!(d2.terms()[&idx(2, 0)], Scalar::one(&ring));
        assert_eq!(d2.terms()[&idx(1, 1)], Scalar::from_i64(&ring, 2));
        assert_eq!(d2.terms()[&idx(0, 2)], Scalar::one(&ring));
        assert_eq!(d2.terms()[&idx(2, 1)], Scalar::from_i64(&ring, 2).mul(&q).unwrap());
        assert_eq!(d2.terms()[&idx(1, 2)], Scalar::from_i64(&ring, 2).mul(&q).unwrap());
        assert_eq!(d2.terms()[&idx(2, 2)], q.pow(2));
    }

    #[test]
    fn monoid_bialgebra_maps_into_the_infiltration_one() {
        // an independent route to the infiltration coproduct: sending
        // the monoid generator to 1 + q·x intertwines the diagonal
        // coproduct with Δ_{↑q}, i.e. every power (1+qx)^n is grouplike
        let ring = Arc::new(RingSpec::poly(RingSpec::Rationals, &["q"]).unwrap());
        let q = Scalar::monomial(&ring, "q", 1).unwrap();
        let inf = BialgebraDescriptor::infiltration(&ring, q.clone(), 8).unwrap();
        let psi_x = Element::from_terms(
            &inf,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(&ring)),
                (BasisIndex::Monomial(vec![1]), q.clone()),
            ],
        )
        .unwrap();
        for n in 0..=5u32 {
            let image = psi_x.pow(n).unwrap();
            // (ψ ⊗ ψ)(Δ_⊙(x^n)) = image ⊗ image must equal Δ_{↑q}(image)
            assert_eq!(
                delta(&image).unwrap(),
                TensorK::tensor_power(&image, 2).unwrap(),
                "n = {n}"
            );
            // counits agree: the diagonal counit is 1 on every monoid element
            assert!(counit(&image).unwrap().is_one(), "n = {n}");
        }
    }

    #[test]
    fn frobenius_grouplikes_and_their_inverse() {
        // 1, 1 + qx̄ and its alternating geometric inverse are all
        // grouplike, and the latter two multiply to 1
        let f3 = zmod(3);
        for qv in 1..3i64 {
            let q = Scalar::from_i64(&f3, qv);
            let descr = BialgebraDescriptor::frobenius_quotient(&f3, 3, q.clone()).unwrap();
            let one = Element::one(&descr);
            let g = one.add(&x_power(&descr, 1).scale(&q).unwrap()).unwrap();
            let mut inverse = Element::zero(&descr);
            for i in 0..3u32 {
                let mut c = q.pow(i);
                if i % 2 == 1 {
                    c = c.neg();
                }
                inverse.add_term(BasisIndex::Monomial(vec![i as i64]), c).unwrap();
            }
            assert!(is_grouplike(&one).unwrap());
            assert!(is_grouplike(&g).unwrap());
            assert!(is_grouplike(&inverse).unwrap());
            assert_eq!(g.mul(&inverse).unwrap(), one);
        }
    }

    #[test]
    fn products_reduce_in_quotient_families() {
        let ring = qq();
        let gx = BialgebraDescriptor::gx_quotient(&ring, 8).unwrap();
        let g = Element::basis(&gx, BasisIndex::Monomial(vec![1, 0])).unwrap();
        let x = Element::basis(&gx, BasisIndex::Monomial(vec![0, 1])).unwrap();
        assert!(g.mul(&x).unwrap().is_zero());

        let f3 = zmod(3);
        let frob = BialgebraDescriptor::frobenius_quotient(&f3, 3, Scalar::one(&f3)).unwrap();
        let x2 = Element::basis(&frob, BasisIndex::Monomial(vec![2])).unwrap();
        let x1 = Element::basis(&frob, BasisIndex::Monomial(vec![1])).unwrap();
        assert!(x2.mul(&x1).unwrap().is_zero());

        let std = BialgebraDescriptor::polynomial_primitive(&ring, 8).unwrap();
        let one = Element::one(&std);
        let x = x_power(&std, 1);
        let lhs = one.add(&x).unwrap().mul(&one.sub(&x).unwrap()).unwrap();
        let expected = one.sub(&x_power(&std, 2)).unwrap();
        assert_eq!(lhs, expected);
    }

    #[test]
    fn truncation_is_loud() {
        let ring = qq();
        let descr = BialgebraDescriptor::polynomial_primitive(&ring, 4).unwrap();
        let x3 = x_power(&descr, 3);
        let err = x3.mul(&x3).unwrap_err();
        assert!(matches!(err, CoalgError::TruncationExceeded { degree: 6, limit: 4 }));
    }

    #[test]
    fn counit_examples() {
        let descr = infiltration_z4();
        let ring = descr.ring().clone();
        let g = Element::from_terms(
            &descr,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(&ring)),
                (BasisIndex::Monomial(vec![1]), Scalar::from_i64(&ring, 2)),
            ],
        )
        .unwrap();
        assert!(counit(&g).unwrap().is_one());

        let gx = BialgebraDescriptor::gx_quotient(&qq(), 6).unwrap();
        let gbar = Element::basis(&gx, BasisIndex::Monomial(vec![1, 0])).unwrap();
        assert!(counit(&gbar).unwrap().is_one());
        assert!(counit(&Element::zero(&gx)).unwrap().is_zero());
    }

    #[test]
    fn monoid_diag_is_diagonal() {
        let ring = qq();
        let free_x = Arc::new(TraceMonoid::free(&["x"]).unwrap());
        let descr = BialgebraDescriptor::monoid_diag(&ring, MonoidKind::Trace(free_x), Some(6)).unwrap();
        let xn = Element::basis(&descr, BasisIndex::TraceNF(vec![0, 0, 0])).unwrap();
        let d = delta(&xn).unwrap();
        assert_eq!(d, TensorK::tensor_power(&xn, 2).unwrap());
        assert!(counit(&xn).unwrap().is_one());
        assert!(is_grouplike(&xn).unwrap());
    }

    #[test]
    fn iterated_delta_examples() {
        let descr = infiltration_z4();
        let ring = descr.ring().clone();
        let g = Element::from_terms(
            &descr,
            [
                (BasisIndex::Monomial(vec![0]), Scalar::one(&ring)),
                (BasisIndex::Monomial(vec![1]), Scalar::from_i64(&ring, 2)),
            ],
        )
        .unwrap();
        // Δ^(0) = id
        match iterated_delta(&g, 0).unwrap() {
            Iterated::Tensor(t) => assert_eq!(t, TensorK::from_element(&g)),
            _ => panic!("expected tensor"),
        }
        // Δ^(-1) = ε
        match iterated_delta(&g, -1).unwrap() {
            Iterated::Scalar(s) => assert!(s.is_one()),
            _ => panic!("expected scalar"),
        }
        // grouplikes: Δ^(k-1) g = g^{⊗k} for 1 <= k <= 6
        for k in 1..=6i64 {
            match iterated_delta(&g, k - 1).unwrap() {
                Iterated::Tensor(t) => assert_eq!(t, TensorK::tensor_power(&g, k as usize).unwrap()),
                _ => panic!("expected tensor"),
            }
        }
        // primitive x in the standard family
        let std = BialgebraDescriptor::polynomial_primitive(&qq(), 8).unwrap();
        let x = x_power(&std, 1);
        match iterated_delta(&x, 2).unwrap() {
            Iterated::Tensor(t) => {
                let one = BasisIndex::Monomial(vec![0]);
                let xi = BasisIndex::Monomial(vec![1]);
                assert_eq!(t.terms().len(), 3);
                for key in [
                    vec![xi.clone(), one.clone(), one.clone()],
                    vec![one.clone(), xi.clone(), one.clone()],
                    vec![one.clone(), one.clone(), xi.clone()],
                ] {
                    assert!(t.terms()[&key].is_one());
                }
            }
            _ => panic!("expected tensor"),
        }
    }

    #[test]
    fn monoid_grouplike_criterion_examples() {
        let ring = qq();
        let c2 = Arc::new(FiniteMonoid::cyclic(2));
        let descr_q = BialgebraDescriptor::monoid_diag(&ring, MonoidKind::Finite(c2.clone()), None).unwrap();
        let unit = Element::one(&descr_q);
        assert!(monoid_grouplike_criterion(&unit).unwrap());

        let z6 = zmod(6);
        let descr6 = BialgebraDescriptor::monoid_diag(&z6, MonoidKind::Finite(c2.clone()), None).unwrap();
        let e = Element::from_terms(
            &descr6,
            [
                (BasisIndex::Word(vec![0]), Scalar::from_i64(&z6, 3)),
                (BasisIndex::Word(vec![1]), Scalar::from_i64(&z6, 4)),
            ],
        )
        .unwrap();
        assert!(monoid_grouplike_criterion(&e).unwrap());
        assert!(is_grouplike(&e).unwrap());

        let halves = Element::from_terms(
            &descr_q,
            [
                (BasisIndex::Word(vec![0]), Scalar::parse(&ring, "1/2").unwrap()),
                (BasisIndex::Word(vec![1]), Scalar::parse(&ring, "1/2").unwrap()),
            ],
        )
        .unwrap();
        assert!(!monoid_grouplike_criterion(&halves).unwrap());
        assert!(!is_grouplike(&halves).unwrap());

        // criterion agrees with the grouplike test on every enumerated family
        for e in enumerate_monoid_grouplikes(&descr6).unwrap() {
            assert!(monoid_grouplike_criterion(&e).unwrap());
            assert!(is_grouplike(&e).unwrap());
        }
        // Z/6 idempotents {0,1,3,4} give four grouplikes on C2
        assert_eq!(enumerate_monoid_grouplikes(&descr6).unwrap().len(), 4);
    }

    #[test]
    fn tensor_product_bialgebra_rules() {
        let ring = qq();
        let group = BialgebraDescriptor::monoid_diag(
            &ring,
            MonoidKind::GroupZ { symbol: "g".into() },
            Some(8),
        )
        .unwrap();
        let poly = BialgebraDescriptor::polynomial_primitive(&ring, 8).unwrap();
        let prod = BialgebraDescriptor::tensor_product(&group, &poly).unwrap();

        let g = BasisIndex::Monomial(vec![1]);
        let one_l = BasisIndex::Monomial(vec![0]);
        let x = BasisIndex::Monomial(vec![1]);
        let one_r = BasisIndex::Monomial(vec![0]);
        let pair = |a: &BasisIndex, b: &BasisIndex| BasisIndex::Pair(Box::new(a.clone()), Box::new(b.clone()));

        // Δ(g⊗x) = (g⊗x)⊗(g⊗1) + (g⊗1)⊗(g⊗x)
        let gx = Element::basis(&prod, pair(&g, &x)).unwrap();
        let d = delta(&gx).unwrap();
        assert_eq!(d.terms().len(), 2);
        assert!(d.terms()[&vec![pair(&g, &x), pair(&g, &one_r)]].is_one());
        assert!(d.terms()[&vec![pair(&g, &one_l), pair(&g, &x)]].is_one());

        // ε(g⊗1) = 1
        let g1 = Element::basis(&prod, pair(&g, &one_r)).unwrap();
        assert!(counit(&g1).unwrap().is_one());

        // grouplike ⊗ grouplike is grouplike
        assert!(is_grouplike(&g1).unwrap());
    }

    #[test]
    fn finite_dual_grouplikes_are_characters() {
        let ring = qq();
        // Q × Q × Q: three coordinate projections
        let diag3 = FiniteAlgebra::diagonal(&ring, 3).unwrap();
        let dual3 = BialgebraDescriptor::finite_dual(diag3);
        let gls = finite_dual_grouplikes(&dual3).unwrap();
        assert_eq!(gls.len(), 3);
        for g in &gls {
            assert!(is_grouplike(g).unwrap());
            assert_eq!(g.terms().len(), 1);
            assert!(g.terms().values().next().unwrap().is_one());
        }

        // Q itself: only ε
        let diag1 = FiniteAlgebra::diagonal(&ring, 1).unwrap();
        let dual1 = BialgebraDescriptor::finite_dual(diag1);
        assert_eq!(finite_dual_grouplikes(&dual1).unwrap().len(), 1);

        // dual numbers: evaluation at x = 0 only
        let dn = FiniteAlgebra::dual_numbers(&ring).unwrap();
        let dualn = BialgebraDescriptor::finite_dual(dn);
        let gls = finite_dual_grouplikes(&dualn).unwrap();
        assert_eq!(gls.len(), 1);
        assert_eq!(gls[0].coeff(&BasisIndex::Word(vec![0])), Scalar::one(&ring));
        assert_eq!(gls[0].coeff(&BasisIndex::Word(vec![1])), Scalar::zero(&ring));
        assert!(is_grouplike(&gls[0]).unwrap());

        // no multiplication on the dual side
        let e = Element::basis(&dualn, BasisIndex::Word(vec![0])).unwrap();
        assert!(matches!(e.mul(&e), Err(CoalgError::NoMultiplication)));
    }

    #[test]
    fn finite_algebra_validation() {
        let ring = qq();
        let zero = Scalar::zero(&ring);
        let one = Scalar::one(&ring);
        // non-associative: e1·e1 = e2, e2·e1 = e1, others zero
        let table = vec![
            vec![vec![zero.clone(), one.clone()], vec![zero.clone(), zero.clone()]],
            vec![vec![one.clone(), zero.clone()], vec![zero.clone(), zero.clone()]],
        ];
        let r = FiniteAlgebra::new(ring.clone(), vec!["e1".into(), "e2".into()], table, vec![one.clone(), zero.clone()]);
        assert!(matches!(r, Err(CoalgError::NotUnital) | Err(CoalgError::NotAssociative)));
    }

    fn shipped_families() -> Vec<Arc<BialgebraDescriptor>> {
        let ring = qq();
        let z4 = zmod(4);
        let f3 = zmod(3);
        let trace = Arc::new(TraceMonoid::new(&["x", "y"], &[("x", "y")]).unwrap());
        vec![
            BialgebraDescriptor::polynomial_primitive(&ring, 6).unwrap(),
            infiltration_z4(),
            infiltration_generic(6),
            BialgebraDescriptor::frobenius_quotient(&f3, 3, Scalar::one(&f3)).unwrap(),
            BialgebraDescriptor::gx_quotient(&ring, 6).unwrap(),
            BialgebraDescriptor::monoid_diag(&z4, MonoidKind::Finite(Arc::new(FiniteMonoid::cyclic(3))), None).unwrap(),
            BialgebraDescriptor::monoid_diag(&ring, MonoidKind::Trace(trace), Some(4)).unwrap(),
            BialgebraDescriptor::monoid_diag(&ring, MonoidKind::GroupZ { symbol: "g".into() }, Some(4)).unwrap(),
            BialgebraDescriptor::tensor_conc(&ring, &["x", "y"], 4).unwrap(),
            BialgebraDescriptor::tensor_product(
                &BialgebraDescriptor::monoid_diag(&ring, MonoidKind::GroupZ { symbol: "g".into() }, Some(3)).unwrap(),
                &BialgebraDescriptor::polynomial_primitive(&ring, 3).unwrap(),
            )
            .unwrap(),
            BialgebraDescriptor::finite_dual(FiniteAlgebra::diagonal(&ring, 2).unwrap()),
        ]
    }

    #[test]
    fn coassociativity_and_counitality_on_every_family() {
        for descr in shipped_families() {
            let depth = 4.min(descr.truncation().unwrap_or(4));
            for idx in descr.basis_up_to(depth) {
                let e = Element::basis(&descr, idx.clone()).unwrap();
                let d = delta(&e).unwrap();
                let left = delta_on_leg(&d, 0).unwrap();
                let right = delta_on_leg(&d, 1).unwrap();
                assert_eq!(left, right, "coassociativity fails on {idx:?}");
                assert_eq!(counit_on_leg(&d, 0).unwrap(), TensorK::from_element(&e));
                assert_eq!(counit_on_leg(&d, 1).unwrap(), TensorK::from_element(&e));
            }
        }
    }

    #[test]
    fn delta_and_counit_are_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for descr in shipped_families() {
            if !descr.has_multiplication() {
                continue;
            }
            for _ in 0..10 {
                let a = random_element(&mut rng, &descr, 2, 2);
                let b = random_element(&mut rng, &descr, 2, 2);
                let Ok(ab) = a.mul(&b) else { continue };
                assert_eq!(delta(&ab).unwrap(), delta(&a).unwrap().mul(&delta(&b).unwrap()).unwrap());
                assert_eq!(counit(&ab).unwrap(), counit(&a).unwrap().mul(&counit(&b).unwrap()).unwrap());
            }
            let one = Element::one(&descr);
            assert_eq!(delta(&one).unwrap(), TensorK::tensor_power(&one, 2).unwrap());
            assert!(counit(&one).unwrap().is_one());
        }
    }

    #[test]
    fn freshmans_dream_in_frobenius_quotient() {
        // well-definedness: Δ(x̄)^p = 0 in B⊗B for p = 3
        let f3 = zmod(3);
        for qv in 0..3i64 {
            let q = Scalar::from_i64(&f3, qv);
            let descr = BialgebraDescriptor::frobenius_quotient(&f3, 3, q).unwrap();
            let x = Element::basis(&descr, BasisIndex::Monomial(vec![1])).unwrap();
            let dx = delta(&x).unwrap();
            assert!(dx.pow(3).unwrap().is_zero(), "q = {qv}");
        }
    }

    #[test]
    fn basis_parsing_round_trip() {
        for descr in shipped_families() {
            let depth = 3.min(descr.truncation().unwrap_or(3));
            for idx in descr.basis_up_to(depth) {
                let text = descr.basis_string(&idx);
                let parsed = descr.parse_basis(&text).unwrap();
                assert_eq!(parsed, idx, "round trip failed for {text}");
            }
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let ring = qq();
        assert!(BialgebraDescriptor::frobenius_quotient(&ring, 3, Scalar::one(&ring)).is_err());
        let f3 = zmod(3);
        assert!(BialgebraDescriptor::frobenius_quotient(&f3, 4, Scalar::one(&f3)).is_err());
        let free = Arc::new(TraceMonoid::free(&["x"]).unwrap());
        assert!(BialgebraDescriptor::monoid_diag(&ring, MonoidKind::Trace(free), None).is_err());
        let z4 = zmod(4);
        assert!(BialgebraDescriptor::tensor_product(
            &BialgebraDescriptor::polynomial_primitive(&ring, 4).unwrap(),
            &BialgebraDescriptor::polynomial_primitive(&z4, 4).unwrap(),
        )
        .is_err());
    }
}
