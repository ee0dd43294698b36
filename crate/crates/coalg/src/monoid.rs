//! Trace monoids, normal forms, and truncated series over them.
//!
//! A trace monoid is a free monoid modulo commutations `xy = yx` for the
//! edges of an undirected graph on the alphabet. Free monoids (no edges)
//! and free abelian monoids (complete graph) are the two extremes.
//! Series are finitely supported maps from normal forms to scalars,
//! truncated at a maximal letter count, with the Cauchy product, Kleene
//! stars of proper series, Möbius functions via the clique formula, and
//! multiplicative character series.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::scalar::{RingSpec, Scalar};
use crate::{CoalgError, Result};

/// A finitely presented partially commutative monoid `M(X, θ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceMonoid {
    alphabet: Vec<String>,
    /// Commutation edges between distinct letters, stored with i < j.
    edges: BTreeSet<(u16, u16)>,
}

impl TraceMonoid {
    pub fn new(alphabet: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(CoalgError::BadParameter("empty alphabet".into()));
        }
        let names: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != names.len() {
            return Err(CoalgError::BadParameter("duplicate letter".into()));
        }
        let mut monoid = TraceMonoid { alphabet: names, edges: BTreeSet::new() };
        for (a, b) in edges {
            let i = monoid.letter_index(a)?;
            let j = monoid.letter_index(b)?;
            if i == j {
                return Err(CoalgError::BadParameter(format!("loop edge on {a}")));
            }
            monoid.edges.insert((i.min(j), i.max(j)));
        }
        Ok(monoid)
    }

    /// Free monoid: nothing commutes.
    pub fn free(alphabet: &[&str]) -> Result<Self> {
        TraceMonoid::new(alphabet, &[])
    }

    /// Free abelian monoid: everything commutes.
    pub fn free_abelian(alphabet: &[&str]) -> Result<Self> {
        let mut m = TraceMonoid::new(alphabet, &[])?;
        for i in 0..m.alphabet.len() as u16 {
            for j in (i + 1)..m.alphabet.len() as u16 {
                m.edges.insert((i, j));
            }
        }
        Ok(m)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn edges(&self) -> &BTreeSet<(u16, u16)> {
        &self.edges
    }

    pub fn letter_index(&self, name: &str) -> Result<u16> {
        self.alphabet
            .iter()
            .position(|l| l == name)
            .map(|i| i as u16)
            .ok_or_else(|| CoalgError::UnknownLetter(name.to_string()))
    }

    pub fn commutes(&self, a: u16, b: u16) -> bool {
        a == b || self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Lexicographically least word in the commutation class of `word`.
    ///
    /// Greedy: repeatedly emit the smallest letter that can be moved to
    /// the front by adjacent commuting swaps.
    pub fn normal_form(&self, word: &[u16]) -> Vec<u16> {
        let mut rest: Vec<u16> = word.to_vec();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best = 0usize;
            for i in 1..rest.len() {
                if rest[..i].iter().all(|&b| self.commutes(rest[i], b)) && rest[i] < rest[best] {
                    best = i;
                }
            }
            out.push(rest.remove(best));
        }
        out
    }

    /// Parse a word: letters joined by `*` with optional `^k` powers,
    /// or a plain concatenation when every letter is a single
    /// character. `"1"` denotes the empty trace.
    pub fn parse_word(&self, text: &str) -> Result<Vec<u16>> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Vec::new());
        }
        if text.contains('*') || text.contains('^') {
            let mut out = Vec::new();
            for part in text.split('*') {
                let part = part.trim();
                let (name, count) = match part.split_once('^') {
                    Some((n, e)) => {
                        let count: usize = e
                            .trim()
                            .parse()
                            .map_err(|_| CoalgError::Parse(format!("bad power in '{part}'")))?;
                        (n.trim(), count)
                    }
                    None => (part, 1),
                };
                let idx = self.letter_index(name)?;
                out.resize(out.len() + count, idx);
            }
            return Ok(out);
        }
        if self.alphabet.iter().all(|l| l.chars().count() == 1) {
            return text
                .chars()
                .map(|c| self.letter_index(&c.to_string()))
                .collect();
        }
        Ok(vec![self.letter_index(text)?])
    }

    /// Print a word with consecutive runs collapsed into powers:
    /// `x*y`, `x^2*y`, `x*y*x`.
    pub fn word_string(&self, word: &[u16]) -> String {
        if word.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let letter = word[i];
            let mut run = 1;
            while i + run < word.len() && word[i + run] == letter {
                run += 1;
            }
            let name = &self.alphabet[letter as usize];
            parts.push(if run == 1 { name.clone() } else { format!("{name}^{run}") });
            i += run;
        }
        parts.join("*")
    }

    /// All distinct normal forms with at most `len` letters, by length.
    pub fn normal_forms_up_to(&self, len: u32) -> Vec<Vec<u16>> {
        let mut all: Vec<Vec<u16>> = vec![Vec::new()];
        let mut layer: BTreeSet<Vec<u16>> = BTreeSet::from([Vec::new()]);
        for _ in 0..len {
            let mut next = BTreeSet::new();
            for w in &layer {
                for a in 0..self.alphabet.len() as u16 {
                    let mut extended = w.clone();
                    extended.push(a);
                    next.insert(self.normal_form(&extended));
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    }

    /// All cliques of the commutation graph, the empty set included.
    pub fn cliques(&self) -> Vec<Vec<u16>> {
        let n = self.alphabet.len() as u16;
        let mut out: Vec<Vec<u16>> = vec![Vec::new()];
        let mut stack: Vec<Vec<u16>> = vec![Vec::new()];
        while let Some(clique) = stack.pop() {
            let start = clique.last().map(|&l| l + 1).unwrap_or(0);
            for next in start..n {
                if clique.iter().all(|&c| self.commutes(c, next)) {
                    let mut bigger = clique.clone();
                    bigger.push(next);
                    out.push(bigger.clone());
                    stack.push(bigger);
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// A truncated series over a trace monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    ring: Arc<RingSpec>,
    monoid: Arc<TraceMonoid>,
    max_len: u32,
    terms: BTreeMap<Vec<u16>, Scalar>,
}

impl Series {
    pub fn zero(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, max_len: u32) -> Self {
        Series { ring: ring.clone(), monoid: monoid.clone(), max_len, terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, max_len: u32) -> Self {
        let mut s = Series::zero(ring, monoid, max_len);
        s.add_term(&[], Scalar::one(ring));
        s
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn monoid(&self) -> &Arc<TraceMonoid> {
        &self.monoid
    }

    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, Scalar> {
        &self.terms
    }

    /// Add `coeff * word`, normalizing the word and dropping overflow
    /// beyond the truncation length.
    pub fn add_term(&mut self, word: &[u16], coeff: Scalar) {
        if word.len() as u32 > self.max_len || coeff.is_zero() {
            return;
        }
        let nf = self.monoid.normal_form(word);
        let entry = self
            .terms
            .entry(nf)
            .or_insert_with(|| Scalar::zero(&self.ring));
        *entry = entry.add(&coeff).expect("same ring");
        if entry.is_zero() {
            let nf = self.monoid.normal_form(word);
            self.terms.remove(&nf);
        }
    }

    pub fn coeff(&self, word: &[u16]) -> Scalar {
        let nf = self.monoid.normal_form(word);
        self.terms.get(&nf).cloned().unwrap_or_else(|| Scalar::zero(&self.ring))
    }

    fn compatible(&self, other: &Series) -> Result<()> {
        if self.monoid == other.monoid && self.ring == other.ring && self.max_len == other.max_len {
            Ok(())
        } else {
            Err(CoalgError::MonoidMismatch)
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series {
        let mut out = Series::zero(&self.ring, &self.monoid, self.max_len);
        for (w, c) in &self.terms {
            out.add_term(w, c.neg());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> Series {
        let mut out = Series::zero(&self.ring, &self.monoid, self.max_len);
        for (w, c) in &self.terms {
            out.add_term(w, c.mul(factor).expect("same ring"));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parse a series from text: terms `coeff*word` joined by `+`/`-`,
    /// with words written as concatenated single-character letters and
    /// `1` for the empty trace.
    pub fn parse(
        ring: &Arc<RingSpec>,
        monoid: &Arc<TraceMonoid>,
        max_len: u32,
        text: &str,
    ) -> Result<Series> {
        let mut out = Series::zero(ring, monoid, max_len);
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for c in text.chars() {
            match c {
                '+' | '-' => {
                    if !current.trim().is_empty() {
                        chunks.push((negative, current.trim().to_string()));
                    } else if !chunks.is_empty() {
                        return Err(CoalgError::Parse("empty series term".into()));
                    }
                    negative = c == '-';
                    current = String::new();
                }
                _ => current.push(c),
            }
        }
        if !current.trim().is_empty() {
            chunks.push((negative, current.trim().to_string()));
        }
        if chunks.is_empty() {
            return Err(CoalgError::Parse("empty series".into()));
        }
        for (neg, chunk) in chunks {
            let (coeff, word) = match chunk.split_once('*') {
                Some((c, w)) => (Scalar::parse(ring, c)?, monoid.parse_word(w)?),
                None => {
                    // either a bare word or a bare scalar constant
                    match monoid.parse_word(&chunk) {
                        Ok(w) => (Scalar::one(ring), w),
                        Err(_) => (Scalar::parse(ring, &chunk)?, Vec::new()),
                    }
                }
            };
            let coeff = if neg { coeff.neg() } else { coeff };
            if word.len() as u32 > max_len {
                return Err(CoalgError::Parse(format!("term of length {} exceeds the truncation", word.len())));
            }
            out.add_term(&word, coeff);
        }
        Ok(out)
    }

    /// Terms sorted by (length, lex), printed as `coeff*word`.
    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u16>> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut out = String::new();
        for (i, key) in keys.iter().enumerate() {
            let coeff = &self.terms[*key];
            let printed = coeff.to_string();
            let (neg, body) = match printed.strip_prefix('-') {
                Some(rest) if !rest.contains(" + ") && !rest.contains(" - ") => (true, rest.to_string()),
                _ => (false, printed),
            };
            let word = self.monoid.word_string(key);
            let text = if word == "1" {
                body.clone()
            } else if body == "1" {
                word
            } else if body.contains(' ') {
                format!("({body})*{word}")
            } else {
                format!("{body}*{word}")
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
                out.push_str(&text);
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&text);
            }
        }
        out
    }
}

/// Cauchy product of two truncated series: enumerate the finitely many
/// factorizations through the supports.
pub fn cauchy_product(p: &Series, q: &Series) -> Result<Series> {
    p.compatible(q)?;
    let mut out = Series::zero(&p.ring, &p.monoid, p.max_len);
    for (u, cu) in &p.terms {
        for (v, cv) in &q.terms {
            if (u.len() + v.len()) as u32 > p.max_len {
                continue;
            }
            let mut w = u.clone();
            w.extend_from_slice(v);
            out.add_term(&w, cu.mul(cv).expect("same ring"));
        }
    }
    Ok(out)
}

/// Kleene star of a proper series, truncated at `max_len` letters.
pub fn kleene_star(s: &Series, max_len: u32) -> Result<Series> {
    if !s.coeff(&[]).is_zero() {
        return Err(CoalgError::NotProper);
    }
    let mut base = Series::zero(&s.ring, &s.monoid, max_len);
    for (w, c) in &s.terms {
        base.add_term(w, c.clone());
    }
    let mut acc = Series::one(&s.ring, &s.monoid, max_len);
    let mut power = Series::one(&s.ring, &s.monoid, max_len);
    for _ in 0..max_len {
        power = cauchy_product(&power, &base)?;
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power)?;
    }
    Ok(acc)
}

/// Möbius series by the clique formula: the signed sum over cliques of
/// the commutation graph.
pub fn mobius(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, max_len: u32) -> Series {
    let mut out = Series::zero(ring, monoid, max_len);
    for clique in monoid.cliques() {
        let sign = if clique.len() % 2 == 0 { 1 } else { -1 };
        out.add_term(&clique, Scalar::from_i64(ring, sign));
    }
    out
}

/// Characteristic series: every normal form with coefficient 1.
pub fn characteristic_series(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, max_len: u32) -> Series {
    let mut out = Series::zero(ring, monoid, max_len);
    for w in monoid.normal_forms_up_to(max_len) {
        out.add_term(&w, Scalar::one(ring));
    }
    out
}

/// Checks the two Möbius inversion identities up to length `max_len`:
/// the Möbius series is a two-sided inverse of the characteristic
/// series, and the characteristic series is the Kleene star of the
/// negated proper part of the Möbius series.
pub fn verify_mobius_inverse(monoid: &Arc<TraceMonoid>, max_len: u32) -> Result<bool> {
    let ring = Arc::new(RingSpec::Integers);
    let mob = mobius(&ring, monoid, max_len);
    let chi = characteristic_series(&ring, monoid, max_len);
    let one = Series::one(&ring, monoid, max_len);
    let left = cauchy_product(&mob, &chi)?;
    let right = cauchy_product(&chi, &mob)?;
    let mut proper = mob.clone();
    proper.terms.remove(&Vec::new());
    let star = kleene_star(&proper.neg(), max_len)?;
    Ok(left == one && right == one && star == chi)
}

/// Multiplicative extension of the alphabet values: the series
/// `Σ χ(m) m` up to length `max_len`.
pub fn character_series(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, values: &[Scalar], max_len: u32) -> Result<Series> {
    if values.len() != monoid.alphabet().len() {
        return Err(CoalgError::LengthMismatch);
    }
    for v in values {
        if v.ring() != ring {
            return Err(CoalgError::RingMismatch(v.ring().to_string(), ring.to_string()));
        }
    }
    let mut out = Series::zero(ring, monoid, max_len);
    for w in monoid.normal_forms_up_to(max_len) {
        let mut c = Scalar::one(ring);
        for &letter in &w {
            c = c.mul(&values[letter as usize])?;
        }
        out.add_term(&w, c);
    }
    Ok(out)
}

/// The same character as a Kleene star: `(−Σ_{m≠1} χ(m) μ(m) m)*`.
pub fn character_series_kleene(ring: &Arc<RingSpec>, monoid: &Arc<TraceMonoid>, values: &[Scalar], max_len: u32) -> Result<Series> {
    if values.len() != monoid.alphabet().len() {
        return Err(CoalgError::LengthMismatch);
    }
    let mob = mobius(ring, monoid, max_len);
    let mut inner = Series::zero(ring, monoid, max_len);
    for (w, mu) in &mob.terms {
        if w.is_empty() {
            continue;
        }
        let mut chi = Scalar::one(ring);
        for &letter in w {
            chi = chi.mul(&values[letter as usize])?;
        }
        inner.add_term(w, chi.mul(mu)?.neg());
    }
    kleene_star(&inner, max_len)
}
