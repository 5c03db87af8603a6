//! Grassmann algebra over an exact field and the Berezin integral.
//!
//! Each tetrahedron `t` of a triangulation carries two anticommuting
//! generators, written `a[t]` and `b[t]`. Generators square to zero and
//! anticommute, so an algebra element is a finite sum of square-free monomials
//! with scalar coefficients. The global generator order (tetrahedra
//! lexicographically, `a` before `b`) fixes the canonical form of every
//! monomial and thereby the sign bookkeeping of products, derivatives and
//! integrals.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::{FieldError, FieldScalar, FieldTag};

/// Errors produced by Grassmann-algebra operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrassmannError {
    /// Operands built over different fields.
    #[error("grassmann elements over different fields: {0} and {1}")]
    MixedFields(FieldTag, FieldTag),
    /// An integration variable was listed twice.
    #[error("duplicate integration variable {0}")]
    DuplicateVariable(Generator),
    /// Asked to solve `D(w) = 1` for an operator with no terms.
    #[error("the zero operator has no inverse of one")]
    ZeroOperator,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which of the two generators of a tetrahedron.
///
/// `A` pairs with the first vertex of the tetrahedron, `B` with the second;
/// `A` precedes `B` in the canonical generator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    A,
    B,
}

/// One anticommuting generator: a tetrahedron plus the `a`/`b` choice.
///
/// The derived ordering (tetrahedron lexicographically, then kind) is the
/// canonical generator order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub tetra: [u32; 4],
    pub kind: GenKind,
}

impl Generator {
    pub fn a(tetra: [u32; 4]) -> Generator {
        Generator {
            tetra,
            kind: GenKind::A,
        }
    }

    pub fn b(tetra: [u32; 4]) -> Generator {
        Generator {
            tetra,
            kind: GenKind::B,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            GenKind::A => 'a',
            GenKind::B => 'b',
        };
        write!(f, "{letter}[")?;
        if self.tetra.iter().all(|v| *v < 10) {
            for v in self.tetra {
                write!(f, "{v}")?;
            }
        } else {
            let strings: Vec<String> = self.tetra.iter().map(u32::to_string).collect();
            write!(f, "{}", strings.join(","))?;
        }
        write!(f, "]")
    }
}

/// A square-free monomial: strictly increasing generators in canonical order.
///
/// The empty monomial is the algebra unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<Generator>);

impl Monomial {
    /// The empty monomial (the unit of the algebra).
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn from_generator(g: Generator) -> Monomial {
        Monomial(vec![g])
    }

    /// Builds a monomial from arbitrary-order factors; `None` when a
    /// generator repeats (the product is zero). The bool is true when sorting
    /// the factors into canonical order costs an odd number of swaps.
    pub fn from_factors(factors: &[Generator]) -> Option<(Monomial, bool)> {
        let mut m = Monomial::unit();
        let mut negate = false;
        for g in factors {
            let (next, flip) = merge(&m.0, std::slice::from_ref(g))?;
            m = Monomial(next);
            negate ^= flip;
        }
        Some((m, negate))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.0.binary_search(&g).is_ok()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(Generator::to_string).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// Merges two canonical generator runs, counting crossings; `None` on a
/// repeated generator.
fn merge(a: &[Generator], b: &[Generator]) -> Option<(Vec<Generator>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut crossings = 0usize;
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            // b[j] crosses every remaining factor of `a`.
            crossings += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, crossings % 2 == 1))
}

/// An element of the Grassmann algebra: a sparse scalar combination of
/// canonical monomials over one fixed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannElement {
    field: FieldTag,
    terms: BTreeMap<Monomial, FieldScalar>,
}

impl GrassmannElement {
    pub fn zero(field: FieldTag) -> GrassmannElement {
        GrassmannElement {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: FieldTag) -> GrassmannElement {
        GrassmannElement::from_scalar(field.one())
    }

    pub fn from_scalar(c: FieldScalar) -> GrassmannElement {
        let field = c.field_tag();
        let mut e = GrassmannElement::zero(field);
        e.add_term(Monomial::unit(), c);
        e
    }

    /// The element `c * g` for one generator.
    pub fn from_generator(c: FieldScalar, g: Generator) -> GrassmannElement {
        let field = c.field_tag();
        let mut e = GrassmannElement::zero(field);
        e.add_term(Monomial::from_generator(g), c);
        e
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldScalar)> {
        self.terms.iter()
    }

    /// The coefficient at a monomial (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> FieldScalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c * m` into the element, dropping the term if it cancels.
    fn add_term(&mut self, m: Monomial, c: FieldScalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(c.field_tag(), self.field);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn same_field(&self, other: &GrassmannElement) -> Result<(), GrassmannError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GrassmannError::MixedFields(self.field, other.field))
        }
    }

    /// Checked sum.
    pub fn gr_add(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.same_field(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Checked difference.
    pub fn gr_sub(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.gr_add(&other.scale(&other.field.integer(-1)))
    }

    /// Checked product in the given factor order.
    pub fn gr_mul(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.same_field(other)?;
        let mut out = GrassmannElement::zero(self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, negate)) = merge(&m1.0, &m2.0) {
                    let mut c = c1 * c2;
                    if negate {
                        c = c.neg();
                    }
                    out.add_term(Monomial(m), c);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: &FieldScalar) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.field);
        for (m, coeff) in &self.terms {
            out.add_term(m.clone(), coeff * c);
        }
        out
    }

    /// The set of degrees with at least one term.
    pub fn degrees(&self) -> std::collections::BTreeSet<usize> {
        self.terms.keys().map(Monomial::degree).collect()
    }

    /// The homogeneous component of one degree.
    pub fn graded_component(&self, degree: usize) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.field);
        for (m, c) in &self.terms {
            if m.degree() == degree {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// True when some monomial involves a generator of the given tetrahedron.
    pub fn mentions_tetrahedron(&self, t: [u32; 4]) -> bool {
        self.terms
            .keys()
            .any(|m| m.generators().iter().any(|g| g.tetra == t))
    }
}

impl fmt::Display for GrassmannElement {
    /// Deterministic rendering: terms sorted by degree, then by monomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, &FieldScalar)> = self.terms.iter().collect();
        ordered.sort_by_key(|(m, _)| (m.degree(), (*m).clone()));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c} {m}")?;
            }
        }
        Ok(())
    }
}

/// Left derivative with respect to one generator.
///
/// On a monomial containing `g` at (0-based) position `k` it removes `g` and
/// multiplies by `(-1)^k`; monomials without `g` are annihilated.
pub fn left_derivative(g: Generator, x: &GrassmannElement) -> GrassmannElement {
    let mut out = GrassmannElement::zero(x.field);
    for (m, c) in &x.terms {
        if let Ok(k) = m.0.binary_search(&g) {
            let mut rest = m.0.clone();
            rest.remove(k);
            let c = if k % 2 == 0 { c.clone() } else { c.neg() };
            out.add_term(Monomial(rest), c);
        }
    }
    out
}

/// Iterated Berezin integral.
///
/// A single integration step is the left derivative: `∫ x dθ =
/// left_derivative(θ, x)`. Multiple variables are integrated innermost first,
/// i.e. the first listed variable is applied first.
pub fn berezin_integrate(
    x: &GrassmannElement,
    vars: &[Generator],
) -> Result<GrassmannElement, GrassmannError> {
    for (i, g) in vars.iter().enumerate() {
        if vars[..i].contains(g) {
            return Err(GrassmannError::DuplicateVariable(*g));
        }
    }
    let mut acc = x.clone();
    for g in vars {
        acc = left_derivative(*g, &acc);
    }
    Ok(acc)
}

/// The Berezin integral of a product,
/// `∫ (f_1 ∧ f_2 ∧ ... ∧ f_m) dθ_1 ... dθ_n`.
///
/// Exactly equal to multiplying the factors left to right and calling
/// [`berezin_integrate`], but computed on bitmask monomials, integrating each
/// variable out as soon as no later factor mentions it. Falls back to the
/// plain pipeline when the factors span more than 64 generators.
pub fn product_integral(
    field: FieldTag,
    factors: &[GrassmannElement],
    vars: &[Generator],
) -> Result<GrassmannElement, GrassmannError> {
    for f in factors {
        if f.field != field {
            return Err(GrassmannError::MixedFields(field, f.field));
        }
    }
    for (i, g) in vars.iter().enumerate() {
        if vars[..i].contains(g) {
            return Err(GrassmannError::DuplicateVariable(*g));
        }
    }
    // The generator universe, in canonical order.
    let mut universe: std::collections::BTreeSet<Generator> = vars.iter().copied().collect();
    for f in factors {
        for m in f.terms.keys() {
            universe.extend(m.0.iter().copied());
        }
    }
    if universe.len() > 64 {
        let mut product = GrassmannElement::one(field);
        for f in factors {
            product = product.gr_mul(f)?;
        }
        return berezin_integrate(&product, vars);
    }
    let index: BTreeMap<Generator, u32> = universe
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, i as u32))
        .collect();
    let gens: Vec<Generator> = universe.into_iter().collect();
    let to_mask = |m: &Monomial| -> u64 { m.0.iter().map(|g| 1u64 << index[g]).sum() };
    // Crossings when appending the sorted run `m2` after `m1`.
    let merge_parity = |m1: u64, m2: u64| -> bool {
        let mut rest = m2;
        let mut parity = false;
        while rest != 0 {
            let b = rest.trailing_zeros();
            parity ^= ((m1 >> b >> 1).count_ones() & 1) == 1;
            rest &= rest - 1;
        }
        parity
    };
    // Integrate `θ` out after the last factor mentioning it.
    let mut last_mention: Vec<Option<usize>> = vars.iter().map(|_| None).collect();
    for (v, g) in vars.iter().enumerate() {
        for (k, f) in factors.iter().enumerate() {
            if f.terms.keys().any(|m| m.contains(*g)) {
                last_mention[v] = Some(k);
            }
        }
        if last_mention[v].is_none() {
            // No factor mentions the variable, so the derivative kills
            // everything.
            return Ok(GrassmannElement::zero(field));
        }
    }
    let mut acc: std::collections::HashMap<u64, FieldScalar> =
        std::collections::HashMap::from([(0u64, field.one())]);
    let mut applied: Vec<usize> = Vec::with_capacity(vars.len());
    for (k, f) in factors.iter().enumerate() {
        let terms: Vec<(u64, &FieldScalar)> =
            f.terms.iter().map(|(m, c)| (to_mask(m), c)).collect();
        let mut next: std::collections::HashMap<u64, FieldScalar> =
            std::collections::HashMap::with_capacity(acc.len());
        for (m1, c1) in &acc {
            for (m2, c2) in &terms {
                if m1 & m2 != 0 {
                    continue;
                }
                let mut c = c1 * c2;
                if merge_parity(*m1, *m2) {
                    c = c.neg();
                }
                match next.entry(m1 | m2) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() = e.get() + &c;
                    }
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
        for (v, g) in vars.iter().enumerate() {
            if last_mention[v] != Some(k) {
                continue;
            }
            let bit = 1u64 << index[g];
            let mut next: std::collections::HashMap<u64, FieldScalar> =
                std::collections::HashMap::with_capacity(acc.len());
            for (m, c) in &acc {
                if m & bit == 0 {
                    continue;
                }
                let below = m & (bit - 1);
                let c = if below.count_ones().is_multiple_of(2) {
                    c.clone()
                } else {
                    c.neg()
                };
                next.insert(m ^ bit, c);
            }
            acc = next;
            applied.push(v);
        }
    }
    debug_assert_eq!(applied.len(), vars.len());
    // Chronological application order `∂_{u_n} ... ∂_{u_1}` differs from the
    // requested `∂_{θ_n} ... ∂_{θ_1}` by the parity of the permutation.
    let mut inversions = 0usize;
    for i in 0..applied.len() {
        for j in i + 1..applied.len() {
            if applied[i] > applied[j] {
                inversions += 1;
            }
        }
    }
    let mut out = GrassmannElement::zero(field);
    for (m, c) in acc {
        let c = if inversions.is_multiple_of(2) { c } else { c.neg() };
        let mut run = Vec::with_capacity(m.count_ones() as usize);
        let mut rest = m;
        while rest != 0 {
            let b = rest.trailing_zeros();
            run.push(gens[b as usize]);
            rest &= rest - 1;
        }
        out.add_term(Monomial(run), c);
    }
    Ok(out)
}

/// A first-order differential operator `Σ c_θ ∂/∂θ` with each generator
/// appearing at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannOperator {
    field: FieldTag,
    /// Nonzero coefficients keyed by generator, in canonical generator order.
    terms: BTreeMap<Generator, FieldScalar>,
}

impl GrassmannOperator {
    /// Builds an operator, merging repeated generators and dropping zeros.
    pub fn new(field: FieldTag, terms: Vec<(FieldScalar, Generator)>) -> GrassmannOperator {
        let mut map: BTreeMap<Generator, FieldScalar> = BTreeMap::new();
        for (c, g) in terms {
            debug_assert_eq!(c.field_tag(), field);
            let next = match map.get(&g) {
                Some(prev) => prev + &c,
                None => c,
            };
            if next.is_zero() {
                map.remove(&g);
            } else {
                map.insert(g, next);
            }
        }
        GrassmannOperator { field, terms: map }
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient/generator pairs in canonical generator order.
    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &FieldScalar)> {
        self.terms.iter()
    }

    /// Applies the operator: `Σ c_θ ∂x/∂θ`.
    pub fn apply(&self, x: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        if self.field != x.field {
            return Err(GrassmannError::MixedFields(self.field, x.field));
        }
        let mut out = GrassmannElement::zero(self.field);
        for (g, c) in &self.terms {
            out = out.gr_add(&left_derivative(*g, x).scale(c))?;
        }
        Ok(out)
    }

    /// The canonical degree-1 solution `w` of `D(w) = 1`: take the first
    /// generator `θ` (in canonical order) with nonzero coefficient `c` and
    /// return `c⁻¹ θ`.
    pub fn solve_inverse_of_one(&self) -> Result<GrassmannElement, GrassmannError> {
        let (g, c) = self.terms.iter().next().ok_or(GrassmannError::ZeroOperator)?;
        Ok(GrassmannElement::from_generator(c.inv()?, *g))
    }

    /// Like [`solve_inverse_of_one`](Self::solve_inverse_of_one) but built on
    /// the last nonzero coefficient; an independent solution whenever the
    /// operator has at least two terms.
    pub fn solve_inverse_of_one_last(&self) -> Result<GrassmannElement, GrassmannError> {
        let (g, c) = self
            .terms
            .iter()
            .next_back()
            .ok_or(GrassmannError::ZeroOperator)?;
        Ok(GrassmannElement::from_generator(c.inv()?, *g))
    }
}

impl fmt::Display for GrassmannOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "d/d{g}")?;
            } else {
                write!(f, "{c} d/d{g}")?;
            }
        }
        Ok(())
    }
}
