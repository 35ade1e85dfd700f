//! Coordinate exterior calculus on the polynomial model of `R^n`.
//!
//! Forms and multivectors share one representation, [`Skew`], a map from
//! strictly increasing index tuples to polynomial coefficients. Index tuples
//! are stored as bitmasks ([`IndexSet`]), so `n` is limited to 32.
//!
//! Degrees outside `0..=n` never carry data: an operation whose result would
//! have such a degree returns the zero element with the degree clamped into
//! range. Addition accepts a zero summand of any degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{default_names, Poly, Rational};

pub const MAX_VARS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("operands live over different rings ({left} vs {right} variables)")]
    NvarsMismatch { left: usize, right: usize },
    #[error("degree mismatch ({left} vs {right})")]
    DegreeMismatch { left: usize, right: usize },
    #[error("module rank mismatch ({left} vs {right})")]
    RankMismatch { left: usize, right: usize },
    #[error("multivector of degree {expected} evaluated on {got} arguments")]
    Arity { expected: usize, got: usize },
    #[error("module element needs at least one component")]
    EmptyModuleElement,
}

/// A strictly increasing tuple of 0-based coordinate indices.
///
/// Ordered by length, then lexicographically on the tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Panics on repeated or out-of-range indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u32;
        for &i in indices {
            assert!(i < MAX_VARS, "index {i} exceeds supported dimension");
            assert!(bits & (1 << i) == 0, "repeated index {i}");
            bits |= 1 << i;
        }
        IndexSet(bits)
    }

    pub fn full(n: usize) -> Self {
        if n == MAX_VARS {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << n) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> IndexSet {
        IndexSet::full(n).difference(self)
    }

    pub fn with(self, i: usize) -> IndexSet {
        IndexSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> IndexSet {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Number of pairs `(i, j)` with `i` in `self`, `j` in `other`, `i > j`.
    fn inversions(self, other: IndexSet) -> u32 {
        self.iter()
            .map(|i| (other.0 & ((1u32 << i) - 1)).count_ones())
            .sum()
    }

    /// All `k`-subsets of `{0..n}` in lexicographic order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        fn go(start: usize, n: usize, k: usize, acc: u32, out: &mut Vec<IndexSet>) {
            if k == 0 {
                out.push(IndexSet(acc));
                return;
            }
            for i in start..n {
                if n - i < k {
                    break;
                }
                go(i + 1, n, k - 1, acc | (1 << i), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            go(0, n, k, 0, &mut out);
        }
        out
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & diff & diff.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sign of `e_I ∧ e_J` relative to `e_{I ∪ J}`, or `None` if they overlap.
pub fn wedge_sign(i: IndexSet, j: IndexSet) -> Option<bool> {
    if i.0 & j.0 != 0 {
        None
    } else {
        Some(i.inversions(j) % 2 == 1)
    }
}

/// Sign of the shuffle that moves the positions of `i` to the front of `j`
/// (requires `i ⊆ j`). `true` means negative.
pub fn contraction_sign(i: IndexSet, j: IndexSet) -> bool {
    debug_assert!(i.is_subset(j));
    i.inversions(j.difference(i)) % 2 == 1
}

pub trait Variance: Copy + Clone + fmt::Debug + PartialEq + Eq + std::hash::Hash + Send + Sync {
    /// Prefix used when rendering basis elements (`d` for `dx`, `D` for `Dx`).
    const PREFIX: &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Covariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Contravariant;

impl Variance for Covariant {
    const PREFIX: &'static str = "d";
}

impl Variance for Contravariant {
    const PREFIX: &'static str = "D";
}

/// Homogeneous element of the exterior algebra with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Skew<V: Variance> {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<IndexSet, Poly>,
    _variance: PhantomData<V>,
}

/// Differential form: `terms[I]` is the coefficient of `dx_I`.
pub type Form = Skew<Covariant>;
/// Multivector field: `terms[I]` is the coefficient of `∂_I`.
pub type MultiVector = Skew<Contravariant>;
/// A degree-1 multivector.
pub type VectorField = MultiVector;

impl<V: Variance> Skew<V> {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        Skew {
            nvars,
            degree: degree.min(nvars),
            terms: BTreeMap::new(),
            _variance: PhantomData,
        }
    }

    /// Degree-0 element with coefficient `f`.
    pub fn scalar(f: Poly) -> Self {
        Self::term(IndexSet::EMPTY, f)
    }

    /// Single term `f · e_I`. The ring is taken from `f`.
    pub fn term(set: IndexSet, f: Poly) -> Self {
        let nvars = f.nvars();
        assert!(
            set.is_subset(IndexSet::full(nvars)),
            "index set exceeds dimension"
        );
        let mut out = Self::zero(nvars, set.len());
        out.degree = set.len();
        if !f.is_zero() {
            out.terms.insert(set, f);
        }
        out
    }

    /// The basis element `e_I` with unit coefficient.
    pub fn basis(nvars: usize, indices: &[usize]) -> Self {
        Self::term(IndexSet::from_indices(indices), Poly::one(nvars))
    }

    /// Builds an element of the given degree; entries must all have
    /// `degree` indices.
    pub fn from_terms<I>(nvars: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (IndexSet, Poly)>,
    {
        let mut out = Self::zero(nvars, degree);
        out.degree = degree;
        for (set, f) in terms {
            assert_eq!(set.len(), degree, "index set of wrong length");
            assert_eq!(f.nvars(), nvars, "coefficient ring mismatch");
            out.add_to(set, &f);
        }
        out
    }

    /// Vector field `Σ components[i] ∂_i` or 1-form `Σ components[i] dx_i`.
    pub fn from_components(components: Vec<Poly>) -> Self {
        let nvars = components.len();
        Self::from_terms(
            nvars,
            1,
            components
                .into_iter()
                .enumerate()
                .map(|(i, f)| (IndexSet::from_indices(&[i]), f)),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn component(&self, set: IndexSet) -> Poly {
        self.terms
            .get(&set)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// Coefficients `[c_0, ..., c_{n-1}]` of a degree-1 element.
    pub fn components(&self) -> Vec<Poly> {
        (0..self.nvars)
            .map(|i| self.component(IndexSet::from_indices(&[i])))
            .collect()
    }

    fn add_to(&mut self, set: IndexSet, f: &Poly) {
        if f.is_zero() {
            return;
        }
        match self.terms.get_mut(&set) {
            Some(c) => {
                *c += f;
                if c.is_zero() {
                    self.terms.remove(&set);
                }
            }
            None => {
                self.terms.insert(set, f.clone());
            }
        }
    }

    fn sub_from(&mut self, set: IndexSet, f: &Poly) {
        self.add_to(set, &-f);
    }

    fn compatible(&self, other: &Self) -> Result<(), CalculusError> {
        if self.nvars != other.nvars {
            return Err(CalculusError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(CalculusError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CalculusError> {
        self.compatible(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (s, f) in &other.terms {
            out.add_to(*s, f);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CalculusError> {
        self.compatible(other)?;
        if self.is_zero() {
            return Ok(-other);
        }
        let mut out = self.clone();
        for (s, f) in &other.terms {
            out.sub_from(*s, f);
        }
        Ok(out)
    }

    /// Multiplication by a function.
    pub fn mul_poly(&self, f: &Poly) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        out.degree = self.degree;
        for (s, c) in &self.terms {
            out.add_to(*s, &(c * f));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        out.degree = self.degree;
        if c.is_zero() {
            return out;
        }
        for (s, f) in &self.terms {
            out.terms.insert(*s, f.scale(c));
        }
        out
    }

    /// Exterior product. A result of degree above `n` is the zero element.
    pub fn wedge(&self, other: &Self) -> Result<Self, CalculusError> {
        if self.nvars != other.nvars {
            return Err(CalculusError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.nvars, degree);
        if degree > self.nvars {
            return Ok(out);
        }
        out.degree = degree;
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                if let Some(negative) = wedge_sign(*i, *j) {
                    let prod = a * b;
                    if negative {
                        out.sub_from(i.union(*j), &prod);
                    } else {
                        out.add_to(i.union(*j), &prod);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Resets the degree of a zero element; nonzero elements must already
    /// have `degree`.
    pub fn redegree(mut self, degree: usize) -> Self {
        assert!(
            self.is_zero() || self.degree == degree,
            "cannot change the degree of a nonzero element"
        );
        self.degree = degree.min(self.nvars);
        self
    }

    /// Applies `f` to every coefficient, keeping the basis.
    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        out.degree = self.degree;
        for (s, c) in &self.terms {
            out.add_to(*s, &f(c));
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> SkewDisplay<'a, V> {
        SkewDisplay { elem: self, names }
    }
}

impl<V: Variance> std::ops::Neg for &Skew<V> {
    type Output = Skew<V>;
    fn neg(self) -> Skew<V> {
        self.map_coefficients(|c| -c)
    }
}

impl<V: Variance> std::ops::Add for &Skew<V> {
    type Output = Skew<V>;
    fn add(self, rhs: &Skew<V>) -> Skew<V> {
        self.checked_add(rhs).expect("incompatible skew elements")
    }
}

impl<V: Variance> std::ops::Sub for &Skew<V> {
    type Output = Skew<V>;
    fn sub(self, rhs: &Skew<V>) -> Skew<V> {
        self.checked_sub(rhs).expect("incompatible skew elements")
    }
}

pub struct SkewDisplay<'a, V: Variance> {
    elem: &'a Skew<V>,
    names: &'a [String],
}

impl<V: Variance> fmt::Display for SkewDisplay<'_, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        for (n, (set, c)) in self.elem.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c.display(self.names))?;
            if !set.is_empty() {
                let basis: Vec<String> = set
                    .iter()
                    .map(|i| format!("{}{}", V::PREFIX, self.names[i]))
                    .collect();
                write!(f, " * {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

impl<V: Variance> fmt::Display for Skew<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display(&names))
    }
}

impl Form {
    /// `u · dx_1 ∧ ... ∧ dx_n`.
    pub fn top(nvars: usize, u: Rational) -> Form {
        Form::term(IndexSet::full(nvars), Poly::constant(nvars, u))
    }

    /// The differential of a function.
    pub fn differential(f: &Poly) -> Form {
        exterior_derivative(&Form::scalar(f.clone()))
    }
}

/// Exterior derivative. On top-degree forms returns the zero form of degree `n`.
pub fn exterior_derivative(form: &Form) -> Form {
    let n = form.nvars;
    let mut out = Form::zero(n, form.degree + 1);
    if form.degree >= n {
        return out;
    }
    for (set, c) in &form.terms {
        for i in 0..n {
            if set.contains(i) {
                continue;
            }
            let di = c.d(i);
            if di.is_zero() {
                continue;
            }
            let below = (set.0 & ((1u32 << i) - 1)).count_ones();
            if below % 2 == 0 {
                out.add_to(set.with(i), &di);
            } else {
                out.sub_from(set.with(i), &di);
            }
        }
    }
    out
}

/// Interior product `ι_X ω`, with `X` consuming the leading slots of `ω`.
///
/// When `deg ω < deg X` the result is the zero form of degree 0.
pub fn interior_product(x: &MultiVector, omega: &Form) -> Result<Form, CalculusError> {
    if x.nvars != omega.nvars {
        return Err(CalculusError::NvarsMismatch {
            left: x.nvars,
            right: omega.nvars,
        });
    }
    if omega.degree < x.degree {
        return Ok(Form::zero(omega.nvars, 0));
    }
    let mut out = Form::zero(omega.nvars, omega.degree - x.degree);
    out.degree = omega.degree - x.degree;
    for (i, a) in &x.terms {
        for (j, b) in &omega.terms {
            if !i.is_subset(*j) {
                continue;
            }
            let prod = a * b;
            if contraction_sign(*i, *j) {
                out.sub_from(j.difference(*i), &prod);
            } else {
                out.add_to(j.difference(*i), &prod);
            }
        }
    }
    Ok(out)
}

/// Lie derivative of a form along a vector field, `ι_X d + d ι_X`.
pub fn lie_derivative(x: &VectorField, omega: &Form) -> Result<Form, CalculusError> {
    assert_eq!(x.degree(), 1, "Lie derivative needs a vector field");
    let a = interior_product(x, &exterior_derivative(omega))?;
    let b = exterior_derivative(&interior_product(x, omega)?);
    Ok(a.checked_add(&b)?.redegree(omega.degree()))
}

/// The pairing `X(df_1, ..., df_k)`.
pub fn evaluate(x: &MultiVector, args: &[Poly]) -> Result<Poly, CalculusError> {
    if args.len() != x.degree {
        return Err(CalculusError::Arity {
            expected: x.degree,
            got: args.len(),
        });
    }
    if let Some(bad) = args.iter().find(|a| a.nvars() != x.nvars) {
        return Err(CalculusError::NvarsMismatch {
            left: x.nvars,
            right: bad.nvars(),
        });
    }
    let mut total = Poly::zero(x.nvars);
    if x.is_zero() {
        return Ok(total);
    }
    // partials[v][b] = ∂_v args[b]
    let partials: Vec<Vec<Poly>> = (0..x.nvars)
        .map(|v| args.iter().map(|a| a.d(v)).collect())
        .collect();
    for (set, coeff) in &x.terms {
        let rows: Vec<&Vec<Poly>> = set.iter().map(|v| &partials[v]).collect();
        let det = determinant(&rows, x.nvars);
        if !det.is_zero() {
            total += &(coeff * &det);
        }
    }
    Ok(total)
}

fn determinant(rows: &[&Vec<Poly>], nvars: usize) -> Poly {
    fn expand(rows: &[&Vec<Poly>], used: &mut Vec<bool>, row: usize, nvars: usize) -> Poly {
        if row == rows.len() {
            return Poly::one(nvars);
        }
        let mut acc = Poly::zero(nvars);
        let mut sign_neg = false;
        for col in 0..rows.len() {
            if used[col] {
                continue;
            }
            let entry = &rows[row][col];
            if !entry.is_zero() {
                used[col] = true;
                let minor = expand(rows, used, row + 1, nvars);
                used[col] = false;
                let term = entry * &minor;
                if sign_neg {
                    acc -= &term;
                } else {
                    acc += &term;
                }
            }
            sign_neg = !sign_neg;
        }
        acc
    }
    let mut used = vec![false; rows.len()];
    expand(rows, &mut used, 0, nvars)
}

/// An element of a free rank-`r` module tensored with forms or multivectors:
/// component `a` is the coefficient of the basis section `e_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleElement<V: Variance> {
    components: Vec<Skew<V>>,
}

/// Element of `W ⊗ Ω^q`.
pub type ModuleChainElement = ModuleElement<Covariant>;
/// Element of `X^k(W) ≅ W ⊗ X^k`.
pub type ModuleCochainElement = ModuleElement<Contravariant>;

impl<V: Variance> ModuleElement<V> {
    pub fn zero(rank: usize, nvars: usize, degree: usize) -> Self {
        assert!(rank >= 1, "module rank must be positive");
        ModuleElement {
            components: vec![Skew::zero(nvars, degree); rank],
        }
    }

    /// Components must share `n`; their degrees must agree up to zero
    /// components, which are re-degreed to the common degree.
    pub fn from_components(components: Vec<Skew<V>>) -> Result<Self, CalculusError> {
        let first = components.first().ok_or(CalculusError::EmptyModuleElement)?;
        let nvars = first.nvars;
        let degree = components
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.degree)
            .unwrap_or(first.degree);
        let mut out = Vec::with_capacity(components.len());
        for c in components {
            if c.nvars != nvars {
                return Err(CalculusError::NvarsMismatch {
                    left: nvars,
                    right: c.nvars,
                });
            }
            if c.is_zero() {
                out.push(Skew::zero(nvars, degree));
            } else if c.degree != degree {
                return Err(CalculusError::DegreeMismatch {
                    left: degree,
                    right: c.degree,
                });
            } else {
                out.push(c);
            }
        }
        Ok(ModuleElement { components: out })
    }

    /// `s · e_section` in a module of the given rank.
    pub fn single(rank: usize, section: usize, s: Skew<V>) -> Self {
        let mut out = Self::zero(rank, s.nvars, s.degree);
        out.components[section] = s;
        out
    }

    /// Degree-0 element `Σ g_a e_a`.
    pub fn from_functions(values: Vec<Poly>) -> Result<Self, CalculusError> {
        Self::from_components(values.into_iter().map(Skew::scalar).collect())
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars
    }

    pub fn degree(&self) -> usize {
        self.components[0].degree
    }

    pub fn components(&self) -> &[Skew<V>] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Skew<V> {
        &self.components[a]
    }

    pub fn into_components(self) -> Vec<Skew<V>> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Skew::is_zero)
    }

    pub fn redegree(self, degree: usize) -> Self {
        ModuleElement {
            components: self
                .components
                .into_iter()
                .map(|c| c.redegree(degree))
                .collect(),
        }
    }

    /// Coefficient functions of a degree-0 element.
    pub fn functions(&self) -> Vec<Poly> {
        self.components
            .iter()
            .map(|c| c.component(IndexSet::EMPTY))
            .collect()
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Skew<V>, &Skew<V>) -> Result<Skew<V>, CalculusError>,
    ) -> Result<Self, CalculusError> {
        if self.rank() != other.rank() {
            return Err(CalculusError::RankMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_components(comps)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CalculusError> {
        self.zip_with(other, Skew::checked_add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CalculusError> {
        self.zip_with(other, Skew::checked_sub)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn mul_poly(&self, f: &Poly) -> Self {
        self.map(|s| s.mul_poly(f))
    }

    /// Applies `f` to every component (all results must share a degree).
    pub fn map(&self, f: impl Fn(&Skew<V>) -> Skew<V>) -> Self {
        Self::from_components(self.components.iter().map(f).collect())
            .expect("componentwise map produced inconsistent degrees")
    }

    pub fn try_map(
        &self,
        f: impl Fn(&Skew<V>) -> Result<Skew<V>, CalculusError>,
    ) -> Result<Self, CalculusError> {
        Self::from_components(
            self.components
                .iter()
                .map(f)
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    /// Componentwise map into the other variance; `f` must produce a common degree.
    pub fn map_to<U: Variance>(&self, f: impl Fn(&Skew<V>) -> Skew<U>) -> ModuleElement<U> {
        ModuleElement {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ModuleDisplay<'a, V> {
        ModuleDisplay { elem: self, names }
    }
}

impl<V: Variance> std::ops::Neg for &ModuleElement<V> {
    type Output = ModuleElement<V>;
    fn neg(self) -> ModuleElement<V> {
        self.map(|s| -s)
    }
}

impl<V: Variance> std::ops::Add for &ModuleElement<V> {
    type Output = ModuleElement<V>;
    fn add(self, rhs: &ModuleElement<V>) -> ModuleElement<V> {
        self.checked_add(rhs).expect("incompatible module elements")
    }
}

impl<V: Variance> std::ops::Sub for &ModuleElement<V> {
    type Output = ModuleElement<V>;
    fn sub(self, rhs: &ModuleElement<V>) -> ModuleElement<V> {
        self.checked_sub(rhs).expect("incompatible module elements")
    }
}

pub struct ModuleDisplay<'a, V: Variance> {
    elem: &'a ModuleElement<V>,
    names: &'a [String],
}

impl<V: Variance> fmt::Display for ModuleDisplay<'_, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .elem
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("[{}] (x) e{}", c.display(self.names), a + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ι_X ω` for a module-valued multiderivation `X`, giving an element of
/// `W ⊗ Ω^{q-k}`.
pub fn module_interior_product(
    x: &ModuleCochainElement,
    omega: &Form,
) -> Result<ModuleChainElement, CalculusError> {
    ModuleChainElement::from_components(
        x.components()
            .iter()
            .map(|xa| interior_product(xa, omega))
            .collect::<Result<Vec<_>, _>>()?,
    )
}

/// `(id_W ⊗ ι_Y)` applied to an element of `W ⊗ Ω^q`.
pub fn interior_on_module(
    y: &MultiVector,
    element: &ModuleChainElement,
) -> Result<ModuleChainElement, CalculusError> {
    element.try_map(|c| interior_product(y, c))
}

/// `X(f_1, ..., f_k)` for module-valued `X`, as the coefficient vector in `W`.
pub fn evaluate_module(x: &ModuleCochainElement, args: &[Poly]) -> Result<Vec<Poly>, CalculusError> {
    x.components().iter().map(|xa| evaluate(xa, args)).collect()
}
