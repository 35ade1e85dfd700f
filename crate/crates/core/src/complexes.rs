//! The chain complex `W ⊗ Ω^•` with differential `∂^W`, the cochain complex
//! `X^•(W)` with differential `δ_W`, the contraction isomorphisms between
//! them, and finite weight slices of both complexes as rational matrices.
//!
//! Weights: `x_i` and `dx_i` have weight 1, `∂_i` has weight -1. When `π` is
//! homogeneous of degree `d` and every bracket matrix entry has degree
//! `d - 1`, both differentials shift weight by `d - 2`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::{
    evaluate_module, interior_product, CalculusError, Form, IndexSet, ModuleChainElement,
    ModuleCochainElement, MultiVector, Skew, Variance, VectorField,
};
use crate::linalg::RationalMatrix;
use crate::pmodule::{ModuleError, PoissonModule};
use crate::poisson::{koszul_of, PoissonError, PoissonStructure, VolumeForm};
use crate::poly::{monomials_of_degree, Monomial, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("element does not fit the module: {0}")]
    Shape(String),
    #[error("degree {degree} out of range for {nvars} variables")]
    DegreeOutOfRange { degree: usize, nvars: usize },
    #[error("not in graded mode: {0}")]
    NotGraded(String),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Chain,
    Cochain,
}

fn check_inputs(p: &PoissonStructure, w: &PoissonModule) -> Result<(), ComplexError> {
    p.require_verified()?;
    w.require_verified()?;
    if p.nvars() != w.nvars() {
        return Err(ComplexError::Shape(format!(
            "structure has {} variables, module has {}",
            p.nvars(),
            w.nvars()
        )));
    }
    Ok(())
}

fn check_element<V: Variance>(w: &PoissonModule, x: &crate::calculus::ModuleElement<V>) -> Result<(), ComplexError> {
    if x.rank() != w.rank() || x.nvars() != w.nvars() {
        return Err(ComplexError::Shape(format!(
            "expected rank {} over {} variables, got rank {} over {}",
            w.rank(),
            w.nvars(),
            x.rank(),
            x.nvars()
        )));
    }
    Ok(())
}

/// Differentials with the section Hamiltonians `{e_a, -}_W` precomputed.
struct Differentials<'a> {
    p: &'a PoissonStructure,
    w: &'a PoissonModule,
    fields: Vec<Vec<VectorField>>,
}

impl<'a> Differentials<'a> {
    fn new(p: &'a PoissonStructure, w: &'a PoissonModule) -> Self {
        let fields = (0..w.rank()).map(|a| w.hamiltonian_of_section(a)).collect();
        Differentials { p, w, fields }
    }

    fn chain(&self, x: &ModuleChainElement) -> Result<ModuleChainElement, CalculusError> {
        let (rank, n) = (x.rank(), x.nvars());
        if x.degree() == 0 {
            return Ok(ModuleChainElement::zero(rank, n, 0));
        }
        let mut out = x
            .components()
            .iter()
            .map(|om| koszul_of(self.p.pi(), om))
            .collect::<Result<Vec<Form>, _>>()?;
        for (a, om) in x.components().iter().enumerate() {
            if om.is_zero() {
                continue;
            }
            for (b, xb) in self.fields[a].iter().enumerate() {
                if !xb.is_zero() {
                    out[b] = out[b].checked_add(&interior_product(xb, om)?)?;
                }
            }
        }
        ModuleChainElement::from_components(out)
    }

    fn cochain(&self, x: &ModuleCochainElement) -> Result<ModuleCochainElement, CalculusError> {
        let (rank, n, r) = (x.rank(), x.nvars(), x.degree());
        if r >= n {
            return Ok(ModuleCochainElement::zero(rank, n, n));
        }
        let coord = |i: usize| Poly::var(n, i);
        let mut comps: Vec<Vec<(IndexSet, Poly)>> = vec![Vec::new(); rank];
        for set in IndexSet::subsets(n, r + 1) {
            let idx = set.indices();
            let mut value = vec![Poly::zero(n); rank];
            for s in 0..=r {
                let args: Vec<Poly> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != s)
                    .map(|(_, &i)| coord(i))
                    .collect();
                let inner = evaluate_module(x, &args)?;
                if inner.iter().all(Poly::is_zero) {
                    continue;
                }
                let term = self.w.bracket_functions(self.p, &inner, &coord(idx[s]));
                // Argument position s + 1 carries the sign (-1)^(s+1).
                accumulate(&mut value, &term, s % 2 == 0);
            }
            for s in 0..=r {
                for t in (s + 1)..=r {
                    let bracket = self.p.entry(idx[s], idx[t]);
                    if bracket.is_zero() {
                        continue;
                    }
                    let mut args = vec![bracket];
                    args.extend(
                        idx.iter()
                            .enumerate()
                            .filter(|&(u, _)| u != s && u != t)
                            .map(|(_, &i)| coord(i)),
                    );
                    let term = evaluate_module(x, &args)?;
                    accumulate(&mut value, &term, (s + t) % 2 == 1);
                }
            }
            for (a, v) in value.into_iter().enumerate() {
                if !v.is_zero() {
                    comps[a].push((set, v));
                }
            }
        }
        ModuleCochainElement::from_components(
            comps
                .into_iter()
                .map(|terms| MultiVector::from_terms(n, r + 1, terms))
                .collect(),
        )
    }
}

fn accumulate(acc: &mut [Poly], term: &[Poly], negative: bool) {
    for (a, t) in acc.iter_mut().zip(term) {
        if negative {
            *a -= t;
        } else {
            *a += t;
        }
    }
}

/// `∂^W` on `W ⊗ Ω^r`, lowering the degree by one (degree 0 maps to zero).
pub fn chain_differential(
    p: &PoissonStructure,
    w: &PoissonModule,
    x: &ModuleChainElement,
) -> Result<ModuleChainElement, ComplexError> {
    check_inputs(p, w)?;
    check_element(w, x)?;
    Ok(Differentials::new(p, w).chain(x)?)
}

/// `δ_W` on `X^r(W)`. Degree `n` maps to the zero element of degree `n`.
pub fn cochain_differential(
    p: &PoissonStructure,
    w: &PoissonModule,
    x: &ModuleCochainElement,
) -> Result<ModuleCochainElement, ComplexError> {
    check_inputs(p, w)?;
    check_element(w, x)?;
    Ok(Differentials::new(p, w).cochain(x)?)
}

fn check_star_degree(degree: usize, nvars: usize) -> Result<(), ComplexError> {
    if degree > nvars {
        Err(ComplexError::DegreeOutOfRange { degree, nvars })
    } else {
        Ok(())
    }
}

/// Componentwise `X ↦ ι_X μ`, from `X^k(W)` to `W ⊗ Ω^{n-k}`.
pub fn star(mu: &VolumeForm, x: &ModuleCochainElement) -> Result<ModuleChainElement, ComplexError> {
    check_star_degree(x.degree(), x.nvars())?;
    let n = x.nvars();
    let out = x.map_to(|c| mu.contract(c).redegree(n - x.degree()));
    Ok(out)
}

/// Inverse of [`star`].
pub fn star_inverse(mu: &VolumeForm, omega: &ModuleChainElement) -> Result<ModuleCochainElement, ComplexError> {
    check_star_degree(omega.degree(), omega.nvars())?;
    let n = omega.nvars();
    Ok(omega.map_to(|c| mu.uncontract(c).redegree(n - omega.degree())))
}

/// `(-1)^{k(k+1)/2}` as a boolean "negative".
pub fn blacktriangle_sign(k: usize) -> bool {
    matches!(k % 4, 1 | 2)
}

/// `▲^k = (-1)^{k(k+1)/2} ⋆^k`.
pub fn blacktriangle(mu: &VolumeForm, x: &ModuleCochainElement) -> Result<ModuleChainElement, ComplexError> {
    let s = star(mu, x)?;
    Ok(if blacktriangle_sign(x.degree()) { -&s } else { s })
}

/// Inverse of [`blacktriangle`].
pub fn blacktriangle_inverse(mu: &VolumeForm, omega: &ModuleChainElement) -> Result<ModuleCochainElement, ComplexError> {
    let x = star_inverse(mu, omega)?;
    Ok(if blacktriangle_sign(x.degree()) { -&x } else { x })
}

/// Weight shift of both differentials in graded mode.
pub fn grading_shift(p: &PoissonStructure, w: &PoissonModule) -> Result<i64, ComplexError> {
    let pi_deg = p
        .homogeneous_degree()
        .map_err(|_| ComplexError::NotGraded("Poisson bivector is not homogeneous".into()))?;
    let b_deg = w
        .homogeneous_degree()
        .map_err(|_| ComplexError::NotGraded("bracket matrices are not homogeneous".into()))?;
    match (pi_deg, b_deg) {
        (None, None) => Ok(0),
        (None, Some(e)) => Ok(e as i64 - 1),
        (Some(d), None) => Ok(d as i64 - 2),
        (Some(d), Some(e)) if e + 1 == d => Ok(d as i64 - 2),
        (Some(d), Some(e)) => Err(ComplexError::NotGraded(format!(
            "bracket entries have degree {e}, expected {}",
            d as i64 - 1
        ))),
    }
}

/// One basis element `x^α ∂_I ⊗ e_a` (cochains) or `x^α dx_I ⊗ e_a` (chains).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisElement {
    pub section: usize,
    pub indices: IndexSet,
    pub monomial: Monomial,
}

impl BasisElement {
    fn skew<V: Variance>(&self, rank: usize, nvars: usize) -> crate::calculus::ModuleElement<V> {
        let coeff = Poly::monomial(nvars, self.monomial.clone(), Rational::from_integer(1.into()));
        crate::calculus::ModuleElement::single(rank, self.section, Skew::term(self.indices, coeff))
    }

    pub fn to_cochain(&self, rank: usize, nvars: usize) -> ModuleCochainElement {
        self.skew(rank, nvars)
    }

    pub fn to_chain(&self, rank: usize, nvars: usize) -> ModuleChainElement {
        self.skew(rank, nvars)
    }

    pub fn label(&self, kind: ComplexKind, names: &[String]) -> String {
        let n = names.len();
        let mono = Poly::monomial(n, self.monomial.clone(), Rational::from_integer(1.into()));
        let prefix = match kind {
            ComplexKind::Chain => "d",
            ComplexKind::Cochain => "D",
        };
        let mut out = format!("e{} {}", self.section + 1, mono.display(names));
        if !self.indices.is_empty() {
            let parts: Vec<String> = self.indices.iter().map(|i| format!("{prefix}{}", names[i])).collect();
            out.push(' ');
            out.push_str(&parts.join("^"));
        }
        out
    }
}

/// Weight of `x^α ∂_I` or `x^α dx_I` with `|α| = p`, `|I| = degree`.
pub fn basis_weight(kind: ComplexKind, degree: usize, poly_degree: u32) -> i64 {
    match kind {
        ComplexKind::Cochain => poly_degree as i64 - degree as i64,
        ComplexKind::Chain => poly_degree as i64 + degree as i64,
    }
}

/// Coefficient degree carried by basis elements of the given degree and weight.
pub fn coefficient_degree(kind: ComplexKind, degree: usize, weight: i64) -> Option<u32> {
    let p = match kind {
        ComplexKind::Cochain => weight + degree as i64,
        ComplexKind::Chain => weight - degree as i64,
    };
    u32::try_from(p).ok()
}

/// Ordered basis of the `(degree, weight)` slice: by section, then index set,
/// then monomial in descending graded-lex order.
pub fn slice_basis(kind: ComplexKind, rank: usize, nvars: usize, degree: usize, weight: i64) -> Vec<BasisElement> {
    if degree > nvars {
        return Vec::new();
    }
    let Some(p) = coefficient_degree(kind, degree, weight) else {
        return Vec::new();
    };
    let sets = IndexSet::subsets(nvars, degree);
    let monos = monomials_of_degree(nvars, p);
    let mut out = Vec::with_capacity(rank * sets.len() * monos.len());
    for section in 0..rank {
        for &indices in &sets {
            for m in &monos {
                out.push(BasisElement {
                    section,
                    indices,
                    monomial: m.clone(),
                });
            }
        }
    }
    out
}

/// Matrix of a differential restricted to one weight slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSlice {
    pub kind: ComplexKind,
    pub nvars: usize,
    pub degree: usize,
    pub weight: i64,
    pub codomain_weight: i64,
    pub domain_basis: Vec<BasisElement>,
    pub codomain_basis: Vec<BasisElement>,
    /// Codomain rows by domain columns.
    pub matrix: RationalMatrix,
}

impl ComplexSlice {
    pub fn codomain_degree(&self) -> Option<usize> {
        match self.kind {
            ComplexKind::Cochain => (self.degree < self.nvars).then_some(self.degree + 1),
            ComplexKind::Chain => self.degree.checked_sub(1),
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// The same slice with bases listed in the given orders.
    pub fn permuted(&self, domain_order: &[usize], codomain_order: &[usize]) -> Self {
        ComplexSlice {
            domain_basis: domain_order.iter().map(|&i| self.domain_basis[i].clone()).collect(),
            codomain_basis: codomain_order.iter().map(|&i| self.codomain_basis[i].clone()).collect(),
            matrix: self.matrix.permuted(codomain_order, domain_order),
            ..self.clone()
        }
    }

    /// Basis listings followed by the dense matrix.
    pub fn to_text(&self, names: &[String]) -> String {
        let kind = match self.kind {
            ComplexKind::Chain => "chain",
            ComplexKind::Cochain => "cochain",
        };
        let mut out = format!(
            "{kind} degree {} weight {} -> weight {}\n",
            self.degree, self.weight, self.codomain_weight
        );
        out.push_str(&format!("domain {}\n", self.domain_basis.len()));
        for b in &self.domain_basis {
            out.push_str(&format!("  {}\n", b.label(self.kind, names)));
        }
        out.push_str(&format!("codomain {}\n", self.codomain_basis.len()));
        for b in &self.codomain_basis {
            out.push_str(&format!("  {}\n", b.label(self.kind, names)));
        }
        out.push_str(&format!("matrix {}x{}\n", self.matrix.rows(), self.matrix.cols()));
        out.push_str(&self.matrix.to_string());
        out
    }
}

fn expand<V: Variance>(x: &crate::calculus::ModuleElement<V>) -> Vec<(BasisElement, Rational)> {
    let mut out = Vec::new();
    for (section, comp) in x.components().iter().enumerate() {
        for (&indices, coeff) in comp.terms() {
            for (m, c) in coeff.terms() {
                out.push((
                    BasisElement {
                        section,
                        indices,
                        monomial: m.clone(),
                    },
                    c.clone(),
                ));
            }
        }
    }
    out
}

/// Assembles the slice of `∂^W` (chains) or `δ_W` (cochains) leaving
/// `(degree, weight)`. Requires graded mode.
pub fn assemble_slice(
    p: &PoissonStructure,
    w: &PoissonModule,
    kind: ComplexKind,
    degree: usize,
    weight: i64,
) -> Result<ComplexSlice, ComplexError> {
    check_inputs(p, w)?;
    let n = p.nvars();
    check_star_degree(degree, n)?;
    let shift = grading_shift(p, w)?;
    let rank = w.rank();
    let mut slice = ComplexSlice {
        kind,
        nvars: n,
        degree,
        weight,
        codomain_weight: weight + shift,
        domain_basis: slice_basis(kind, rank, n, degree, weight),
        codomain_basis: Vec::new(),
        matrix: RationalMatrix::zeros(0, 0),
    };
    if let Some(cd) = slice.codomain_degree() {
        slice.codomain_basis = slice_basis(kind, rank, n, cd, weight + shift);
    }
    let rows: BTreeMap<&BasisElement, usize> =
        slice.codomain_basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let ops = Differentials::new(p, w);
    let columns = if rows.is_empty() {
        Vec::new()
    } else {
        slice
            .domain_basis
            .par_iter()
            .map(|b| -> Result<_, CalculusError> {
                Ok(match kind {
                    ComplexKind::Chain => expand(&ops.chain(&b.to_chain(rank, n))?),
                    ComplexKind::Cochain => expand(&ops.cochain(&b.to_cochain(rank, n))?),
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut matrix = RationalMatrix::zeros(slice.codomain_basis.len(), slice.domain_basis.len());
    for (col, image) in columns.into_iter().enumerate() {
        for (b, c) in image {
            let row = *rows
                .get(&b)
                .unwrap_or_else(|| panic!("differential image left the weight slice"));
            matrix.set(row, col, c);
        }
    }
    slice.matrix = matrix;
    Ok(slice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{exterior_derivative, module_interior_product};
    use crate::poly::rat;

    fn p2(text: &str) -> Poly {
        Poly::parse_with(text, &["x", "y"]).unwrap()
    }

    fn planar(coeff: &str) -> PoissonStructure {
        PoissonStructure::from_entries(2, [(0, 1, p2(coeff))]).unwrap()
    }

    fn chain1(f: Form) -> ModuleChainElement {
        ModuleChainElement::single(1, 0, f)
    }

    fn cochain1(x: MultiVector) -> ModuleCochainElement {
        ModuleCochainElement::single(1, 0, x)
    }

    #[test]
    fn chain_examples() {
        let s = planar("1");
        let w = PoissonModule::trivial(1, 2);
        let x = chain1(Form::from_components(vec![p2("y^2"), p2("0")]));
        let out = chain_differential(&s, &w, &x).unwrap();
        assert_eq!(out, chain1(Form::scalar(p2("-2*y"))));
        let x = chain1(Form::term(IndexSet::full(2), p2("x")));
        let out = chain_differential(&s, &w, &x).unwrap();
        assert_eq!(out, chain1(Form::from_components(vec![p2("-1"), p2("0")])));

        let flat = PoissonModule::unverified(1, 2, vec![vec![vec![p2("y")]], vec![vec![p2("0")]]])
            .unwrap()
            .verify(&s)
            .unwrap();
        let c_df = Form::differential(&p2("5")).mul_poly(&p2("3"));
        assert!(chain_differential(&s, &flat, &chain1(c_df)).unwrap().is_zero());
        let x = chain1(Form::from_components(vec![p2("3"), p2("-2")]));
        assert!(chain_differential(&s, &w, &x).unwrap().is_zero());
        assert!(chain_differential(&s, &flat, &chain1(Form::scalar(p2("x")))).unwrap().is_zero());
    }

    #[test]
    fn cochain_examples() {
        let s = planar("1");
        let w = PoissonModule::trivial(1, 2);
        let out = cochain_differential(&s, &w, &cochain1(MultiVector::scalar(p2("x")))).unwrap();
        assert_eq!(out, cochain1(MultiVector::from_components(vec![p2("0"), p2("-1")])));
        let dx = cochain1(MultiVector::basis(2, &[0]));
        assert!(cochain_differential(&s, &w, &dx).unwrap().is_zero());

        let zero = PoissonStructure::zero(2);
        let x = cochain1(MultiVector::from_components(vec![p2("x^2*y"), p2("y + 1")]));
        assert!(cochain_differential(&zero, &w, &x).unwrap().is_zero());
    }

    #[test]
    fn unverified_inputs_rejected() {
        let s = planar("1");
        let w = PoissonModule::unverified(1, 2, vec![vec![vec![p2("x")]], vec![vec![p2("0")]]]).unwrap();
        let x = chain1(Form::scalar(p2("x")));
        assert!(matches!(
            chain_differential(&s, &w, &x),
            Err(ComplexError::Module(ModuleError::Unverified))
        ));
        let bad = PoissonStructure::unverified(MultiVector::basis(2, &[0, 1]));
        assert!(matches!(
            chain_differential(&bad, &PoissonModule::trivial(1, 2), &x),
            Err(ComplexError::Poisson(PoissonError::Unverified))
        ));
        let wrong_rank = ModuleChainElement::zero(2, 2, 1);
        assert!(matches!(
            chain_differential(&s, &PoissonModule::trivial(1, 2), &wrong_rank),
            Err(ComplexError::Shape(_))
        ));
    }

    #[test]
    fn star_examples() {
        let mu = VolumeForm::standard();
        let d_x = cochain1(MultiVector::basis(2, &[0]));
        assert_eq!(star(&mu, &d_x).unwrap(), chain1(Form::basis(2, &[1])));
        assert_eq!(blacktriangle(&mu, &d_x).unwrap(), chain1(-&Form::basis(2, &[1])));
        let g = cochain1(MultiVector::scalar(p2("x*y + 2")));
        assert_eq!(
            blacktriangle(&mu, &g).unwrap(),
            chain1(Form::term(IndexSet::full(2), p2("x*y + 2")))
        );
        let mu3 = VolumeForm::new(rat(-2, 3)).unwrap();
        let x = ModuleCochainElement::from_components(vec![
            MultiVector::basis(2, &[0, 1]),
            MultiVector::term(IndexSet::full(2), p2("x - y")),
        ])
        .unwrap();
        let back = blacktriangle_inverse(&mu3, &blacktriangle(&mu3, &x).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn blacktriangle_signs() {
        let signs: Vec<bool> = (0..6).map(blacktriangle_sign).collect();
        assert_eq!(signs, vec![false, true, true, false, false, true]);
    }

    #[test]
    fn chain_matches_decomposable_formula() {
        let s = planar("x*y");
        let w = PoissonModule::unverified(
            2,
            2,
            vec![
                vec![vec![p2("x"), p2("x")], vec![p2("0"), p2("x")]],
                vec![vec![p2("0"), p2("0")], vec![p2("0"), p2("0")]],
            ],
        )
        .unwrap()
        .verify(&s)
        .unwrap();
        let (f0, f1, f2) = (p2("x + y^2"), p2("x*y"), p2("y^3 - x"));
        for a in 0..2 {
            // w ⊗ f0 df1 ∧ df2 with w = e_a.
            let omega = Form::differential(&f1).wedge(&Form::differential(&f2)).unwrap().mul_poly(&f0);
            let x = ModuleChainElement::single(2, a, omega);
            let got = chain_differential(&s, &w, &x).unwrap();
            let mut unit = vec![Poly::zero(2); 2];
            unit[a] = f0.clone();
            let b1 = w.bracket_functions(&s, &unit, &f1);
            let b2 = w.bracket_functions(&s, &unit, &f2);
            let comps: Vec<Form> = (0..2)
                .map(|c| {
                    let first = Form::differential(&f2).mul_poly(&b1[c]);
                    let second = Form::differential(&f1).mul_poly(&b2[c]);
                    let mut t = &first - &second;
                    if c == a {
                        let third = exterior_derivative(&Form::scalar(s.bracket(&f1, &f2))).mul_poly(&f0);
                        t = &t - &third;
                    }
                    t
                })
                .collect();
            assert_eq!(got, ModuleChainElement::from_components(comps).unwrap());
        }
    }

    #[test]
    fn contraction_identity_on_example() {
        let s = planar("x*y");
        let w = PoissonModule::trivial(1, 2);
        let x = cochain1(MultiVector::from_components(vec![p2("x^2"), p2("y")]));
        let omega = Form::term(IndexSet::full(2), p2("x + y^2"));
        let lhs1 = module_interior_product(&x, &s.koszul_differential(&omega).unwrap()).unwrap();
        let lhs2 = chain_differential(&s, &w, &module_interior_product(&x, &omega).unwrap()).unwrap();
        let rhs = module_interior_product(&cochain_differential(&s, &w, &x).unwrap(), &omega).unwrap();
        assert_eq!(&lhs1 + &lhs2, rhs);
    }

    #[test]
    fn duality_hand_example() {
        let s = planar("x*y");
        let mu = VolumeForm::standard();
        let phi = s.modular_vector_field(&mu).unwrap();
        let w = PoissonModule::trivial(1, 2);
        let w_neg = w.twist(&s, &-&phi).unwrap();
        let x = cochain1(MultiVector::scalar(p2("x")));
        let lhs = chain_differential(&s, &w_neg, &blacktriangle(&mu, &x).unwrap()).unwrap();
        let rhs = blacktriangle(&mu, &cochain_differential(&s, &w, &x).unwrap()).unwrap();
        let expected = chain1(Form::from_components(vec![p2("-x*y"), p2("0")]));
        assert_eq!(lhs, expected);
        assert_eq!(rhs, expected);
    }

    #[test]
    fn grading() {
        let w = PoissonModule::trivial(1, 2);
        assert_eq!(grading_shift(&planar("1"), &w).unwrap(), -2);
        assert_eq!(grading_shift(&planar("x*y"), &w).unwrap(), 0);
        assert_eq!(grading_shift(&PoissonStructure::zero(2), &w).unwrap(), 0);
        assert!(matches!(grading_shift(&planar("x*y + 1"), &w), Err(ComplexError::NotGraded(_))));
        let s = planar("x*y");
        let elw = crate::pmodule::elw_connection(&s, &VolumeForm::standard()).unwrap();
        assert_eq!(grading_shift(&s, &elw).unwrap(), 0);
        let bad = PoissonModule::unverified(1, 2, vec![vec![vec![p2("1")]], vec![vec![p2("0")]]])
            .unwrap()
            .assume_flat();
        assert!(matches!(grading_shift(&s, &bad), Err(ComplexError::NotGraded(_))));
    }

    #[test]
    fn slice_examples() {
        let s = planar("1");
        let w = PoissonModule::trivial(1, 2);
        let slice = assemble_slice(&s, &w, ComplexKind::Cochain, 0, 1).unwrap();
        assert_eq!(slice.domain_basis.len(), 2);
        assert_eq!(slice.codomain_weight, -1);
        assert_eq!(slice.rank(), 2);
        assert_eq!(slice, assemble_slice(&s, &w, ComplexKind::Cochain, 0, 1).unwrap());

        let zero = PoissonStructure::zero(3);
        let w2 = PoissonModule::trivial(2, 3);
        for kind in [ComplexKind::Chain, ComplexKind::Cochain] {
            for k in 0..=3 {
                let weight = basis_weight(kind, k, 2);
                let slice = assemble_slice(&zero, &w2, kind, k, weight).unwrap();
                let binom = [1, 3, 3, 1][k];
                assert_eq!(slice.domain_basis.len(), 2 * binom * 6);
                assert!(slice.matrix.is_zero());
                assert_eq!(slice.matrix.cols(), slice.domain_basis.len());
                assert_eq!(slice.matrix.rows(), slice.codomain_basis.len());
            }
        }
        assert!(matches!(
            assemble_slice(&planar("x*y + x"), &w, ComplexKind::Chain, 1, 2),
            Err(ComplexError::NotGraded(_))
        ));
    }

    #[test]
    fn slice_text_export() {
        let s = planar("1");
        let w = PoissonModule::trivial(1, 2);
        let names = vec!["x".to_string(), "y".to_string()];
        let text = assemble_slice(&s, &w, ComplexKind::Cochain, 0, 1).unwrap().to_text(&names);
        assert_eq!(
            text,
            "cochain degree 0 weight 1 -> weight -1\n\
             domain 2\n  e1 x\n  e1 y\n\
             codomain 2\n  e1 1 Dx\n  e1 1 Dy\n\
             matrix 2x2\n0 1\n-1 0\n"
        );
    }

    #[test]
    fn basis_elements_have_slice_weight() {
        for kind in [ComplexKind::Chain, ComplexKind::Cochain] {
            for k in 0..=2 {
                for weight in -2..5 {
                    for b in slice_basis(kind, 2, 2, k, weight) {
                        assert_eq!(b.indices.len(), k);
                        assert_eq!(basis_weight(kind, k, b.monomial.degree()), weight);
                    }
                }
            }
        }
    }
}
