//! Free Poisson modules of finite rank.
//!
//! A module of rank `r` over `n` variables is given by bracket matrices
//! `B_1..B_n` with `{e_a, x_i}_W = Σ_b B_i[a][b] e_b`. The bracket extends to
//! all of `W × C` through the two Leibniz axioms. The equivalent flat
//! contravariant connection has `∇_{dx_i} e_a = -{e_a, x_i}_W`, i.e.
//! connection matrices `Γ_i = -B_i`.

use thiserror::Error;

use crate::calculus::{
    exterior_derivative, interior_product, CalculusError, Form, IndexSet, ModuleChainElement,
    VectorField,
};
use crate::poisson::{common_degree, FieldWitness, PoissonError, PoissonStructure, VolumeForm};
use crate::poly::Poly;

/// Row-major square matrix of polynomials.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// Section `e_a` and coordinate pair `(x_i, x_j)` on which the right Lie
/// module condition fails. `discrepancy` is
/// `{e_a, {x_i, x_j}} - ({{e_a, x_i}, x_j} - {{e_a, x_j}, x_i})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatnessWitness {
    pub section: usize,
    pub pair: [usize; 2],
    pub discrepancy: Vec<Poly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("bracket data malformed: {0}")]
    Shape(String),
    #[error("module is not flat (section {}, pair {:?})", .0.section, .0.pair)]
    NotFlat(FlatnessWitness),
    #[error("module flatness has not been verified")]
    Unverified,
    #[error("twisting field is not a Poisson vector field (pair {:?})", .0.pair)]
    NotPoissonField(FieldWitness),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonModule {
    rank: usize,
    nvars: usize,
    brackets: Vec<PolyMatrix>,
    flat_verified: bool,
}

fn check_shape(rank: usize, nvars: usize, mats: &[PolyMatrix]) -> Result<(), ModuleError> {
    if rank == 0 {
        return Err(ModuleError::Shape("rank must be positive".into()));
    }
    if mats.len() != nvars {
        return Err(ModuleError::Shape(format!(
            "expected {nvars} matrices, got {}",
            mats.len()
        )));
    }
    for (i, m) in mats.iter().enumerate() {
        if m.len() != rank || m.iter().any(|row| row.len() != rank) {
            return Err(ModuleError::Shape(format!(
                "matrix {} is not {rank}x{rank}",
                i + 1
            )));
        }
        if m.iter().flatten().any(|p| p.nvars() != nvars) {
            return Err(ModuleError::Shape(format!(
                "matrix {} has entries over the wrong ring",
                i + 1
            )));
        }
    }
    Ok(())
}

fn zero_matrix(rank: usize, nvars: usize) -> PolyMatrix {
    vec![vec![Poly::zero(nvars); rank]; rank]
}

impl PoissonModule {
    /// The module `C^r` with `{e_a, f} = 0`.
    pub fn trivial(rank: usize, nvars: usize) -> Self {
        assert!(rank >= 1, "module rank must be positive");
        PoissonModule {
            rank,
            nvars,
            brackets: vec![zero_matrix(rank, nvars); nvars],
            flat_verified: true,
        }
    }

    /// Bracket data without any flatness check.
    pub fn unverified(rank: usize, nvars: usize, brackets: Vec<PolyMatrix>) -> Result<Self, ModuleError> {
        check_shape(rank, nvars, &brackets)?;
        Ok(PoissonModule {
            rank,
            nvars,
            brackets,
            flat_verified: false,
        })
    }

    /// Bracket data verified to be flat with respect to `structure`.
    pub fn new(
        structure: &PoissonStructure,
        rank: usize,
        brackets: Vec<PolyMatrix>,
    ) -> Result<Self, ModuleError> {
        Self::unverified(rank, structure.nvars(), brackets)?.verify(structure)
    }

    /// Runs the flatness check and marks the module verified on success.
    pub fn verify(mut self, structure: &PoissonStructure) -> Result<Self, ModuleError> {
        match self.check_flat(structure)? {
            None => {
                self.flat_verified = true;
                Ok(self)
            }
            Some(w) => Err(ModuleError::NotFlat(w)),
        }
    }

    /// Escape hatch: mark as flat without checking.
    pub fn assume_flat(mut self) -> Self {
        self.flat_verified = true;
        self
    }

    /// Module whose connection matrices are `gamma` (so `B_i = -Γ_i`).
    pub fn from_connection(rank: usize, nvars: usize, gamma: Vec<PolyMatrix>) -> Result<Self, ModuleError> {
        check_shape(rank, nvars, &gamma)?;
        let brackets = gamma
            .into_iter()
            .map(|m| m.into_iter().map(|row| row.into_iter().map(|p| -p).collect()).collect())
            .collect();
        Self::unverified(rank, nvars, brackets)
    }

    /// Connection matrices `Γ_i = -B_i`.
    pub fn to_connection(&self) -> Vec<PolyMatrix> {
        self.brackets
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(|p| -p).collect()).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn brackets(&self) -> &[PolyMatrix] {
        &self.brackets
    }

    /// `B_i[a][b]`.
    pub fn entry(&self, i: usize, a: usize, b: usize) -> &Poly {
        &self.brackets[i][a][b]
    }

    pub fn flat_verified(&self) -> bool {
        self.flat_verified
    }

    pub(crate) fn require_verified(&self) -> Result<(), ModuleError> {
        if self.flat_verified {
            Ok(())
        } else {
            Err(ModuleError::Unverified)
        }
    }

    /// Common polynomial degree of all nonzero bracket entries.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>, ()> {
        common_degree(self.brackets.iter().flatten().flatten())
    }

    /// `{e_a, -}_W` as the list of its `r` components: component `b` is the
    /// vector field `Σ_i B_i[a][b] ∂_i`.
    pub fn hamiltonian_of_section(&self, a: usize) -> Vec<VectorField> {
        (0..self.rank)
            .map(|b| {
                VectorField::from_components(
                    (0..self.nvars).map(|i| self.brackets[i][a][b].clone()).collect(),
                )
            })
            .collect()
    }

    /// `{w, f}_W` for `w = Σ g_a e_a` given by its coefficient list.
    pub fn bracket_functions(&self, structure: &PoissonStructure, w: &[Poly], f: &Poly) -> Vec<Poly> {
        assert_eq!(w.len(), self.rank, "module element has wrong rank");
        let df: Vec<Poly> = (0..self.nvars).map(|i| f.d(i)).collect();
        let mut out: Vec<Poly> = w.iter().map(|g| structure.bracket(g, f)).collect();
        for (a, g) in w.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            for (i, dfi) in df.iter().enumerate() {
                if dfi.is_zero() {
                    continue;
                }
                let scale = g * dfi;
                for (b, slot) in out.iter_mut().enumerate() {
                    let entry = &self.brackets[i][a][b];
                    if !entry.is_zero() {
                        *slot += &(&scale * entry);
                    }
                }
            }
        }
        out
    }

    /// `{w, f}_W` on degree-0 module elements.
    pub fn module_bracket(
        &self,
        structure: &PoissonStructure,
        w: &ModuleChainElement,
        f: &Poly,
    ) -> Result<ModuleChainElement, ModuleError> {
        structure.require_verified()?;
        if w.rank() != self.rank || w.degree() != 0 || w.nvars() != self.nvars {
            return Err(ModuleError::Shape(format!(
                "expected a degree-0 element of rank {}",
                self.rank
            )));
        }
        Ok(ModuleChainElement::from_functions(self.bracket_functions(
            structure,
            &w.functions(),
            f,
        ))?)
    }

    /// Right Lie module condition on basis sections and coordinate pairs.
    pub fn check_flat(&self, structure: &PoissonStructure) -> Result<Option<FlatnessWitness>, ModuleError> {
        structure.require_verified()?;
        let n = self.nvars;
        let unit = |a: usize| -> Vec<Poly> {
            (0..self.rank)
                .map(|b| if a == b { Poly::one(n) } else { Poly::zero(n) })
                .collect()
        };
        for a in 0..self.rank {
            let ea = unit(a);
            for i in 0..n {
                for j in (i + 1)..n {
                    let (xi, xj) = (Poly::var(n, i), Poly::var(n, j));
                    let ij = self.bracket_functions(
                        structure,
                        &self.bracket_functions(structure, &ea, &xi),
                        &xj,
                    );
                    let ji = self.bracket_functions(
                        structure,
                        &self.bracket_functions(structure, &ea, &xj),
                        &xi,
                    );
                    let rhs = self.bracket_functions(structure, &ea, &structure.bracket(&xi, &xj));
                    let discrepancy: Vec<Poly> = rhs
                        .iter()
                        .zip(ij.iter().zip(&ji))
                        .map(|(r, (p, q))| r - &(p - q))
                        .collect();
                    if discrepancy.iter().any(|d| !d.is_zero()) {
                        return Ok(Some(FlatnessWitness {
                            section: a,
                            pair: [i, j],
                            discrepancy,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// `W_φ` with `{w, f}_{W_φ} = {w, f}_W + w φ(f)`.
    pub fn twist(&self, structure: &PoissonStructure, phi: &VectorField) -> Result<Self, ModuleError> {
        self.require_verified()?;
        if let Some(w) = structure.poisson_field_defect(phi)? {
            return Err(ModuleError::NotPoissonField(w));
        }
        self.twist_unchecked(phi).verify(structure)
    }

    /// `B_i + φ(x_i) Id` with no preconditions; the result is unverified.
    pub fn twist_unchecked(&self, phi: &VectorField) -> Self {
        assert_eq!(phi.nvars(), self.nvars, "field over the wrong ring");
        let comps = phi.components();
        let brackets = self
            .brackets
            .iter()
            .zip(&comps)
            .map(|(m, phi_i)| {
                let mut m = m.clone();
                for (a, row) in m.iter_mut().enumerate() {
                    row[a] += phi_i;
                }
                m
            })
            .collect();
        PoissonModule {
            rank: self.rank,
            nvars: self.nvars,
            brackets,
            flat_verified: false,
        }
    }
}

/// Rank-1 module modelling `Ω^n` with basis `μ`, whose connection is
/// `∇_ω(s) = ω ∧ d ι_π(s)`, read off in the `μ` trivialization.
pub fn elw_connection(structure: &PoissonStructure, mu: &VolumeForm) -> Result<PoissonModule, ModuleError> {
    structure.require_verified()?;
    let n = structure.nvars();
    let top = mu.form(n);
    let full = IndexSet::full(n);
    let d_iota = exterior_derivative(&interior_product(structure.pi(), &top)?);
    let inv = mu.coefficient().recip();
    let gamma = (0..n)
        .map(|i| {
            let w = Form::basis(n, &[i]).wedge(&d_iota)?;
            Ok(vec![vec![w.component(full).scale(&inv)]])
        })
        .collect::<Result<Vec<PolyMatrix>, CalculusError>>()?;
    PoissonModule::from_connection(1, n, gamma)?.verify(structure)
}

/// `∇_α s` in the `μ` trivialization, computed from the defining formula
/// `α ∧ d ι_π(g μ)` for `s = g μ`. Returns the coefficient of `μ`.
pub fn elw_apply(structure: &PoissonStructure, mu: &VolumeForm, alpha: &Form, g: &Poly) -> Result<Poly, ModuleError> {
    let n = structure.nvars();
    let s = mu.form(n).mul_poly(g);
    let d_iota = exterior_derivative(&interior_product(structure.pi(), &s)?);
    let w = alpha.wedge(&d_iota)?;
    Ok(w.component(IndexSet::full(n)).scale(&mu.coefficient().recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::MultiVector;
    use crate::poly::rat;

    fn p(text: &str) -> Poly {
        Poly::parse_with(text, &["x", "y"]).unwrap()
    }

    fn planar(coeff: &str) -> PoissonStructure {
        PoissonStructure::from_entries(2, [(0, 1, p(coeff))]).unwrap()
    }

    fn rank1(bx: &str, by: &str) -> PoissonModule {
        PoissonModule::unverified(1, 2, vec![vec![vec![p(bx)]], vec![vec![p(by)]]]).unwrap()
    }

    fn e(g: &str) -> ModuleChainElement {
        ModuleChainElement::from_functions(vec![p(g)]).unwrap()
    }

    #[test]
    fn module_bracket_examples() {
        let s = planar("1");
        let w = PoissonModule::trivial(1, 2);
        assert_eq!(w.module_bracket(&s, &e("x"), &p("y")).unwrap(), e("1"));
        let wx = rank1("x", "0").assume_flat();
        assert!(wx.module_bracket(&s, &e("x^2 + y"), &p("7")).unwrap().is_zero());
        assert_eq!(wx.module_bracket(&s, &e("1"), &p("x^2")).unwrap(), e("2*x^2"));
    }

    #[test]
    fn flatness_examples() {
        let s = planar("1");
        assert!(PoissonModule::trivial(2, 2).check_flat(&s).unwrap().is_none());
        assert!(rank1("y", "0").check_flat(&s).unwrap().is_none());
        let w = rank1("x", "0").check_flat(&s).unwrap().expect("not flat");
        assert_eq!(w.section, 0);
        assert_eq!(w.pair, [0, 1]);
        assert_eq!(w.discrepancy, vec![p("-1")]);
        assert!(matches!(
            PoissonModule::new(&s, 1, rank1("x", "0").brackets().to_vec()),
            Err(ModuleError::NotFlat(_))
        ));
    }

    #[test]
    fn connection_dictionary() {
        let w = PoissonModule::from_connection(1, 2, vec![vec![vec![p("0")]]; 2]).unwrap();
        assert_eq!(w.brackets(), PoissonModule::trivial(1, 2).brackets());
        let wx = rank1("x", "0");
        assert_eq!(wx.to_connection()[0][0][0], p("-x"));
        let back = PoissonModule::from_connection(1, 2, wx.to_connection()).unwrap();
        assert_eq!(back.brackets(), wx.brackets());
        assert!(matches!(
            PoissonModule::from_connection(2, 2, vec![vec![vec![p("0")]]; 2]),
            Err(ModuleError::Shape(_))
        ));
    }

    #[test]
    fn twist_examples() {
        let q = planar("x*y");
        let triv = PoissonModule::trivial(1, 2);
        let zero = MultiVector::zero(2, 1);
        assert_eq!(triv.twist(&q, &zero).unwrap().brackets(), triv.brackets());
        let phi = MultiVector::from_components(vec![p("-x"), p("y")]);
        let t = triv.twist(&q, &phi).unwrap();
        assert_eq!(t.brackets(), rank1("-x", "y").brackets());
        let back = t.twist(&q, &-&phi).unwrap();
        assert_eq!(back.brackets(), triv.brackets());
        let bad = MultiVector::from_components(vec![p("x"), p("x")]);
        assert!(matches!(
            triv.twist(&q, &bad),
            Err(ModuleError::NotPoissonField(_))
        ));
        assert!(matches!(
            rank1("x", "0").twist(&q, &zero),
            Err(ModuleError::Unverified)
        ));
    }

    #[test]
    fn elw_examples() {
        let mu = VolumeForm::standard();
        let elw = elw_connection(&planar("1"), &mu).unwrap();
        assert_eq!(elw.brackets(), PoissonModule::trivial(1, 2).brackets());
        let elw = elw_connection(&planar("x*y"), &mu).unwrap();
        assert_eq!(elw.to_connection()[0][0][0], p("x"));
        assert_eq!(elw.brackets(), rank1("-x", "y").brackets());
        let elw = elw_connection(&PoissonStructure::zero(2), &mu).unwrap();
        assert_eq!(elw.brackets(), PoissonModule::trivial(1, 2).brackets());
        let scaled = VolumeForm::new(rat(5, 3)).unwrap();
        assert_eq!(
            elw_connection(&planar("x*y"), &scaled).unwrap().brackets(),
            rank1("-x", "y").brackets()
        );
    }

    #[test]
    fn elw_formula_matches_module_connection() {
        // ∇_{df}(g μ) from the formula equals -{g e, f} from the bracket data.
        let s = planar("x^2*y + y^3");
        let mu = VolumeForm::new(rat(2, 1)).unwrap();
        let elw = elw_connection(&s, &mu).unwrap();
        for (f, g) in [("x", "y^2"), ("x*y - 3", "x + 1"), ("y^3", "x^2*y")] {
            let (f, g) = (p(f), p(g));
            let lhs = elw_apply(&s, &mu, &Form::differential(&f), &g).unwrap();
            let rhs = -&elw.bracket_functions(&s, &[g.clone()], &f)[0];
            assert_eq!(lhs, rhs);
        }
    }
}
