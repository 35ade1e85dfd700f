//! Poisson bivectors, brackets, Hamiltonian fields, the Koszul–Brylinski
//! differential on forms, and modular vector fields.
//!
//! Sign conventions: `{f, g} = π(df, dg)`, `X_f = -π#(df)` so that
//! `X_f(g) = {g, f}`, and the canonical differential is `ι_π d - d ι_π`.

use num_traits::Zero;
use thiserror::Error;

use crate::calculus::{
    evaluate, exterior_derivative, interior_product, lie_derivative, CalculusError, Form,
    IndexSet, MultiVector, VectorField,
};
use crate::poly::{Poly, Rational};

/// A coordinate triple whose Jacobiator does not vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiWitness {
    pub triple: [usize; 3],
    pub jacobiator: Poly,
}

/// A coordinate pair on which a vector field fails to be a derivation of
/// the bracket: `lhs = φ{x_i, x_j}`, `rhs = {φ x_i, x_j} + {x_i, φ x_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldWitness {
    pub pair: [usize; 2],
    pub lhs: Poly,
    pub rhs: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("bivector fails the Jacobi identity on coordinates {:?}", .0.triple)]
    NotJacobi(JacobiWitness),
    #[error("Poisson structure has not been verified")]
    Unverified,
    #[error("expected a bivector, got a multivector of degree {0}")]
    NotBivector(usize),
    #[error("volume form coefficient must be nonzero")]
    ZeroVolume,
    #[error("vector field is not a Poisson vector field (pair {:?})", .0.pair)]
    NotPoissonField(FieldWitness),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Bivector `π` with a record of whether the Jacobi identity was checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonStructure {
    pi: MultiVector,
    jacobi_verified: bool,
}

impl PoissonStructure {
    /// Verifies the Jacobi identity and returns the structure.
    pub fn new(pi: MultiVector) -> Result<Self, PoissonError> {
        if pi.degree() != 2 && !(pi.is_zero() && pi.nvars() < 2) {
            return Err(PoissonError::NotBivector(pi.degree()));
        }
        match check_jacobi(&pi) {
            None => Ok(PoissonStructure {
                pi,
                jacobi_verified: true,
            }),
            Some(w) => Err(PoissonError::NotJacobi(w)),
        }
    }

    /// Wraps a bivector without checking it. Operations that need the
    /// Jacobi identity will refuse it until [`Self::assume_verified`].
    pub fn unverified(pi: MultiVector) -> Self {
        PoissonStructure {
            pi,
            jacobi_verified: false,
        }
    }

    /// Escape hatch: mark the structure as verified without checking.
    pub fn assume_verified(mut self) -> Self {
        self.jacobi_verified = true;
        self
    }

    /// Builds `π = Σ_{i<j} π_ij ∂_i ∧ ∂_j` from `(i, j, π_ij)` entries.
    pub fn from_entries(
        nvars: usize,
        entries: impl IntoIterator<Item = (usize, usize, Poly)>,
    ) -> Result<Self, PoissonError> {
        Self::new(bivector(nvars, entries))
    }

    pub fn zero(nvars: usize) -> Self {
        PoissonStructure {
            pi: MultiVector::zero(nvars, 2),
            jacobi_verified: true,
        }
    }

    pub fn pi(&self) -> &MultiVector {
        &self.pi
    }

    pub fn nvars(&self) -> usize {
        self.pi.nvars()
    }

    pub fn jacobi_verified(&self) -> bool {
        self.jacobi_verified
    }

    pub(crate) fn require_verified(&self) -> Result<(), PoissonError> {
        if self.jacobi_verified {
            Ok(())
        } else {
            Err(PoissonError::Unverified)
        }
    }

    /// `π(dx_i, dx_j)` for any ordered pair.
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Poly::zero(self.nvars()),
            std::cmp::Ordering::Less => self.pi.component(IndexSet::from_indices(&[i, j])),
            std::cmp::Ordering::Greater => -self.pi.component(IndexSet::from_indices(&[j, i])),
        }
    }

    pub fn bracket(&self, f: &Poly, g: &Poly) -> Poly {
        bracket_of(&self.pi, f, g)
    }

    pub fn jacobiator(&self, f: &Poly, g: &Poly, h: &Poly) -> Poly {
        jacobiator_of(&self.pi, f, g, h)
    }

    /// `π#(α)`, the vector field with `π#(α)(dg) = π(α, dg)`.
    pub fn sharp(&self, alpha: &Form) -> VectorField {
        assert_eq!(alpha.degree(), 1, "sharp needs a 1-form");
        let n = self.nvars();
        let a = alpha.components();
        let comps = (0..n)
            .map(|j| {
                let mut acc = Poly::zero(n);
                for (i, ai) in a.iter().enumerate() {
                    if !ai.is_zero() {
                        acc += &(ai * &self.entry(i, j));
                    }
                }
                acc
            })
            .collect();
        VectorField::from_components(comps)
    }

    /// Hamiltonian vector field `X_f = -π#(df)`.
    pub fn hamiltonian(&self, f: &Poly) -> Result<VectorField, PoissonError> {
        self.require_verified()?;
        Ok(-&self.sharp(&Form::differential(f)))
    }

    /// `∂ = ι_π d - d ι_π`, lowering degree by one.
    pub fn koszul_differential(&self, omega: &Form) -> Result<Form, PoissonError> {
        self.require_verified()?;
        Ok(koszul_of(&self.pi, omega)?)
    }

    /// Modular vector field: the unique `φ` with `ι_φ μ = ∂μ`.
    pub fn modular_vector_field(&self, mu: &VolumeForm) -> Result<VectorField, PoissonError> {
        self.require_verified()?;
        let n = self.nvars();
        let dmu = koszul_of(&self.pi, &mu.form(n))?;
        Ok(mu.uncontract(&dmu))
    }

    /// The same field read off from `L_{X_{x_i}} μ = φ(x_i) μ`.
    pub fn modular_vector_field_via_lie_derivative(
        &self,
        mu: &VolumeForm,
    ) -> Result<VectorField, PoissonError> {
        self.require_verified()?;
        let n = self.nvars();
        let top = mu.form(n);
        let full = IndexSet::full(n);
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let xf = self.hamiltonian(&Poly::var(n, i))?;
            let lie = lie_derivative(&xf, &top)?;
            comps.push(lie.component(full).scale(&mu.u.recip()));
        }
        Ok(VectorField::from_components(comps))
    }

    /// Checks `φ{x_i, x_j} = {φ x_i, x_j} + {x_i, φ x_j}` on all coordinate
    /// pairs; returns the first failing pair.
    pub fn poisson_field_defect(
        &self,
        phi: &VectorField,
    ) -> Result<Option<FieldWitness>, PoissonError> {
        self.require_verified()?;
        let n = self.nvars();
        let apply = |f: &Poly| evaluate(phi, std::slice::from_ref(f));
        for i in 0..n {
            for j in (i + 1)..n {
                let (xi, xj) = (Poly::var(n, i), Poly::var(n, j));
                let lhs = apply(&self.bracket(&xi, &xj))?;
                let rhs =
                    self.bracket(&apply(&xi)?, &xj) + self.bracket(&xi, &apply(&xj)?);
                if lhs != rhs {
                    return Ok(Some(FieldWitness {
                        pair: [i, j],
                        lhs,
                        rhs,
                    }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_poisson_vector_field(&self, phi: &VectorField) -> Result<bool, PoissonError> {
        Ok(self.poisson_field_defect(phi)?.is_none())
    }

    /// Polynomial degree `d` if every nonzero `π_ij` is homogeneous of
    /// degree `d`. `Ok(None)` for `π = 0`, `Err(())` for mixed degrees.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>, ()> {
        common_degree(self.pi.terms().map(|(_, c)| c))
    }
}

pub(crate) fn common_degree<'a>(polys: impl Iterator<Item = &'a Poly>) -> Result<Option<u32>, ()> {
    use crate::poly::Homogeneity;
    let mut found = None;
    for p in polys {
        match p.homogeneity() {
            Homogeneity::Zero => {}
            Homogeneity::Mixed => return Err(()),
            Homogeneity::Homogeneous(d) => match found {
                None => found = Some(d),
                Some(e) if e == d => {}
                Some(_) => return Err(()),
            },
        }
    }
    Ok(found)
}

/// `Σ π_ij ∂_i ∧ ∂_j` from `(i, j, π_ij)` with `i < j`; panics otherwise.
pub fn bivector(nvars: usize, entries: impl IntoIterator<Item = (usize, usize, Poly)>) -> MultiVector {
    let terms = entries.into_iter().map(|(i, j, f)| {
        assert!(i < j && j < nvars, "bivector entries need i < j < n");
        (IndexSet::from_indices(&[i, j]), f)
    });
    MultiVector::from_terms(nvars, 2, terms)
}

fn bracket_of(pi: &MultiVector, f: &Poly, g: &Poly) -> Poly {
    if pi.is_zero() {
        return Poly::zero(pi.nvars());
    }
    evaluate(pi, &[f.clone(), g.clone()]).expect("bracket arguments")
}

fn jacobiator_of(pi: &MultiVector, f: &Poly, g: &Poly, h: &Poly) -> Poly {
    let a = bracket_of(pi, &bracket_of(pi, f, g), h);
    let b = bracket_of(pi, &bracket_of(pi, g, h), f);
    let c = bracket_of(pi, &bracket_of(pi, h, f), g);
    a + b + c
}

/// Jacobi identity on coordinate triples `i < j < k`; `None` if it holds.
pub fn check_jacobi(pi: &MultiVector) -> Option<JacobiWitness> {
    let n = pi.nvars();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let value = jacobiator_of(
                    pi,
                    &Poly::var(n, i),
                    &Poly::var(n, j),
                    &Poly::var(n, k),
                );
                if !value.is_zero() {
                    return Some(JacobiWitness {
                        triple: [i, j, k],
                        jacobiator: value,
                    });
                }
            }
        }
    }
    None
}

pub(crate) fn koszul_of(pi: &MultiVector, omega: &Form) -> Result<Form, CalculusError> {
    let q = omega.degree();
    let n = omega.nvars();
    let first = if q < n {
        interior_product(pi, &exterior_derivative(omega))?
    } else {
        Form::zero(n, 0)
    };
    let second = if q >= 2 {
        exterior_derivative(&interior_product(pi, omega)?)
    } else {
        Form::zero(n, 0)
    };
    Ok(first.checked_sub(&second)?.redegree(q.saturating_sub(1)))
}

/// `μ = u · dx_1 ∧ ... ∧ dx_n` with `u` a nonzero constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeForm {
    u: Rational,
}

impl VolumeForm {
    pub fn new(u: Rational) -> Result<Self, PoissonError> {
        if u.is_zero() {
            Err(PoissonError::ZeroVolume)
        } else {
            Ok(VolumeForm { u })
        }
    }

    /// `dx_1 ∧ ... ∧ dx_n`.
    pub fn standard() -> Self {
        VolumeForm {
            u: Rational::from_integer(1.into()),
        }
    }

    pub fn coefficient(&self) -> &Rational {
        &self.u
    }

    pub fn form(&self, nvars: usize) -> Form {
        Form::top(nvars, self.u.clone())
    }

    /// `ι_X μ`.
    pub fn contract(&self, x: &MultiVector) -> Form {
        interior_product(x, &self.form(x.nvars())).expect("same ring")
    }

    /// Inverse of [`Self::contract`]: the multivector of degree
    /// `n - deg(omega)` whose contraction with `μ` is `omega`.
    pub fn uncontract(&self, omega: &Form) -> MultiVector {
        let n = omega.nvars();
        let k = n - omega.degree();
        let inv = self.u.recip();
        let terms = omega.terms().map(|(j, c)| {
            let set = j.complement(n);
            // ι_{∂_I} dx_full = ± dx_{I^c}
            let negative = crate::calculus::contraction_sign(set, IndexSet::full(n));
            let mut coeff = c.scale(&inv);
            if negative {
                coeff = -coeff;
            }
            (set, coeff)
        });
        MultiVector::from_terms(n, k, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p2(text: &str) -> Poly {
        Poly::parse_with(text, &["x", "y"]).unwrap()
    }

    fn p3(text: &str) -> Poly {
        Poly::parse_with(text, &["x", "y", "z"]).unwrap()
    }

    fn planar(coeff: &str) -> PoissonStructure {
        PoissonStructure::from_entries(2, [(0, 1, p2(coeff))]).unwrap()
    }

    fn so3() -> PoissonStructure {
        PoissonStructure::from_entries(
            3,
            [(0, 1, p3("z")), (1, 2, p3("x")), (0, 2, p3("-y"))],
        )
        .unwrap()
    }

    #[test]
    fn bracket_examples() {
        let s = planar("1");
        assert_eq!(s.bracket(&p2("x"), &p2("y")), p2("1"));
        let f = p2("x^2*y + 3*y");
        assert!(s.bracket(&f, &f).is_zero());
        assert_eq!(planar("x*y").bracket(&p2("x"), &p2("y")), p2("x*y"));
    }

    #[test]
    fn jacobi_examples() {
        assert!(check_jacobi(so3().pi()).is_none());
        let bad = bivector(3, [(0, 1, p3("y")), (1, 2, p3("1"))]);
        let w = check_jacobi(&bad).expect("must fail");
        assert_eq!(w.triple, [0, 1, 2]);
        assert_eq!(w.jacobiator, p3("1"));
        let s = PoissonStructure::unverified(bad.clone());
        assert_eq!(s.jacobiator(&p3("x"), &p3("y"), &p3("z")), p3("1"));
        assert!(matches!(
            PoissonStructure::new(bad),
            Err(PoissonError::NotJacobi(_))
        ));
        assert!(check_jacobi(PoissonStructure::zero(3).pi()).is_none());
    }

    #[test]
    fn hamiltonian_examples() {
        let s = planar("1");
        let v = MultiVector::from_components;
        assert_eq!(s.hamiltonian(&p2("x")).unwrap(), v(vec![p2("0"), p2("-1")]));
        assert!(s.hamiltonian(&p2("5")).unwrap().is_zero());
        let q = planar("x*y");
        assert_eq!(q.hamiltonian(&p2("x")).unwrap(), v(vec![p2("0"), p2("-x*y")]));
        let unverified = PoissonStructure::unverified(q.pi().clone());
        assert_eq!(
            unverified.hamiltonian(&p2("x")),
            Err(PoissonError::Unverified)
        );
    }

    #[test]
    fn koszul_examples() {
        let s = planar("1");
        let dxdy = Form::basis(2, &[0, 1]);
        let r = s.koszul_differential(&dxdy.mul_poly(&p2("x"))).unwrap();
        assert_eq!(r, Form::basis(2, &[0]).scale(&rat(-1, 1)));
        let z = s.koszul_differential(&Form::scalar(p2("x^3"))).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        let q = planar("x*y");
        assert_eq!(
            q.koszul_differential(&dxdy).unwrap(),
            Form::from_components(vec![p2("-y"), p2("-x")])
        );
    }

    #[test]
    fn modular_examples() {
        let mu = VolumeForm::standard();
        assert!(planar("1").modular_vector_field(&mu).unwrap().is_zero());
        assert!(PoissonStructure::zero(2).modular_vector_field(&mu).unwrap().is_zero());
        let phi = planar("x*y").modular_vector_field(&mu).unwrap();
        assert_eq!(phi, MultiVector::from_components(vec![p2("-x"), p2("y")]));
        let scaled = VolumeForm::new(rat(-3, 2)).unwrap();
        assert_eq!(planar("x*y").modular_vector_field(&scaled).unwrap(), phi);
        assert_eq!(VolumeForm::new(rat(0, 1)), Err(PoissonError::ZeroVolume));
    }

    #[test]
    fn modular_routes_agree() {
        let mu = VolumeForm::new(rat(2, 1)).unwrap();
        for s in [planar("x*y"), planar("x^2 + y^3"), so3()] {
            assert_eq!(
                s.modular_vector_field(&mu).unwrap(),
                s.modular_vector_field_via_lie_derivative(&mu).unwrap()
            );
        }
    }

    #[test]
    fn poisson_field_examples() {
        let s = planar("1");
        assert!(s.is_poisson_vector_field(&MultiVector::basis(2, &[0])).unwrap());
        let xdx = MultiVector::from_components(vec![p2("x"), p2("0")]);
        let w = s.poisson_field_defect(&xdx).unwrap().expect("not Poisson");
        assert_eq!(w.pair, [0, 1]);
        assert!(w.lhs.is_zero());
        assert_eq!(w.rhs, p2("1"));
        let q = planar("x*y");
        let xf = q.hamiltonian(&p2("x^2*y + y")).unwrap();
        assert!(q.is_poisson_vector_field(&xf).unwrap());
    }

    #[test]
    fn uncontract_inverts_contract() {
        let mu = VolumeForm::new(rat(3, 1)).unwrap();
        for k in 0..=3 {
            for set in IndexSet::subsets(3, k) {
                let x = MultiVector::term(set, p3("x - 2*z^2"));
                let back = mu.uncontract(&mu.contract(&x));
                assert_eq!(back, x);
            }
        }
    }
}
