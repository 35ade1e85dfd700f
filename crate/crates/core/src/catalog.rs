//! Named example structures and modules.

use crate::calculus::{MultiVector, VectorField};
use crate::pmodule::{elw_connection, ModuleError, PoissonModule, PolyMatrix};
use crate::poisson::{bivector, PoissonStructure, VolumeForm};
use crate::poly::{Poly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogStructure {
    /// `∂x ∧ ∂y` on the plane.
    Symplectic,
    /// `xy ∂x ∧ ∂y`.
    Quadratic,
    /// Linear structure with `{x, y} = z`, `{y, z} = x`, `{z, x} = y`.
    So3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogModule {
    Trivial,
    FlatRank2,
    Elw,
}

impl CatalogStructure {
    pub const ALL: [CatalogStructure; 3] = [Self::Symplectic, Self::Quadratic, Self::So3];

    pub fn name(self) -> &'static str {
        match self {
            Self::Symplectic => "symplectic",
            Self::Quadratic => "quadratic",
            Self::So3 => "so3",
        }
    }

    pub fn nvars(self) -> usize {
        match self {
            Self::So3 => 3,
            _ => 2,
        }
    }

    pub fn structure(self) -> PoissonStructure {
        let n = self.nvars();
        let v = |i| Poly::var(n, i);
        let entries = match self {
            Self::Symplectic => vec![(0, 1, Poly::one(n))],
            Self::Quadratic => vec![(0, 1, &v(0) * &v(1))],
            Self::So3 => vec![(0, 1, v(2)), (1, 2, v(0)), (0, 2, -v(1))],
        };
        PoissonStructure::from_entries(n, entries).expect("catalog structures satisfy Jacobi")
    }

    /// Rank-2 flat module `B_i = ψ(x_i) M` for a Poisson field `ψ` and a
    /// constant non-scalar matrix `M`.
    pub fn flat_rank2(self) -> PoissonModule {
        let p = self.structure();
        let n = self.nvars();
        let (psi, m) = match self {
            Self::Symplectic => (VectorField::from_components(vec![Poly::one(n), Poly::zero(n)]), [[0, 1], [0, 0]]),
            Self::Quadratic => (VectorField::from_components(vec![Poly::var(n, 0), Poly::zero(n)]), [[1, 1], [0, 1]]),
            Self::So3 => (p.hamiltonian(&Poly::var(n, 0)).expect("verified"), [[1, 1], [0, 1]]),
        };
        constant_times_field(&p, &psi, m).expect("catalog modules are flat")
    }

    pub fn module(self, choice: CatalogModule, mu: &VolumeForm) -> PoissonModule {
        match choice {
            CatalogModule::Trivial => PoissonModule::trivial(1, self.nvars()),
            CatalogModule::FlatRank2 => self.flat_rank2(),
            CatalogModule::Elw => elw_connection(&self.structure(), mu).expect("catalog structures are verified"),
        }
    }
}

impl CatalogModule {
    pub const ALL: [CatalogModule; 3] = [Self::Trivial, Self::FlatRank2, Self::Elw];

    pub fn name(self) -> &'static str {
        match self {
            Self::Trivial => "trivial",
            Self::FlatRank2 => "flat-rank-2",
            Self::Elw => "elw",
        }
    }
}

/// `B_i = ψ(x_i) M`, verified flat.
pub fn constant_times_field(
    p: &PoissonStructure,
    psi: &VectorField,
    m: [[i64; 2]; 2],
) -> Result<PoissonModule, ModuleError> {
    let brackets: Vec<PolyMatrix> = psi
        .components()
        .iter()
        .map(|c| {
            m.iter()
                .map(|row| row.iter().map(|&e| c.scale(&Rational::from_integer(e.into()))).collect())
                .collect()
        })
        .collect();
    PoissonModule::new(p, 2, brackets)
}

/// `y ∂x∧∂y + ∂y∧∂z`, which fails the Jacobi identity.
pub fn nonjacobi() -> MultiVector {
    let v = |i| Poly::var(3, i);
    bivector(3, [(0, 1, v(1)), (1, 2, Poly::one(3))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::grading_shift;
    use crate::poisson::check_jacobi;

    #[test]
    fn every_module_builds() {
        let mu = VolumeForm::standard();
        for s in CatalogStructure::ALL {
            for m in CatalogModule::ALL {
                let w = s.module(m, &mu);
                assert!(w.flat_verified());
                assert!(w.check_flat(&s.structure()).unwrap().is_none());
            }
        }
    }

    #[test]
    fn graded_pairs() {
        let mu = VolumeForm::standard();
        assert!(grading_shift(&CatalogStructure::Quadratic.structure(), &CatalogStructure::Quadratic.flat_rank2()).is_ok());
        assert!(grading_shift(&CatalogStructure::So3.structure(), &CatalogStructure::So3.flat_rank2()).is_err());
        for s in CatalogStructure::ALL {
            assert!(grading_shift(&s.structure(), &s.module(CatalogModule::Elw, &mu)).is_ok());
        }
    }

    #[test]
    fn nonjacobi_witness() {
        let w = check_jacobi(&nonjacobi()).unwrap();
        assert_eq!(w.triple, [0, 1, 2]);
        assert_eq!(w.jacobiator, Poly::one(3));
    }
}
