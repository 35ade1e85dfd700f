//! Seeded random instances for identity checks.
//!
//! Distribution: coefficients `p/q` with `|p| ≤ 3`, `q ∈ {1, 2}`; up to
//! `max_terms` monomials of total degree at most the requested bound.
//! Poisson structures: any bivector for `n ≤ 2`, and `h · (∇C)`-type
//! structures `{x_i, x_j} = h ε_ijk ∂_k C` for `n = 3`. Flat modules are
//! built from Poisson vector fields `ψ, χ` as `B_i = ψ(x_i) M + χ(x_i) Id`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    Form, IndexSet, ModuleChainElement, ModuleCochainElement, MultiVector, Skew, Variance,
    VectorField,
};
use crate::pmodule::{PolyMatrix, PoissonModule};
use crate::poisson::{PoissonStructure, VolumeForm};
use crate::poly::{Poly, Rational};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn rational(&mut self) -> Rational {
        let num: i64 = self.rng.gen_range(-3..=3);
        let den: i64 = self.rng.gen_range(1..=2);
        Rational::new(num.into(), den.into())
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let c = self.rational();
            if c != Rational::from_integer(0.into()) {
                return c;
            }
        }
    }

    fn exponents(&mut self, nvars: usize, degree: u32) -> Vec<u32> {
        let mut exps = vec![0u32; nvars];
        for _ in 0..degree {
            exps[self.rng.gen_range(0..nvars)] += 1;
        }
        exps
    }

    /// Up to `max_terms` terms of total degree at most `max_degree`.
    pub fn poly(&mut self, nvars: usize, max_degree: u32, max_terms: usize) -> Poly {
        let count = self.rng.gen_range(0..=max_terms);
        let terms: Vec<(Vec<u32>, Rational)> = (0..count)
            .map(|_| {
                let d = self.rng.gen_range(0..=max_degree);
                (self.exponents(nvars, d), self.nonzero_rational())
            })
            .collect();
        Poly::from_terms(nvars, terms)
    }

    pub fn homogeneous_poly(&mut self, nvars: usize, degree: u32, max_terms: usize) -> Poly {
        let count = self.rng.gen_range(1..=max_terms.max(1));
        let terms: Vec<(Vec<u32>, Rational)> = (0..count)
            .map(|_| (self.exponents(nvars, degree), self.nonzero_rational()))
            .collect();
        Poly::from_terms(nvars, terms)
    }

    fn skew<V: Variance>(&mut self, nvars: usize, degree: usize, max_degree: u32) -> Skew<V> {
        let sets = IndexSet::subsets(nvars, degree);
        let terms: Vec<(IndexSet, Poly)> = sets
            .into_iter()
            .map(|s| (s, self.poly(nvars, max_degree, 3)))
            .collect();
        Skew::from_terms(nvars, degree, terms)
    }

    pub fn form(&mut self, nvars: usize, degree: usize, max_degree: u32) -> Form {
        self.skew(nvars, degree, max_degree)
    }

    pub fn multivector(&mut self, nvars: usize, degree: usize, max_degree: u32) -> MultiVector {
        self.skew(nvars, degree, max_degree)
    }

    pub fn chain_element(&mut self, rank: usize, nvars: usize, degree: usize, max_degree: u32) -> ModuleChainElement {
        let comps = (0..rank).map(|_| self.form(nvars, degree, max_degree)).collect();
        ModuleChainElement::from_components(comps).expect("uniform shape")
    }

    pub fn cochain_element(&mut self, rank: usize, nvars: usize, degree: usize, max_degree: u32) -> ModuleCochainElement {
        let comps = (0..rank).map(|_| self.multivector(nvars, degree, max_degree)).collect();
        ModuleCochainElement::from_components(comps).expect("uniform shape")
    }

    pub fn volume(&mut self) -> VolumeForm {
        VolumeForm::new(self.nonzero_rational()).expect("nonzero")
    }

    /// A verified Poisson structure of the documented shape.
    pub fn poisson_structure(&mut self, nvars: usize) -> PoissonStructure {
        match nvars {
            0 | 1 => PoissonStructure::zero(nvars),
            2 => PoissonStructure::from_entries(2, [(0, 1, self.poly(2, 2, 3))]).expect("planar"),
            3 => {
                let c = self.poly(3, 2, 3);
                let h = self.poly(3, 1, 2);
                let grad: Vec<Poly> = (0..3).map(|k| c.d(k)).collect();
                PoissonStructure::from_entries(
                    3,
                    [
                        (0, 1, &h * &grad[2]),
                        (0, 2, -(&h * &grad[1])),
                        (1, 2, &h * &grad[0]),
                    ],
                )
                .expect("Jacobi holds for h times a cross-product structure")
            }
            _ => panic!("random structures are generated for n <= 3"),
        }
    }

    /// `X_f + c φ_μ`, always a Poisson vector field.
    pub fn poisson_field(&mut self, p: &PoissonStructure, mu: &VolumeForm) -> VectorField {
        let n = p.nvars();
        if p.pi().is_zero() {
            return VectorField::from_components((0..n).map(|_| self.poly(n, 2, 2)).collect());
        }
        let f = self.poly(n, 2, 3);
        let c = self.rational();
        let xf = p.hamiltonian(&f).expect("verified");
        let phi = p.modular_vector_field(mu).expect("verified");
        &xf + &phi.scale(&c)
    }

    /// A verified flat module of the given rank.
    pub fn flat_module(&mut self, p: &PoissonStructure, mu: &VolumeForm, rank: usize) -> PoissonModule {
        let n = p.nvars();
        let psi = self.poisson_field(p, mu).components();
        let chi = self.poisson_field(p, mu).components();
        let m: Vec<Vec<Rational>> = (0..rank).map(|_| (0..rank).map(|_| self.rational()).collect()).collect();
        let brackets: Vec<PolyMatrix> = (0..n)
            .map(|i| {
                (0..rank)
                    .map(|a| {
                        (0..rank)
                            .map(|b| {
                                let mut e = psi[i].scale(&m[a][b]);
                                if a == b {
                                    e += &chi[i];
                                }
                                e
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PoissonModule::new(p, rank, brackets).expect("commuting construction is flat")
    }
}
