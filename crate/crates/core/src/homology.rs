//! Betti numbers of weight slices and the duality verifier.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::calculus::{ModuleChainElement, ModuleCochainElement, VectorField};
use crate::complexes::{
    assemble_slice, blacktriangle, chain_differential, cochain_differential, grading_shift,
    slice_basis, ComplexError, ComplexKind,
};
use crate::linalg::RationalMatrix;
use crate::pmodule::{elw_connection, ModuleError, PoissonModule};
use crate::poisson::{PoissonError, PoissonStructure, VolumeForm};
use crate::poly::default_names;
use crate::random::Sampler;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
}

/// Exact rank of a rational matrix.
pub fn rank(matrix: &RationalMatrix) -> usize {
    matrix.rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BettiKind {
    Homology,
    Cohomology,
}

impl BettiKind {
    pub fn complex(self) -> ComplexKind {
        match self {
            BettiKind::Homology => ComplexKind::Chain,
            BettiKind::Cohomology => ComplexKind::Cochain,
        }
    }
}

/// Slice whose differential lands in `(degree, weight)`.
fn incoming(kind: ComplexKind, nvars: usize, degree: usize, weight: i64, shift: i64) -> Option<(usize, i64)> {
    match kind {
        ComplexKind::Cochain => degree.checked_sub(1).map(|d| (d, weight - shift)),
        ComplexKind::Chain => (degree < nvars).then_some((degree + 1, weight - shift)),
    }
}

fn lowest_weight(kind: ComplexKind, degree: usize) -> i64 {
    match kind {
        ComplexKind::Cochain => -(degree as i64),
        ComplexKind::Chain => degree as i64,
    }
}

/// `dim ker(out) - rank(in)` at `(degree, weight)`. Requires graded mode.
pub fn betti(
    p: &PoissonStructure,
    w: &PoissonModule,
    kind: BettiKind,
    degree: usize,
    weight: i64,
) -> Result<usize, HomologyError> {
    let kind = kind.complex();
    let shift = grading_shift(p, w)?;
    let out = assemble_slice(p, w, kind, degree, weight)?;
    let rank_in = match incoming(kind, p.nvars(), degree, weight, shift) {
        Some((d, wt)) => assemble_slice(p, w, kind, d, wt)?.rank(),
        None => 0,
    };
    Ok(out.domain_basis.len() - out.rank() - rank_in)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiEntry {
    pub degree: usize,
    pub weight: i64,
    pub dimension: usize,
    pub slice_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMetadata {
    pub structure_digest: String,
    pub module_digest: String,
    pub nvars: usize,
    pub rank: usize,
    pub weight_shift: i64,
    pub max_weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub kind: BettiKind,
    pub entries: Vec<BettiEntry>,
    pub metadata: TableMetadata,
}

impl BettiTable {
    pub fn get(&self, degree: usize, weight: i64) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.degree == degree && e.weight == weight)
            .map(|e| e.dimension)
    }

    /// Sum of dimensions in one degree over the computed weights.
    pub fn total(&self, degree: usize) -> usize {
        self.entries.iter().filter(|e| e.degree == degree).map(|e| e.dimension).sum()
    }
}

pub fn structure_digest(p: &PoissonStructure) -> String {
    hex::encode(Sha256::digest(p.pi().to_string().as_bytes()))
}

pub fn module_digest(w: &PoissonModule) -> String {
    let mut text = format!("rank {}\n", w.rank());
    for m in w.brackets() {
        for row in m {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
    }
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// All Betti numbers with `lowest ≤ weight ≤ max_weight` in each degree,
/// where the lowest weight is `-k` for cochains and `q` for chains.
pub fn betti_table(
    p: &PoissonStructure,
    w: &PoissonModule,
    kind: BettiKind,
    max_weight: i64,
) -> Result<BettiTable, HomologyError> {
    let ckind = kind.complex();
    let n = p.nvars();
    let shift = grading_shift(p, w)?;
    let cells: Vec<(usize, i64)> = (0..=n)
        .flat_map(|k| (lowest_weight(ckind, k)..=max_weight).map(move |wt| (k, wt)))
        .collect();
    let mut needed: BTreeSet<(usize, i64)> = cells.iter().copied().collect();
    needed.extend(cells.iter().filter_map(|&(k, wt)| incoming(ckind, n, k, wt, shift)));
    let needed: Vec<(usize, i64)> = needed.into_iter().collect();
    let ranks: BTreeMap<(usize, i64), (usize, usize)> = needed
        .par_iter()
        .map(|&(k, wt)| {
            let slice = assemble_slice(p, w, ckind, k, wt)?;
            Ok(((k, wt), (slice.domain_basis.len(), slice.rank())))
        })
        .collect::<Result<_, HomologyError>>()?;
    let entries = cells
        .iter()
        .map(|&(k, wt)| {
            let (dim, out) = ranks[&(k, wt)];
            let rank_in = incoming(ckind, n, k, wt, shift).map_or(0, |key| ranks[&key].1);
            BettiEntry {
                degree: k,
                weight: wt,
                dimension: dim - out - rank_in,
                slice_dimension: dim,
            }
        })
        .collect();
    Ok(BettiTable {
        kind,
        entries,
        metadata: TableMetadata {
            structure_digest: structure_digest(p),
            module_digest: module_digest(w),
            nvars: n,
            rank: w.rank(),
            weight_shift: shift,
            max_weight,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityConfig {
    /// Cochain weight cap; the chain side is computed up to `max_weight + n`.
    pub max_weight: i64,
    pub trials: usize,
    pub seed: u64,
    pub variable_names: Option<Vec<String>>,
}

impl DualityConfig {
    pub fn new(max_weight: i64, trials: usize, seed: u64) -> Self {
        DualityConfig {
            max_weight,
            trials,
            seed,
            variable_names: None,
        }
    }
}

/// Largest number of failing elements recorded in a report.
pub const MAX_WITNESSES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramFailure {
    pub source: String,
    pub degree: usize,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramCheck {
    pub basis_elements: usize,
    pub random_elements: usize,
    pub failure_count: usize,
    pub failures: Vec<DiagramFailure>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiComparison {
    pub cochain_degree: usize,
    pub cochain_weight: i64,
    pub chain_degree: usize,
    pub chain_weight: i64,
    pub cohomology: usize,
    pub homology: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiCheck {
    pub cohomology: BettiTable,
    pub homology: BettiTable,
    pub comparisons: Vec<BettiComparison>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElwCheck {
    pub matches_twist: bool,
    pub betti: Option<BettiCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub nvars: usize,
    pub rank: usize,
    pub max_weight: i64,
    pub trials: usize,
    pub seed: u64,
    pub modular_field: Vec<String>,
    pub twisting_field: Vec<String>,
    pub diagram: DiagramCheck,
    pub betti: Option<BettiCheck>,
    /// Why the Betti comparison was skipped, if it was.
    pub betti_skipped: Option<String>,
    pub elw: Option<ElwCheck>,
    pub passed: bool,
}

fn compare_tables(cohomology: BettiTable, homology: BettiTable, nvars: usize) -> BettiCheck {
    let comparisons: Vec<BettiComparison> = cohomology
        .entries
        .iter()
        .filter_map(|e| {
            let (cd, cw) = (nvars - e.degree, e.weight + nvars as i64);
            homology.get(cd, cw).map(|h| BettiComparison {
                cochain_degree: e.degree,
                cochain_weight: e.weight,
                chain_degree: cd,
                chain_weight: cw,
                cohomology: e.dimension,
                homology: h,
                equal: e.dimension == h,
            })
        })
        .collect();
    let passed = comparisons.len() == cohomology.entries.len() && comparisons.iter().all(|c| c.equal);
    BettiCheck {
        cohomology,
        homology,
        comparisons,
        passed,
    }
}

struct DiagramRunner<'a> {
    p: &'a PoissonStructure,
    w: &'a PoissonModule,
    w_twisted: &'a PoissonModule,
    mu: &'a VolumeForm,
    names: &'a [String],
}

impl DiagramRunner<'_> {
    /// `None` when `∂^{W_{-φ}} ▲ X = ▲ δ X`.
    fn check(&self, x: &ModuleCochainElement, source: &str) -> Result<Option<DiagramFailure>, HomologyError> {
        let (rank, n, k) = (x.rank(), x.nvars(), x.degree());
        let lhs = chain_differential(self.p, self.w_twisted, &blacktriangle(self.mu, x)?)?;
        let rhs = if k == n {
            ModuleChainElement::zero(rank, n, 0)
        } else {
            blacktriangle(self.mu, &cochain_differential(self.p, self.w, x)?)?
        };
        if lhs.checked_sub(&rhs).map_err(ComplexError::from)?.is_zero() {
            return Ok(None);
        }
        Ok(Some(DiagramFailure {
            source: source.to_string(),
            degree: k,
            input: x.display(self.names).to_string(),
            lhs: lhs.display(self.names).to_string(),
            rhs: rhs.display(self.names).to_string(),
        }))
    }
}

/// Checks the duality between `X^•(W)` and `W_{-φ_μ} ⊗ Ω^{n-•}`.
pub fn verify_duality(
    p: &PoissonStructure,
    w: &PoissonModule,
    mu: &VolumeForm,
    config: &DualityConfig,
) -> Result<DualityReport, HomologyError> {
    let phi = p.modular_vector_field(mu)?;
    verify_duality_with_field(p, w, mu, &phi, config)
}

/// As [`verify_duality`], twisting the chain side by `-φ` for the given
/// Poisson vector field instead of the modular one.
pub fn verify_duality_with_field(
    p: &PoissonStructure,
    w: &PoissonModule,
    mu: &VolumeForm,
    phi: &VectorField,
    config: &DualityConfig,
) -> Result<DualityReport, HomologyError> {
    let n = p.nvars();
    let rank = w.rank();
    let names = config.variable_names.clone().unwrap_or_else(|| default_names(n));
    let modular = p.modular_vector_field(mu)?;
    let w_twisted = w.twist(p, &-phi)?;
    let runner = DiagramRunner {
        p,
        w,
        w_twisted: &w_twisted,
        mu,
        names: &names,
    };

    let basis: Vec<ModuleCochainElement> = (0..=n)
        .flat_map(|k| {
            (-(k as i64)..=config.max_weight).flat_map(move |wt| slice_basis(ComplexKind::Cochain, rank, n, k, wt))
        })
        .map(|b| b.to_cochain(rank, n))
        .collect();
    let mut failures: Vec<DiagramFailure> = basis
        .par_iter()
        .map(|x| runner.check(x, "basis"))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut sampler = Sampler::new(config.seed);
    let randoms: Vec<ModuleCochainElement> = (0..config.trials)
        .map(|_| {
            let k = sampler.range(0, n);
            sampler.cochain_element(rank, n, k, 4)
        })
        .collect();
    failures.extend(
        randoms
            .par_iter()
            .map(|x| runner.check(x, "random"))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten(),
    );
    let failure_count = failures.len();
    failures.truncate(MAX_WITNESSES);
    let diagram = DiagramCheck {
        basis_elements: basis.len(),
        random_elements: randoms.len(),
        failure_count,
        failures,
        passed: failure_count == 0,
    };

    let graded = grading_shift(p, w).and_then(|_| grading_shift(p, &w_twisted));
    let (betti, betti_skipped) = match graded {
        Ok(_) => {
            let cohomology = betti_table(p, w, BettiKind::Cohomology, config.max_weight)?;
            let homology = betti_table(p, &w_twisted, BettiKind::Homology, config.max_weight + n as i64)?;
            (Some(compare_tables(cohomology, homology, n)), None)
        }
        Err(ComplexError::NotGraded(reason)) => (None, Some(reason)),
        Err(e) => return Err(e.into()),
    };

    let elw_module = elw_connection(p, mu)?;
    let elw = if w.brackets() == elw_module.brackets() {
        let trivial = PoissonModule::trivial(1, n);
        let matches_twist = trivial.twist(p, &modular)?.brackets() == elw_module.brackets();
        let elw_betti = match &betti {
            Some(check) => {
                let homology = betti_table(p, &trivial, BettiKind::Homology, config.max_weight + n as i64)?;
                Some(compare_tables(check.cohomology.clone(), homology, n))
            }
            None => None,
        };
        let passed = matches_twist && elw_betti.as_ref().map_or(true, |c| c.passed);
        Some(ElwCheck {
            matches_twist,
            betti: elw_betti,
            passed,
        })
    } else {
        None
    };

    let passed = diagram.passed
        && betti.as_ref().map_or(true, |b| b.passed)
        && elw.as_ref().map_or(true, |e| e.passed);
    let render = |v: &VectorField| -> Vec<String> {
        v.components().iter().map(|c| c.display(&names).to_string()).collect()
    };
    Ok(DualityReport {
        nvars: n,
        rank,
        max_weight: config.max_weight,
        trials: config.trials,
        seed: config.seed,
        modular_field: render(&modular),
        twisting_field: render(phi),
        diagram,
        betti,
        betti_skipped,
        elw,
        passed,
    })
}
