//! End-to-end certification of a 2BGA code and seeded scans over code
//! families.
//!
//! The pipeline runs normalize, decompose, `Ψ`, its kernel lattice, the good
//! basis, the slab partition, the locality check, localization of a logical
//! and the distance bound. Every invariant the theory guarantees is checked
//! on the concrete output; a violation is an [`CertifyError::Internal`] fault.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bound::{two_block_bound, BoundReport};
use crate::cleaning::{localize_logical, LocalizationStep, StabilizerCodeView};
use crate::code::{
    build_two_block, decompose, normalize, CodeParams, Decomposition, SearchLimits, SectorDistance, Strategy,
    TwoBlockCode,
};
use crate::embedding::{build_psi, qubit_layout, verify_locality, CenterMode};
use crate::group::{FiniteAbelianGroup, GroupAlgebraElement};
use crate::lattice::{good_basis, IntegerLattice, ParallelotopePartition};
use crate::realnum::{self, ExactRational, REPORT_BITS};

/// Version of the JSON and CSV layouts produced here.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    /// Malformed or unsupported input, naming the offending field.
    #[error("{field}: {message}")]
    Input { field: String, message: String },
    /// A guaranteed invariant failed on the computed objects.
    #[error("internal consistency fault: {0}")]
    Internal(String),
}

fn input(field: impl Into<String>, message: impl ToString) -> CertifyError {
    CertifyError::Input { field: field.into(), message: message.to_string() }
}

fn internal(message: impl Into<String>) -> CertifyError {
    CertifyError::Internal(message.into())
}

/// A code as read from JSON: `{"group": [3, 3], "a": [[0,0],[1,0]], "b": [[0,0],[0,1]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecFile {
    pub group: Vec<i64>,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_weight: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_dim_cap: Option<usize>,
}

impl CodeSpecFile {
    pub fn from_code(code: &TwoBlockCode) -> Self {
        let exps = |x: &GroupAlgebraElement| -> Vec<Vec<i64>> {
            x.exponent_support().into_iter().map(|e| e.into_iter().map(i64::from).collect()).collect()
        };
        CodeSpecFile {
            group: code.group().cyclic_orders().iter().map(|&d| i64::from(d)).collect(),
            a: exps(code.a()),
            b: exps(code.b()),
            max_weight: None,
            kernel_dim_cap: None,
        }
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup, CertifyError> {
        FiniteAbelianGroup::new(&self.group).map_err(|e| input("group", e))
    }

    pub fn build(&self) -> Result<TwoBlockCode, CertifyError> {
        let g = self.group()?;
        let a = element(&g, &self.a, "a")?;
        let b = element(&g, &self.b, "b")?;
        build_two_block(&a, &b).map_err(|e| input("a, b", e))
    }

    /// Defaults overridden by the file's own limits.
    pub fn limits(&self, base: SearchLimits) -> SearchLimits {
        SearchLimits {
            max_weight: self.max_weight.unwrap_or(base.max_weight),
            kernel_dim_cap: self.kernel_dim_cap.unwrap_or(base.kernel_dim_cap),
            ..base
        }
    }
}

fn element(g: &FiniteAbelianGroup, support: &[Vec<i64>], name: &str) -> Result<GroupAlgebraElement, CertifyError> {
    let mut indices = Vec::with_capacity(support.len());
    for (i, e) in support.iter().enumerate() {
        let field = format!("{name}[{i}]");
        if e.len() != g.rank() {
            return Err(input(field, format!("exponent vector has length {}, the group has rank {}", e.len(), g.rank())));
        }
        let idx = g.index_of(e).map_err(|err| input(field.clone(), err))?;
        if indices.contains(&idx) {
            return Err(input(field, "repeated group element; coefficients are in F₂, so list each element once"));
        }
        indices.push(idx);
    }
    GroupAlgebraElement::from_support(g, indices).map_err(|e| input(name, e))
}

/// Parameters of the full code in the flat layout printed by `params`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsReport {
    pub format_version: u32,
    #[serde(rename = "N")]
    pub n_qubits: usize,
    pub k: usize,
    /// `null` unless resolved exactly.
    pub d: Option<usize>,
    pub d_lower: Option<usize>,
    pub d_upper: Option<usize>,
    #[serde(rename = "d_X")]
    pub d_x: SectorDistance,
    #[serde(rename = "d_Z")]
    pub d_z: SectorDistance,
    pub decomposition_index: usize,
    pub limits: LimitsRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsRecord {
    pub max_weight: usize,
    pub kernel_dim_cap: usize,
}

impl From<&SearchLimits> for LimitsRecord {
    fn from(l: &SearchLimits) -> Self {
        LimitsRecord { max_weight: l.max_weight, kernel_dim_cap: l.kernel_dim_cap }
    }
}

fn sector_upper(s: &SectorDistance) -> Option<usize> {
    s.upper()
}

impl ParamsReport {
    fn new(params: &CodeParams, index: usize, limits: &SearchLimits) -> Self {
        let upper = match (sector_upper(&params.d_x), sector_upper(&params.d_z)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        ParamsReport {
            format_version: FORMAT_VERSION,
            n_qubits: params.n_qubits,
            k: params.k,
            d: params.d.exact(),
            d_lower: params.d.lower(),
            d_upper: upper,
            d_x: params.d_x.clone(),
            d_z: params.d_z.clone(),
            decomposition_index: index,
            limits: limits.into(),
        }
    }
}

/// The normalized code and its decomposition, or `None` when `a` or `b` is
/// zero and no normalization exists.
fn reduce(code: &TwoBlockCode) -> Result<Option<(TwoBlockCode, Decomposition)>, CertifyError> {
    let Ok(norm) = normalize(code.a(), code.b()) else {
        return Ok(None);
    };
    let normalized = build_two_block(&norm.a, &norm.b).map_err(|e| internal(e.to_string()))?;
    let dec = decompose(&normalized).map_err(|e| internal(e.to_string()))?;
    Ok(Some((normalized, dec)))
}

/// Full-code parameters from one component: `N` and `k` scale with the
/// number of components, the distance is that of a component. Witnesses are
/// mapped onto the first component's qubits of the normalized code.
fn lift(params: &CodeParams, group: &FiniteAbelianGroup, dec: &Decomposition) -> CodeParams {
    let map = dec.qubit_map(group, 0);
    let lift_sector = |s: &SectorDistance| match s {
        SectorDistance::Exact { d, method, witness } => {
            let mut w: Vec<usize> = witness.iter().map(|&q| map[q]).collect();
            w.sort_unstable();
            SectorDistance::Exact { d: *d, method: *method, witness: w }
        }
        other => other.clone(),
    };
    let index = dec.index();
    CodeParams::new(params.n_qubits * index, params.k * index, lift_sector(&params.d_x), lift_sector(&params.d_z))
}

/// `[[N, k, d]]` of a 2BGA code, searching only on one component of the
/// normalized code.
pub fn code_params(code: &TwoBlockCode, strategy: Strategy, limits: &SearchLimits) -> Result<ParamsReport, CertifyError> {
    match reduce(code)? {
        Some((normalized, dec)) => {
            let params = dec.component.parameters(strategy, limits);
            Ok(ParamsReport::new(&lift(&params, normalized.group(), &dec), dec.index(), limits))
        }
        None => Ok(ParamsReport::new(&code.parameters(strategy, limits), 1, limits)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingRecord {
    #[serde(rename = "D")]
    pub dim: usize,
    /// Rows span `Λ = ker Ψ`.
    pub lattice_basis: Vec<Vec<String>>,
    pub lattice_hnf: Vec<Vec<String>>,
    pub locality_radius_sq: ExactRational,
    pub locality_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionRecord {
    pub mu: u64,
    pub lambda_sq: ExactRational,
    pub last_len_sq: ExactRational,
    pub hyperplane_vol_sq: ExactRational,
    pub good_basis: Vec<Vec<String>>,
    pub slab_counts: Vec<u64>,
    /// Rounded-up decimal of `(n/ℓ)(λ + √D)`.
    pub integral_point_bound: String,
    /// Good-basis checks, slab width, and the per-slab point bound.
    pub checks: PartitionChecks,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PartitionChecks {
    pub volume_factorization: bool,
    pub hyperplane_bound: bool,
    pub last_length_bound: bool,
    pub width: bool,
    pub integral_points: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizedRecord {
    pub slab: usize,
    pub weight: usize,
    pub slab_population: u64,
    pub weight_limit: u64,
    pub step: LocalizationStep,
    pub support: Vec<usize>,
    pub x: String,
    pub z: String,
    /// Distance bound value the weight is compared with.
    pub bound_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    /// Exponents of the coset representative in the original group.
    pub coset_representative: Vec<u32>,
    /// Original qubit indices of the component's qubits.
    pub qubits: Vec<usize>,
    pub group: Vec<u32>,
    pub n: usize,
    pub weight: usize,
    pub params: ParamsReport,
    pub embedding: Option<EmbeddingRecord>,
    pub bound: Option<BoundReport>,
    pub partition: Option<PartitionRecord>,
    pub localized: Option<LocalizedRecord>,
    /// Why later stages were skipped.
    pub notes: Vec<String>,
    pub verdicts: Verdicts,
}

/// `None` means the comparison could not be made.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Verdicts {
    pub locality: Option<bool>,
    pub applicable: Option<bool>,
    pub weight_within_slab_limit: Option<bool>,
    pub slab_limit_within_point_bound: Option<bool>,
    pub weight_within_bound: Option<bool>,
    pub distance_within_weight: Option<bool>,
    pub distance_within_bound: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub format_version: u32,
    pub input: CodeSpecFile,
    pub params: ParamsReport,
    /// `(a, b)` after translating both to contain the identity.
    pub normalized: Option<CodeSpecFile>,
    pub decomposition_index: usize,
    pub components: Vec<ComponentReport>,
}

/// Runs the full pipeline. Decomposable codes produce one report per coset
/// of the support subgroup; the components are identical codes, so the work
/// is done once.
pub fn certify(spec: &CodeSpecFile, limits: &SearchLimits) -> Result<CertificateReport, CertifyError> {
    let code = spec.build()?;
    let limits = spec.limits(*limits);
    let Some((normalized, dec)) = reduce(&code)? else {
        let params = ParamsReport::new(&code.parameters(Strategy::Auto, &limits), 1, &limits);
        return Ok(CertificateReport {
            format_version: FORMAT_VERSION,
            input: spec.clone(),
            params,
            normalized: None,
            decomposition_index: 1,
            components: Vec::new(),
        });
    };
    let comp_params = dec.component.parameters(Strategy::Auto, &limits);
    let component = certify_component_with(&dec.component, &comp_params, &limits)?;
    let params = ParamsReport::new(&lift(&comp_params, normalized.group(), &dec), dec.index(), &limits);
    let g = normalized.group();
    let components = (0..dec.index())
        .map(|c| ComponentReport {
            coset_representative: g.exponents(dec.coset_representatives[c]),
            qubits: dec.qubit_map(g, c),
            ..component.clone()
        })
        .collect();
    Ok(CertificateReport {
        format_version: FORMAT_VERSION,
        input: spec.clone(),
        params,
        normalized: Some(CodeSpecFile::from_code(&normalized)),
        decomposition_index: dec.index(),
        components,
    })
}

fn strings(m: &[Vec<BigInt>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// Certifies a normalized, indecomposable code.
pub fn certify_component(code: &TwoBlockCode, limits: &SearchLimits) -> Result<ComponentReport, CertifyError> {
    certify_component_with(code, &code.parameters(Strategy::Auto, limits), limits)
}

fn certify_component_with(
    code: &TwoBlockCode,
    params: &CodeParams,
    limits: &SearchLimits,
) -> Result<ComponentReport, CertifyError> {
    let mut report = ComponentReport {
        coset_representative: vec![0; code.group().rank()],
        qubits: (0..2 * code.n()).collect(),
        group: code.group().cyclic_orders().to_vec(),
        n: code.n(),
        weight: code.weight(),
        params: ParamsReport::new(params, 1, limits),
        embedding: None,
        bound: None,
        partition: None,
        localized: None,
        notes: Vec::new(),
        verdicts: Verdicts::default(),
    };
    let psi = build_psi(code.a(), code.b()).map_err(|e| internal(e.to_string()))?;
    if psi.dim() == 0 {
        report.notes.push("a = b = e: D = 0, there is no lattice embedding".into());
        return Ok(report);
    }
    if !psi.is_surjective() {
        return Err(internal("Ψ is not surjective on an indecomposable code"));
    }
    let layout = qubit_layout(code, &psi).map_err(|e| internal(e.to_string()))?;
    if layout.lattice.det() != &BigInt::from(code.n()) {
        return Err(internal("kernel lattice determinant differs from |G|"));
    }
    let rho = BigRational::one();
    let locality =
        verify_locality(code.css(), &layout, &rho, CenterMode::RowVertex).map_err(|e| internal(e.to_string()))?;
    report.verdicts.locality = Some(locality.holds);
    if !locality.holds {
        return Err(internal(format!("locality fails: radius² = {}", realnum::format_rational(&locality.max_radius_sq.0))));
    }
    report.embedding = Some(EmbeddingRecord {
        dim: psi.dim(),
        lattice_basis: strings(layout.lattice.basis()),
        lattice_hnf: strings(layout.lattice.hnf()),
        locality_radius_sq: locality.max_radius_sq,
        locality_holds: locality.holds,
    });

    let bound = two_block_bound(code).map_err(|e| internal(e.to_string()))?;
    report.verdicts.applicable = Some(bound.applicable);
    let d = params.d.exact();
    if let Some(d) = d {
        if bound.applicable {
            let ok = bound.admits(d as u64);
            report.verdicts.distance_within_bound = Some(ok);
            if !ok {
                return Err(internal(format!("d = {d} exceeds the bound {}", bound.bound_value)));
            }
        }
    }
    if !bound.applicable {
        report.notes.push(format!(
            "not applicable: n² = {} < (8ρ)^(2D)·γ_D^D = {}",
            realnum::format_rational(&bound.applicability.n_squared.0),
            realnum::format_rational(&bound.applicability.threshold.0)
        ));
        report.bound = Some(bound);
        return Ok(report);
    }

    let basis = good_basis(&layout.lattice).map_err(|e| internal(e.to_string()))?;
    let gb_checks = basis.checks();
    let partition = ParallelotopePartition::new(basis, rho).map_err(|e| internal(e.to_string()))?;
    let counts = partition.slab_counts().map_err(|e| internal(e.to_string()))?;
    if counts.iter().sum::<u64>() != code.n() as u64 {
        return Err(internal("slab counts do not sum to n"));
    }
    let (_, point_hi) = partition.integral_point_bound_bracket(REPORT_BITS);
    let checks = PartitionChecks {
        volume_factorization: gb_checks.volume_factorization,
        hyperplane_bound: gb_checks.hyperplane_bound,
        last_length_bound: gb_checks.last_length_bound,
        width: partition.width_checks(),
        integral_points: counts.iter().all(|&c| partition.integral_point_bound_holds(c)),
    };
    let pb = partition.basis();
    report.partition = Some(PartitionRecord {
        mu: partition.mu(),
        lambda_sq: ExactRational(partition.lambda_sq().clone()),
        last_len_sq: ExactRational(pb.last_len_sq().clone()),
        hyperplane_vol_sq: ExactRational(pb.hyperplane_vol_sq().clone()),
        good_basis: strings(pb.vectors()),
        slab_counts: counts.clone(),
        integral_point_bound: realnum::decimal_up(&point_hi, 20),
        checks,
    });
    if !(checks.volume_factorization && checks.hyperplane_bound && checks.last_length_bound) {
        return Err(internal("good basis violates its guarantees"));
    }
    if !checks.width {
        return Err(internal("slab width outside [2ρ, 4ρ)"));
    }
    if !checks.integral_points {
        return Err(internal("a slab holds more points than the integral-point bound"));
    }

    if params.k == 0 {
        report.notes.push("k = 0: there is no logical operator to localize".into());
        report.bound = Some(bound);
        return Ok(report);
    }
    let view = StabilizerCodeView::from_css(code.css());
    let loc = localize_logical(&view, &partition, &layout).map_err(|e| internal(e.to_string()))?;
    let m = BigRational::from_integer(BigInt::from(layout.m));
    let limit = BigRational::from_integer(BigInt::from(loc.weight_limit));
    let v = &mut report.verdicts;
    v.weight_within_slab_limit = Some(loc.weight as u64 <= loc.weight_limit);
    v.slab_limit_within_point_bound = Some(limit <= m * point_hi);
    v.weight_within_bound = Some(bound.admits(loc.weight as u64));
    v.distance_within_weight = d.map(|d| d <= loc.weight);
    for (name, ok) in [
        ("weight ≤ m·slab count", v.weight_within_slab_limit),
        ("m·slab count ≤ m·integral-point bound", v.slab_limit_within_point_bound),
        ("weight ≤ bound", v.weight_within_bound),
        ("d ≤ weight", v.distance_within_weight),
    ] {
        if ok == Some(false) {
            return Err(internal(format!("localized logical violates {name}")));
        }
    }
    report.localized = Some(LocalizedRecord {
        slab: loc.slab,
        weight: loc.weight,
        slab_population: loc.slab_population,
        weight_limit: loc.weight_limit,
        step: loc.step,
        support: loc.operator.support(),
        x: loc.operator.x.to_bit_string(),
        z: loc.operator.z.to_bit_string(),
        bound_value: bound.bound_value,
    });
    report.bound = Some(bound);
    Ok(report)
}

/// Good basis and partition of a raw lattice, as printed by `lattice`.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub format_version: u32,
    pub basis: Vec<Vec<String>>,
    pub hnf: Vec<Vec<String>>,
    pub det: String,
    pub good_basis: Vec<Vec<String>>,
    pub dual_vector: Vec<String>,
    pub hyperplane_vol_sq: ExactRational,
    pub last_len_sq: ExactRational,
    pub good_basis_checks: [bool; 3],
    pub rho: ExactRational,
    pub applicable: bool,
    /// Present whenever `μ ≥ 2`, even when the bound is not applicable.
    pub partition: Option<LatticePartition>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticePartition {
    pub mu: u64,
    pub lambda_sq: ExactRational,
    pub width_ok: bool,
    pub slab_counts: Vec<u64>,
    pub integral_point_bound: String,
    pub integral_points_ok: bool,
}

pub fn lattice_report(basis: &[Vec<i64>], rho: &BigRational) -> Result<LatticeReport, CertifyError> {
    let lattice = IntegerLattice::new(basis).map_err(|e| input("basis", e))?;
    let gb = good_basis(&lattice).map_err(|e| input("basis", e))?;
    let c = gb.checks();
    let applicable = crate::bound::is_applicable(lattice.det(), rho, lattice.dim());
    let mut notes = Vec::new();
    let partition = match ParallelotopePartition::new_unchecked(gb.clone(), rho.clone()) {
        Ok(p) => {
            let counts = p.slab_counts().map_err(|e| input("basis", e))?;
            let (_, hi) = p.integral_point_bound_bracket(REPORT_BITS);
            Some(LatticePartition {
                mu: p.mu(),
                lambda_sq: ExactRational(p.lambda_sq().clone()),
                width_ok: p.width_checks(),
                integral_points_ok: counts.iter().all(|&k| p.integral_point_bound_holds(k)),
                slab_counts: counts,
                integral_point_bound: realnum::decimal_up(&hi, 20),
            })
        }
        Err(e) => {
            notes.push(format!("no partition: {e}"));
            None
        }
    };
    if !applicable {
        notes.push("n² < (8ρ)^(2D)·γ_D^D: the partition guarantees do not apply".into());
    }
    Ok(LatticeReport {
        format_version: FORMAT_VERSION,
        basis: strings(lattice.basis()),
        hnf: strings(lattice.hnf()),
        det: lattice.det().to_string(),
        good_basis: strings(gb.vectors()),
        dual_vector: gb.dual_vector().iter().map(|x| x.to_string()).collect(),
        hyperplane_vol_sq: ExactRational(gb.hyperplane_vol_sq().clone()),
        last_len_sq: ExactRational(gb.last_len_sq().clone()),
        good_basis_checks: [c.volume_factorization, c.hyperplane_bound, c.last_length_bound],
        rho: ExactRational(rho.clone()),
        applicable,
        partition,
        notes,
    })
}

/// A family of random codes: groups `ℤ_{d₁} × … × ℤ_{d_r}` with each `dᵢ`
/// uniform in `[min_order, max_order]`, and `a`, `b` containing `e` with
/// `|a| + |b| = weight`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub rank: usize,
    pub min_order: i64,
    pub max_order: i64,
    /// Groups larger than this are resampled.
    #[serde(default)]
    pub max_n: Option<usize>,
    pub weight: usize,
    pub count: usize,
    pub seed: u64,
}

impl ScanSpec {
    fn validate(&self) -> Result<(), CertifyError> {
        if self.rank == 0 {
            return Err(input("rank", "must be at least 1"));
        }
        if self.min_order < 2 || self.max_order < self.min_order {
            return Err(input("min_order", "need 2 ≤ min_order ≤ max_order"));
        }
        if self.weight < 2 {
            return Err(input("weight", "must be at least 2"));
        }
        if let Some(m) = self.max_n {
            if (self.min_order as usize).saturating_pow(self.rank as u32) > m {
                return Err(input("max_n", "no group in range is this small"));
            }
        }
        Ok(())
    }
}

/// CSV header of [`ScanRow`], used when a scan produces no rows.
pub const SCAN_COLUMNS: [&str; 23] = [
    "format_version",
    "index",
    "group",
    "a",
    "b",
    "w",
    "D",
    "n",
    "N",
    "k",
    "d_x",
    "d_z",
    "d",
    "d_lower",
    "status",
    "decomposition_index",
    "component_n",
    "locality_radius_sq",
    "locality_holds",
    "applicable",
    "bound_value",
    "d_within_bound",
    "note",
];

/// One scanned code; flat so it serializes to a CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub format_version: u32,
    pub index: usize,
    /// Group orders joined by `x`, e.g. `3x5`.
    pub group: String,
    /// Exponent vectors of the supports, e.g. `(0,0) (1,0)`.
    pub a: String,
    pub b: String,
    pub w: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    /// `|G|`.
    pub n: usize,
    #[serde(rename = "N")]
    pub n_qubits: usize,
    pub k: usize,
    pub d_x: Option<usize>,
    pub d_z: Option<usize>,
    pub d: Option<usize>,
    pub d_lower: Option<usize>,
    /// `exact`, `bounded`, `undefined` or `error`.
    pub status: String,
    pub decomposition_index: usize,
    /// Order of the component group the bound refers to.
    pub component_n: usize,
    pub locality_radius_sq: Option<String>,
    pub locality_holds: Option<bool>,
    pub applicable: Option<bool>,
    pub bound_value: Option<f64>,
    /// `d ≤ bound` for applicable codes with resolved `d`.
    pub d_within_bound: Option<bool>,
    pub note: String,
}

fn fmt_support(g: &FiniteAbelianGroup, x: &GroupAlgebraElement) -> String {
    x.support()
        .iter()
        .map(|&s| {
            let e: Vec<String> = g.exponents(s).iter().map(|v| v.to_string()).collect();
            format!("({})", e.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Draws the family's codes; duplicates are rejected so every row is a
/// distinct code. Stops early only if the family is exhausted.
pub fn sample_codes(spec: &ScanSpec) -> Result<Vec<TwoBlockCode>, CertifyError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while out.len() < spec.count && attempts < 1000 * spec.count.max(1) {
        attempts += 1;
        let orders: Vec<i64> = (0..spec.rank).map(|_| rng.random_range(spec.min_order..=spec.max_order)).collect();
        let g = FiniteAbelianGroup::new(&orders).map_err(|e| input("max_order", e))?;
        let n = g.order();
        if spec.max_n.is_some_and(|m| n > m) {
            continue;
        }
        let wa = rng.random_range(1..spec.weight);
        let wb = spec.weight - wa;
        if wa > n || wb > n {
            continue;
        }
        let pick = |rng: &mut ChaCha8Rng, w: usize| {
            let rest = sample(rng, n - 1, w - 1).into_iter().map(|i| i + 1);
            GroupAlgebraElement::from_support(&g, std::iter::once(0).chain(rest)).expect("indices in range")
        };
        let a = pick(&mut rng, wa);
        let b = pick(&mut rng, wb);
        let key = (orders, a.support().clone(), b.support().clone());
        if !seen.insert(key) {
            continue;
        }
        out.push(build_two_block(&a, &b).map_err(|e| internal(e.to_string()))?);
    }
    Ok(out)
}

/// Scans a family in parallel; rows come back in sampling order.
pub fn scan(spec: &ScanSpec, limits: &SearchLimits) -> Result<Vec<ScanRow>, CertifyError> {
    let codes = sample_codes(spec)?;
    codes.par_iter().enumerate().map(|(i, code)| scan_row(i, code, limits)).collect()
}

/// One row; search-limit and lattice-budget failures are recorded in the row.
/// Internal faults abort the scan.
pub fn scan_row(index: usize, code: &TwoBlockCode, limits: &SearchLimits) -> Result<ScanRow, CertifyError> {
    let g = code.group();
    let mut row = ScanRow {
        format_version: FORMAT_VERSION,
        index,
        group: g.cyclic_orders().iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"),
        a: fmt_support(g, code.a()),
        b: fmt_support(g, code.b()),
        w: code.weight(),
        dim: code.weight().saturating_sub(2),
        n: code.n(),
        n_qubits: 2 * code.n(),
        k: 0,
        d_x: None,
        d_z: None,
        d: None,
        d_lower: None,
        status: String::new(),
        decomposition_index: 1,
        component_n: code.n(),
        locality_radius_sq: None,
        locality_holds: None,
        applicable: None,
        bound_value: None,
        d_within_bound: None,
        note: String::new(),
    };
    let Some((normalized, dec)) = reduce(code)? else {
        row.status = "error".into();
        row.note = "a or b is zero".into();
        return Ok(row);
    };
    let comp = &dec.component;
    let params = lift(&comp.parameters(Strategy::Auto, limits), normalized.group(), &dec);
    row.k = params.k;
    row.d_x = params.d_x.exact();
    row.d_z = params.d_z.exact();
    row.d = params.d.exact();
    row.d_lower = params.d.lower();
    row.status = match params.d {
        crate::code::Distance::Exact { .. } => "exact",
        crate::code::Distance::Bounded { .. } => "bounded",
        crate::code::Distance::Undefined => "undefined",
    }
    .into();
    row.decomposition_index = dec.index();
    row.component_n = comp.n();

    let psi = build_psi(comp.a(), comp.b()).map_err(|e| internal(e.to_string()))?;
    if psi.dim() == 0 {
        row.note = "D = 0".into();
        return Ok(row);
    }
    let layout = qubit_layout(comp, &psi).map_err(|e| internal(e.to_string()))?;
    match verify_locality(comp.css(), &layout, &BigRational::one(), CenterMode::RowVertex) {
        Ok(loc) => {
            row.locality_radius_sq = Some(realnum::format_rational(&loc.max_radius_sq.0));
            row.locality_holds = Some(loc.holds);
        }
        Err(e) => row.note = format!("locality: {e}"),
    }
    let bound = two_block_bound(comp).map_err(|e| internal(e.to_string()))?;
    row.applicable = Some(bound.applicable);
    row.bound_value = Some(bound.bound_value);
    if let (true, Some(d)) = (bound.applicable, row.d) {
        row.d_within_bound = Some(bound.admits(d as u64));
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toric_spec(l: i64) -> CodeSpecFile {
        CodeSpecFile {
            group: vec![l, l],
            a: vec![vec![0, 0], vec![1, 0]],
            b: vec![vec![0, 0], vec![0, 1]],
            max_weight: None,
            kernel_dim_cap: None,
        }
    }

    #[test]
    fn params_of_small_toric() {
        let p = code_params(&toric_spec(3).build().unwrap(), Strategy::Auto, &SearchLimits::default()).unwrap();
        assert_eq!((p.n_qubits, p.k, p.d), (18, 2, Some(3)));
    }

    #[test]
    fn params_of_trivial_code() {
        let spec = CodeSpecFile { group: vec![5], a: vec![vec![0]], b: vec![vec![0]], max_weight: None, kernel_dim_cap: None };
        let p = code_params(&spec.build().unwrap(), Strategy::Auto, &SearchLimits::default()).unwrap();
        assert_eq!((p.n_qubits, p.k, p.d), (10, 0, None));
        assert_eq!(p.decomposition_index, 5);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let mut spec = toric_spec(3);
        spec.a[1] = vec![1];
        let err = spec.build().unwrap_err();
        assert!(matches!(&err, CertifyError::Input { field, .. } if field == "a[1]"), "{err}");
        let mut spec = toric_spec(3);
        spec.b[1] = vec![0, 7];
        assert!(matches!(spec.build().unwrap_err(), CertifyError::Input { field, .. } if field == "b[1]"));
        let mut spec = toric_spec(3);
        spec.group = vec![3, 1];
        assert!(matches!(spec.build().unwrap_err(), CertifyError::Input { field, .. } if field == "group"));
    }

    #[test]
    fn certify_toric_nine() {
        let r = certify(&toric_spec(9), &SearchLimits::default()).unwrap();
        assert_eq!(r.decomposition_index, 1);
        let c = &r.components[0];
        let loc = c.localized.as_ref().unwrap();
        let max_count = *c.partition.as_ref().unwrap().slab_counts.iter().max().unwrap();
        assert!(loc.weight as u64 <= 2 * max_count);
        let bound = c.bound.as_ref().unwrap();
        assert!((bound.bound_value - 104.72).abs() < 0.01);
        assert!(loc.weight >= 9 && (loc.weight as f64) <= bound.bound_value);
        assert_eq!(r.params.d, Some(9));
    }

    #[test]
    fn certify_small_toric_is_not_applicable() {
        let r = certify(&toric_spec(3), &SearchLimits::default()).unwrap();
        let c = &r.components[0];
        assert_eq!(c.verdicts.applicable, Some(false));
        assert!(c.partition.is_none() && c.localized.is_none());
        assert_eq!(r.params.d, Some(3));
        assert!(c.notes.iter().any(|n| n.starts_with("not applicable")));
    }

    #[test]
    fn certify_decomposable() {
        let spec = CodeSpecFile { group: vec![4], a: vec![vec![0], vec![2]], b: vec![vec![0], vec![2]], max_weight: None, kernel_dim_cap: None };
        let r = certify(&spec, &SearchLimits::default()).unwrap();
        assert_eq!(r.components.len(), 2);
        assert_eq!(r.components[0].n, 2);
        assert_ne!(r.components[0].qubits, r.components[1].qubits);
    }

    #[test]
    fn scan_is_deterministic_and_sound() {
        let spec = ScanSpec { rank: 1, min_order: 2, max_order: 30, max_n: None, weight: 4, count: 25, seed: 7 };
        let a = scan(&spec, &SearchLimits::default()).unwrap();
        let b = scan(&spec, &SearchLimits::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 25);
        for r in &a {
            assert_eq!(r.k % 2, 0);
            if let (Some(x), Some(z)) = (r.d_x, r.d_z) {
                assert_eq!(x, z);
            }
            assert_ne!(r.locality_holds, Some(false));
            assert_ne!(r.d_within_bound, Some(false));
        }
        let empty = ScanSpec { count: 0, ..spec };
        assert!(scan(&empty, &SearchLimits::default()).unwrap().is_empty());
    }
}
