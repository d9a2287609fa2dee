use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::entanglement::{density_entropies, entropies, ground_state_exact, locc_reduction_check, SchmidtDecomposition, Side};
use crate::error::{Error, Result};
use crate::hilbert::{check_ring_size, full_dimension, MAX_FULL_DIM, MAX_RING, MIN_RING};
use crate::spectral::{eig_auto, fermion_amplitude, hastings_bound_log2, HastingsBoundParams, SolverConfig};
use crate::symmetry::{build_effective, necklace_classes, ClassSignature, MAX_ENUM_RING};

use super::checks::{
    brick_check, class_spectrum_deviation, embedding_isometry, low_spectrum, other_sector_bound, sector_leak,
    sparse_overlap, FULL_SPACE_MAX_N, HEADLINE_RING_CAP,
};
use super::config::{ClassSelector, Command, RunConfig};
use super::table::{cell, num, Table};
use crate::entanglement::ground_state_components;

/// Rows of one command and how many of them failed a check or errored.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub table: Table,
    pub failures: usize,
}

pub fn run(cfg: &RunConfig) -> Result<CommandOutput> {
    match cfg.command {
        Command::Verify => cmd_verify(cfg),
        Command::GapScan => cmd_gap_scan(cfg),
        Command::EntropyScan => cmd_entropy_scan(cfg),
        Command::Effective => cmd_effective(cfg),
        Command::Necklaces => cmd_necklaces(cfg),
        Command::Fermion => cmd_fermion(cfg),
    }
}

/// Effective-class commands never encode full states, so only the lower
/// limit applies.
fn check_scan_size(n: usize) -> Result<()> {
    if n < MIN_RING {
        return Err(Error::InvalidInput(format!("ring size {n} below minimum {MIN_RING}")));
    }
    Ok(())
}

/// Space-separated shifts, empty for the empty set.
fn join_set(set: &BTreeSet<usize>) -> String {
    set.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

fn status_of(err: &Error) -> Value {
    Value::String(format!("error: {err}"))
}

/// `(check, value, threshold, residual, pass)` for one verification item.
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    residual: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, residual: f64::NAN, pass: value <= threshold }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, residual: f64::NAN, pass: value >= threshold }
    }

    fn with_residual(mut self, r: f64) -> Self {
        self.residual = r;
        self
    }
}

const VERIFY_COLUMNS: [&str; 7] = ["N", "check", "value", "threshold", "residual", "pass", "status"];

/// Energy, overlap and isometry thresholds of the verification suite.
const ENERGY_TOL: f64 = 1e-10;
const OVERLAP_TOL: f64 = 1e-9;
const ISOMETRY_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-9;
const ENTROPY_TOL: f64 = 1e-9;
const LOCC_TOL: f64 = 1e-12;
const BRICK_TOL: f64 = 1e-10;

fn verify_one(cfg: &RunConfig, n: usize) -> Vec<std::result::Result<Check, (&'static str, Error)>> {
    let params = cfg.params(n);
    let solver = &cfg.solver;
    let mut out = Vec::new();
    match low_spectrum(&params, solver) {
        Ok(low) => {
            out.push(Ok(Check::at_most("ground_energy", low.lambda0.abs(), ENERGY_TOL).with_residual(low.ground_residual)));
            out.push(Ok(Check::at_least("nondegenerate", low.gap(), 10.0 * solver.tol).with_residual(low.lambda1_residual)));
            let overlap = ground_state_components(n).map(|g| sparse_overlap(&g, &low.ground_vector));
            out.push(overlap.map(|o| Check::at_least("ground_overlap", o, 1.0 - OVERLAP_TOL)).map_err(|e| ("ground_overlap", e)));
        }
        Err(e) => out.push(Err(("ground_energy", e))),
    }
    out.push(sector_leak(&params).map(|x| Check::at_most("sector_blocks", x, 0.0)).map_err(|e| ("sector_blocks", e)));
    match embedding_isometry(&params) {
        Ok(r) => {
            out.push(Ok(Check::at_most("embedding_gram", r.gram_deviation, ISOMETRY_TOL)));
            out.push(Ok(Check::at_most("embedding_elements", r.element_deviation, ISOMETRY_TOL)));
            out.push(Ok(Check::at_most("embedding_invariance", r.leak, ISOMETRY_TOL)));
        }
        Err(e) => out.push(Err(("embedding_gram", e))),
    }
    if n <= 4 {
        out.push(
            class_spectrum_deviation(&params, solver)
                .map(|d| Check::at_most("class_spectra", d, SPECTRUM_TOL))
                .map_err(|e| ("class_spectra", e)),
        );
    }
    match entropy_pair(n) {
        Ok((left, right)) => {
            out.push(Ok(Check::at_least("entropy_lower", left, (n - 1) as f64 - ENTROPY_TOL)));
            out.push(Ok(Check::at_most("entropy_ceiling", left, n as f64 * 3f64.log2())));
            out.push(Ok(Check::at_most("entropy_symmetry", (left - right).abs(), ENTROPY_TOL)));
        }
        Err(e) => out.push(Err(("entropy_lower", e))),
    }
    match locc_reduction_check(n) {
        Ok(r) => {
            out.push(Ok(Check::at_most("locc_uniform", r.max_probability_deviation, LOCC_TOL)));
            out.push(Ok(Check::at_most("locc_fidelity", (1.0 - r.min_fidelity).abs(), LOCC_TOL)));
        }
        Err(e) => out.push(Err(("locc_uniform", e))),
    }
    if n % 2 == 0 {
        match brick_check(&params, solver) {
            Ok(r) => {
                out.push(Ok(Check::at_most("brick_span", r.max_span as f64, 1.0)));
                out.push(Ok(Check::at_most("brick_elements", r.element_deviation, BRICK_TOL)));
                out.push(Ok(Check::at_most("brick_spectrum", r.spectrum_deviation, BRICK_TOL)));
            }
            Err(e) => out.push(Err(("brick_span", e))),
        }
    }
    out
}

/// von Neumann entropies of both rings in `|g⟩`, in bits.
pub fn entropy_pair(n: usize) -> Result<(f64, f64)> {
    let g = ground_state_exact(n)?;
    let schmidt = SchmidtDecomposition::new(n, &g)?;
    let left = entropies(&schmidt, &[])?.von_neumann_bits;
    let right = density_entropies(&schmidt.reduced_density(Side::Right), &[])?.von_neumann_bits;
    Ok((left, right))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutput> {
    for &n in &cfg.sizes.0 {
        check_ring_size(n)?;
        if n > FULL_SPACE_MAX_N {
            return Err(Error::Capacity(format!(
                "verify runs full-space checks up to N = {FULL_SPACE_MAX_N}; for N = {n} use \
                 `ringgap gap-scan --n {n}` (effective classes) or `ringgap effective --n {n} --p <p> --bad <r>`"
            )));
        }
    }
    let mut table = Table::new(&VERIFY_COLUMNS);
    let mut failures = 0;
    for &n in &cfg.sizes.0 {
        for item in verify_one(cfg, n) {
            let row = match item {
                Ok(c) => {
                    failures += usize::from(!c.pass);
                    vec![cell(n), cell(c.name), num(c.value), num(c.threshold), num(c.residual), cell(c.pass), cell("ok")]
                }
                Err((name, e)) => {
                    failures += 1;
                    vec![cell(n), cell(name), Value::Null, Value::Null, Value::Null, cell(false), status_of(&e)]
                }
            };
            table.push(row);
        }
    }
    Ok(CommandOutput { table, failures })
}

const GAP_COLUMNS: [&str; 13] = [
    "N",
    "class",
    "p",
    "bad_set",
    "dim",
    "quantity",
    "value",
    "residual",
    "ground_energy",
    "ground_residual",
    "scaled_p2n2ln",
    "scaled_n4ln",
    "status",
];

/// One row of a gap scan before formatting.
#[derive(Clone, Debug)]
struct GapRow {
    n: usize,
    class: String,
    period: Option<usize>,
    bad_set: Option<BTreeSet<usize>>,
    dim: Option<usize>,
    quantity: String,
    value: f64,
    residual: f64,
    ground: Option<(f64, f64)>,
    status: std::result::Result<(), String>,
}

impl GapRow {
    fn failed(n: usize, class: String, quantity: &str, err: &Error) -> Self {
        GapRow {
            n,
            class,
            period: None,
            bad_set: None,
            dim: None,
            quantity: quantity.into(),
            value: f64::NAN,
            residual: f64::NAN,
            ground: None,
            status: Err(format!("error: {err}")),
        }
    }

    fn cells(&self) -> Vec<Value> {
        let n = self.n as f64;
        let p = self.period.unwrap_or(1) as f64;
        let scaled_p = self.value * p * p * n * n * n.ln();
        let scaled_n = self.value * n.powi(4) * n.ln();
        vec![
            cell(self.n),
            cell(&self.class),
            self.period.map(cell).unwrap_or(Value::Null),
            self.bad_set
                .as_ref()
                .map(|b| cell(join_set(b)))
                .unwrap_or(Value::Null),
            self.dim.map(cell).unwrap_or(Value::Null),
            cell(&self.quantity),
            num(self.value),
            num(self.residual),
            self.ground.map(|g| num(g.0)).unwrap_or(Value::Null),
            self.ground.map(|g| num(g.1)).unwrap_or(Value::Null),
            num(scaled_p),
            num(scaled_n),
            match &self.status {
                Ok(()) => cell("ok"),
                Err(s) => cell(s),
            },
        ]
    }
}

/// Solve one class: the gap for the all-singlet class, `E_min` otherwise.
fn class_row(n: usize, class: &str, sig: &ClassSignature, solver: &SolverConfig) -> GapRow {
    let singlet = sig.bad_set.is_empty();
    let quantity = if singlet { "gap" } else { "e_min" };
    let solve = || -> Result<GapRow> {
        let h = build_effective(sig)?;
        let sp = eig_auto(&h, if singlet { 2 } else { 1 }, solver)?;
        let (value, residual) = if singlet {
            (sp.gap, sp.residuals[0].max(sp.residuals[1]))
        } else {
            (sp.ground_energy, sp.residuals[0])
        };
        Ok(GapRow {
            n,
            class: class.into(),
            period: Some(sig.period),
            bad_set: Some(sig.bad_set.clone()),
            dim: Some(sig.dim()),
            quantity: quantity.into(),
            value,
            residual,
            ground: Some((sp.ground_energy, sp.residuals[0])),
            status: Ok(()),
        })
    };
    solve().unwrap_or_else(|e| GapRow::failed(n, class.into(), quantity, &e))
}

/// Single-penalty class of every period dividing `N − 1`.
fn single_penalty_signatures(n: usize) -> Vec<ClassSignature> {
    (1..n).filter(|p| (n - 1) % p == 0).map(|p| ClassSignature::new(n, p, [0]).expect("valid")).collect()
}

/// The headline `Δ(N)`: minimum of the all-singlet gap, the single-penalty
/// class minima, and the bound on the other sectors.
fn headline_row(n: usize, cfg: &RunConfig) -> GapRow {
    let solver = &cfg.solver;
    let mut parts = vec![class_row(n, "singlet", &ClassSignature::singlet(n), solver)];
    parts.extend(single_penalty_signatures(n).iter().map(|s| class_row(n, "single-penalty", s, solver)));
    if let Some(bad) = parts.iter().find(|r| r.status.is_err()) {
        return GapRow { class: "headline".into(), quantity: "delta".into(), ..bad.clone() };
    }
    let sectors = match other_sector_bound(&cfg.params(n), HEADLINE_RING_CAP) {
        Ok(b) => b,
        Err(e) => return GapRow::failed(n, "headline".into(), "delta", &e),
    };
    let best = parts.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("nonempty").clone();
    let partial = if sectors.skipped.is_empty() { "" } else { ",partial" };
    if sectors.bound < best.value {
        GapRow {
            n,
            class: "headline".into(),
            period: None,
            bad_set: None,
            dim: None,
            quantity: format!("delta:other-sectors{partial}"),
            value: sectors.bound,
            residual: 0.0,
            ground: None,
            status: Ok(()),
        }
    } else {
        let source = if best.bad_set.as_ref().is_some_and(|b| b.is_empty()) { "singlet" } else { "single-penalty" };
        GapRow { class: "headline".into(), quantity: format!("delta:{source}{partial}"), ..best }
    }
}

/// Every necklace class (one row per distinct signature), then for small
/// `N` the other sectors and the reduction check against the full gap.
fn all_rows(n: usize, cfg: &RunConfig) -> Vec<GapRow> {
    let classes = match necklace_classes(n) {
        Ok(c) => c,
        Err(e) => return vec![GapRow::failed(n, "all".into(), "e_min", &e)],
    };
    let sigs: BTreeSet<(usize, Vec<usize>)> =
        classes.iter().map(|c| (c.period, c.bad_set.iter().copied().collect())).collect();
    let mut rows: Vec<GapRow> = sigs
        .par_iter()
        .map(|(p, bad)| {
            let sig = ClassSignature::new(n, *p, bad.iter().copied()).expect("valid");
            class_row(n, "class", &sig, &cfg.solver)
        })
        .collect();
    if n > FULL_SPACE_MAX_N {
        return rows;
    }
    match low_spectrum(&cfg.params(n), &cfg.solver) {
        Ok(low) => {
            for &(s, e, r) in &low.other_sector_minima {
                rows.push(GapRow {
                    n,
                    class: format!("sector({},{})", s.left, s.right),
                    period: None,
                    bad_set: None,
                    dim: Some(s.dimension(n) as usize),
                    quantity: "e_min".into(),
                    value: e,
                    residual: r,
                    ground: None,
                    status: Ok(()),
                });
            }
            let parts = rows
                .iter()
                .map(|r| r.value)
                .chain(low.other_sector_minima.iter().map(|m| m.1))
                .fold(f64::INFINITY, f64::min);
            let full = low.gap();
            let dev = (parts - full).abs();
            rows.push(GapRow {
                n,
                class: "full".into(),
                period: None,
                bad_set: None,
                dim: Some(full_dimension(n) as usize),
                quantity: "gap".into(),
                value: full,
                residual: low.ground_residual.max(low.lambda1_residual),
                ground: Some((low.lambda0, low.ground_residual)),
                status: Ok(()),
            });
            rows.push(GapRow {
                n,
                class: "reduction".into(),
                period: None,
                bad_set: None,
                dim: None,
                quantity: "min_over_parts".into(),
                value: parts,
                residual: dev,
                ground: None,
                status: if dev <= SPECTRUM_TOL { Ok(()) } else { Err(format!("differs from the full gap by {dev:e}")) },
            });
        }
        Err(e) => rows.push(GapRow::failed(n, "full".into(), "gap", &e)),
    }
    rows
}

fn gap_rows(n: usize, sel: ClassSelector, cfg: &RunConfig) -> Vec<GapRow> {
    let solver = &cfg.solver;
    match sel {
        ClassSelector::Singlet => vec![class_row(n, "singlet", &ClassSignature::singlet(n), solver)],
        ClassSelector::Worst => match ClassSignature::new(n, n - 1, [0]) {
            Ok(sig) => vec![class_row(n, "worst", &sig, solver)],
            Err(e) => vec![GapRow::failed(n, "worst".into(), "e_min", &e)],
        },
        ClassSelector::Custom => {
            let sig = cfg
                .period
                .ok_or_else(|| Error::InvalidInput("custom class needs --p".into()))
                .and_then(|p| ClassSignature::new(n, p, cfg.bad_set.iter().copied()));
            match sig {
                Ok(sig) => vec![class_row(n, "custom", &sig, solver)],
                Err(e) => vec![GapRow::failed(n, "custom".into(), "e_min", &e)],
            }
        }
        ClassSelector::All => {
            if n > MAX_ENUM_RING {
                let e = Error::Capacity(format!("necklace enumeration stops at N = {MAX_ENUM_RING}"));
                vec![GapRow::failed(n, "all".into(), "e_min", &e)]
            } else {
                all_rows(n, cfg)
            }
        }
        ClassSelector::Headline => vec![headline_row(n, cfg)],
    }
}

pub fn cmd_gap_scan(cfg: &RunConfig) -> Result<CommandOutput> {
    for &n in &cfg.sizes.0 {
        check_scan_size(n)?;
    }
    if cfg.classes.contains(&ClassSelector::Custom) && cfg.period.is_none() {
        return Err(Error::InvalidInput("--classes custom needs --p".into()));
    }
    let jobs: Vec<(usize, ClassSelector)> =
        cfg.sizes.0.iter().flat_map(|&n| cfg.classes.iter().map(move |&c| (n, c))).collect();
    let mut results: Vec<(usize, Vec<GapRow>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(n, sel))| (i, gap_rows(n, sel, cfg)))
        .collect();
    results.sort_by_key(|r| r.0);
    let mut table = Table::new(&GAP_COLUMNS);
    let mut failures = 0;
    for row in results.into_iter().flat_map(|r| r.1) {
        failures += usize::from(row.status.is_err());
        table.push(row.cells());
    }
    Ok(CommandOutput { table, failures })
}

const ENTROPY_COLUMNS: [&str; 14] = [
    "N",
    "entropy_bits",
    "entropy_right_bits",
    "lower_bound",
    "ceiling",
    "ratio",
    "gap",
    "gap_source",
    "gap_residual",
    "hastings_log2_smax",
    "inv_quarter",
    "hastings_params",
    "pass",
    "status",
];

/// Constants of the gap-based ceiling: unit Lieb-Robinson velocity and
/// correlation length, unit prefactor, local dimension 3.
pub const HASTINGS_DEFAULTS: HastingsBoundParams = HastingsBoundParams { delta: 1.0, d: 3.0, v: 1.0, xi_c: 1.0, c0: 1.0 };

fn entropy_row(n: usize, cfg: &RunConfig) -> (Vec<Value>, bool) {
    let lower = (n - 1) as f64;
    let ceiling = n as f64 * 3f64.log2();
    let mut errors = Vec::new();
    let (left, right) = if n <= MAX_RING && full_dimension(n) <= MAX_FULL_DIM {
        entropy_pair(n).unwrap_or_else(|e| {
            errors.push(format!("entropy: {e}"));
            (f64::NAN, f64::NAN)
        })
    } else {
        errors.push("entropy: full space above the cap".into());
        (f64::NAN, f64::NAN)
    };
    let (gap, source, residual) = if n <= FULL_SPACE_MAX_N {
        match low_spectrum(&cfg.params(n), &cfg.solver) {
            Ok(low) => (low.gap(), "full-space".to_string(), low.ground_residual.max(low.lambda1_residual)),
            Err(e) => {
                errors.push(format!("gap: {e}"));
                (f64::NAN, "full-space".into(), f64::NAN)
            }
        }
    } else {
        let row = headline_row(n, cfg);
        if let Err(e) = &row.status {
            errors.push(format!("gap: {e}"));
        }
        (row.value, format!("headline-{}", row.quantity), row.residual)
    };
    let hp = HastingsBoundParams { delta: gap, ..HASTINGS_DEFAULTS };
    let log2_smax = hastings_bound_log2(&hp).unwrap_or(f64::NAN);
    let inv_quarter = (-gap * gap.ln()).powf(-0.25);
    let pass = errors.is_empty() && left >= lower - ENTROPY_TOL && left <= ceiling && (left - right).abs() <= ENTROPY_TOL;
    let status = if errors.is_empty() { "ok".to_string() } else { format!("error: {}", errors.join("; ")) };
    let row = vec![
        cell(n),
        num(left),
        num(right),
        num(lower),
        num(ceiling),
        num(left / lower),
        num(gap),
        cell(source),
        num(residual),
        num(log2_smax),
        num(inv_quarter),
        cell(json!({"d": hp.d, "v": hp.v, "xi_c": hp.xi_c, "c0": hp.c0}).to_string()),
        cell(pass),
        cell(status),
    ];
    (row, pass)
}

pub fn cmd_entropy_scan(cfg: &RunConfig) -> Result<CommandOutput> {
    for &n in &cfg.sizes.0 {
        check_scan_size(n)?;
    }
    let rows: Vec<(Vec<Value>, bool)> = cfg.sizes.0.par_iter().map(|&n| entropy_row(n, cfg)).collect();
    let mut table = Table::new(&ENTROPY_COLUMNS);
    let mut failures = 0;
    for (row, pass) in rows {
        failures += usize::from(!pass);
        table.push(row);
    }
    Ok(CommandOutput { table, failures })
}

const EFFECTIVE_COLUMNS: [&str; 8] = ["N", "p", "bad_set", "dim", "index", "eigenvalue", "residual", "seed"];

pub fn cmd_effective(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(&EFFECTIVE_COLUMNS);
    for &n in &cfg.sizes.0 {
        check_scan_size(n)?;
        let p = cfg.period.unwrap_or(n - 1);
        let sig = ClassSignature::new(n, p, cfg.bad_set.iter().copied())?;
        let h = build_effective(&sig)?;
        let sp = eig_auto(&h, cfg.k.min(h.dim()), &cfg.solver)?;
        let bad = join_set(&sig.bad_set);
        for (i, (e, r)) in sp.eigenvalues.iter().zip(&sp.residuals).enumerate() {
            table.push(vec![cell(n), cell(p), cell(&bad), cell(sig.dim()), cell(i), num(*e), num(*r), cell(cfg.solver.seed)]);
        }
    }
    Ok(CommandOutput { table, failures: 0 })
}

const NECKLACE_COLUMNS: [&str; 5] = ["N", "representative", "p", "bad_set", "dim"];

pub fn cmd_necklaces(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(&NECKLACE_COLUMNS);
    for &n in &cfg.sizes.0 {
        for c in necklace_classes(n)? {
            let rep = c.bells.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
            table.push(vec![cell(n), cell(rep), cell(c.period), cell(join_set(&c.bad_set)), cell(c.dim())]);
        }
    }
    Ok(CommandOutput { table, failures: 0 })
}

const FERMION_COLUMNS: [&str; 5] = ["x", "t", "re", "im", "abs"];

pub fn cmd_fermion(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(&FERMION_COLUMNS);
    for &t in &cfg.times {
        for &x in &cfg.sites {
            let a = fermion_amplitude(x, t)?;
            table.push(vec![cell(x), num(t), num(a.re), num(a.im), num(a.norm())]);
        }
    }
    Ok(CommandOutput { table, failures: 0 })
}
