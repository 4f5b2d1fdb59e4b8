use serde_json::json;

use super::{extract_symbol_columns, restrict};
use crate::deform::{power_iteration_norm, GridOperator};
use crate::error::{Error, Result};
use crate::grid::{norm_e, GridFunction, SkewForm};

/// Default decision threshold for the commutant and reconstruction residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const NORM_ITERATIONS: usize = 60;
const NORM_SEED: u64 = 0x5eed;

/// Probe pairs `(g, h)` for a fixed skew form, with the norm estimate of each
/// `R_g` computed once and shared by every operator tested against them.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    form: SkewForm,
    pairs: Vec<(GridFunction, GridFunction)>,
    scales: Vec<f64>,
}

impl ProbeSet {
    pub fn new(pairs: Vec<(GridFunction, GridFunction)>, form: &SkewForm) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyProbes);
        }
        let scales = pairs
            .iter()
            .map(|(g, _)| power_iteration_norm(&GridOperator::right_mult(g, form)?, NORM_ITERATIONS, NORM_SEED))
            .collect::<Result<_>>()?;
        Ok(ProbeSet {
            form: form.clone(),
            pairs,
            scales,
        })
    }

    pub fn form(&self) -> &SkewForm {
        &self.form
    }

    pub fn pairs(&self) -> &[(GridFunction, GridFunction)] {
        &self.pairs
    }

    /// Estimated `||R_g||` for each pair.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }
}

/// `max ||(A R_g - R_g A) h||_E / (||h||_E ||R_g||)` over the probe pairs `(g, h)`.
pub fn commutant_residual(op: &GridOperator, probes: &ProbeSet) -> Result<f64> {
    let mut worst = 0.0f64;
    for ((g, h), &scale) in probes.pairs.iter().zip(&probes.scales) {
        let nh = norm_e(h);
        if scale == 0.0 || nh == 0.0 {
            continue;
        }
        let rg = GridOperator::right_mult(g, &probes.form)?;
        let lhs = op.apply(&rg.apply(h)?)?;
        let rhs = rg.apply(&op.apply(h)?)?;
        worst = worst.max(norm_e(&lhs.sub(&rhs)?) / (nh * scale));
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// `A = L_f` with the reconstructed symbol `f`.
    IsLeftMult(GridFunction),
    /// The commutant residual exceeded the tolerance.
    NotInCommutant(f64),
    /// `A` commutes with the probes but differs from `L_f` by this gap.
    ReconstructionMismatch(f64),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::IsLeftMult(_) => "is_left_mult",
            Verdict::NotInCommutant(_) => "not_in_commutant",
            Verdict::ReconstructionMismatch(_) => "reconstruction_mismatch",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjectureReport {
    pub verdict: Verdict,
    pub commutant_residual: f64,
    /// `max ||(A - L_f) h||_E / ||h||_E` over the probes; absent when the
    /// commutant test already failed.
    pub reconstruction_gap: Option<f64>,
    pub tolerance: f64,
}

impl ConjectureReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.verdict.name(),
            "commutant_residual": self.commutant_residual,
            "reconstruction_gap": self.reconstruction_gap,
            "tolerance": self.tolerance,
        })
    }
}

/// Decide whether `A` is a left multiplication. Operators that fail the
/// commutant test are rejected; otherwise `f = A(1_C)`, read off as the
/// `xi = 0` symbol column, and `A` is compared with `L_f` on every probe.
pub fn verify_conjecture(op: &GridOperator, probes: &ProbeSet, tol: f64) -> Result<ConjectureReport> {
    let residual = commutant_residual(op, probes)?;
    if !(residual <= tol) {
        return Ok(ConjectureReport {
            verdict: Verdict::NotInCommutant(residual),
            commutant_residual: residual,
            reconstruction_gap: None,
            tolerance: tol,
        });
    }
    let f = restrict(&extract_symbol_columns(op, &[op.grid().origin_index()])?)?;
    let diff = op.minus(&GridOperator::left_mult(&f, &probes.form)?)?;
    let mut gap = 0.0f64;
    for (g, h) in &probes.pairs {
        for p in [g, h] {
            let n = norm_e(p);
            if n > 0.0 {
                gap = gap.max(norm_e(&diff.apply(p)?) / n);
            }
        }
    }
    let verdict = if gap <= tol {
        Verdict::IsLeftMult(f)
    } else {
        log::error!("operator commutes with every probe but is not L_f (gap {gap:e})");
        Verdict::ReconstructionMismatch(gap)
    };
    Ok(ConjectureReport {
        verdict,
        commutant_residual: residual,
        reconstruction_gap: Some(gap),
        tolerance: tol,
    })
}
