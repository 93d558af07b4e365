use num_complex::Complex64;

use super::{eta_s, eta_sd, gen_eigpair, BackwardErrorBounds, BlockSelection, PHPencil, Variant};
use crate::linalg::{c, ToleranceConfig};
use crate::{Error, Result};

/// Default sweep points on the imaginary axis (imaginary parts).
pub const SWEEP_LAMBDAS: [f64; 7] = [0.1380, 0.5100, 0.8950, 1.0480, 1.3210, 1.9080, 2.5080];

#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub lambda: Complex64,
    pub outcome: Result<BackwardErrorBounds>,
}

/// One row per entry of `lambdas` (imaginary parts), all sharing the `u`
/// drawn from `ep_seed`. Row failures are recorded, not propagated.
pub fn experiment_table(
    p: &PHPencil,
    lambdas: &[f64],
    ep_seed: u64,
    blocks: BlockSelection,
    variant: Variant,
    cfg: &ToleranceConfig,
) -> Result<Vec<ExperimentRow>> {
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    let base = gen_eigpair(p, ep_seed, blocks)?;
    Ok(lambdas
        .iter()
        .map(|&t| {
            let lambda = c(0.0, t);
            let outcome = if t == 0.0 || !t.is_finite() {
                Err(Error::DegenerateInput(format!("λ = {t}i must be a nonzero finite imaginary number")))
            } else {
                let ep = base.with_lambda(lambda);
                match variant {
                    Variant::S => eta_s(p, &ep, blocks, cfg),
                    Variant::Sd => eta_sd(p, &ep, blocks, cfg),
                }
            };
            ExperimentRow { lambda, outcome }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::gen_pencil;

    #[test]
    fn table_shaped_sweep() {
        let cfg = ToleranceConfig::default();
        let p = gen_pencil(4, 2, 2024);
        let rows = experiment_table(&p, &SWEEP_LAMBDAS, 7, BlockSelection::JREB, Variant::Sd, &cfg).unwrap();
        assert_eq!(rows.len(), 7);
        for r in &rows {
            let b = r.outcome.as_ref().unwrap();
            assert!(b.finite && b.eta_lower <= b.eta_upper);
        }
        assert!(experiment_table(&p, &[], 7, BlockSelection::JREB, Variant::Sd, &cfg).unwrap().is_empty());
        let rows = experiment_table(&p, &[0.5, 0.0], 7, BlockSelection::JREB, Variant::Sd, &cfg).unwrap();
        assert!(rows[0].outcome.is_ok() && rows[1].outcome.is_err());
    }
}
