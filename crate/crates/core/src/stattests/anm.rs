use serde::{Deserialize, Serialize};

use super::{check_alpha, hsic, kernel_regress_with, HsicConfig, KrrConfig, TestOutcome, Tester};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::property::PropertyValue;
use crate::query::Query;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AnmConfig {
    pub hsic: HsicConfig,
    pub regression: KrrConfig,
}

/// Both p-values behind an ANM decision.
#[derive(Debug, Clone, PartialEq)]
pub struct AnmOutcome {
    pub outcome: TestOutcome,
    pub marginal_p: f64,
    pub residual_p: f64,
}

/// Additive-noise test from `cause` to `effect`: the pair must be marginally
/// dependent and the regression residual of `effect` on `cause` independent
/// of `cause`.
pub fn anm_test_columns(cause: &[f64], effect: &[f64], alpha: f64, cfg: &AnmConfig) -> Result<AnmOutcome> {
    check_alpha(alpha)?;
    let marginal_p = hsic::hsic(cause, effect, &cfg.hsic)?.p_value;
    let residuals = kernel_regress_with(cause, effect, &cfg.regression)?;
    let residual_p = if residuals.iter().all(|r| r.abs() < 1e-12) {
        // effect is a deterministic function of cause: the residual is trivially independent
        1.0
    } else {
        hsic::hsic(cause, &residuals, &cfg.hsic)?.p_value
    };
    let holds = marginal_p <= alpha && residual_p > alpha;
    Ok(AnmOutcome {
        outcome: TestOutcome { value: PropertyValue::binary(holds), p_value: Some(residual_p), alpha: Some(alpha) },
        marginal_p,
        residual_p,
    })
}

/// ANM test for an ordered-pair query `source -> target`.
pub fn anm_test(d: &Dataset, q: &Query, alpha: f64) -> Result<TestOutcome> {
    AnmTester::new(d, alpha).test(q)
}

#[derive(Debug, Clone, Copy)]
pub struct AnmTester<'a> {
    data: &'a Dataset,
    alpha: f64,
    cfg: AnmConfig,
}

impl<'a> AnmTester<'a> {
    pub fn new(data: &'a Dataset, alpha: f64) -> Self {
        AnmTester { data, alpha, cfg: AnmConfig::default() }
    }

    pub fn with_config(data: &'a Dataset, alpha: f64, cfg: AnmConfig) -> Self {
        AnmTester { data, alpha, cfg }
    }

    pub fn detailed(&self, q: &Query) -> Result<AnmOutcome> {
        let (s, t) = match q {
            Query::OrderedPair { source, target } => (*source, *target),
            other => return Err(Error::InvalidQuery(format!("ANM needs an ordered pair, got {other}"))),
        };
        q.validate()?;
        anm_test_columns(self.data.column(s)?, self.data.column(t)?, self.alpha, &self.cfg)
    }
}

impl Tester for AnmTester<'_> {
    fn test(&self, q: &Query) -> Result<TestOutcome> {
        Ok(self.detailed(q)?.outcome)
    }
}
