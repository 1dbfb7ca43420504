//! The full analytic chain for one parameter set.

use crate::error::{Error, Result};
use crate::linearization::{linearize, CoeffForm, LinearPair};
use crate::model::{taylor_coefficients, Equilibrium, ModelParams, TaylorCoeffs};
use crate::normal_form::{normal_form, E1Variant, NormalForm};
use crate::stability::{stability_report, HopfPoint, StabilityReport};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub params: ModelParams,
    pub equilibrium: Equilibrium,
    pub taylor: TaylorCoeffs,
    pub pair: LinearPair,
    pub stability: StabilityReport,
    /// Normal form at the first switch with the selected `E1` variant.
    pub normal_form: Option<Result<NormalForm>>,
    /// The same computation with the other `E1` variant.
    pub alternative: Option<Result<NormalForm>>,
    pub variant: E1Variant,
}

impl Analysis {
    pub fn switch(&self) -> Option<HopfPoint> {
        self.stability.switch
    }

    /// The normal form, or an error explaining why there is none.
    pub fn require_normal_form(&self) -> Result<&NormalForm> {
        match &self.normal_form {
            None => Err(Error::Degenerate("no stability switch".into())),
            Some(Err(e)) => Err(e.clone()),
            Some(Ok(nf)) => Ok(nf),
        }
    }
}

pub fn analyze(params: &ModelParams, form: CoeffForm, variant: E1Variant) -> Result<Analysis> {
    let equilibrium = params.equilibrium();
    let taylor = taylor_coefficients(params, &equilibrium);
    let pair = linearize(params, &taylor);
    let stability = stability_report(params, form)?;
    let other = match variant {
        E1Variant::DoubleFrequency => E1Variant::SingleFrequency,
        E1Variant::SingleFrequency => E1Variant::DoubleFrequency,
    };
    let at = |v| stability.switch.map(|h| normal_form(params, &taylor, &pair, &h, v));
    let (normal_form, alternative) = (at(variant), at(other));
    Ok(Analysis { params: *params, equilibrium, taylor, pair, stability, normal_form, alternative, variant })
}
