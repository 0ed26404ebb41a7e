//! Covariate-specific ROC curves (induced location-scale, dependent DP
//! mixture and direct ROC-GLM), the covariate-adjusted ROC curve and the
//! covariate-specific Youden index.

mod aroc;
mod bspline;
mod ddp;
mod induced;
mod regression;
mod rocglm;

pub use aroc::{aroc, covariate_youden_cdfs, covariate_youden_curve};
pub use bspline::{bspline_design, BSplineSpec, SplineDesign, SPLINE_DEGREE};
pub use ddp::{ddp_fit, ddp_roc, DdpConfig, DdpDraw, DdpPosteriorCdf};
pub use induced::{
    faraggi_roc, induced_ab, pepe_auc, pepe_semiparam_roc, ConditionalCdf, ErrorLaw,
    FnConditionalCdf, LocationScaleCdf,
};
pub use regression::{ols_fit, LocationScaleFit, RegressionSample};
pub use rocglm::{
    placement_indicators, placement_values, probit_irls, rocglm_fit, Baseline, ProbitFit,
    RocGlmConfig, RocGlmFit,
};
