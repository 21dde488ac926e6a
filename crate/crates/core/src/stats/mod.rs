//! Cross-replica estimators and normality checks for the empirical process,
//! the variance-summation law and hitting times.

mod clt;
mod hitting;
mod moments;
mod normality;
mod variance;

pub use clt::{clt_check, CltCell, CltReport, MIN_CLT_REPLICAS};
pub use hitting::{
    hitting_analysis, kout_of_n, AnalyticHitting, HittingOptions, HittingReport, KOutOfN, DEFAULT_BANDWIDTH_C,
    MAX_CENSORED_FRACTION,
};
pub use moments::{covariance_with_se, estimate_moments, mean_with_se, GammaEntry, MomentEstimates};
pub use normality::{
    anderson_darling, ks_statistic, lilliefors_critical, mean_sd, normality_test, qq_points, NormalityTest,
    LILLIEFORS_SAMPLES,
};
pub use variance::{
    default_ell, variance_ratio_from_configs, variance_ratio_scan, VarianceRatioReport, VarianceRow, VarianceScan,
};
