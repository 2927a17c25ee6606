//! Operator-norm brackets, condition checkers and scaling sweeps.

pub mod bracket;
pub mod conditions;
pub mod probes;
pub mod sweeps;

pub use crate::stats::SlopeFit;
pub use bracket::{
    ascent_lower, norm_ratio, opnorm_1_2_columns, opnorm_2_2, opnorm_bracket, opnorm_p_2, opnorm_rowcol,
    AscentOptions, LinearOp, LowerMethod, MultipliedOp, NormBracket, UpperMethod,
};
pub use conditions::{
    check_ev, check_fs, check_fs_symbol, check_g, check_ge, fs_bump_field, gamma_exponent, negative_power_norm,
    EvReport, FsBump, FsEntry, FsReport, GEntry, GReport, GeReport, NegativePowerReport,
};
pub use probes::{probe_family, Probe, PROBE_FAMILY_VERSION};
pub use sweeps::{
    cluster_constant, critical_index, maximal_threshold_sweep, restriction_probe, restriction_probes, sc_kappa_probe,
    sc_probes, tdelta_scaling, weight_family, weighted_square, ClusterReport, ClusterWindow, MaximalSweep,
    MaximalSweepEntry, RestrictionReport, ScReport, TdeltaScaling, WeightedSquareReport,
};
