//! Multi-scale experiment designs: geometric scales over polynomial images,
//! prime-multiple scales over short intervals, their Monte Carlo
//! fluctuation runs and the exact counts behind them.

mod clt;
mod polyfluct;
mod report;
mod scales;
mod short;
mod slowvar;
mod verify;

pub use clt::{run_clt_experiment, summarize, CltOptions, CltReport, SampleSummary};
pub use polyfluct::{poly_scale_sums, poly_sieve_requirement, run_poly_fluctuation, PolyEngine, ScaleSums};
pub use report::{mean_and_se, Exceedance, FluctuationReport, EXCEEDANCE_THETAS};
pub use scales::{make_poly_scales, make_short_scales, HSpec, PolyScales, ShortScale, ShortScales};
pub use short::{run_short_fluctuation, SecondMomentCheck, ShortFluctuationReport, ShortScaleParts};
pub use slowvar::{run_slow_variation, slow_scales, GapReport, SlowVariationParams, SlowVariationReport};
pub use verify::{verify_count_at_scales, ScalePairCount};
