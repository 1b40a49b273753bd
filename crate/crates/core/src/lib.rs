//! H-infinity optimal interpolation for periodically nonuniformly decimated
//! signals.
//!
//! The source signal is modeled as the output of a stable, strictly proper
//! continuous-time filter `F` driven by an arbitrary `L^2` input, so no
//! band-limiting assumption is made. For a decimation pattern the crate
//! builds a fast-discretized generalized plant, solves the discrete-time
//! H-infinity problem for the blocked interpolation filter `K~`, and turns
//! the result into a filterbank that runs at the base rate.
//!
//! ```no_run
//! use mrhinf::{design::first_order_lag, DesignSpec, design_filter, SynthesisOptions};
//!
//! let spec = DesignSpec::new("1100".parse()?, 1.0, 4, 4, first_order_lag(10.0))?;
//! let design = design_filter(&spec, &SynthesisOptions::default())?;
//! println!("J = {:.4}", design.result.j);
//! # Ok::<(), mrhinf::Error>(())
//! ```

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod io;
pub mod linalg;
pub mod ltisys;
pub mod multirate;
pub mod pattern;
pub mod search;
pub mod sim;
pub mod statespace;
pub mod synthesis;

pub use design::{BaseSpec, DesignSpec, GammaStep};
pub use error::{Error, Result};
pub use ltisys::FrequencyResponseCurve;
pub use pattern::DecimationPattern;
pub use search::PatternReport;
pub use sim::SimulationReport;
pub use statespace::{Domain, StateSpace};
pub use synthesis::{
    build_plant, close_loop, extract_filterbank, hinf_synthesize, GeneralizedPlant, PolyphaseFilterBank,
    SynthesisError, SynthesisOptions, SynthesisResult,
};

/// Everything produced by one design run.
#[derive(Debug, Clone)]
pub struct Design {
    pub plant: GeneralizedPlant,
    pub result: SynthesisResult,
    pub filterbank: PolyphaseFilterBank,
}

/// Plant assembly, synthesis and filterbank extraction in one call.
pub fn design_filter(spec: &DesignSpec, opts: &SynthesisOptions) -> std::result::Result<Design, SynthesisError> {
    let wrap = |error: Error| SynthesisError { error, trace: Vec::new() };
    let plant = build_plant(spec).map_err(wrap)?;
    let result = hinf_synthesize(&plant, opts)?;
    let filterbank = extract_filterbank(&result.filter, &spec.pattern).map_err(|error| SynthesisError {
        error,
        trace: result.iterations.clone(),
    })?;
    Ok(Design { plant, result, filterbank })
}
