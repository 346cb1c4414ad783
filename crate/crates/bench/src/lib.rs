//! Fixtures shared by the benchmarks.

use gwcorr_core::geodata::listwise_complete;
use gwcorr_core::synth::variable_names;
use gwcorr_core::{synth_dataset, AnalysisSpec, Bandwidth, Coord, DataMatrix, Kernel, Method, Mode};

pub struct Fixture {
    pub data: DataMatrix,
    pub coords: Vec<Coord>,
}

/// Synthetic dataset of `n` locations and `vars` variables, missing rows removed.
pub fn fixture(n: usize, vars: usize, seed: u64) -> Fixture {
    let d = synth_dataset(n, vars, seed).expect("synthetic dataset");
    let (data, coords, _) = listwise_complete(&d, &variable_names(vars)).expect("complete rows");
    Fixture { data, coords }
}

/// Correlation of `v1` and `v2`, or their partial correlation given every
/// other variable when `partial` is set.
pub fn spec(vars: usize, partial: bool, method: Method, kernel: Kernel, proportion: f64) -> AnalysisSpec {
    let names = variable_names(vars);
    AnalysisSpec {
        mode: if partial { Mode::PartialCorrelation } else { Mode::Correlation },
        method,
        var_a: names[0].clone(),
        var_b: names[1].clone(),
        controls: if partial { names[2..].to_vec() } else { vec![] },
        kernel,
        bandwidth: Bandwidth::new(proportion).expect("valid proportion"),
    }
}
