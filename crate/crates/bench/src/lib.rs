//! Shared inputs for the solver benchmarks.

use decouple_core::generate::{random_instance, RandomSpec};
use decouple_core::ProblemInstance;

/// Node counts the benchmarks sweep over.
pub const SIZES: [usize; 4] = [10, 20, 40, 80];

/// A deterministic random instance with exactly `n` nodes and a
/// disturbance-to-target path.
pub fn instance(n: usize) -> ProblemInstance {
    let spec = RandomSpec {
        require_path: true,
        ..RandomSpec::default().with_nodes(n..=n)
    };
    random_instance(&spec, 1_000 + n as u64)
}
