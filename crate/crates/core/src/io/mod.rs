//! File formats: MPS with SOS, solution files and the benchmark CSV.
//! Instances use the JSON form of [`Instance`](crate::model::Instance).

pub mod bench;
pub mod mps;
pub mod solution;

pub use bench::{format_csv, run_benchmark, run_cases, BenchCase, BenchRow};
pub use mps::{read_mps, write_mps, MpsError};
pub use solution::{parse_solution, values_from_columns, write_solution, SolutionError, SolutionFile};
