//! Workloads shared by the pipeline benchmarks.

use std::path::PathBuf;
use std::sync::Arc;

use abram_core::genfield::GenField;
use abram_core::IntMatrix;
use num_bigint::BigInt;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
}

pub fn load_fixture(name: &str) -> Arc<GenField> {
    GenField::load(&fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Deterministic `rows x cols` matrix with entries in `[-bound, bound]`.
pub fn relation_matrix(rows: usize, cols: usize, bound: i64, seed: u64) -> IntMatrix {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let data: Vec<Vec<BigInt>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    BigInt::from(((state >> 33) % (2 * bound as u64 + 1)) as i64 - bound)
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&data, cols)
}
