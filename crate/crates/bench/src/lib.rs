//! Deterministic workloads shared by the benchmarks.

use monodromic::{functor_g, int, CoreData, GeneratorConfig, Matrix, MonodromicMhm};

/// Seed used for every benchmark fixture.
pub const SEED: u64 = 7;

/// A dense `n × n` integer matrix of rank roughly `n - 1`.
pub fn dense_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i + 1 == n {
            int(0)
        } else {
            int(((i * 7 + j * 13 + 3) % 11) as i64 - 5)
        }
    })
}

/// Generated modules of total dimension at most `max_dim`, skipping empty ones.
pub fn modules(max_dim: usize, count: usize) -> Vec<MonodromicMhm> {
    let cfg = GeneratorConfig {
        seed: SEED,
        max_dim,
        case_count: count,
        ..GeneratorConfig::default()
    };
    (0..count as u64 * 4)
        .map(|i| monodromic::generate::generate_case(&cfg, i))
        .filter_map(|g| functor_g(&g).ok())
        .filter(|m| !m.core.alphas().is_empty())
        .take(count)
        .collect()
}

/// Core data of the generated modules.
pub fn cores(max_dim: usize, count: usize) -> Vec<CoreData> {
    modules(max_dim, count).into_iter().map(|m| m.core).collect()
}
