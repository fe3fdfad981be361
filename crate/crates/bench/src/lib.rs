//! Criterion benchmarks for the spinrelax core; see `benches/`.
