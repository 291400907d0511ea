//! Criterion benchmarks for memgain-core; see `benches/`.
