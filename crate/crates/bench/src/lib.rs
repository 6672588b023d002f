//! Criterion benchmarks for the signal energy library; see `benches/`.
