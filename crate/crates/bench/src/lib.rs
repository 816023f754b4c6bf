//! Criterion benchmarks for the formation process live under `benches/`.
