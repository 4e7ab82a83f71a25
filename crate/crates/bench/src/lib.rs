//! Criterion benchmarks for the `stabsketch` crate live in `benches/`.
