//! Criterion benchmarks for the catqubit kernels live in `benches/`.
