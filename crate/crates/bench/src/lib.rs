//! Criterion benchmarks for the quadrature and fitting kernels; see `benches/`.
