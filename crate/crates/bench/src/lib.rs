//! Criterion benchmarks and profiling examples for `lospace`; see `benches/` and `examples/`.
