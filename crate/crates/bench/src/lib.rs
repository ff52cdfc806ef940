//! Criterion benchmarks for `plap-core`; see `benches/solvers.rs`.
