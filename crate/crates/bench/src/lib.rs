//! Benchmark-only crate; see `benches/routes.rs`.
