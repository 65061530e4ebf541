//! Benchmarks for the Bell/CHSH engine live under `benches/`.

pub use bell_core;
