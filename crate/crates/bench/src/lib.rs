//! Criterion benchmarks for the emulator; see `benches/`.
