//! Criterion benchmarks for the integrator and the closed-form model live in
//! `benches/`; run them with `cargo bench -p twocolor-bench`.
