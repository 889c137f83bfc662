//! Acceptance suite for the `dequant` workspace; the checks live in
//! `tests/acceptance.rs` and run with `cargo test -p dequant-verify`.
