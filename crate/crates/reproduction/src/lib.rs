//! Holds the acceptance harness in `tests/acceptance.rs`; run it with
//! `cargo test -p reproduction --test acceptance`. The package sorts after
//! the library crates so a red criterion does not stop their suites.
