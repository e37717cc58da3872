//! Hosts the `acceptance` test target; see `tests/acceptance.rs`.

pub use toeplitz_asy_cli::verify;
