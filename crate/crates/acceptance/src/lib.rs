//! End-to-end acceptance checks across the core library and the service.
//! The checks live in `tests/acceptance.rs`.
