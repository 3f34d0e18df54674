// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Benchmark-only crate. Run with `cargo bench -p qsl-bench`.
