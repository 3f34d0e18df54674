// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(qsl_cli::run_from_args(std::env::args_os()));
}
