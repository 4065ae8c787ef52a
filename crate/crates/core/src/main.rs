// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(hybridcool::cli::main_with_args(std::env::args_os()));
}
