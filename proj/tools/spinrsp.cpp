// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "spinrsp/cli/execute.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spinrsp::cli::run_main(args);
}
