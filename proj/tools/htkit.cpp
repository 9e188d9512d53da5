// SPDX-License-Identifier: Apache-2.0
#include "htkit/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return htkit::cli::run(argc, argv, std::cout, std::cerr); }
