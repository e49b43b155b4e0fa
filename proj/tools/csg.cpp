// SPDX-License-Identifier: Apache-2.0
#include "csg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return csg::cli::run(argc, argv, std::cout, std::cerr); }
