// SPDX-License-Identifier: Apache-2.0
#include "usmb/cli.hpp"

int main(int argc, char** argv) { return usmb::cli::run(argc, argv); }
