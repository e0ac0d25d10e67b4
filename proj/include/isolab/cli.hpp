// CLI entry point; subcommand dispatch is implemented in cli_impl.hpp once the
// experiment modules exist.
#pragma once

namespace isolab::cli {

int run_main(int argc, char** argv);

}  // namespace isolab::cli

#include "isolab/cli_impl.hpp"
