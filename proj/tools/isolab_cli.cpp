// isolab command-line front end. Subcommands are wired up in cli.hpp; this
// translation unit only owns main().
#include <exception>
#include <iostream>

#include "isolab/cli.hpp"

int main(int argc, char** argv) {
    try {
        return isolab::cli::run_main(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "isolab: " << e.what() << "\n";
        return 1;
    }
}
