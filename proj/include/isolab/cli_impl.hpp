#pragma once

#include <iostream>

namespace isolab::cli {

inline int run_main(int, char**) {
    std::cout << "isolab: not yet wired\n";
    return 0;
}

}  // namespace isolab::cli
