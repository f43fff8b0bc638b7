#include <iostream>

#include "alurity/cli/app.hpp"

int main(int argc, char** argv) {
    return alurity::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
