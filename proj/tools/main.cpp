#include "polyctrl/cli.hpp"

int main(int argc, char** argv) { return polyctrl::cli::run(argc, argv); }
