#include "rexp/harness.hpp"

int main(int argc, char** argv) { return rexp::cli::run_main(argc, argv); }
