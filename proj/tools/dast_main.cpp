#include "dast/cli.hpp"

int main(int argc, char** argv) { return dast::cli::run(argc, argv); }
