#include "lsmmn/cli.hpp"

int main(int argc, char** argv) { return lsmmn::cli_main(argc, argv); }
