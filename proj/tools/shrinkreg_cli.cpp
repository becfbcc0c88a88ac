#include "shrinkreg/cli.hpp"

int main(int argc, char** argv) { return shrinkreg::cli_dispatch(argc, argv); }
