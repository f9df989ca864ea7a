#include "bimo/cli.hpp"

int main(int argc, char** argv) { return bimo::cli::run(argc, argv); }
