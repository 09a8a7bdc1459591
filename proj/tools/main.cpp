#include "levelgen/cli.hpp"

int main(int argc, char** argv) { return levelgen::cli_main(argc, argv); }
