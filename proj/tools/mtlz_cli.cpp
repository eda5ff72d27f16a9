#include "mtlz/cli.hpp"

int main(int argc, char** argv) { return mtlz::cli::run(argc, argv); }
