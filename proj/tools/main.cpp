#include "satprec/cli.hpp"

int main(int argc, char** argv) { return satprec::cli::run(argc, argv); }
