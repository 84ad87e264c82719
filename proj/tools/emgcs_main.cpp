#include "emgcs/cli.hpp"

int main(int argc, char** argv) { return emgcs::cli::run(argc, argv); }
