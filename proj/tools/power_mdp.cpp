#include "powermdp/cli.hpp"

int main(int argc, char** argv) { return powermdp::cli::run(argc, argv); }
