#include "crda/cli.hpp"

int main(int argc, char** argv) { return crda::run_command(argc, argv); }
