#include <treegrp/cli.hpp>

int main(int argc, char** argv) { return treegrp::run_cli(argc, argv); }
