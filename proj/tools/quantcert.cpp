#include "quantcert/cli.hpp"

int main(int argc, char** argv) { return quantcert::cli::run_cli(argc, argv); }
