#include "opcorrect/cli/pipeline.hpp"

int main(int argc, char** argv) { return opcorrect::cli::run_command(argc, argv); }
