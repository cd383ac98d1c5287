#include "commands.hpp"

int main(int argc, char** argv) { return dfpred::cli::run(argc, argv); }
