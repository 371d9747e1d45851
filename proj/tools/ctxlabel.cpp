#include "ctxlabel/cli.hpp"

int main(int argc, char** argv) { return ctxlabel::cli::dispatch(argc, argv); }
