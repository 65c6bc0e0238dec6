#include "flamelab/run.hpp"

int main(int argc, char** argv) { return flamelab::run_main(argc, argv); }
