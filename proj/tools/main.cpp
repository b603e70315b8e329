#include "lsk/cli.hpp"

int main(int argc, char** argv) { return lsk::run(argc, argv); }
