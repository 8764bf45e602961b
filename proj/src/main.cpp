#include "longidesign/cli.hpp"

int main(int argc, char** argv) { return longidesign::run(argc, argv); }
