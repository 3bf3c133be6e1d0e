#include "t2fnn/cli.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv) { return t2fnn::run_cli(std::vector<std::string>(argv, argv + argc)); }
