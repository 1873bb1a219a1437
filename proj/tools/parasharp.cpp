#include "parasharp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return parasharp::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
