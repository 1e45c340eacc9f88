#include <iostream>

#include "cli.hpp"

int main(int argc, char **argv) {
  auto parsed = jetinv::cli::parse_arguments(argc, argv, std::cout, std::cerr);
  if (!parsed.config) {
    return parsed.exit_code;
  }
  return jetinv::cli::run(*parsed.config, std::cout, std::cerr);
}
