#include <string>
#include <vector>

#include "greyknn/cli.h"

int main(int argc, char** argv) {
  return greyknn::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
