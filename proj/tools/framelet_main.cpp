#include "framelet/cli.hpp"

int main(int argc, char** argv) {
  return framelet::run_cli({argv + 1, argv + argc});
}
