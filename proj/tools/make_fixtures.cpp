// Regenerates the frozen reference optima under tests/fixtures.
#include <iostream>

#include "fixtures.hpp"
#include "pnopt/io.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : PNOPT_FIXTURE_DIR;
  for (const auto& def : pnopt::fixtures::all()) {
    const auto frozen = pnopt::fixtures::compute(def);
    pnopt::fixtures::save(pnopt::fixtures::path_for(dir, def), def, frozen);
    std::cout << def.name << ": f* = " << pnopt::format_real(frozen.f_star)
              << ", ||G_f|| = " << frozen.norm_gf << '\n';
  }
}
