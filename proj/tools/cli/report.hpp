#pragma once

#include <string>
#include <vector>

#include "fundchoice/game.hpp"

namespace fundchoice::cli {

/// Shape of a two-agent certificate list.
struct SetExtent {
  std::size_t count = 0;
  bool diagonal = false;    // every profile has x_1 == x_2
  bool contiguous = false;  // diagonal and no grid point missing between lo and hi
  double lo = 0.0;          // range of x_1
  double hi = 0.0;
};

SetExtent extent(const std::vector<EquilibriumCertificate>& certs, const Grid& grid);
std::string describe(const SetExtent& e);

/// One row per certificate: x_1..x_n, kind, max_regret.
std::string equilibria_csv(const std::vector<EquilibriumCertificate>& certs, std::size_t n);

}  // namespace fundchoice::cli
