#include "report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "format.hpp"

namespace fundchoice::cli {

SetExtent extent(const std::vector<EquilibriumCertificate>& certs, const Grid& grid) {
  SetExtent e;
  e.count = certs.size();
  if (certs.empty()) return e;
  e.lo = certs.front().profile[0];
  e.hi = e.lo;
  e.diagonal = true;
  for (const auto& c : certs) {
    e.lo = std::min(e.lo, c.profile[0]);
    e.hi = std::max(e.hi, c.profile[0]);
    if (c.profile.size() < 2 || c.profile[0] != c.profile[1]) e.diagonal = false;
  }
  const auto span = grid.nearest_index(e.hi) - grid.nearest_index(e.lo) + 1;
  e.contiguous = e.diagonal && span == e.count;
  return e;
}

std::string describe(const SetExtent& e) {
  if (e.count == 0) return "none";
  if (e.diagonal) {
    return fmt::format("{} diagonal profiles (x, x), x in [{}, {}]{}", e.count, num(e.lo),
                       num(e.hi), e.contiguous ? "" : " with gaps");
  }
  return fmt::format("{} profiles, x_1 in [{}, {}]", e.count, num(e.lo), num(e.hi));
}

std::string equilibria_csv(const std::vector<EquilibriumCertificate>& certs, std::size_t n) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i < n; ++i) header.push_back(fmt::format("x_{}", i + 1));
  header.push_back("kind");
  header.push_back("max_regret");
  CsvWriter csv(header);
  auto sorted = certs;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.profile < b.profile; });
  for (const auto& c : sorted) {
    std::vector<std::string> row;
    for (double x : c.profile.choices) row.push_back(num(x));
    row.emplace_back(to_string(c.kind));
    row.push_back(num(c.max_regret));
    csv.row(row);
  }
  return csv.str();
}

}  // namespace fundchoice::cli
