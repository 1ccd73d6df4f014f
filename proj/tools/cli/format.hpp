#pragma once

#include <string>
#include <vector>

#include <fmt/format.h>

namespace fundchoice::cli {

/// Fixed CSV number format: 12 significant digits, no negative zero.
inline std::string num(double v) {
  if (v == 0.0) v = 0.0;
  return fmt::format("{:.12g}", v);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) text_ += ',';
      text_ += cells[c];
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace fundchoice::cli
