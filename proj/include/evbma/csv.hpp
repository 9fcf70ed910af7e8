#pragma once
// Deterministic CSV output: floats carry 17 significant digits so values
// round-trip exactly and reruns are byte-identical.
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

namespace evbma {

std::string format_double(double x);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);  // throws on open failure

  CsvWriter& field(std::string_view s);
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(double x);
  CsvWriter& field(std::int64_t n);
  CsvWriter& field(int n) { return field(static_cast<std::int64_t>(n)); }
  CsvWriter& field(const std::optional<double>& x);  // empty cell when absent
  void end_row();

 private:
  std::ofstream out_;
  bool row_open_ = false;
};

}  // namespace evbma
