#include "evbma/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace evbma {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (row_open_) out_ << ',';
  out_ << s;
  row_open_ = true;
  return *this;
}

CsvWriter& CsvWriter::field(double x) { return field(std::string_view(format_double(x))); }

CsvWriter& CsvWriter::field(std::int64_t n) { return field(std::string_view(std::to_string(n))); }

CsvWriter& CsvWriter::field(const std::optional<double>& x) {
  return x ? field(*x) : field(std::string_view(""));
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_open_ = false;
  if (!out_) throw std::runtime_error("CsvWriter: write failure");
}

}  // namespace evbma
