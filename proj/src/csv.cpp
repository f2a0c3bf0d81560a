#include "hardcore/csv.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace hardcore {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  return fmt::format("{:.17g}", x);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const ExperimentRecord& r) {
  std::string line;
  if (r.replica) line += std::to_string(*r.replica);
  line += ',' + std::to_string(r.seed) + ',';
  if (r.j) line += std::to_string(*r.j);
  line += ',';
  if (r.L) line += std::to_string(*r.L);
  line += ',' + format_number(r.lambda);
  line += ',' + csv_field(r.disorder);
  line += ',' + csv_field(r.observable);
  line += ',' + format_number(r.value) + ',';
  if (r.std_error) line += format_number(*r.std_error);
  return line;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : records) out << csv_row(r) << "\r\n";
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream s;
  write_csv(s, records);
  return s.str();
}

}  // namespace hardcore
