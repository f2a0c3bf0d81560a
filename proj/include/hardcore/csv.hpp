#ifndef HARDCORE_CSV_HPP
#define HARDCORE_CSV_HPP

// Flat CSV records for experiment output. Columns:
//   replica,seed,j,L,lambda,disorder,observable,value,stderr
// Summary rows leave replica empty; fields that do not apply are left empty.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hardcore {

struct ExperimentRecord {
  std::optional<std::uint64_t> replica;
  std::uint64_t seed = 0;
  std::optional<int> j;
  std::optional<int> L;
  double lambda = 0.0;
  std::string disorder;
  std::string observable;
  double value = 0.0;
  std::optional<double> std_error;
};

inline constexpr std::string_view kCsvHeader =
    "replica,seed,j,L,lambda,disorder,observable,value,stderr";

/// 17 significant digits, "inf", "-inf" or "nan".
std::string format_number(double x);

/// RFC-4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

std::string csv_row(const ExperimentRecord& r);

/// Header line plus one CRLF-terminated line per record.
void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::string to_csv(const std::vector<ExperimentRecord>& records);

}  // namespace hardcore

#endif  // HARDCORE_CSV_HPP
