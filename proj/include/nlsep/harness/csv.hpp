#ifndef NLSEP_HARNESS_CSV_HPP
#define NLSEP_HARNESS_CSV_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace nlsep {

using CsvCell = std::variant<double, long long, std::string>;

/// 17 significant digits in scientific notation; "nan"/"inf" otherwise.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void Comment(const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) out_ << "# " << line << '\n';
  }

  void Header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    WriteLine(columns);
  }

  void Row(const std::vector<CsvCell>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (const auto& c : cells) {
      if (const auto* d = std::get_if<double>(&c)) {
        text.push_back(format_real(*d));
      } else if (const auto* i = std::get_if<long long>(&c)) {
        text.push_back(std::to_string(*i));
      } else {
        text.push_back(std::get<std::string>(c));
      }
    }
    WriteLine(text);
  }

  void Flush() { out_.flush(); }

 private:
  void WriteLine(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t columns_ = 0;
};

}  // namespace nlsep

#endif  // NLSEP_HARNESS_CSV_HPP
