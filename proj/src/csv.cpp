#include "stickperm/csv.hpp"

#include <cmath>
#include <cstdio>

namespace stickperm {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_real(long double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return quote_field(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<Cell>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << quote_field(header[i]);
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_cell(row[i]);
    }
    out << '\n';
  }
}

}  // namespace stickperm
