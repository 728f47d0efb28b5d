#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stickperm {

/// A CSV cell. Empty strings render as empty fields.
using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

/// %.17g, so doubles round-trip exactly; non-finite values as nan/inf/-inf.
std::string format_real(double v);
std::string format_real(long double v);

/// RFC-4180 quoting: fields containing comma, quote, CR or LF are quoted and
/// embedded quotes doubled.
std::string quote_field(std::string_view field);

std::string format_cell(const Cell& cell);

/// Writes header and rows with CRLF-free '\n' line endings.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<Cell>>& rows);

}  // namespace stickperm
