#ifndef METAPI_TEXT_HPP
#define METAPI_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace metapi {

/// Shortest decimal representation that round-trips to the same double
/// (std::to_chars without a precision argument). All numeric file output goes
/// through this, so serialized values re-parse exactly.
std::string format_double(double value);

/// Strict double parser; the whole field must be consumed.
double parse_double(std::string_view text);

/// Splits one CSV line on ',' honoring double-quote escaping.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// 64-bit FNV-1a; used for stable config digests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace metapi

#endif  // METAPI_TEXT_HPP
