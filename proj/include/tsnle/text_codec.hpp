#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsnle {

/// Fixed-point rendering of one value with `precision` decimals, rounding
/// half away from zero on the shortest round-trip decimal form.
std::string format_fixed(double value, int precision);

/// "1.00, 2.50": comma-plus-space separated fixed-point values.
std::string encode_series_text(std::span<const double> values, int precision = 2);

/// Every decimal number in `text` in order of appearance (optional sign,
/// fraction and exponent).
std::vector<double> extract_numbers(std::string_view text);

/// First `expected_count` numbers of `text`; throws InsufficientNumbers.
std::vector<double> parse_series_text(std::string_view text, std::size_t expected_count);

} // namespace tsnle
