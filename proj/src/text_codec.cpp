#include "tsnle/text_codec.hpp"

#include "tsnle/error.hpp"
#include "tsnle/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace tsnle {

namespace {

bool is_digit(char c) noexcept {
	return c >= '0' && c <= '9';
}

} // namespace

std::string format_fixed(double value, int precision) {
	if (!std::isfinite(value)) {
		throw Error(Errc::NonFinite, "cannot encode a non-finite value");
	}
	if (precision < 0) {
		throw Error(Errc::InvalidRange, "precision must be non-negative");
	}

	char buf[64];
	const auto result = std::to_chars(buf, buf + sizeof(buf), std::fabs(value), std::chars_format::scientific);
	const std::string_view repr(buf, static_cast<std::size_t>(result.ptr - buf));
	const auto epos = repr.find('e');

	std::string digits;
	for (char c : repr.substr(0, epos)) {
		if (is_digit(c)) {
			digits.push_back(c);
		}
	}
	int exponent = 0;
	std::from_chars(repr.data() + epos + 1 + (repr[epos + 1] == '+' ? 1 : 0), repr.data() + repr.size(), exponent);

	// digits[0, point) is the integer part.
	int point = exponent + 1;
	if (point < 1) {
		digits.insert(0, static_cast<std::size_t>(1 - point), '0');
		point = 1;
	}
	const auto keep = static_cast<std::size_t>(point + precision);
	if (digits.size() < keep) {
		digits.append(keep - digits.size(), '0');
	}
	const bool round_up = digits.size() > keep && digits[keep] >= '5';
	digits.resize(keep);
	if (round_up) {
		std::ptrdiff_t i = static_cast<std::ptrdiff_t>(keep) - 1;
		while (i >= 0 && digits[static_cast<std::size_t>(i)] == '9') {
			digits[static_cast<std::size_t>(i)] = '0';
			--i;
		}
		if (i < 0) {
			digits.insert(digits.begin(), '1');
			++point;
		} else {
			++digits[static_cast<std::size_t>(i)];
		}
	}

	std::string integer = digits.substr(0, static_cast<std::size_t>(point));
	const auto first_nonzero = integer.find_first_not_of('0');
	integer = first_nonzero == std::string::npos ? "0" : integer.substr(first_nonzero);
	const bool is_zero = digits.find_first_not_of('0') == std::string::npos;

	std::string out;
	if (value < 0 && !is_zero) {
		out.push_back('-');
	}
	out += integer;
	if (precision > 0) {
		out.push_back('.');
		out += digits.substr(static_cast<std::size_t>(point));
	}
	return out;
}

std::string encode_series_text(std::span<const double> values, int precision) {
	require_finite(values, "encode_series_text");
	std::string out;
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (i > 0) {
			out += ", ";
		}
		out += format_fixed(values[i], precision);
	}
	return out;
}

std::vector<double> extract_numbers(std::string_view text) {
	std::vector<double> numbers;
	const std::size_t n = text.size();
	std::size_t i = 0;
	auto digit_at = [&](std::size_t k) { return k < n && is_digit(text[k]); };

	while (i < n) {
		std::size_t start = i;
		std::size_t j = i;
		bool negative = false;
		if ((text[j] == '-' || text[j] == '+') && (digit_at(j + 1) || (j + 1 < n && text[j + 1] == '.' && digit_at(j + 2)))) {
			negative = text[j] == '-';
			++j;
		}
		const std::size_t mantissa = j;
		bool any_digit = false;
		while (digit_at(j)) {
			++j;
			any_digit = true;
		}
		if (j < n && text[j] == '.' && (any_digit || digit_at(j + 1))) {
			++j;
			while (digit_at(j)) {
				++j;
				any_digit = true;
			}
		}
		if (!any_digit) {
			i = start + 1;
			continue;
		}
		if (j < n && (text[j] == 'e' || text[j] == 'E')) {
			std::size_t k = j + 1;
			if (k < n && (text[k] == '+' || text[k] == '-')) {
				++k;
			}
			if (digit_at(k)) {
				while (digit_at(k)) {
					++k;
				}
				j = k;
			}
		}
		std::string token(text.substr(mantissa, j - mantissa));
		if (token.back() == '.') {
			token.pop_back();
		}
		double value = 0.0;
		const auto parsed = std::from_chars(token.data(), token.data() + token.size(), value);
		if (parsed.ec == std::errc()) {
			numbers.push_back(negative ? -value : value);
		} else if (parsed.ec == std::errc::result_out_of_range) {
			// Overflowing literals are kept as the non-finite value they denote.
			numbers.push_back(std::strtod(token.c_str(), nullptr) * (negative ? -1.0 : 1.0));
		}
		i = j;
	}
	return numbers;
}

std::vector<double> parse_series_text(std::string_view text, std::size_t expected_count) {
	auto numbers = extract_numbers(text);
	if (numbers.size() < expected_count) {
		throw Error(Errc::InsufficientNumbers,
		            "expected " + std::to_string(expected_count) + " numbers, found " + std::to_string(numbers.size()));
	}
	numbers.resize(expected_count);
	return numbers;
}

} // namespace tsnle
