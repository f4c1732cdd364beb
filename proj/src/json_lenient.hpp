#pragma once

#include <nlohmann/json.hpp>

#include <regex>
#include <string>

namespace tsnle::detail {

/// Parses JSON, reading the bare NaN/Infinity tokens Python emits as null.
/// Returns a discarded value on failure.
inline nlohmann::json parse_json_lenient(const std::string &body) {
	auto parsed = nlohmann::json::parse(body, nullptr, false);
	if (!parsed.is_discarded()) {
		return parsed;
	}
	static const std::regex non_finite(R"((-?Infinity|NaN)(?=\s*[,\]}]))");
	return nlohmann::json::parse(std::regex_replace(body, non_finite, "null"), nullptr, false);
}

} // namespace tsnle::detail
