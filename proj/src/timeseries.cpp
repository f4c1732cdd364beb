#include "tsnle/timeseries.hpp"

#include "tsnle/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace tsnle {

Frequency parse_frequency(const std::string &label) noexcept {
	std::string lower(label);
	std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
	if (lower == "yearly") {
		return Frequency::yearly;
	}
	if (lower == "quarterly") {
		return Frequency::quarterly;
	}
	if (lower == "monthly") {
		return Frequency::monthly;
	}
	return Frequency::other;
}

std::string frequency_name(Frequency frequency, const std::string &label) {
	switch (frequency) {
	case Frequency::yearly: return "yearly";
	case Frequency::quarterly: return "quarterly";
	case Frequency::monthly: return "monthly";
	case Frequency::other: break;
	}
	return label.empty() ? "other" : label;
}

bool all_finite(std::span<const double> values) noexcept {
	return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(std::span<const double> values, const char *what) {
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (!std::isfinite(values[i])) {
			throw Error(Errc::NonFinite, std::string(what) + ": non-finite value at index " + std::to_string(i));
		}
	}
}

void validate(const TimeSeries &series) {
	if (series.values.empty()) {
		throw Error(Errc::EmptySeries, "series '" + series.id + "' has no values");
	}
	require_finite(series.values, series.id.c_str());
}

double mean_of(std::span<const double> values) {
	if (values.empty()) {
		throw Error(Errc::EmptyInput, "mean of empty sequence");
	}
	if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
		return values.front();
	}
	return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

} // namespace tsnle
