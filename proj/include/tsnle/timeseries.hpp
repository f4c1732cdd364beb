#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsnle {

enum class Frequency { yearly, quarterly, monthly, other };

/// Univariate series. `frequency_label` carries the raw label when the
/// frequency is `other`.
struct TimeSeries {
	std::string id;
	std::vector<double> values;
	Frequency frequency = Frequency::other;
	std::string frequency_label;
	std::string source;

	std::size_t size() const noexcept { return values.size(); }
};

/// A horizon-length forecast attached to the history it was produced from.
struct ForecastWindow {
	std::string history_id;
	std::size_t horizon = 0;
	std::vector<double> values;
	std::string forecaster_id;
};

Frequency parse_frequency(const std::string &label) noexcept;
std::string frequency_name(Frequency frequency, const std::string &label = {});

/// Throws EmptySeries / NonFinite.
void validate(const TimeSeries &series);
/// Throws NonFinite when any element is NaN or infinite.
void require_finite(std::span<const double> values, const char *what);
bool all_finite(std::span<const double> values) noexcept;

/// Arithmetic mean; returns the common value exactly when every element is equal.
double mean_of(std::span<const double> values);

} // namespace tsnle
