#include "tsnle/segmentation.hpp"

#include "tsnle/error.hpp"
#include "tsnle/kernels.hpp"
#include "tsnle/text_codec.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tsnle {

namespace {

double population_variance(std::span<const double> values) {
	const double mean = mean_of(values);
	double total = 0.0;
	for (double v : values) {
		total += (v - mean) * (v - mean);
	}
	return total / static_cast<double>(values.size());
}

} // namespace

std::optional<std::size_t> detect_seasonality(std::span<const double> values, std::size_t max_period, double min_acf) {
	if (values.size() < 4 || max_period < 2) {
		return std::nullopt;
	}
	const std::size_t max_lag = std::min(max_period, values.size() - 1);
	const auto acf = kernels::parallel::autocorrelations(values, max_lag);
	if (acf.empty()) {
		return std::nullopt;
	}
	std::optional<std::size_t> best;
	for (std::size_t lag = 2; lag <= max_lag; ++lag) {
		if (!best || acf[lag] > acf[*best]) {
			best = lag;
		}
	}
	if (!best || acf[*best] < min_acf) {
		return std::nullopt;
	}
	return best;
}

Segment segment_stats(const TimeSeries &series, std::size_t start, std::size_t end, const SegmentationConfig &config) {
	if (start >= end || end > series.values.size()) {
		throw Error(Errc::InvalidRange,
		            fmt::format("segment [{}, {}) outside series of length {}", start, end, series.values.size()));
	}
	const std::span<const double> values(series.values.data() + start, end - start);

	Segment segment;
	segment.start = start;
	segment.end = end;
	segment.mean = mean_of(values);
	const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
	if (constant) {
		segment.intercept = values.front();
		return segment;
	}
	segment.std = std::sqrt(population_variance(values));

	const auto fit = kernels::fit_line(values);
	segment.slope = fit.slope;
	segment.intercept = fit.intercept;

	std::vector<double> detrended(values.size());
	for (std::size_t i = 0; i < values.size(); ++i) {
		detrended[i] = values[i] - (fit.intercept + fit.slope * static_cast<double>(i));
	}
	segment.seasonality_period = detect_seasonality(detrended, values.size() / 2, config.seasonality_min_acf);
	return segment;
}

Segmentation segment_series(const TimeSeries &series, const SegmentationConfig &config) {
	validate(series);
	if (config.min_segment_length == 0) {
		throw Error(Errc::InvalidRange, "min_segment_length must be positive");
	}
	const std::span<const double> values(series.values);
	const std::size_t n = values.size();
	const std::size_t m = config.min_segment_length;

	// Block starts followed by the series end. The last block absorbs the remainder.
	std::vector<std::size_t> bounds{0};
	if (n >= 2 * m) {
		for (std::size_t b = m; b + m <= n; b += m) {
			bounds.push_back(b);
		}
	}
	bounds.push_back(n);

	const double threshold = config.relative_threshold * population_variance(values);
	std::vector<double> costs = kernels::parallel::merge_costs(values, bounds);
	while (!costs.empty()) {
		const auto best = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
		if (costs[best] > threshold) {
			break;
		}
		// Merge block best with best+1: drop the boundary between them.
		bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(best) + 1);
		costs.erase(costs.begin() + static_cast<std::ptrdiff_t>(best));
		if (best > 0) {
			costs[best - 1] = kernels::line_mse(values, bounds[best - 1], bounds[best + 1]);
		}
		if (best < costs.size()) {
			costs[best] = kernels::line_mse(values, bounds[best], bounds[best + 2]);
		}
	}

	Segmentation result;
	result.series_id = series.id;
	for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
		result.segments.push_back(segment_stats(series, bounds[j], bounds[j + 1], config));
		result.residual += kernels::fit_line(values.subspan(bounds[j], bounds[j + 1] - bounds[j])).sse;
	}
	return result;
}

std::string render_segment_summary(const Segmentation &segmentation) {
	if (segmentation.segments.empty()) {
		throw Error(Errc::PreconditionFailed, "segmentation has no segments");
	}
	std::string out = fmt::format("There are {} segments in the time series", segmentation.segments.size());
	for (std::size_t k = 0; k < segmentation.segments.size(); ++k) {
		const auto &s = segmentation.segments[k];
		out += fmt::format("\n{}. Segment {} starts at index {}, ends at index {}. The mean is {} the std is {} and the "
		                   "slope in this segment is {}.",
		                   k + 1, k + 1, s.start, s.end, format_fixed(s.mean, 2), format_fixed(s.std, 2),
		                   format_fixed(s.slope, 2));
		if (s.seasonality_period) {
			out += fmt::format(" It repeats itself every {} predictions.", *s.seasonality_period);
		}
	}
	return out;
}

} // namespace tsnle
