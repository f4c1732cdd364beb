#pragma once

// Data-parallel inner loops of the pipeline. Each kernel has an OpenMP
// version (used by the library) and a serial reference with identical
// per-element arithmetic; tests require the two to agree bit for bit and
// bench/ compares their throughput.

#include "tsnle/metrics.hpp"
#include "tsnle/timeseries.hpp"

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

namespace tsnle::kernels {

/// Ordinary least-squares line over (local index, value) pairs.
struct LineFit {
	double slope = 0.0;
	double intercept = 0.0;
	double sse = 0.0; // sum of squared residuals
};

LineFit fit_line(std::span<const double> values);

/// Per-point mean squared residual of the line fitted to values[begin, end).
double line_mse(std::span<const double> values, std::size_t begin, std::size_t end);

namespace serial {

/// cost[j] = line_mse over [bounds[j], bounds[j+2]), i.e. the cost of merging
/// block j with block j+1. `bounds` holds block starts plus the final end.
std::vector<double> merge_costs(std::span<const double> values, std::span<const std::size_t> bounds);

/// Sample autocorrelation r[k] for k = 0..max_lag; empty when the variance is zero.
std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag);

std::vector<DistanceReport> batch_distances(std::span<const std::vector<double>> references,
                                            std::span<const std::vector<double>> candidates);

/// score[t] = smape(base, forecast_fn(history with [t] replaced by its mean)).
template <class ForecastFn>
std::vector<double> occlusion_scores(std::span<const double> history, std::span<const double> base_forecast,
                                     ForecastFn &&forecast_fn) {
	const double fill = mean_of(history);
	std::vector<double> scores(history.size(), 0.0);
	std::vector<double> perturbed(history.begin(), history.end());
	for (std::size_t t = 0; t < history.size(); ++t) {
		if (history[t] == fill) {
			continue;
		}
		perturbed[t] = fill;
		const std::vector<double> forecast = forecast_fn(perturbed);
		scores[t] = smape(base_forecast, forecast);
		perturbed[t] = history[t];
	}
	return scores;
}

} // namespace serial

namespace parallel {

std::vector<double> merge_costs(std::span<const double> values, std::span<const std::size_t> bounds);

std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag);

std::vector<DistanceReport> batch_distances(std::span<const std::vector<double>> references,
                                            std::span<const std::vector<double>> candidates);

/// Same contract as serial::occlusion_scores. `forecast_fn` must be safe to
/// call concurrently. The first exception thrown by any index is rethrown.
template <class ForecastFn>
std::vector<double> occlusion_scores(std::span<const double> history, std::span<const double> base_forecast,
                                     ForecastFn &&forecast_fn) {
	const double fill = mean_of(history);
	const auto n = static_cast<std::ptrdiff_t>(history.size());
	std::vector<double> scores(history.size(), 0.0);
	std::exception_ptr failure;
	std::mutex failure_mutex;

#pragma omp parallel for schedule(dynamic)
	for (std::ptrdiff_t t = 0; t < n; ++t) {
		const auto idx = static_cast<std::size_t>(t);
		if (history[idx] == fill) {
			continue;
		}
		try {
			std::vector<double> perturbed(history.begin(), history.end());
			perturbed[idx] = fill;
			const std::vector<double> forecast = forecast_fn(perturbed);
			scores[idx] = smape(base_forecast, forecast);
		} catch (...) {
			std::lock_guard<std::mutex> lock(failure_mutex);
			if (!failure) {
				failure = std::current_exception();
			}
		}
	}
	if (failure) {
		std::rethrow_exception(failure);
	}
	return scores;
}

} // namespace parallel

} // namespace tsnle::kernels
