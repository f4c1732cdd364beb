#include "tsnle/kernels.hpp"

#include "tsnle/error.hpp"

#include <string>

namespace tsnle::kernels {

LineFit fit_line(std::span<const double> values) {
	const std::size_t n = values.size();
	if (n == 0) {
		throw Error(Errc::EmptyInput, "line fit of empty range");
	}
	if (n == 1) {
		return LineFit{0.0, values[0], 0.0};
	}
	const double x_mean = static_cast<double>(n - 1) / 2.0;
	const double y_mean = mean_of(values);
	double sxy = 0.0;
	double sxx = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		const double dx = static_cast<double>(i) - x_mean;
		sxy += dx * (values[i] - y_mean);
		sxx += dx * dx;
	}
	LineFit fit;
	fit.slope = sxy / sxx;
	fit.intercept = y_mean - fit.slope * x_mean;
	for (std::size_t i = 0; i < n; ++i) {
		const double r = values[i] - (fit.intercept + fit.slope * static_cast<double>(i));
		fit.sse += r * r;
	}
	return fit;
}

double line_mse(std::span<const double> values, std::size_t begin, std::size_t end) {
	if (begin >= end || end > values.size()) {
		throw Error(Errc::InvalidRange, "bad range [" + std::to_string(begin) + ", " + std::to_string(end) + ")");
	}
	return fit_line(values.subspan(begin, end - begin)).sse / static_cast<double>(end - begin);
}

namespace {

void check_bounds(std::span<const double> values, std::span<const std::size_t> bounds) {
	for (std::size_t j = 1; j < bounds.size(); ++j) {
		if (bounds[j] <= bounds[j - 1] || bounds[j] > values.size()) {
			throw Error(Errc::InvalidRange, "block bounds must be strictly increasing within the series");
		}
	}
}

double acf_denominator(std::span<const double> values, double mean) {
	double denom = 0.0;
	for (double v : values) {
		denom += (v - mean) * (v - mean);
	}
	return denom;
}

double acf_at(std::span<const double> values, double mean, double denom, std::size_t lag) {
	double num = 0.0;
	for (std::size_t t = 0; t + lag < values.size(); ++t) {
		num += (values[t] - mean) * (values[t + lag] - mean);
	}
	return num / denom;
}

void check_batch(std::span<const std::vector<double>> references, std::span<const std::vector<double>> candidates) {
	if (references.size() != candidates.size()) {
		throw Error(Errc::LengthMismatch, "batch sizes differ");
	}
}

} // namespace

namespace serial {

std::vector<double> merge_costs(std::span<const double> values, std::span<const std::size_t> bounds) {
	check_bounds(values, bounds);
	if (bounds.size() < 3) {
		return {};
	}
	std::vector<double> costs(bounds.size() - 2);
	for (std::size_t j = 0; j < costs.size(); ++j) {
		costs[j] = line_mse(values, bounds[j], bounds[j + 2]);
	}
	return costs;
}

std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag) {
	if (values.empty()) {
		return {};
	}
	const double mean = mean_of(values);
	const double denom = acf_denominator(values, mean);
	if (denom == 0.0) {
		return {};
	}
	std::vector<double> acf(max_lag + 1, 0.0);
	for (std::size_t k = 0; k <= max_lag; ++k) {
		acf[k] = acf_at(values, mean, denom, k);
	}
	return acf;
}

std::vector<DistanceReport> batch_distances(std::span<const std::vector<double>> references,
                                            std::span<const std::vector<double>> candidates) {
	check_batch(references, candidates);
	std::vector<DistanceReport> out(references.size());
	for (std::size_t i = 0; i < references.size(); ++i) {
		out[i] = distance_report(references[i], candidates[i]);
	}
	return out;
}

} // namespace serial

namespace parallel {

std::vector<double> merge_costs(std::span<const double> values, std::span<const std::size_t> bounds) {
	check_bounds(values, bounds);
	if (bounds.size() < 3) {
		return {};
	}
	const auto m = static_cast<std::ptrdiff_t>(bounds.size() - 2);
	std::vector<double> costs(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t j = 0; j < m; ++j) {
		const auto idx = static_cast<std::size_t>(j);
		costs[idx] = line_mse(values, bounds[idx], bounds[idx + 2]);
	}
	return costs;
}

std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag) {
	if (values.empty()) {
		return {};
	}
	const double mean = mean_of(values);
	const double denom = acf_denominator(values, mean);
	if (denom == 0.0) {
		return {};
	}
	const auto lags = static_cast<std::ptrdiff_t>(max_lag + 1);
	std::vector<double> acf(max_lag + 1, 0.0);
#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t k = 0; k < lags; ++k) {
		acf[static_cast<std::size_t>(k)] = acf_at(values, mean, denom, static_cast<std::size_t>(k));
	}
	return acf;
}

std::vector<DistanceReport> batch_distances(std::span<const std::vector<double>> references,
                                            std::span<const std::vector<double>> candidates) {
	check_batch(references, candidates);
	const auto n = static_cast<std::ptrdiff_t>(references.size());
	std::vector<DistanceReport> out(references.size());
	std::exception_ptr failure;
#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t i = 0; i < n; ++i) {
		const auto idx = static_cast<std::size_t>(i);
		try {
			out[idx] = distance_report(references[idx], candidates[idx]);
		} catch (...) {
#pragma omp critical(tsnle_batch_failure)
			if (!failure) {
				failure = std::current_exception();
			}
		}
	}
	if (failure) {
		std::rethrow_exception(failure);
	}
	return out;
}

} // namespace parallel

} // namespace tsnle::kernels
