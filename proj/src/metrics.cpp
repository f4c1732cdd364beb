#include "tsnle/metrics.hpp"

#include "tsnle/error.hpp"
#include "tsnle/timeseries.hpp"

#include <cmath>
#include <string>

namespace tsnle {

namespace {

void check_pair(std::span<const double> reference, std::span<const double> candidate) {
	if (reference.size() != candidate.size()) {
		throw Error(Errc::LengthMismatch, "reference has " + std::to_string(reference.size()) +
		                                      " values, candidate has " + std::to_string(candidate.size()));
	}
	if (reference.empty()) {
		throw Error(Errc::EmptyInput, "distance of empty sequences");
	}
	require_finite(reference, "reference");
	require_finite(candidate, "candidate");
}

double mean_abs_reference(std::span<const double> reference) {
	double total = 0.0;
	for (double r : reference) {
		total += std::fabs(r);
	}
	const double scale = total / static_cast<double>(reference.size());
	if (scale == 0.0) {
		throw Error(Errc::ZeroReference, "mean |reference| is zero");
	}
	return scale;
}

} // namespace

double smape(std::span<const double> reference, std::span<const double> candidate) {
	check_pair(reference, candidate);
	double total = 0.0;
	for (std::size_t i = 0; i < reference.size(); ++i) {
		const double denom = std::fabs(reference[i]) + std::fabs(candidate[i]);
		if (denom > 0.0) {
			total += 2.0 * std::fabs(reference[i] - candidate[i]) / denom;
		}
	}
	return total / static_cast<double>(reference.size());
}

double nmae(std::span<const double> reference, std::span<const double> candidate) {
	check_pair(reference, candidate);
	const double scale = mean_abs_reference(reference);
	double total = 0.0;
	for (std::size_t i = 0; i < reference.size(); ++i) {
		total += std::fabs(reference[i] - candidate[i]);
	}
	return total / static_cast<double>(reference.size()) / scale;
}

double nrmse(std::span<const double> reference, std::span<const double> candidate) {
	check_pair(reference, candidate);
	const double scale = mean_abs_reference(reference);
	double total = 0.0;
	for (std::size_t i = 0; i < reference.size(); ++i) {
		const double d = reference[i] - candidate[i];
		total += d * d;
	}
	return std::sqrt(total / static_cast<double>(reference.size())) / scale;
}

DistanceReport distance_report(std::span<const double> reference, std::span<const double> candidate) {
	return DistanceReport{smape(reference, candidate), nmae(reference, candidate), nrmse(reference, candidate)};
}

double normalized_synthetic_score(double ss_with_explanation, double ss_baseline) {
	if (!std::isfinite(ss_with_explanation) || !std::isfinite(ss_baseline) || ss_with_explanation < 0.0 ||
	    ss_baseline < 0.0) {
		throw Error(Errc::InvalidRange, "synthetic scores must be finite and non-negative");
	}
	const double total = ss_baseline + ss_with_explanation;
	if (total == 0.0) {
		throw Error(Errc::BothZero, "both synthetic scores are zero");
	}
	return ss_with_explanation / total;
}

DistanceReport mean_report(std::span<const DistanceReport> reports) {
	if (reports.empty()) {
		throw Error(Errc::EmptyInput, "no reports to average");
	}
	DistanceReport sum;
	for (const auto &r : reports) {
		sum.smape += r.smape;
		sum.nmae += r.nmae;
		sum.nrmse += r.nrmse;
	}
	const auto n = static_cast<double>(reports.size());
	return DistanceReport{sum.smape / n, sum.nmae / n, sum.nrmse / n};
}

DistanceReport aggregate(const std::vector<std::vector<DistanceReport>> &per_run) {
	std::vector<DistanceReport> run_means;
	for (const auto &run : per_run) {
		if (!run.empty()) {
			run_means.push_back(mean_report(run));
		}
	}
	return mean_report(run_means);
}

double cohen_kappa(const unsigned (&counts)[2][2]) {
	const double n = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
	if (n == 0.0) {
		throw Error(Errc::EmptyInput, "kappa of an empty confusion matrix");
	}
	const double observed = (counts[0][0] + counts[1][1]) / n;
	const double a1 = (counts[1][0] + counts[1][1]) / n;
	const double b1 = (counts[0][1] + counts[1][1]) / n;
	const double expected = a1 * b1 + (1.0 - a1) * (1.0 - b1);
	if (expected == 1.0) {
		// Both raters used a single identical label throughout.
		return 1.0;
	}
	return (observed - expected) / (1.0 - expected);
}

double cohen_kappa(const std::vector<bool> &labels_a, const std::vector<bool> &labels_b) {
	if (labels_a.size() != labels_b.size()) {
		throw Error(Errc::LengthMismatch, "label vectors differ in length");
	}
	if (labels_a.empty()) {
		throw Error(Errc::EmptyInput, "kappa of empty label vectors");
	}
	unsigned counts[2][2] = {{0, 0}, {0, 0}};
	for (std::size_t i = 0; i < labels_a.size(); ++i) {
		++counts[labels_a[i] ? 1 : 0][labels_b[i] ? 1 : 0];
	}
	return cohen_kappa(counts);
}

} // namespace tsnle
