#pragma once

#include <span>
#include <vector>

namespace tsnle {

/// Scale-free distances between a reference forecast and a candidate.
struct DistanceReport {
	double smape = 0.0; // in [0, 2]
	double nmae = 0.0;
	double nrmse = 0.0;
};

/// (1/k) sum 2|r-c| / (|r|+|c|); 0/0 terms contribute 0. Symmetric, bounded by 2.
double smape(std::span<const double> reference, std::span<const double> candidate);

/// mean|r-c| / mean|r|. Throws ZeroReference when mean|r| == 0.
double nmae(std::span<const double> reference, std::span<const double> candidate);

/// sqrt(mean (r-c)^2) / mean|r|.
double nrmse(std::span<const double> reference, std::span<const double> candidate);

DistanceReport distance_report(std::span<const double> reference, std::span<const double> candidate);

/// SS_E / (SS_base + SS_E). Below 0.5 means the explanation helped.
/// Throws BothZero when both scores are zero.
double normalized_synthetic_score(double ss_with_explanation, double ss_baseline);

/// Per-metric mean of a list of reports. Throws EmptyInput.
DistanceReport mean_report(std::span<const DistanceReport> reports);

/// Macro-average: mean over series within each run, then mean over runs.
/// Runs with no reports are skipped; throws EmptyInput if all are empty.
DistanceReport aggregate(const std::vector<std::vector<DistanceReport>> &per_run);

/// Cohen's kappa for two binary raters.
double cohen_kappa(const std::vector<bool> &labels_a, const std::vector<bool> &labels_b);

/// Kappa from a 2x2 confusion matrix counts[a][b].
double cohen_kappa(const unsigned (&counts)[2][2]);

} // namespace tsnle
