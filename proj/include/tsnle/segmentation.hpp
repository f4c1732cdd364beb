#pragma once

#include "tsnle/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsnle {

/// Statistics of values[start, end) of a series.
struct Segment {
	std::size_t start = 0;
	std::size_t end = 0; // exclusive
	double slope = 0.0;
	double intercept = 0.0;
	double mean = 0.0;
	double std = 0.0; // population
	std::optional<std::size_t> seasonality_period;
};

struct Segmentation {
	std::string series_id;
	std::vector<Segment> segments;
	double residual = 0.0; // total squared line-fit error over all segments
};

struct SegmentationConfig {
	std::size_t min_segment_length = 3;
	// Merge threshold on per-point MSE, as a fraction of the series variance.
	double relative_threshold = 0.05;
	double seasonality_min_acf = 0.5;
};

/// Greedy bottom-up merge of minimal blocks: the adjacent pair whose merged
/// line fit has the smallest per-point MSE is merged until every candidate
/// exceeds the threshold. Throws EmptySeries / NonFinite.
Segmentation segment_series(const TimeSeries &series, const SegmentationConfig &config = {});

/// Mean, population std, OLS slope/intercept over local indices, and the
/// seasonality of the detrended segment. Throws InvalidRange.
Segment segment_stats(const TimeSeries &series, std::size_t start, std::size_t end,
                      const SegmentationConfig &config = {});

/// Lag in [2, max_period] with the largest sample autocorrelation, if that
/// autocorrelation reaches `min_acf`. Smallest lag wins ties.
std::optional<std::size_t> detect_seasonality(std::span<const double> values, std::size_t max_period,
                                              double min_acf = 0.5);

/// The templated per-segment text fed to the segment-analysis prompt.
std::string render_segment_summary(const Segmentation &segmentation);

} // namespace tsnle
