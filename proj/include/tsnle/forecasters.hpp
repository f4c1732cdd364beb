#pragma once

#include "tsnle/timeseries.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tsnle {

enum class ForecasterKind { naive, drift, ses, ar, external };

struct ForecasterSpec {
	std::string id;
	ForecasterKind kind = ForecasterKind::naive;
	double alpha = 0.5;      // ses smoothing, in (0, 1]
	std::size_t order = 1;   // ar order
	std::string endpoint;    // external base URL
	std::chrono::milliseconds timeout{30000};
	std::map<std::string, std::string> params; // forwarded untouched, informational
};

/// Throws InvalidSpec for out-of-range parameters.
void validate(const ForecasterSpec &spec);

ForecasterKind parse_forecaster_kind(const std::string &name);
std::string forecaster_kind_name(ForecasterKind kind);

/// Deterministic for the built-in kinds. Throws HistoryTooShort,
/// ExternalUnavailable, MalformedResponse, NonFiniteOutput.
ForecastWindow forecast(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon);

/// Values drawn uniformly over [min(history), max(history)] from a seeded generator.
ForecastWindow random_forecast(const TimeSeries &history, std::size_t horizon, std::uint64_t seed);

/// Per-index sensitivity of a forecaster.
struct ImportanceProfile {
	std::string series_id;
	std::vector<double> scores;
};

/// score[t] = smape(F, F_t), F_t being the forecast after replacing history[t]
/// with the history mean.
ImportanceProfile occlusion_importance(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon);

/// POST {endpoint}/forecast with {"history", "horizon", "series_id"};
/// expects {"forecast": [...]} with exactly `horizon` finite entries.
ForecastWindow external_forecast(const std::string &endpoint, const TimeSeries &history, std::size_t horizon,
                                 std::chrono::milliseconds timeout);

} // namespace tsnle
