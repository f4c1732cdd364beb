#pragma once

#include "tsnle/forecasters.hpp"
#include "tsnle/llm_gateway.hpp"
#include "tsnle/segmentation.hpp"
#include "tsnle/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tsnle {

struct ChainStep {
	std::string prompt;
	std::string completion;
};

/// A natural-language explanation of a forecast with the prompt chain that produced it.
struct Explanation {
	std::string text;
	std::string history_id;
	std::string forecaster_id;
	std::string explainer_endpoint_id;
	std::vector<ChainStep> chain;
	std::int64_t seed = 0;
};

struct ExplainerConfig {
	SegmentationConfig segmentation;
	int precision = 2;                     // decimals used to embed series and forecasts
	std::size_t max_completion_chars = 2000; // stage outputs are truncated beyond this
};

/// "The forecaster's output is most sensitive to history indices i1, i2, i3."
std::string render_preanalysis(const ImportanceProfile &importance);

/// Truncates at a UTF-8 character boundary at or below `max_bytes`.
std::string truncate_utf8(const std::string &text, std::size_t max_bytes);

/// Baseline explainer: segment summaries -> segment analysis -> history
/// analysis -> forecast explanation, one LLM call per stage.
class Explainer {
public:
	Explainer(llm::Gateway &gateway, ExplainerConfig config = {});

	std::string segment_analysis_prompt(const std::string &segment_summary) const;
	std::string history_analysis_prompt(const TimeSeries &series, const std::string &segment_analysis) const;
	std::string forecast_explanation_prompt(const TimeSeries &series, const ForecastWindow &forecast,
	                                        const std::string &history_analysis, const std::string &preanalysis) const;

	/// Throws PreconditionFailed on an empty summary, before any LLM call.
	std::string build_segment_analysis(const std::string &segment_summary, const std::string &endpoint,
	                                   std::int64_t seed = 0);

	std::string build_history_analysis(const TimeSeries &series, const std::string &segment_analysis,
	                                   const std::string &endpoint, std::int64_t seed = 0);

	/// Runs the full chain. Throws ChainAborted when a stage comes back empty.
	Explanation generate_explanation(const TimeSeries &series, const ForecastWindow &forecast,
	                                 const ImportanceProfile &importance, const std::string &endpoint,
	                                 std::int64_t seed);

	const ExplainerConfig &config() const noexcept { return config_; }

private:
	ChainStep run_stage(const std::string &prompt, const std::string &endpoint, std::int64_t seed);

	llm::Gateway &gateway_;
	ExplainerConfig config_;
};

} // namespace tsnle
