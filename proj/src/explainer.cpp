#include "tsnle/explainer.hpp"

#include "tsnle/error.hpp"
#include "tsnle/prompts.hpp"
#include "tsnle/text_codec.hpp"

#include <algorithm>
#include <numeric>

namespace tsnle {

std::string render_preanalysis(const ImportanceProfile &importance) {
	std::vector<std::size_t> order(importance.scores.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(),
	                 [&](std::size_t a, std::size_t b) { return importance.scores[a] > importance.scores[b]; });

	std::string indices;
	std::size_t named = 0;
	for (std::size_t idx : order) {
		if (named == 3 || importance.scores[idx] <= 0.0) {
			break;
		}
		if (named > 0) {
			indices += ", ";
		}
		indices += std::to_string(idx);
		++named;
	}
	if (named == 0) {
		return "The forecaster's output is not sensitive to any single history index.";
	}
	return "The forecaster's output is most sensitive to history indices " + indices + ".";
}

std::string truncate_utf8(const std::string &text, std::size_t max_bytes) {
	if (text.size() <= max_bytes) {
		return text;
	}
	std::size_t cut = max_bytes;
	while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
		--cut;
	}
	return text.substr(0, cut);
}

Explainer::Explainer(llm::Gateway &gateway, ExplainerConfig config) : gateway_(gateway), config_(config) {
}

std::string Explainer::segment_analysis_prompt(const std::string &segment_summary) const {
	return prompts::render(prompts::Template::segment_analysis, {{"individual_analysis", segment_summary}});
}

std::string Explainer::history_analysis_prompt(const TimeSeries &series, const std::string &segment_analysis) const {
	return prompts::render(prompts::Template::history_analysis,
	                       {{"time_series_data", encode_series_text(series.values, config_.precision)},
	                        {"segment_analysis", segment_analysis}});
}

std::string Explainer::forecast_explanation_prompt(const TimeSeries &series, const ForecastWindow &forecast,
                                                   const std::string &history_analysis,
                                                   const std::string &preanalysis) const {
	return prompts::render(prompts::Template::forecast_explanation,
	                       {{"forecast_horizon", std::to_string(forecast.values.size())},
	                        {"time_series_data", encode_series_text(series.values, config_.precision)},
	                        {"time_series_analysis", history_analysis},
	                        {"forecasted_data", encode_series_text(forecast.values, config_.precision)},
	                        {"forecast_preanalysis", preanalysis}});
}

ChainStep Explainer::run_stage(const std::string &prompt, const std::string &endpoint, std::int64_t seed) {
	auto params = gateway_.default_params(endpoint);
	params.seed = seed;
	try {
		return ChainStep{prompt, gateway_.complete(llm::split_prompt(prompt, params, endpoint))};
	} catch (const Error &e) {
		if (e.code() == Errc::EmptyCompletion) {
			throw Error(Errc::ChainAborted, e.what());
		}
		throw;
	}
}

std::string Explainer::build_segment_analysis(const std::string &segment_summary, const std::string &endpoint,
                                              std::int64_t seed) {
	if (segment_summary.empty()) {
		throw Error(Errc::PreconditionFailed, "segment summary is empty");
	}
	return run_stage(segment_analysis_prompt(segment_summary), endpoint, seed).completion;
}

std::string Explainer::build_history_analysis(const TimeSeries &series, const std::string &segment_analysis,
                                              const std::string &endpoint, std::int64_t seed) {
	validate(series);
	if (segment_analysis.empty()) {
		throw Error(Errc::PreconditionFailed, "segment analysis is empty");
	}
	return run_stage(history_analysis_prompt(series, segment_analysis), endpoint, seed).completion;
}

Explanation Explainer::generate_explanation(const TimeSeries &series, const ForecastWindow &forecast,
                                            const ImportanceProfile &importance, const std::string &endpoint,
                                            std::int64_t seed) {
	validate(series);
	if (forecast.values.empty() || forecast.values.size() != forecast.horizon) {
		throw Error(Errc::PreconditionFailed, "forecast length does not match its horizon");
	}
	if (importance.scores.size() != series.size()) {
		throw Error(Errc::PreconditionFailed, "importance profile length differs from the series length");
	}

	Explanation explanation;
	explanation.history_id = series.id;
	explanation.forecaster_id = forecast.forecaster_id;
	explanation.explainer_endpoint_id = endpoint;
	explanation.seed = seed;

	const std::string summary = render_segment_summary(segment_series(series, config_.segmentation));
	explanation.chain.push_back(run_stage(segment_analysis_prompt(summary), endpoint, seed));
	const std::string segment_analysis =
	    truncate_utf8(explanation.chain.back().completion, config_.max_completion_chars);

	explanation.chain.push_back(run_stage(history_analysis_prompt(series, segment_analysis), endpoint, seed));
	const std::string history_analysis =
	    truncate_utf8(explanation.chain.back().completion, config_.max_completion_chars);

	explanation.chain.push_back(run_stage(
	    forecast_explanation_prompt(series, forecast, history_analysis, render_preanalysis(importance)), endpoint,
	    seed));
	explanation.text = truncate_utf8(explanation.chain.back().completion, config_.max_completion_chars);
	return explanation;
}

} // namespace tsnle
