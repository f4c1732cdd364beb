#include "tsnle/simulatability.hpp"

#include "tsnle/error.hpp"
#include "tsnle/prompts.hpp"

namespace tsnle {

std::string baseline_name(Baseline baseline) {
	switch (baseline) {
	case Baseline::LLMTime: return "LLMTime";
	case Baseline::LLMTime_R: return "LLMTime_R";
	case Baseline::LLMTime_M: return "LLMTime_M";
	case Baseline::LLMTime_E: return "LLMTime_E";
	}
	return "unknown";
}

Baseline parse_baseline(const std::string &name) {
	for (auto b : {Baseline::LLMTime, Baseline::LLMTime_R, Baseline::LLMTime_M, Baseline::LLMTime_E}) {
		if (baseline_name(b) == name) {
			return b;
		}
	}
	throw Error(Errc::ConfigInvalid, "unknown baseline '" + name + "'");
}

std::string mode_name(SimulationMode mode) {
	return mode == SimulationMode::direct ? "direct" : "synthetic";
}

SimulationMode parse_mode(const std::string &name) {
	if (name == "direct") {
		return SimulationMode::direct;
	}
	if (name == "synthetic") {
		return SimulationMode::synthetic;
	}
	throw Error(Errc::ConfigInvalid, "unknown simulation mode '" + name + "'");
}

bool uses_explainer(Baseline baseline) noexcept {
	return baseline == Baseline::LLMTime_E || baseline == Baseline::LLMTime_R;
}

std::string build_generator_prompt(const Explanation &explanation, std::size_t total_length, std::size_t horizon) {
	if (explanation.text.empty()) {
		throw Error(Errc::PreconditionFailed, "explanation text is empty");
	}
	return prompts::render(prompts::Template::series_generator, {{"forecast_horizon", std::to_string(horizon)},
	                                                             {"timeseries_size", std::to_string(total_length)},
	                                                             {"forecast_explanation", explanation.text}});
}

namespace {

std::string trim(const std::string &text) {
	const auto begin = text.find_first_not_of(" \t\r\n");
	if (begin == std::string::npos) {
		return {};
	}
	const auto end = text.find_last_not_of(" \t\r\n");
	return text.substr(begin, end - begin + 1);
}

} // namespace

std::string extract_generator_code(const std::string &completion) {
	static const std::string open_tag = "<generator>";
	static const std::string close_tag = "</generator>";
	const auto open = completion.find(open_tag);
	if (open == std::string::npos) {
		throw Error(Errc::NoGeneratorTag, "completion has no <generator> tag");
	}
	const auto body_begin = open + open_tag.size();
	const auto close = completion.find(close_tag, body_begin);
	if (close == std::string::npos) {
		throw Error(Errc::NoGeneratorTag, "<generator> tag is never closed");
	}
	std::string region = completion.substr(body_begin, close - body_begin);

	const auto fence = region.find("```");
	if (fence != std::string::npos) {
		const auto line_end = region.find('\n', fence);
		if (line_end != std::string::npos) {
			const auto fence_end = region.find("```", line_end + 1);
			region = region.substr(line_end + 1,
			                       fence_end == std::string::npos ? std::string::npos : fence_end - line_end - 1);
		}
	}
	std::string code = trim(region);
	if (code.empty()) {
		throw Error(Errc::EmptyCode, "<generator> region holds no code");
	}
	return code;
}

std::string usefulness_name(Usefulness u) {
	switch (u) {
	case Usefulness::useful: return "useful";
	case Usefulness::not_useful: return "not_useful";
	case Usefulness::disagree: return "disagree";
	}
	return "unknown";
}

Usefulness classify_usefulness(double ds_with, double ds_without, double nss) {
	const bool direct_vote = ds_with < ds_without;
	const bool synthetic_vote = nss < 0.5;
	if (direct_vote != synthetic_vote) {
		return Usefulness::disagree;
	}
	return direct_vote ? Usefulness::useful : Usefulness::not_useful;
}

Simulator::Simulator(llm::Gateway &gateway, SimulationEndpoints endpoints, SimulationConfig config)
    : gateway_(gateway), endpoints_(std::move(endpoints)), config_(config), explainer_(gateway, config.explainer),
      surrogate_(gateway, config.surrogate) {
}

Explanation Simulator::explain(const TimeSeries &series, const ForecasterSpec &spec, const ForecastWindow &forecast,
                               std::int64_t seed) {
	const ImportanceProfile importance = occlusion_importance(spec, series, forecast.horizon);
	return explainer_.generate_explanation(series, forecast, importance, endpoints_.explainer, seed);
}

SimulationResult Simulator::direct_simulatability(const TimeSeries &series, const ForecasterSpec &spec,
                                                  std::size_t horizon, Baseline baseline, std::int64_t seed) {
	const ForecastWindow reference = forecast(spec, series, horizon);

	SimulationResult result;
	result.mode = SimulationMode::direct;
	result.series_id = series.id;
	result.forecaster_id = spec.id;
	result.baseline = baseline;
	result.run_seed = seed;
	result.reference_values = reference.values;

	SurrogateForecast simulated;
	switch (baseline) {
	case Baseline::LLMTime:
		simulated = surrogate_.simulate_plain(series, horizon, endpoints_.surrogate, seed);
		break;
	case Baseline::LLMTime_M:
		simulated = surrogate_.simulate_constant(series, horizon, endpoints_.surrogate, seed);
		break;
	case Baseline::LLMTime_E:
	case Baseline::LLMTime_R: {
		ForecastWindow explained = reference;
		if (baseline == Baseline::LLMTime_R) {
			explained = random_forecast(series, horizon, static_cast<std::uint64_t>(seed));
			explained.forecaster_id = spec.id;
		}
		const Explanation explanation = explain(series, spec, explained, seed);
		const std::string tip = surrogate_.make_forecast_tip(explanation, endpoints_.surrogate, seed);
		simulated = surrogate_.simulate_with_tip(series, horizon, tip, endpoints_.surrogate, seed);
		result.explainer_endpoint = endpoints_.explainer;
		result.explanation = explanation.text;
		result.tip = tip;
		break;
	}
	}
	result.surrogate_values = std::move(simulated.values);
	result.distances = distance_report(result.reference_values, result.surrogate_values);
	return result;
}

GeneratorArtifact Simulator::generate_series(const Explanation &explanation, std::size_t total_length,
                                             std::size_t horizon, GeneratorExecutor &executor, std::int64_t seed) {
	const std::string prompt = build_generator_prompt(explanation, total_length, horizon);
	const auto base = gateway_.default_params(endpoints_.codegen);
	std::optional<Error> last_failure;

	for (int attempt = 0; attempt <= config_.codegen_retries; ++attempt) {
		auto params = base;
		params.seed = attempt_seed(seed, attempt);
		const std::string completion = gateway_.complete(llm::split_prompt(prompt, params, endpoints_.codegen));
		try {
			GeneratorArtifact artifact;
			artifact.source_code = extract_generator_code(completion);
			artifact.requested_length = total_length;
			artifact.produced_values = executor.execute(artifact.source_code, total_length, config_.executor_timeout_s);
			return artifact;
		} catch (const Error &e) {
			switch (e.code()) {
			case Errc::NoGeneratorTag:
			case Errc::EmptyCode:
			case Errc::ExecutorFailed:
			case Errc::NonFiniteSeries: last_failure = e; break;
			default: throw;
			}
		}
	}
	if (last_failure->code() == Errc::ExecutorFailed || last_failure->code() == Errc::NonFiniteSeries) {
		throw *last_failure;
	}
	throw Error(Errc::CodegenFailed, std::string("no usable generator after retries: ") + last_failure->what());
}

std::pair<SimulationResult, SimulationResult> Simulator::synthetic_simulatability(const TimeSeries &series,
                                                                                  const ForecasterSpec &spec,
                                                                                  std::size_t horizon,
                                                                                  GeneratorExecutor &executor,
                                                                                  std::int64_t seed) {
	const ForecastWindow original = forecast(spec, series, horizon);
	const Explanation explanation = explain(series, spec, original, seed);
	const std::string tip = surrogate_.make_forecast_tip(explanation, endpoints_.surrogate, seed);

	const std::size_t total = config_.synthetic_length.value_or(series.size() + horizon);
	if (total <= horizon + 1) {
		throw Error(Errc::InvalidRange, "synthetic length must exceed the horizon by at least 2");
	}
	const GeneratorArtifact artifact = generate_series(explanation, total, horizon, executor, seed);

	TimeSeries synthetic;
	synthetic.id = series.id + "#synthetic";
	synthetic.values.assign(artifact.produced_values.begin(),
	                        artifact.produced_values.end() - static_cast<std::ptrdiff_t>(horizon));
	synthetic.frequency = series.frequency;
	synthetic.frequency_label = series.frequency_label;
	synthetic.source = series.source;

	const ForecastWindow reference = forecast(spec, synthetic, horizon);

	auto make_result = [&](Baseline baseline, SurrogateForecast simulated) {
		SimulationResult result;
		result.mode = SimulationMode::synthetic;
		result.series_id = series.id;
		result.forecaster_id = spec.id;
		result.baseline = baseline;
		result.run_seed = seed;
		result.reference_values = reference.values;
		result.surrogate_values = std::move(simulated.values);
		result.distances = distance_report(result.reference_values, result.surrogate_values);
		result.generator_code = artifact.source_code;
		result.synthetic_history = synthetic.values;
		return result;
	};

	SimulationResult plain =
	    make_result(Baseline::LLMTime, surrogate_.simulate_plain(synthetic, horizon, endpoints_.surrogate, seed));
	SimulationResult guided = make_result(
	    Baseline::LLMTime_E, surrogate_.simulate_with_tip(synthetic, horizon, tip, endpoints_.surrogate, seed));
	guided.explainer_endpoint = endpoints_.explainer;
	guided.explanation = explanation.text;
	guided.tip = tip;
	return {std::move(plain), std::move(guided)};
}

} // namespace tsnle
