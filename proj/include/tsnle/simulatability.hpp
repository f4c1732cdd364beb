#pragma once

#include "tsnle/executor.hpp"
#include "tsnle/explainer.hpp"
#include "tsnle/forecasters.hpp"
#include "tsnle/llm_gateway.hpp"
#include "tsnle/metrics.hpp"
#include "tsnle/surrogate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsnle {

/// Sanity baselines: no explanation, explanation of a random forecast,
/// adversarial constant prompt, explanation of the true forecast.
enum class Baseline { LLMTime, LLMTime_R, LLMTime_M, LLMTime_E };
enum class SimulationMode { direct, synthetic };

std::string baseline_name(Baseline baseline);
Baseline parse_baseline(const std::string &name);
std::string mode_name(SimulationMode mode);
SimulationMode parse_mode(const std::string &name);
/// True for the baselines whose pipeline runs the explainer.
bool uses_explainer(Baseline baseline) noexcept;

struct SimulationResult {
	SimulationMode mode = SimulationMode::direct;
	std::string series_id;
	std::string forecaster_id;
	std::string explainer_endpoint; // empty when no explanation is involved
	Baseline baseline = Baseline::LLMTime;
	std::vector<double> surrogate_values;
	std::vector<double> reference_values;
	DistanceReport distances;
	std::int64_t run_seed = 0;
	std::optional<std::string> explanation;
	std::optional<std::string> tip;
	std::optional<std::string> generator_code;      // synthetic only
	std::optional<std::vector<double>> synthetic_history; // synthetic only
};

struct GeneratorArtifact {
	std::string source_code;
	std::size_t requested_length = 0;
	std::vector<double> produced_values;
};

struct SimulationEndpoints {
	std::string explainer;
	std::string surrogate;
	std::string codegen;
};

struct SimulationConfig {
	ExplainerConfig explainer;
	SurrogateConfig surrogate;
	int codegen_retries = 3;
	std::optional<std::size_t> synthetic_length; // default: history length + horizon
	int executor_timeout_s = 10;
};

/// Renders the code-generation prompt for a synthetic series.
std::string build_generator_prompt(const Explanation &explanation, std::size_t total_length, std::size_t horizon);

/// Contents of the first <generator>...</generator> region, or of the fenced
/// code block inside it when there is one, trimmed. Throws NoGeneratorTag / EmptyCode.
std::string extract_generator_code(const std::string &completion);

enum class Usefulness { useful, not_useful, disagree };
std::string usefulness_name(Usefulness u);

/// Direct vote: ds_with < ds_without. Synthetic vote: nss < 0.5.
Usefulness classify_usefulness(double ds_with, double ds_without, double nss);

class Simulator {
public:
	Simulator(llm::Gateway &gateway, SimulationEndpoints endpoints, SimulationConfig config = {});

	/// One direct-simulatability measurement. The reference is always the
	/// black-box forecast on the original series.
	SimulationResult direct_simulatability(const TimeSeries &series, const ForecasterSpec &spec, std::size_t horizon,
	                                       Baseline baseline, std::int64_t seed);

	/// Synthetic simulatability: returns the LLMTime and LLMTime_E results on
	/// the generated series, from which the normalized score is formed.
	std::pair<SimulationResult, SimulationResult> synthetic_simulatability(const TimeSeries &series,
	                                                                       const ForecasterSpec &spec,
	                                                                       std::size_t horizon,
	                                                                       GeneratorExecutor &executor,
	                                                                       std::int64_t seed);

	/// Code generation plus execution with stateless retries.
	GeneratorArtifact generate_series(const Explanation &explanation, std::size_t total_length, std::size_t horizon,
	                                  GeneratorExecutor &executor, std::int64_t seed);

	Explanation explain(const TimeSeries &series, const ForecasterSpec &spec, const ForecastWindow &forecast,
	                    std::int64_t seed);

	Explainer &explainer() noexcept { return explainer_; }
	Surrogate &surrogate() noexcept { return surrogate_; }
	const SimulationEndpoints &endpoints() const noexcept { return endpoints_; }

private:
	llm::Gateway &gateway_;
	SimulationEndpoints endpoints_;
	SimulationConfig config_;
	Explainer explainer_;
	Surrogate surrogate_;
};

} // namespace tsnle
