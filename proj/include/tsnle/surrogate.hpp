#pragma once

#include "tsnle/explainer.hpp"
#include "tsnle/llm_gateway.hpp"
#include "tsnle/timeseries.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tsnle {

enum class SurrogateMode { plain, with_tip, constant };

std::string surrogate_mode_name(SurrogateMode mode);

struct SurrogateForecast {
	std::vector<double> values;
	SurrogateMode mode = SurrogateMode::plain;
	std::string raw_completion; // last completion received, parsed or not
	int attempts = 0;
};

struct SurrogateConfig {
	int precision = 2;
	int max_parse_retries = 2;
	// Divide the history by a quantile of |history| before encoding and
	// scale parsed values back. Off by default: raw decimals go to the model.
	bool rescale = false;
	double rescale_quantile = 0.95;
};

/// Scale used when rescaling is on: the `quantile` of |values| (linear
/// interpolation), or 1 when that is zero.
double rescale_factor(std::span<const double> values, double quantile);

/// Seed used for the given retry attempt; attempt 0 keeps the run seed.
std::int64_t attempt_seed(std::int64_t seed, int attempt) noexcept;

/// The LLM standing in for a human forecaster.
class Surrogate {
public:
	Surrogate(llm::Gateway &gateway, SurrogateConfig config = {});

	std::string tip_prompt(const Explanation &explanation) const;
	std::string plain_prompt(const TimeSeries &history, std::size_t horizon) const;
	std::string tip_forecast_prompt(const TimeSeries &history, std::size_t horizon, const std::string &tip) const;
	std::string constant_prompt(const TimeSeries &history, std::size_t horizon) const;

	/// Rewrites an explanation as a recommendation for another forecaster.
	std::string make_forecast_tip(const Explanation &explanation, const std::string &endpoint, std::int64_t seed = 0);

	/// Throws ParseFailed once max_parse_retries fresh completions all fail to parse.
	SurrogateForecast simulate_plain(const TimeSeries &history, std::size_t horizon, const std::string &endpoint,
	                                 std::int64_t seed);
	SurrogateForecast simulate_with_tip(const TimeSeries &history, std::size_t horizon, const std::string &tip,
	                                    const std::string &endpoint, std::int64_t seed);
	/// Adversarial variant asking for a constant value at every step.
	SurrogateForecast simulate_constant(const TimeSeries &history, std::size_t horizon, const std::string &endpoint,
	                                    std::int64_t seed);

	const SurrogateConfig &config() const noexcept { return config_; }

private:
	SurrogateForecast simulate(const std::string &prompt, std::size_t horizon, SurrogateMode mode,
	                           const std::string &endpoint, std::int64_t seed, double scale);
	double scale_for(const TimeSeries &history) const;
	std::string encode(const TimeSeries &history) const;

	llm::Gateway &gateway_;
	SurrogateConfig config_;
};

} // namespace tsnle
