#include "tsnle/surrogate.hpp"

#include "tsnle/error.hpp"
#include "tsnle/prompts.hpp"
#include "tsnle/text_codec.hpp"

#include <algorithm>
#include <cmath>

namespace tsnle {

std::string surrogate_mode_name(SurrogateMode mode) {
	switch (mode) {
	case SurrogateMode::plain: return "plain";
	case SurrogateMode::with_tip: return "with_tip";
	case SurrogateMode::constant: return "constant";
	}
	return "unknown";
}

std::int64_t attempt_seed(std::int64_t seed, int attempt) noexcept {
	if (attempt == 0) {
		return seed;
	}
	// splitmix64 finalizer over (seed, attempt)
	auto z = static_cast<std::uint64_t>(seed) + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
	z ^= z >> 31;
	return static_cast<std::int64_t>(z >> 1);
}

double rescale_factor(std::span<const double> values, double quantile) {
	if (values.empty() || !(quantile > 0.0 && quantile <= 1.0)) {
		throw Error(Errc::InvalidRange, "rescale needs values and a quantile in (0, 1]");
	}
	std::vector<double> magnitudes(values.size());
	std::transform(values.begin(), values.end(), magnitudes.begin(), [](double v) { return std::fabs(v); });
	std::sort(magnitudes.begin(), magnitudes.end());
	const double position = quantile * static_cast<double>(magnitudes.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(position));
	const auto hi = std::min(lo + 1, magnitudes.size() - 1);
	const double scale = magnitudes[lo] + (position - static_cast<double>(lo)) * (magnitudes[hi] - magnitudes[lo]);
	return scale > 0.0 ? scale : 1.0;
}

Surrogate::Surrogate(llm::Gateway &gateway, SurrogateConfig config) : gateway_(gateway), config_(config) {
}

double Surrogate::scale_for(const TimeSeries &history) const {
	return config_.rescale ? rescale_factor(history.values, config_.rescale_quantile) : 1.0;
}

std::string Surrogate::encode(const TimeSeries &history) const {
	if (!config_.rescale) {
		return encode_series_text(history.values, config_.precision);
	}
	const double scale = scale_for(history);
	std::vector<double> scaled(history.values);
	for (auto &v : scaled) {
		v /= scale;
	}
	return encode_series_text(scaled, config_.precision);
}

std::string Surrogate::tip_prompt(const Explanation &explanation) const {
	return prompts::render(prompts::Template::forecast_tip, {{"forecast_explanation", explanation.text}});
}

std::string Surrogate::plain_prompt(const TimeSeries &history, std::size_t horizon) const {
	return prompts::render(prompts::Template::llmtime_plain,
	                       {{"forecast_horizon", std::to_string(horizon)},
	                        {"time_series_data", encode(history)}});
}

std::string Surrogate::tip_forecast_prompt(const TimeSeries &history, std::size_t horizon, const std::string &tip) const {
	return prompts::render(prompts::Template::llmtime_tip,
	                       {{"forecast_horizon", std::to_string(horizon)},
	                        {"forecast_tip", tip},
	                        {"time_series_data", encode(history)}});
}

std::string Surrogate::constant_prompt(const TimeSeries &history, std::size_t horizon) const {
	return prompts::render(prompts::Template::llmtime_constant,
	                       {{"forecast_horizon", std::to_string(horizon)},
	                        {"time_series_data", encode(history)}});
}

std::string Surrogate::make_forecast_tip(const Explanation &explanation, const std::string &endpoint,
                                         std::int64_t seed) {
	if (explanation.text.empty()) {
		throw Error(Errc::PreconditionFailed, "explanation text is empty");
	}
	auto params = gateway_.default_params(endpoint);
	params.seed = seed;
	return gateway_.complete(llm::split_prompt(tip_prompt(explanation), params, endpoint));
}

SurrogateForecast Surrogate::simulate(const std::string &prompt, std::size_t horizon, SurrogateMode mode,
                                      const std::string &endpoint, std::int64_t seed, double scale) {
	if (horizon == 0) {
		throw Error(Errc::InvalidRange, "horizon must be positive");
	}
	SurrogateForecast result;
	result.mode = mode;
	const auto base = gateway_.default_params(endpoint);
	for (int attempt = 0; attempt <= config_.max_parse_retries; ++attempt) {
		auto params = base;
		params.seed = attempt_seed(seed, attempt);
		result.attempts = attempt + 1;
		result.raw_completion = gateway_.complete(llm::split_prompt(prompt, params, endpoint));
		try {
			auto values = parse_series_text(result.raw_completion, horizon);
			if (scale != 1.0) {
				for (auto &v : values) {
					v *= scale;
				}
			}
			if (all_finite(values)) {
				result.values = std::move(values);
				return result;
			}
		} catch (const Error &e) {
			if (e.code() != Errc::InsufficientNumbers) {
				throw;
			}
		}
	}
	throw Error(Errc::ParseFailed, "no parsable " + std::to_string(horizon) + "-step forecast after " +
	                                   std::to_string(result.attempts) + " attempts; last completion: " +
	                                   truncate_utf8(result.raw_completion, 200));
}

SurrogateForecast Surrogate::simulate_plain(const TimeSeries &history, std::size_t horizon, const std::string &endpoint,
                                            std::int64_t seed) {
	validate(history);
	return simulate(plain_prompt(history, horizon), horizon, SurrogateMode::plain, endpoint, seed, scale_for(history));
}

SurrogateForecast Surrogate::simulate_with_tip(const TimeSeries &history, std::size_t horizon, const std::string &tip,
                                               const std::string &endpoint, std::int64_t seed) {
	validate(history);
	if (tip.empty()) {
		throw Error(Errc::PreconditionFailed, "forecast tip is empty");
	}
	return simulate(tip_forecast_prompt(history, horizon, tip), horizon, SurrogateMode::with_tip, endpoint, seed, scale_for(history));
}

SurrogateForecast Surrogate::simulate_constant(const TimeSeries &history, std::size_t horizon,
                                               const std::string &endpoint, std::int64_t seed) {
	validate(history);
	return simulate(constant_prompt(history, horizon), horizon, SurrogateMode::constant, endpoint, seed, scale_for(history));
}

} // namespace tsnle
