#include "tsnle/forecasters.hpp"

#include "tsnle/error.hpp"
#include "tsnle/http_util.hpp"
#include "tsnle/kernels.hpp"
#include "json_lenient.hpp"

#include <Eigen/Dense>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace tsnle {

using json = nlohmann::json;

void validate(const ForecasterSpec &spec) {
	switch (spec.kind) {
	case ForecasterKind::ses:
		if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
			throw Error(Errc::InvalidSpec, "ses alpha must be in (0, 1], got " + std::to_string(spec.alpha));
		}
		break;
	case ForecasterKind::ar:
		if (spec.order < 1) {
			throw Error(Errc::InvalidSpec, "ar order must be >= 1");
		}
		break;
	case ForecasterKind::external:
		http::parse_url(spec.endpoint);
		if (spec.timeout.count() <= 0) {
			throw Error(Errc::InvalidSpec, "external forecaster needs a positive timeout");
		}
		break;
	case ForecasterKind::naive:
	case ForecasterKind::drift: break;
	}
}

ForecasterKind parse_forecaster_kind(const std::string &name) {
	if (name == "naive") {
		return ForecasterKind::naive;
	}
	if (name == "drift") {
		return ForecasterKind::drift;
	}
	if (name == "ses") {
		return ForecasterKind::ses;
	}
	if (name == "ar") {
		return ForecasterKind::ar;
	}
	if (name == "external") {
		return ForecasterKind::external;
	}
	throw Error(Errc::InvalidSpec, "unknown forecaster kind '" + name + "'");
}

std::string forecaster_kind_name(ForecasterKind kind) {
	switch (kind) {
	case ForecasterKind::naive: return "naive";
	case ForecasterKind::drift: return "drift";
	case ForecasterKind::ses: return "ses";
	case ForecasterKind::ar: return "ar";
	case ForecasterKind::external: return "external";
	}
	return "unknown";
}

namespace {

std::vector<double> naive_values(std::span<const double> h, std::size_t horizon) {
	return std::vector<double>(horizon, h.back());
}

std::vector<double> drift_values(std::span<const double> h, std::size_t horizon) {
	const double slope = (h.back() - h.front()) / static_cast<double>(h.size() - 1);
	std::vector<double> out(horizon);
	for (std::size_t i = 0; i < horizon; ++i) {
		out[i] = h.back() + slope * static_cast<double>(i + 1);
	}
	return out;
}

std::vector<double> ses_values(std::span<const double> h, std::size_t horizon, double alpha) {
	double level = h.front();
	for (std::size_t t = 1; t < h.size(); ++t) {
		level = alpha * h[t] + (1.0 - alpha) * level;
	}
	return std::vector<double>(horizon, level);
}

// x_t = c + sum_i phi_i x_{t-i}, minimum-norm least squares.
std::vector<double> ar_values(std::span<const double> h, std::size_t horizon, std::size_t order) {
	const std::size_t rows = h.size() - order;
	Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(order + 1));
	Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
	for (std::size_t r = 0; r < rows; ++r) {
		const std::size_t t = r + order;
		const auto row = static_cast<Eigen::Index>(r);
		design(row, 0) = 1.0;
		for (std::size_t i = 1; i <= order; ++i) {
			design(row, static_cast<Eigen::Index>(i)) = h[t - i];
		}
		target(row) = h[t];
	}
	const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);

	std::vector<double> extended(h.begin(), h.end());
	extended.reserve(h.size() + horizon);
	for (std::size_t step = 0; step < horizon; ++step) {
		double next = coef(0);
		for (std::size_t i = 1; i <= order; ++i) {
			next += coef(static_cast<Eigen::Index>(i)) * extended[extended.size() - i];
		}
		extended.push_back(next);
	}
	return std::vector<double>(extended.end() - static_cast<std::ptrdiff_t>(horizon), extended.end());
}

std::vector<double> builtin_values(const ForecasterSpec &spec, std::span<const double> h, std::size_t horizon) {
	switch (spec.kind) {
	case ForecasterKind::naive: return naive_values(h, horizon);
	case ForecasterKind::drift: return drift_values(h, horizon);
	case ForecasterKind::ses: return ses_values(h, horizon, spec.alpha);
	case ForecasterKind::ar: return ar_values(h, horizon, spec.order);
	case ForecasterKind::external: break;
	}
	throw Error(Errc::InvalidSpec, "not a built-in forecaster");
}

void check_history(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon) {
	validate(history);
	if (horizon == 0) {
		throw Error(Errc::InvalidRange, "horizon must be positive");
	}
	const std::size_t needed = spec.kind == ForecasterKind::ar ? spec.order + 1 : 2;
	if (history.size() < needed) {
		throw Error(Errc::HistoryTooShort, "forecaster '" + spec.id + "' needs at least " + std::to_string(needed) +
		                                       " history points, got " + std::to_string(history.size()));
	}
}

ForecastWindow run_forecaster(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon) {
	if (spec.kind == ForecasterKind::external) {
		auto window = external_forecast(spec.endpoint, history, horizon, spec.timeout);
		window.forecaster_id = spec.id;
		return window;
	}
	ForecastWindow window{history.id, horizon, builtin_values(spec, history.values, horizon), spec.id};
	if (!all_finite(window.values)) {
		throw Error(Errc::NonFiniteOutput, "forecaster '" + spec.id + "' produced a non-finite value");
	}
	return window;
}

} // namespace

ForecastWindow forecast(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon) {
	validate(spec);
	check_history(spec, history, horizon);
	return run_forecaster(spec, history, horizon);
}

ForecastWindow random_forecast(const TimeSeries &history, std::size_t horizon, std::uint64_t seed) {
	validate(history);
	const auto [lo_it, hi_it] = std::minmax_element(history.values.begin(), history.values.end());
	const double lo = *lo_it;
	const double hi = *hi_it;
	std::mt19937_64 generator(seed);
	ForecastWindow window{history.id, horizon, std::vector<double>(horizon), "random"};
	for (auto &v : window.values) {
		const double u = static_cast<double>(generator() >> 11) * 0x1.0p-53;
		v = lo + u * (hi - lo);
	}
	return window;
}

ImportanceProfile occlusion_importance(const ForecasterSpec &spec, const TimeSeries &history, std::size_t horizon) {
	const ForecastWindow base = forecast(spec, history, horizon);
	ImportanceProfile profile;
	profile.series_id = history.id;
	profile.scores = kernels::parallel::occlusion_scores(history.values, base.values, [&](const std::vector<double> &perturbed) {
		TimeSeries occluded = history;
		occluded.values = perturbed;
		return run_forecaster(spec, occluded, horizon).values;
	});
	return profile;
}

ForecastWindow external_forecast(const std::string &endpoint, const TimeSeries &history, std::size_t horizon,
                                 std::chrono::milliseconds timeout) {
	const auto url = http::parse_url(endpoint);
	auto client = http::make_client(url, timeout);
	const json request = {{"history", history.values}, {"horizon", horizon}, {"series_id", history.id}};
	const auto result = client->Post(url.path + "/forecast", request.dump(), "application/json");
	if (!result) {
		throw Error(Errc::ExternalUnavailable,
		            "forecaster at " + endpoint + " unreachable: " + httplib::to_string(result.error()));
	}
	if (result->status != 200) {
		throw Error(Errc::MalformedResponse, "forecaster at " + endpoint + " returned HTTP " + std::to_string(result->status));
	}
	const json body = detail::parse_json_lenient(result->body);
	if (body.is_discarded() || !body.is_object() || !body.contains("forecast") || !body["forecast"].is_array()) {
		throw Error(Errc::MalformedResponse, "forecaster at " + endpoint + " returned no forecast array");
	}
	const auto &values = body["forecast"];
	if (values.size() != horizon) {
		throw Error(Errc::MalformedResponse, "expected " + std::to_string(horizon) + " forecast values, got " +
		                                         std::to_string(values.size()));
	}
	ForecastWindow window{history.id, horizon, {}, endpoint};
	window.values.reserve(horizon);
	for (const auto &v : values) {
		if (v.is_null()) {
			throw Error(Errc::NonFiniteOutput, "forecaster at " + endpoint + " returned a non-finite value");
		}
		if (!v.is_number()) {
			throw Error(Errc::MalformedResponse, "non-numeric forecast entry");
		}
		window.values.push_back(v.get<double>());
	}
	if (!all_finite(window.values)) {
		throw Error(Errc::NonFiniteOutput, "forecaster at " + endpoint + " returned a non-finite value");
	}
	return window;
}

} // namespace tsnle
