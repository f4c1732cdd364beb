#include "oracle.hpp"
#include "stub_server.hpp"
#include "support.hpp"

#include "tsnle/forecasters.hpp"
#include "tsnle/metrics.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <random>

using namespace tsnle;
using support::series;

namespace {

ForecasterSpec spec_of(ForecasterKind kind, double alpha = 0.5, std::size_t order = 1) {
	ForecasterSpec spec;
	spec.id = forecaster_kind_name(kind);
	spec.kind = kind;
	spec.alpha = alpha;
	spec.order = order;
	return spec;
}

} // namespace

TEST_SUITE("forecasters") {

TEST_CASE("built-in examples") {
	const auto h = series("h", {1, 2, 3});
	CHECK(forecast(spec_of(ForecasterKind::naive), h, 2).values == std::vector<double>{3, 3});
	CHECK(forecast(spec_of(ForecasterKind::drift), h, 2).values == std::vector<double>{4, 5});
	// Level after smoothing 1,2,3 with alpha 0.5: 1 -> 1.5 -> 2.25.
	CHECK(forecast(spec_of(ForecasterKind::ses, 0.5), h, 3).values == std::vector<double>{2.25, 2.25, 2.25});
	const auto window = forecast(spec_of(ForecasterKind::naive), h, 2);
	CHECK(window.horizon == 2);
	CHECK(window.history_id == "h");
	CHECK(window.forecaster_id == "naive");
}

TEST_CASE("ar(1) recovers a noiseless autoregression") {
	std::vector<double> x{1.0};
	for (int t = 1; t < 10; ++t) {
		x.push_back(0.8 * x.back());
	}
	const auto coef = oracle::ar_fit(x, 1);
	CHECK(coef[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
	CHECK(coef[1] == doctest::Approx(0.8).epsilon(1e-9));
	const auto f = forecast(spec_of(ForecasterKind::ar, 0.5, 1), series("ar", x), 1);
	CHECK(std::fabs(f.values[0] - 0.8 * x[9]) <= 1e-6);
}

TEST_CASE("ar(p) agrees with the normal-equation oracle") {
	std::mt19937_64 rng(77);
	for (int trial = 0; trial < 30; ++trial) {
		const std::size_t p = 1 + rng() % 3;
		const auto x = support::uniform_values(rng, 10 + rng() % 20, 1.0, 20.0);
		const auto coef = oracle::ar_fit(x, p);
		double next = coef[0];
		for (std::size_t j = 1; j <= p; ++j) {
			next += coef[j] * x[x.size() - j];
		}
		const auto f = forecast(spec_of(ForecasterKind::ar, 0.5, p), series("r", x), 1);
		CHECK(f.values[0] == doctest::Approx(next).epsilon(1e-7));
	}
}

TEST_CASE("forecaster invariants") {
	std::mt19937_64 rng(78);
	for (int trial = 0; trial < 50; ++trial) {
		const auto h = series("h", support::uniform_values(rng, 3 + rng() % 20, -10.0, 10.0));
		for (auto kind : {ForecasterKind::naive, ForecasterKind::drift, ForecasterKind::ses, ForecasterKind::ar}) {
			const auto spec = spec_of(kind, 0.3, 1);
			const auto a = forecast(spec, h, 5);
			const auto b = forecast(spec, h, 5);
			CHECK(a.values == b.values);
			CHECK(all_finite(a.values));
			CHECK(a.values.size() == 5);
		}
		CHECK(forecast(spec_of(ForecasterKind::ses, 1.0), h, 4).values ==
		      forecast(spec_of(ForecasterKind::naive), h, 4).values);
	}
}

TEST_CASE("forecaster errors") {
	CHECK(support::code_of([] { forecast(spec_of(ForecasterKind::naive), series("s", {1}), 2); }) ==
	      Errc::HistoryTooShort);
	CHECK(support::code_of([] { forecast(spec_of(ForecasterKind::ar, 0.5, 3), series("s", {1, 2, 3}), 2); }) ==
	      Errc::HistoryTooShort);
	CHECK(support::code_of([] { validate(spec_of(ForecasterKind::ses, 0.0)); }) == Errc::InvalidSpec);
	CHECK(support::code_of([] { validate(spec_of(ForecasterKind::ses, 1.5)); }) == Errc::InvalidSpec);
	CHECK(support::code_of([] { validate(spec_of(ForecasterKind::ar, 0.5, 0)); }) == Errc::InvalidSpec);
	CHECK(support::code_of([] { parse_forecaster_kind("prophet"); }) == Errc::InvalidSpec);
}

TEST_CASE("random forecast") {
	const auto flat = random_forecast(series("c", {5, 5, 5}), 4, 123);
	CHECK(flat.values == std::vector<double>(4, 5.0));
	const auto h = series("h", {3, -1, 8, 2});
	CHECK(random_forecast(h, 6, 42).values == random_forecast(h, 6, 42).values);
	CHECK(random_forecast(h, 6, 42).values != random_forecast(h, 6, 43).values);
	for (double v : random_forecast(h, 200, 5).values) {
		CHECK(v >= -1.0);
		CHECK(v <= 8.0);
	}
	const auto wide = random_forecast(series("w", {0, 10}), 1000, 7);
	const double m = mean_of(wide.values);
	CHECK(m >= 3.0);
	CHECK(m <= 7.0);
}

TEST_CASE("occlusion importance") {
	const auto h = series("h", {4, 9, 1, 7, 3, 8});
	const auto naive = occlusion_importance(spec_of(ForecasterKind::naive), h, 3);
	REQUIRE(naive.scores.size() == h.size());
	for (std::size_t t = 0; t + 1 < h.size(); ++t) {
		CHECK(naive.scores[t] == 0.0);
	}
	CHECK(naive.scores.back() > 0.0);
	// Replacing 8 by the mean 32/6 turns [8,8,8] into [16/3]*3.
	const double mean = 32.0 / 6.0;
	CHECK(naive.scores.back() == doctest::Approx(oracle::smape({8, 8, 8}, {mean, mean, mean})).epsilon(1e-12));

	const auto drift = occlusion_importance(spec_of(ForecasterKind::drift), series("d", {2, 5, 1, 6, 4}), 2);
	CHECK(drift.scores[0] > 0.0);
	CHECK(drift.scores[4] > 0.0);
	CHECK(drift.scores[1] == 0.0);
	CHECK(drift.scores[2] == 0.0);
	CHECK(drift.scores[3] == 0.0);

	for (auto kind : {ForecasterKind::naive, ForecasterKind::drift, ForecasterKind::ses, ForecasterKind::ar}) {
		const auto zero = occlusion_importance(spec_of(kind), series("c", std::vector<double>(8, 2.5)), 3);
		CHECK(zero.scores == std::vector<double>(8, 0.0));
	}
}

TEST_CASE("external forecaster wire protocol") {
	std::atomic<int> calls{0};
	support::StubServer stub([&](httplib::Server &s) {
		s.Post("/echo/forecast", [&](const httplib::Request &req, httplib::Response &res) {
			++calls;
			const auto body = nlohmann::json::parse(req.body);
			const auto history = body.at("history").get<std::vector<double>>();
			const auto horizon = body.at("horizon").get<std::size_t>();
			CHECK(body.at("series_id") == "ext");
			res.set_content(nlohmann::json{{"forecast", std::vector<double>(horizon, history.back())}}.dump(),
			                "application/json");
		});
		s.Post("/short/forecast", [](const httplib::Request &req, httplib::Response &res) {
			const auto horizon = nlohmann::json::parse(req.body).at("horizon").get<std::size_t>();
			res.set_content(nlohmann::json{{"forecast", std::vector<double>(horizon - 1, 1.0)}}.dump(),
			                "application/json");
		});
		s.Post("/nan/forecast", [](const httplib::Request &, httplib::Response &res) {
			res.set_content(R"({"forecast": [1.0, NaN, 2.0]})", "application/json");
		});
		s.Post("/broken/forecast", [](const httplib::Request &, httplib::Response &res) {
			res.status = 500;
			res.set_content("oops", "text/plain");
		});
	});
	const auto h = series("ext", {1, 4, 2, 6});
	ForecasterSpec ext;
	ext.id = "stub";
	ext.kind = ForecasterKind::external;
	ext.endpoint = stub.url() + "/echo";
	ext.timeout = std::chrono::milliseconds(2000);
	const auto f = forecast(ext, h, 3);
	CHECK(f.values == forecast(spec_of(ForecasterKind::naive), h, 3).values);
	CHECK(f.forecaster_id == "stub");
	CHECK(calls.load() == 1);

	const auto timeout = std::chrono::milliseconds(2000);
	CHECK(support::code_of([&] { external_forecast(stub.url() + "/short", h, 3, timeout); }) ==
	      Errc::MalformedResponse);
	CHECK(support::code_of([&] { external_forecast(stub.url() + "/nan", h, 3, timeout); }) == Errc::NonFiniteOutput);
	CHECK(support::code_of([&] { external_forecast(stub.url() + "/broken", h, 3, timeout); }) ==
	      Errc::MalformedResponse);
	CHECK(support::code_of([&] { external_forecast("http://127.0.0.1:1", h, 3, std::chrono::milliseconds(300)); }) ==
	      Errc::ExternalUnavailable);
}

} // TEST_SUITE
