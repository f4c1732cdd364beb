#include "oracle.hpp"
#include "support.hpp"

#include "tsnle/forecasters.hpp"
#include "tsnle/kernels.hpp"

#include <doctest.h>

#include <cstring>
#include <random>

using namespace tsnle;

namespace {

bool bit_equal(double a, double b) {
	return std::memcmp(&a, &b, sizeof a) == 0;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("fit_line matches closed-form OLS") {
	std::mt19937_64 rng(31);
	for (int trial = 0; trial < 100; ++trial) {
		const auto values = support::uniform_values(rng, 2 + rng() % 40, -100.0, 100.0);
		const auto fit = kernels::fit_line(values);
		const auto ref = oracle::ols(values, 0, values.size());
		CHECK(fit.slope == doctest::Approx(ref.slope).epsilon(1e-9));
		CHECK(fit.intercept == doctest::Approx(ref.intercept).epsilon(1e-9));
		CHECK(fit.sse == doctest::Approx(ref.sse).epsilon(1e-9).scale(1.0));
		CHECK(kernels::line_mse(values, 0, values.size()) ==
		      doctest::Approx(ref.sse / static_cast<double>(values.size())).epsilon(1e-9).scale(1.0));
	}
}

TEST_CASE("merge costs: parallel equals serial bit for bit") {
	std::mt19937_64 rng(32);
	for (int trial = 0; trial < 50; ++trial) {
		const std::size_t n = 6 + rng() % 200;
		const auto values = support::uniform_values(rng, n, -10.0, 10.0);
		std::vector<std::size_t> bounds{0};
		for (std::size_t b = 3; b + 3 <= n; b += 3) {
			bounds.push_back(b);
		}
		bounds.push_back(n);
		const auto s = kernels::serial::merge_costs(values, bounds);
		const auto p = kernels::parallel::merge_costs(values, bounds);
		REQUIRE(s.size() == p.size());
		REQUIRE(s.size() == bounds.size() - 2);
		for (std::size_t j = 0; j < s.size(); ++j) {
			CHECK(bit_equal(s[j], p[j]));
			CHECK(s[j] == doctest::Approx(oracle::ols(values, bounds[j], bounds[j + 2]).sse /
			                               static_cast<double>(bounds[j + 2] - bounds[j]))
			                   .epsilon(1e-9)
			                   .scale(1.0));
		}
	}
}

TEST_CASE("autocorrelations: parallel equals serial and the hand formula") {
	std::mt19937_64 rng(33);
	for (int trial = 0; trial < 50; ++trial) {
		const auto values = support::uniform_values(rng, 4 + rng() % 100, -5.0, 5.0);
		const std::size_t max_lag = values.size() / 2;
		const auto s = kernels::serial::autocorrelations(values, max_lag);
		const auto p = kernels::parallel::autocorrelations(values, max_lag);
		REQUIRE(s.size() == max_lag + 1);
		REQUIRE(p.size() == s.size());
		CHECK(s[0] == doctest::Approx(1.0));
		for (std::size_t k = 0; k <= max_lag; ++k) {
			CHECK(bit_equal(s[k], p[k]));
			CHECK(s[k] == doctest::Approx(oracle::acf(values, k)).epsilon(1e-9).scale(1.0));
		}
	}
	CHECK(kernels::serial::autocorrelations(std::vector<double>{2, 2, 2, 2}, 2).empty());
	CHECK(kernels::parallel::autocorrelations(std::vector<double>{2, 2, 2, 2}, 2).empty());
}

TEST_CASE("batch distances: parallel equals serial") {
	std::mt19937_64 rng(34);
	std::vector<std::vector<double>> refs, cands;
	for (int i = 0; i < 500; ++i) {
		const std::size_t k = 1 + rng() % 12;
		refs.push_back(support::uniform_values(rng, k, 1.0, 50.0));
		cands.push_back(support::uniform_values(rng, k, -50.0, 50.0));
	}
	const auto s = kernels::serial::batch_distances(refs, cands);
	const auto p = kernels::parallel::batch_distances(refs, cands);
	REQUIRE(s.size() == refs.size());
	REQUIRE(p.size() == refs.size());
	for (std::size_t i = 0; i < s.size(); ++i) {
		CHECK(bit_equal(s[i].smape, p[i].smape));
		CHECK(bit_equal(s[i].nmae, p[i].nmae));
		CHECK(bit_equal(s[i].nrmse, p[i].nrmse));
		CHECK(s[i].smape == doctest::Approx(oracle::smape(refs[i], cands[i])).epsilon(1e-12));
	}
	refs.push_back({0.0});
	cands.push_back({1.0});
	CHECK(support::code_of([&] { kernels::parallel::batch_distances(refs, cands); }) == Errc::ZeroReference);
	CHECK(support::code_of([&] { kernels::serial::batch_distances(refs, cands); }) == Errc::ZeroReference);
}

TEST_CASE("occlusion scores: parallel equals serial") {
	std::mt19937_64 rng(35);
	ForecasterSpec ar;
	ar.id = "ar2";
	ar.kind = ForecasterKind::ar;
	ar.order = 2;
	for (int trial = 0; trial < 20; ++trial) {
		auto history = support::series("h", support::uniform_values(rng, 12 + rng() % 20, 1.0, 30.0));
		const auto base = forecast(ar, history, 4).values;
		auto fn = [&](const std::vector<double> &perturbed) {
			auto copy = history;
			copy.values = perturbed;
			return forecast(ar, copy, 4).values;
		};
		const auto s = kernels::serial::occlusion_scores(history.values, base, fn);
		const auto p = kernels::parallel::occlusion_scores(history.values, base, fn);
		REQUIRE(s.size() == history.size());
		for (std::size_t t = 0; t < s.size(); ++t) {
			CHECK(bit_equal(s[t], p[t]));
		}
	}
	auto failing = [](const std::vector<double> &) -> std::vector<double> {
		throw Error(Errc::NonFiniteOutput, "boom");
	};
	const std::vector<double> h{1, 2, 3};
	CHECK(support::code_of([&] { kernels::parallel::occlusion_scores(h, h, failing); }) == Errc::NonFiniteOutput);
}

} // TEST_SUITE
