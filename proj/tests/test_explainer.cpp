#include "support.hpp"

#include "tsnle/explainer.hpp"
#include "tsnle/forecasters.hpp"
#include "tsnle/hermetic.hpp"
#include "tsnle/surrogate.hpp"

#include <doctest.h>

#include <atomic>

using namespace tsnle;

namespace {

ForecasterSpec naive_spec() {
	ForecasterSpec spec;
	spec.id = "naive";
	spec.kind = ForecasterKind::naive;
	return spec;
}

std::shared_ptr<llm::ScriptedBackend> chain_script(std::atomic<int> *calls = nullptr) {
	auto backend = std::make_shared<llm::ScriptedBackend>();
	backend->add("Here is an individual analysis of each segment", [calls](const llm::ChatRequest &) {
		if (calls) {
			++*calls;
		}
		return std::string("SEGMENT-ANALYSIS");
	});
	backend->add("Here is the analysis for all segments", [calls](const llm::ChatRequest &) {
		if (calls) {
			++*calls;
		}
		return std::string("HISTORY-ANALYSIS");
	});
	backend->add("Here is a preanalysis of the forecast", [calls](const llm::ChatRequest &) {
		if (calls) {
			++*calls;
		}
		return std::string("The forecast stays flat.");
	});
	return backend;
}

} // namespace

TEST_SUITE("explainer") {

TEST_CASE("preanalysis names the top indices") {
	CHECK(render_preanalysis({"s", {0.0, 0.5, 0.1, 0.9, 0.0}}) ==
	      "The forecaster's output is most sensitive to history indices 3, 1, 2.");
	CHECK(render_preanalysis({"s", {0.0, 0.0, 0.2}}) == "The forecaster's output is most sensitive to history indices 2.");
	CHECK(render_preanalysis({"s", {0.0, 0.0}}) ==
	      "The forecaster's output is not sensitive to any single history index.");

	const auto history = support::series("h", {3, 8, 1, 9, 4, 6});
	const auto importance = occlusion_importance(naive_spec(), history, 3);
	CHECK(render_preanalysis(importance) == "The forecaster's output is most sensitive to history indices 5.");
}

TEST_CASE("utf-8 truncation never splits a character") {
	const std::string text = "ab\xC3\xA9" "cd"; // "abécd"
	CHECK(truncate_utf8(text, 10) == text);
	CHECK(truncate_utf8(text, 3) == "ab");
	CHECK(truncate_utf8(text, 4) == "ab\xC3\xA9");
}

TEST_CASE("segment analysis stage") {
	llm::Gateway gateway;
	std::atomic<int> calls{0};
	const auto endpoint = gateway.register_scripted_backend(chain_script(&calls));
	Explainer explainer(gateway);
	const auto summary = render_segment_summary(segment_series(support::series("h", {1, 2, 3, 4, 5, 6})));
	CHECK(explainer.segment_analysis_prompt(summary).find(summary) != std::string::npos);
	CHECK(explainer.build_segment_analysis(summary, endpoint) == "SEGMENT-ANALYSIS");
	CHECK(support::code_of([&] { explainer.build_segment_analysis("", endpoint); }) == Errc::PreconditionFailed);
	CHECK(calls.load() == 1);
}

TEST_CASE("history analysis stage") {
	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend(chain_script());
	Explainer explainer(gateway);
	const auto series = support::series("h", {1, 2, 3});
	CHECK(explainer.history_analysis_prompt(series, "x").find("1.00, 2.00, 3.00") != std::string::npos);
	CHECK(explainer.build_history_analysis(series, "x", endpoint) == "HISTORY-ANALYSIS");
}

TEST_CASE("full chain records three steps and is deterministic") {
	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend(chain_script());
	Explainer explainer(gateway);
	const auto history = support::series("h", {4, 6, 5, 7, 9, 8, 10, 12});
	const auto f = forecast(naive_spec(), history, 3);
	const auto importance = occlusion_importance(naive_spec(), history, 3);
	const auto e = explainer.generate_explanation(history, f, importance, endpoint, 17);
	REQUIRE(e.chain.size() == 3);
	CHECK(e.text == "The forecast stays flat.");
	CHECK(e.history_id == "h");
	CHECK(e.forecaster_id == "naive");
	CHECK(e.explainer_endpoint_id == endpoint);
	CHECK(e.seed == 17);
	CHECK(e.chain[1].prompt.find(e.chain[0].completion) != std::string::npos);
	CHECK(e.chain[2].prompt.find(e.chain[1].completion) != std::string::npos);
	CHECK(e.chain[2].prompt.find("12.00, 12.00, 12.00") != std::string::npos);
	CHECK(e.chain[2].prompt.find("most sensitive to history indices 7.") != std::string::npos);
	CHECK(e.chain[2].completion == e.text);

	const auto again = explainer.generate_explanation(history, f, importance, endpoint, 17);
	CHECK(again.text == e.text);
	for (std::size_t i = 0; i < 3; ++i) {
		CHECK(again.chain[i].prompt == e.chain[i].prompt);
		CHECK(again.chain[i].completion == e.chain[i].completion);
	}
}

TEST_CASE("chain aborts on an empty stage and checks its inputs") {
	llm::Gateway gateway;
	auto backend = std::make_shared<llm::ScriptedBackend>();
	backend->add("Here is an individual analysis of each segment", "fine");
	backend->add("Here is the analysis for all segments", " ");
	const auto endpoint = gateway.register_scripted_backend(backend);
	Explainer explainer(gateway);
	const auto history = support::series("h", {1, 3, 2, 4, 3, 5});
	const auto f = forecast(naive_spec(), history, 2);
	const auto importance = occlusion_importance(naive_spec(), history, 2);
	CHECK(support::code_of([&] { explainer.generate_explanation(history, f, importance, endpoint, 1); }) ==
	      Errc::ChainAborted);
	CHECK(support::code_of([&] { explainer.generate_explanation(history, f, {"h", {1.0}}, endpoint, 1); }) ==
	      Errc::PreconditionFailed);
}

TEST_CASE("long stage outputs are capped") {
	llm::Gateway gateway;
	auto backend = std::make_shared<llm::ScriptedBackend>();
	backend->add("Here is an individual analysis of each segment", std::string(50, 's'));
	backend->add("Here is the analysis for all segments", std::string(50, 'h'));
	backend->add("Here is a preanalysis of the forecast", std::string(50, 'f'));
	const auto endpoint = gateway.register_scripted_backend(backend);
	ExplainerConfig config;
	config.max_completion_chars = 20;
	Explainer explainer(gateway, config);
	const auto history = support::series("h", {1, 3, 2, 4, 3, 5});
	const auto e = explainer.generate_explanation(history, forecast(naive_spec(), history, 2),
	                                              occlusion_importance(naive_spec(), history, 2), endpoint, 1);
	CHECK(e.text == std::string(20, 'f'));
	CHECK(e.chain[1].prompt.find(std::string(20, 's')) != std::string::npos);
	CHECK(e.chain[1].prompt.find(std::string(21, 's')) == std::string::npos);
}

} // TEST_SUITE

TEST_SUITE("surrogate") {

TEST_CASE("tip generation") {
	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend({{"needs to do forecast", "Expect a steady climb."}});
	Surrogate surrogate(gateway);
	Explanation e;
	e.text = "The series rises by one each year.";
	CHECK(surrogate.tip_prompt(e).find(e.text) != std::string::npos);
	CHECK(surrogate.make_forecast_tip(e, endpoint) == "Expect a steady climb.");
	e.text.clear();
	CHECK(support::code_of([&] { surrogate.make_forecast_tip(e, endpoint); }) == Errc::PreconditionFailed);
}

TEST_CASE("plain simulation parses numbers") {
	llm::Gateway gateway;
	const auto h = support::series("h", {1, 2, 3});
	{
		const auto endpoint = gateway.register_scripted_backend({{"Sequence:", "4.00, 5.00"}});
		Surrogate surrogate(gateway);
		const auto f = surrogate.simulate_plain(h, 2, endpoint, 1);
		CHECK(f.values == std::vector<double>{4, 5});
		CHECK(f.mode == SurrogateMode::plain);
		CHECK(f.attempts == 1);
		CHECK(f.raw_completion == "4.00, 5.00");
	}
	{
		const auto endpoint = gateway.register_scripted_backend({{"Sequence:", "Sure! The next values are 4.5, 6"}});
		Surrogate surrogate(gateway);
		CHECK(surrogate.simulate_plain(h, 2, endpoint, 1).values == std::vector<double>{4.5, 6});
	}
	{
		const auto endpoint = gateway.register_scripted_backend({{"Sequence:", "7"}});
		SurrogateConfig config;
		config.max_parse_retries = 0;
		Surrogate surrogate(gateway, config);
		CHECK(support::code_of([&] { surrogate.simulate_plain(h, 3, endpoint, 1); }) == Errc::ParseFailed);
	}
}

TEST_CASE("parse retries ask for a fresh completion") {
	llm::Gateway gateway;
	auto backend = std::make_shared<llm::ScriptedBackend>();
	std::atomic<int> calls{0};
	backend->add("Sequence:", [&](const llm::ChatRequest &r) {
		++calls;
		return r.params.seed == std::optional<std::int64_t>(5) ? std::string("oops") : std::string("1, 2, 3");
	});
	const auto endpoint = gateway.register_scripted_backend(backend);
	Surrogate surrogate(gateway);
	const auto f = surrogate.simulate_plain(support::series("h", {1, 2}), 3, endpoint, 5);
	CHECK(f.values == std::vector<double>{1, 2, 3});
	CHECK(f.attempts == 2);
	CHECK(calls.load() == 2);
	CHECK(attempt_seed(5, 0) == 5);
	CHECK(attempt_seed(5, 1) != 5);
	CHECK(attempt_seed(5, 1) != attempt_seed(5, 2));
}

TEST_CASE("tip-guided simulation carries the tip into the prompt") {
	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend({{"Forecast Tip:\n\nGO-UP-TIP", "9, 10"}});
	Surrogate surrogate(gateway);
	const auto h = support::series("h", {1, 2});
	CHECK(surrogate.tip_forecast_prompt(h, 2, "GO-UP-TIP").find("Forecast Tip:\n\nGO-UP-TIP") != std::string::npos);
	const auto f = surrogate.simulate_with_tip(h, 2, "GO-UP-TIP", endpoint, 3);
	CHECK(f.values == std::vector<double>{9, 10});
	CHECK(f.mode == SurrogateMode::with_tip);
	CHECK(support::code_of([&] { surrogate.simulate_with_tip(h, 2, "other tip", endpoint, 3); }) == Errc::ScriptMiss);
}

TEST_CASE("echoing test double returns the explained forecast exactly") {
	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend(hermetic::make_scripted_backend());
	ExplainerConfig config;
	config.precision = 17;
	Explainer explainer(gateway, config);
	Surrogate surrogate(gateway);
	const auto history = support::series("h", {2.5, 3.75, 3.1, 4.9, 5.3, 6.05, 6.6, 7.45});
	ForecasterSpec drift;
	drift.id = "drift";
	drift.kind = ForecasterKind::drift;
	const auto f = forecast(drift, history, 4);
	const auto e = explainer.generate_explanation(history, f, occlusion_importance(drift, history, 4), endpoint, 1);
	const auto tip = surrogate.make_forecast_tip(e, endpoint, 1);
	const auto simulated = surrogate.simulate_with_tip(history, 4, tip, endpoint, 1);
	CHECK(simulated.values == f.values);
	const auto plain = surrogate.simulate_plain(history, 4, endpoint, 1);
	CHECK(plain.values == std::vector<double>{5.3, 6.05, 6.6, 7.45});
	CHECK(surrogate.simulate_plain(support::series("s", {1, 2}), 5, endpoint, 1).values ==
	      std::vector<double>{1, 2, 1, 2, 1});
	const auto constant = surrogate.simulate_constant(history, 4, endpoint, 1);
	CHECK(constant.values == std::vector<double>(4, 0.0));
	CHECK(constant.mode == SurrogateMode::constant);
}

TEST_CASE("optional rescaling divides by a quantile of |history| and scales back") {
	const std::vector<double> v{-4, 1, 2, 3};
	// |v| sorted: 1, 2, 3, 4; position 0.5 * 3 = 1.5 -> 2.5.
	CHECK(rescale_factor(v, 0.5) == 2.5);
	CHECK(rescale_factor(v, 1.0) == 4.0);
	CHECK(rescale_factor(std::vector<double>{0, 0}, 0.9) == 1.0);
	CHECK(support::code_of([&] { rescale_factor(v, 0.0); }) == Errc::InvalidRange);

	llm::Gateway gateway;
	const auto endpoint = gateway.register_scripted_backend({{"Sequence:", "0.50, 1.00"}});
	SurrogateConfig config;
	config.rescale = true;
	config.rescale_quantile = 1.0;
	Surrogate surrogate(gateway, config);
	const auto h = support::series("h", {100, 200, 400});
	CHECK(surrogate.plain_prompt(h, 2).find("0.25, 0.50, 1.00") != std::string::npos);
	CHECK(surrogate.simulate_plain(h, 2, endpoint, 1).values == std::vector<double>{200, 400});
}

} // TEST_SUITE
