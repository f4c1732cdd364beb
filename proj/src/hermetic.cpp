#include "tsnle/hermetic.hpp"

#include "tsnle/error.hpp"
#include "tsnle/text_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

namespace tsnle::hermetic {
namespace {

std::string between(const std::string &text, const std::string &open, const std::string &close) {
	const auto begin = text.find(open);
	if (begin == std::string::npos) {
		return {};
	}
	const auto start = begin + open.size();
	const auto end = close.empty() ? std::string::npos : text.find(close, start);
	return text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::size_t horizon_of(const std::string &prompt) {
	static const std::regex steps(R"(for (\d+) steps)");
	std::smatch m;
	if (!std::regex_search(prompt, m, steps)) {
		throw Error(Errc::ScriptMiss, "prompt does not state a horizon");
	}
	return std::stoul(m[1].str());
}

std::string repeat_token(const std::string &token, std::size_t count) {
	std::string out;
	for (std::size_t i = 0; i < count; ++i) {
		out += (i ? ", " : "") + token;
	}
	return out;
}

const std::string forecast_quote_prefix = "The forecast carries the recent structure forward: ";
const std::string tip_quote_prefix = "Continue the series with these values: ";

std::vector<std::string> tokens_of(const std::string &sequence) {
	std::vector<std::string> out;
	std::size_t pos = 0;
	while (pos <= sequence.size()) {
		const auto comma = sequence.find(',', pos);
		const auto token = sequence.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		const auto b = token.find_first_not_of(" \n");
		const auto e = token.find_last_not_of(" \n");
		if (b != std::string::npos) {
			out.push_back(token.substr(b, e - b + 1));
		}
		if (comma == std::string::npos) {
			break;
		}
		pos = comma + 1;
	}
	return out;
}

// Copies the last `horizon` tokens (cycling when the sequence is shorter).
std::string window_continuation(const std::string &sequence, std::size_t horizon) {
	const auto tokens = tokens_of(sequence);
	if (tokens.empty()) {
		throw Error(Errc::ScriptMiss, "plain prompt holds no sequence");
	}
	const std::size_t window = std::min(horizon, tokens.size());
	std::string out;
	for (std::size_t i = 0; i < horizon; ++i) {
		out += (i ? ", " : "") + tokens[tokens.size() - window + i % window];
	}
	return out;
}

std::string generator_for(const std::string &prompt) {
	static const std::regex size_re(R"(sequence of size (\d+))");
	static const std::regex horizon_re(R"(the last (\d+) timestamps)");
	std::smatch m;
	if (!std::regex_search(prompt, m, size_re)) {
		throw Error(Errc::ScriptMiss, "generation prompt lacks a size");
	}
	const auto total = std::stod(m[1].str());
	if (!std::regex_search(prompt, m, horizon_re)) {
		throw Error(Errc::ScriptMiss, "generation prompt lacks a horizon");
	}
	const auto horizon = std::stod(m[1].str());
	const auto quoted = extract_numbers(between(prompt, "Explanation: ", ""));
	double start = 0.0;
	double step = 0.0;
	if (!quoted.empty()) {
		if (quoted.size() >= 2) {
			step = quoted[1] - quoted[0];
		}
		start = quoted[0] - (total - horizon) * step;
	}
	return fmt::format("<generator>\n```python\nimport numpy as np\n\n\ndef generate_series():\n"
	                   "    # fixture: ramp({0:.17g}, {1:.17g})\n"
	                   "    return {0:.17g} + {1:.17g} * np.arange({2})\n```\n</generator>",
	                   start, step, static_cast<long>(total));
}

} // namespace

std::shared_ptr<llm::ScriptedBackend> make_scripted_backend() {
	auto backend = std::make_shared<llm::ScriptedBackend>();
	backend->add("Here is an individual analysis of each segment",
	             "The segments describe a series with a steady overall trend and no strong seasonal cycle.");
	backend->add("Here is the analysis for all segments",
	             "The series moves smoothly and its most recent segment is the best guide for the next steps.");
	backend->add("Here is a preanalysis of the forecast", [](const llm::ChatRequest &r) {
		const auto prompt = r.prompt();
		const auto block = between(between(prompt, "Here is the forecasted data for the next", "\n\nHere is a preanalysis"),
		                           "time steps:\n\n", "");
		return forecast_quote_prefix + block;
	});
	backend->add("Here is the paragraph:", [](const llm::ChatRequest &r) {
		const auto paragraph = r.prompt().substr(r.prompt().find("Here is the paragraph:\n\n") + 24);
		const auto pos = paragraph.find(forecast_quote_prefix);
		return tip_quote_prefix +
		       (pos == std::string::npos ? paragraph : paragraph.substr(pos + forecast_quote_prefix.size()));
	});
	backend->add("Forecast Tip:", [](const llm::ChatRequest &r) {
		const auto tip = between(r.prompt(), "Forecast Tip:\n\n", "\n\nPlease continue");
		const auto pos = tip.find(tip_quote_prefix);
		return pos == std::string::npos ? tip : tip.substr(pos + tip_quote_prefix.size());
	});
	// Plain and constant prompts share this sentence; the tip prompt does not.
	backend->add("Please continue the sequence without producing any additional text", [](const llm::ChatRequest &r) {
		const auto prompt = r.prompt();
		const auto horizon = horizon_of(prompt);
		if (prompt.find("predict a constant value for all steps") != std::string::npos) {
			return repeat_token("0", horizon);
		}
		return window_continuation(between(prompt, "Sequence:\n\n", ""), horizon);
	});
	backend->add("delimit your code with the XML tag <generator>",
	             [](const llm::ChatRequest &r) { return generator_for(r.prompt()); });
	return backend;
}

std::string fixture_directive(const std::string &code) {
	static const std::regex directive(R"(# fixture: ([a-z]+))");
	std::smatch m;
	return std::regex_search(code, m, directive) ? m[1].str() : std::string{};
}

std::vector<double> run_fixture_code(const std::string &code, std::size_t length) {
	const std::string name = fixture_directive(code);
	auto ramp = [&](std::size_t n) {
		static const std::regex args(R"(# fixture: ramp\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\))");
		std::smatch m;
		double start = 0.0;
		double step = 1.0;
		if (std::regex_search(code, m, args)) {
			start = std::stod(m[1].str());
			step = std::stod(m[2].str());
		}
		std::vector<double> values(n);
		for (std::size_t i = 0; i < n; ++i) {
			values[i] = start + step * static_cast<double>(i);
		}
		return values;
	};
	if (name == "ramp") {
		return ramp(length);
	}
	if (name == "nan") {
		auto values = ramp(length);
		if (!values.empty()) {
			values[values.size() / 2] = std::numeric_limits<double>::quiet_NaN();
		}
		return values;
	}
	if (name == "short") {
		return ramp(length == 0 ? 0 : length - 1);
	}
	if (name == "loop") {
		throw Error(Errc::ExecutorFailed, "generator timed out");
	}
	if (name == "fail") {
		throw Error(Errc::ExecutorFailed, "generator raised an error");
	}
	throw Error(Errc::ExecutorFailed, "generator code carries no fixture directive");
}

std::vector<double> FixtureExecutor::execute(const std::string &code, std::size_t length, int) {
	auto values = run_fixture_code(code, length);
	if (values.size() != length) {
		throw Error(Errc::ExecutorFailed,
		            fmt::format("generator produced {} values, expected {}", values.size(), length));
	}
	for (double v : values) {
		if (!std::isfinite(v)) {
			throw Error(Errc::NonFiniteSeries, "generator produced a non-finite value");
		}
	}
	return values;
}

} // namespace tsnle::hermetic
