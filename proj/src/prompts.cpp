#include "tsnle/prompts.hpp"

#include "tsnle/error.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace tsnle::prompts {

namespace {

constexpr std::string_view llmtime_plain_text =
    "You are a helpful assistant that performs time series predictions. The user provide you with a sequence and you "
    "will continue the given sequence for {forecast_horizon} steps. The sequence is represented by decimal strings "
    "separated by commas. Please continue the sequence without producing any additional text. Do not say anything "
    "like 'the next terms in the sequence are', just return the numbers.\n"
    "\n"
    "Sequence:\n"
    "\n"
    "{time_series_data}";

constexpr std::string_view llmtime_tip_text =
    "You are a helpful assistant that performs time series predictions. The user will provide you with some tips to "
    "follow for forecasting and also a sequence. Then you will continue the given sequence for {forecast_horizon} "
    "steps. The sequence is represented by decimal strings separated by commas.\n"
    "\n"
    "Forecast Tip:\n"
    "\n"
    "{forecast_tip}\n"
    "\n"
    "Please continue the sequence according to the given tips without producing any additional text. Do not say "
    "anything like 'the next terms in the sequence are', just return the numbers.\n"
    "Sequence:\n"
    "\n"
    "{time_series_data}";

constexpr std::string_view forecast_tip_text =
    "You are given a paragraph that explains the reasoning behind forecasting result of some time series.\n"
    "Can you change it such that it is a recommendation to a another user who needs to do forecast on the same time "
    "series. Try to keep the recommendations short up to two or three sentences.\n"
    "\n"
    "Here is the paragraph:\n"
    "\n"
    "{forecast_explanation}";

constexpr std::string_view series_generator_text =
    "You are given a forecast explanation which defines how the last {forecast_horizon} timestamps of a time series "
    "data can be explained by the historical window. You will write a numpy function called `generate_series` that "
    "takes no arguments and outputs a time series sequence of size {timeseries_size} where the last "
    "{forecast_horizon} time stamps and historical window fits the given explanation. Place this code inside a python "
    "markdown block and delimit your code with the XML tag <generator>. Do not call the function, simply define it.\n"
    "\n"
    "Explanation: {forecast_explanation}";

constexpr std::string_view segment_analysis_text =
    "You are a helpful assistant who is expert in understanding time series data.\n"
    "\n"
    "You were given some time series data and used an external tool to find different segments in the data along "
    "with their slopes and mean and std values.\n"
    "Try to understand the segments and their characteristics and generate a brief analysis of the time series' "
    "segments such as seasonality, cycles and overall trend.\n"
    "\n"
    "Here is an individual analysis of each segment:\n"
    "\n"
    "{individual_analysis}\n"
    "\n"
    "Based on the above information, generate an analysis with few sentences of the time series' segments with "
    "information such as seasonality, cycles and overall trend.";

constexpr std::string_view history_analysis_text =
    "You are a helpful assistant who is expert in understanding time series data. You are provided with the full "
    "length of time series data in comma separated format, along with some finegranular analysis of the time series "
    "data. Then you are asked to generate a short analysis report of the time series data. The report should help the "
    "user to forecast the next steps in time series data. Keep the analysis short and to the point. Avoid being "
    "redundant and don't suggest that further analysis is needed.\n"
    "\n"
    "Here is the time series data in comma separated format:\n"
    "\n"
    "{time_series_data}\n"
    "\n"
    "Here is the analysis for all segments:\n"
    "\n"
    "{segment_analysis}\n"
    "\n"
    "Generate a short analysis with 2-3 sentences that explain the data in general terms and give hints for the "
    "forecaster.";

constexpr std::string_view forecast_explanation_text =
    "You are a helpful assistant who is expert in explaining forecasts of time series data. You are provided with the "
    "full length of time series data in comma separated format, along with some finegranular analysis of the time "
    "series data.\n"
    "You are also provided with the estimated forecast of the data for the next {forecast_horizon} time steps.\n"
    "\n"
    "Then you are asked to generate a short 2-3 sentences long interpretation of the forecasted data. Explain the "
    "forecasted data in terms of the time series' temporal structure, variability, long-term memory, trend, and "
    "seasonal pattern. Do not use specific data points or numbers in your analysis. Instead, focus on the general "
    "trends and patterns in the data.\n"
    "\n"
    "Here is the time series in comma separated format:\n"
    "\n"
    "{time_series_data}\n"
    "\n"
    "Here is the analysis of the data:\n"
    "\n"
    "{time_series_analysis}\n"
    "\n"
    "Here is the forecasted data for the next {forecast_horizon} time steps:\n"
    "\n"
    "{forecasted_data}\n"
    "\n"
    "Here is a preanalysis of the forecast:\n"
    "\n"
    "{forecast_preanalysis}\n"
    "\n"
    "Generate a short analysis reporting interpretation of the forecasted data with 2-3 sentences.";

constexpr std::string_view llmtime_constant_text =
    "You are a helpful assistant that performs time series predictions. The user provide you with a sequence and you "
    "will continue the given sequence for {forecast_horizon} steps. You must predict a constant value for all steps. "
    "The sequence is represented by decimal strings separated by commas. Please continue the sequence without "
    "producing any additional text. Do not say anything like 'the next terms in the sequence are', just return the "
    "numbers.\n"
    "\n"
    "Sequence:\n"
    "\n"
    "{time_series_data}";

constexpr std::array<Template, 7> published = {
    Template::llmtime_plain,    Template::llmtime_tip,      Template::forecast_tip,        Template::series_generator,
    Template::segment_analysis, Template::history_analysis, Template::forecast_explanation,
};

bool is_slot_char(char c) noexcept {
	return (c >= 'a' && c <= 'z') || c == '_';
}

// Calls on_text for literal runs and on_slot for each {slot}.
template <class OnText, class OnSlot>
void scan(std::string_view tpl, OnText &&on_text, OnSlot &&on_slot) {
	std::size_t i = 0;
	while (i < tpl.size()) {
		const auto open = tpl.find('{', i);
		if (open == std::string_view::npos) {
			on_text(tpl.substr(i));
			return;
		}
		auto close = open + 1;
		while (close < tpl.size() && is_slot_char(tpl[close])) {
			++close;
		}
		if (close < tpl.size() && tpl[close] == '}' && close > open + 1) {
			on_text(tpl.substr(i, open - i));
			on_slot(std::string(tpl.substr(open + 1, close - open - 1)));
			i = close + 1;
		} else {
			on_text(tpl.substr(i, open + 1 - i));
			i = open + 1;
		}
	}
}

} // namespace

std::string_view text(Template t) noexcept {
	switch (t) {
	case Template::llmtime_plain: return llmtime_plain_text;
	case Template::llmtime_tip: return llmtime_tip_text;
	case Template::forecast_tip: return forecast_tip_text;
	case Template::series_generator: return series_generator_text;
	case Template::segment_analysis: return segment_analysis_text;
	case Template::history_analysis: return history_analysis_text;
	case Template::forecast_explanation: return forecast_explanation_text;
	case Template::llmtime_constant: return llmtime_constant_text;
	}
	return {};
}

std::string_view name(Template t) noexcept {
	switch (t) {
	case Template::llmtime_plain: return "llmtime_plain";
	case Template::llmtime_tip: return "llmtime_tip";
	case Template::forecast_tip: return "forecast_tip";
	case Template::series_generator: return "series_generator";
	case Template::segment_analysis: return "segment_analysis";
	case Template::history_analysis: return "history_analysis";
	case Template::forecast_explanation: return "forecast_explanation";
	case Template::llmtime_constant: return "llmtime_constant";
	}
	return {};
}

std::vector<std::string> slots(Template t) {
	std::vector<std::string> out;
	scan(
	    text(t), [](std::string_view) {},
	    [&](const std::string &slot) {
		    if (std::find(out.begin(), out.end(), slot) == out.end()) {
			    out.push_back(slot);
		    }
	    });
	return out;
}

std::span<const Template> published_templates() noexcept {
	return published;
}

std::string render(Template t, const std::map<std::string, std::string> &values) {
	const auto expected = slots(t);
	for (const auto &[slot, _] : values) {
		if (std::find(expected.begin(), expected.end(), slot) == expected.end()) {
			throw Error(Errc::PreconditionFailed, "template " + std::string(name(t)) + " has no slot '" + slot + "'");
		}
	}
	std::string out;
	scan(
	    text(t), [&](std::string_view literal) { out += literal; },
	    [&](const std::string &slot) {
		    const auto it = values.find(slot);
		    if (it == values.end()) {
			    throw Error(Errc::PreconditionFailed,
			                "template " + std::string(name(t)) + " is missing a value for '" + slot + "'");
		    }
		    out += it->second;
	    });
	return out;
}

} // namespace tsnle::prompts
