#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsnle::prompts {

enum class Template {
	llmtime_plain,        // surrogate continuation without explanation
	llmtime_tip,          // surrogate continuation guided by a forecast tip
	forecast_tip,         // explanation -> recommendation for another forecaster
	series_generator,     // explanation -> numpy generate_series() code
	segment_analysis,     // templated segment summaries -> segment analysis
	history_analysis,     // series + segment analysis -> history report
	forecast_explanation, // series + analysis + forecast + preanalysis -> NLE
	llmtime_constant,     // adversarial constant-prediction variant
};

/// Raw template with {slot} placeholders.
std::string_view text(Template t) noexcept;

/// File stem of the template's fixture under tests/fixtures/prompts.
std::string_view name(Template t) noexcept;

/// Slot names in order of first appearance.
std::vector<std::string> slots(Template t);

/// The seven templates published with the method (all except llmtime_constant).
std::span<const Template> published_templates() noexcept;

/// Substitutes every slot. Throws PreconditionFailed when a slot has no value
/// or a value is given for an unknown slot. Inserted text is not re-scanned.
std::string render(Template t, const std::map<std::string, std::string> &values);

} // namespace tsnle::prompts
