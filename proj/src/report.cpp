#include "tsnle/error.hpp"
#include "tsnle/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tsnle {

ReportFormat parse_report_format(const std::string &name) {
	if (name == "md" || name == "markdown") {
		return ReportFormat::markdown;
	}
	if (name == "csv") {
		return ReportFormat::csv;
	}
	throw Error(Errc::ConfigInvalid, "unknown report format '" + name + "'");
}

namespace {

double pick(const DistanceReport &r, const std::string &metric) {
	if (metric == "smape") {
		return r.smape;
	}
	if (metric == "nmae") {
		return r.nmae;
	}
	if (metric == "nrmse") {
		return r.nrmse;
	}
	throw Error(Errc::ConfigInvalid, "unknown metric '" + metric + "'");
}

template <class T>
void add_unique(std::vector<T> &list, const T &value) {
	if (std::find(list.begin(), list.end(), value) == list.end()) {
		list.push_back(value);
	}
}

const CellSummary *find_cell(const std::vector<CellSummary> &cells, const std::string &dataset, SimulationMode mode,
                             Baseline baseline, const std::string &explainer, const std::string &forecaster) {
	for (const auto &c : cells) {
		if (c.dataset == dataset && c.mode == mode && c.baseline == baseline && c.explainer == explainer &&
		    c.forecaster == forecaster) {
			return &c;
		}
	}
	return nullptr;
}

std::string scientific(double v) {
	return fmt::format("{:.2E}", v);
}

std::string markdown(const std::vector<nlohmann::json> &records, const std::vector<CellSummary> &cells,
                     const std::string &metric) {
	std::vector<std::string> datasets;
	std::vector<std::string> forecasters;
	for (const auto &r : records) {
		add_unique(datasets, r.at("dataset").get<std::string>());
		add_unique(forecasters, r.at("forecaster_id").get<std::string>());
	}

	std::string out;
	auto header = [&](const std::string &first) {
		out += "| " + first + " |";
		for (const auto &f : forecasters) {
			out += " " + f + " |";
		}
		out += "\n|---|";
		for (std::size_t i = 0; i < forecasters.size(); ++i) {
			out += "---|";
		}
		out += '\n';
	};

	for (const auto &dataset : datasets) {
		// Direct rows: one per (baseline, explainer) combination seen.
		std::vector<std::pair<Baseline, std::string>> rows;
		std::vector<std::string> explainers;
		std::size_t errors = 0;
		for (auto b : {Baseline::LLMTime, Baseline::LLMTime_R, Baseline::LLMTime_M, Baseline::LLMTime_E}) {
			for (const auto &c : cells) {
				if (c.dataset == dataset && c.mode == SimulationMode::direct && c.baseline == b) {
					add_unique(rows, std::make_pair(b, c.explainer));
				}
			}
		}
		for (const auto &c : cells) {
			if (c.dataset != dataset) {
				continue;
			}
			errors += c.errors;
			if (c.mode == SimulationMode::synthetic) {
				add_unique(explainers, c.explainer);
			}
		}

		if (!rows.empty()) {
			out += fmt::format("## {}: direct simulatability ({})\n\n", dataset, metric);
			header("Baseline");
			for (const auto &[baseline, explainer] : rows) {
				out += "| " + baseline_name(baseline) + (explainer == "-" ? "" : " (" + explainer + ")") + " |";
				for (const auto &f : forecasters) {
					const auto *c = find_cell(cells, dataset, SimulationMode::direct, baseline, explainer, f);
					out += " " + (!c ? std::string("n/a") : c->distances ? scientific(pick(*c->distances, metric)) : "error") + " |";
				}
				out += '\n';
			}
			out += '\n';
		}
		if (!explainers.empty()) {
			out += fmt::format("## {}: normalized synthetic score ({})\n\n", dataset, metric);
			header("Explainer");
			for (const auto &explainer : explainers) {
				out += "| " + explainer + " |";
				for (const auto &f : forecasters) {
					const auto *c = find_cell(cells, dataset, SimulationMode::synthetic, Baseline::LLMTime_E, explainer, f);
					std::string value = "n/a";
					if (c && c->nss && std::isfinite(pick(*c->nss, metric))) {
						value = fmt::format("{:.2f}", pick(*c->nss, metric));
					} else if (c && c->records == c->errors) {
						value = "error";
					}
					out += " " + value + " |";
				}
				out += '\n';
			}
			out += '\n';
		}
		if (errors > 0) {
			out += fmt::format("{} failed item(s) in {} are excluded from the averages.\n\n", errors, dataset);
		}
	}
	return out;
}

std::string csv_number(double v) {
	return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string{};
}

std::string csv(const std::vector<CellSummary> &cells) {
	std::string out = "dataset,mode,baseline,explainer,forecaster,statistic,value,runs,records,errors\n";
	for (const auto &c : cells) {
		auto row = [&](const std::string &statistic, const std::string &value) {
			out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", c.dataset, mode_name(c.mode), baseline_name(c.baseline),
			                   c.explainer, c.forecaster, statistic, value, c.runs, c.records, c.errors);
		};
		for (const std::string m : {"smape", "nmae", "nrmse"}) {
			row(m, c.distances ? csv_number(pick(*c.distances, m)) : std::string{});
		}
		if (c.nss) {
			for (const std::string m : {"smape", "nmae", "nrmse"}) {
				row("nss_" + m, csv_number(pick(*c.nss, m)));
			}
		}
	}
	return out;
}

} // namespace

std::string render_report(const std::vector<nlohmann::json> &records, ReportFormat format, const std::string &metric) {
	if (records.empty()) {
		throw Error(Errc::EmptyLedger, "ledger holds no records");
	}
	pick(DistanceReport{}, metric); // rejects unknown metric names early
	const auto cells = summarize(records);
	return format == ReportFormat::markdown ? markdown(records, cells, metric) : csv(cells);
}

} // namespace tsnle
