#include "tsnle/datasets.hpp"
#include "tsnle/error.hpp"
#include "tsnle/harness.hpp"
#include "tsnle/study.hpp"
#include "tsnle/study_server.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace tsnle;
using nlohmann::json;

void write_output(const std::string &text, const std::string &path) {
	if (path.empty() || path == "-") {
		std::cout << text;
		return;
	}
	std::ofstream out(path, std::ios::trunc);
	if (!out) {
		throw Error(Errc::IoError, "cannot write " + path);
	}
	out << text;
}

struct ItemArgs {
	std::string config;
	bool hermetic = false;
	std::string dataset;
	std::string series;
	std::string forecaster;
	std::string explainer;
	std::int64_t seed = 1;
};

void add_item_options(CLI::App *cmd, ItemArgs &args) {
	cmd->add_option("--config", args.config, "Run configuration file")->required()->check(CLI::ExistingFile);
	cmd->add_flag("--hermetic", args.hermetic, "Use the built-in scripted endpoints and fixture executor");
	cmd->add_option("--dataset", args.dataset, "Dataset name from the configuration")->required();
	cmd->add_option("--series", args.series, "Series id within the dataset")->required();
	cmd->add_option("--forecaster", args.forecaster, "Forecaster id from the configuration")->required();
	cmd->add_option("--explainer", args.explainer, "Explainer endpoint (default: first configured)");
	cmd->add_option("--seed", args.seed, "Run seed");
}

std::string explainer_of(const Workbench &bench, const ItemArgs &args) {
	if (!args.explainer.empty()) {
		return args.explainer;
	}
	if (bench.config.explainer_endpoints.empty()) {
		throw Error(Errc::ConfigInvalid, "no explainer endpoint configured");
	}
	return bench.config.explainer_endpoints.front();
}

int cmd_run(const std::string &config_path, bool hermetic, bool resume) {
	auto bench = Workbench::create(load_run_config(config_path), hermetic);
	const auto outcome = run_matrix(bench, resume);
	std::size_t total_errors = 0;
	for (const auto &cell : outcome.summary) {
		total_errors += cell.errors;
	}
	fmt::print("ledger: {}\nwritten: {} records, skipped: {}, item errors: {} this run, {} in the whole ledger\n",
	           outcome.ledger_path.string(), outcome.written, outcome.skipped, outcome.errors, total_errors);
	for (const auto &[id, usage] : bench.gateway->usage()) {
		fmt::print("endpoint {}: {} requests, {} backend calls, {} cache hits, {} retries\n", id, usage.requests,
		           usage.backend_calls, usage.cache_hits, usage.retries);
	}
	return 0;
}

int cmd_explain(const ItemArgs &args, bool show_chain) {
	auto bench = Workbench::create(load_run_config(args.config), args.hermetic);
	const auto &item = bench.find_item(args.dataset, args.series);
	const auto &spec = bench.find_forecaster(args.forecaster);
	auto simulator = bench.simulator(explainer_of(bench, args));
	const auto window = forecast(spec, item.history, item.holdout.size());
	const auto explanation = simulator.explain(item.history, spec, window, args.seed);
	if (show_chain) {
		for (std::size_t i = 0; i < explanation.chain.size(); ++i) {
			fmt::print("--- stage {} prompt ---\n{}\n--- stage {} completion ---\n{}\n\n", i + 1,
			           explanation.chain[i].prompt, i + 1, explanation.chain[i].completion);
		}
	}
	fmt::print("{}\n", explanation.text);
	return 0;
}

int cmd_simulate(const ItemArgs &args, const std::string &mode, const std::string &baseline) {
	auto bench = Workbench::create(load_run_config(args.config), args.hermetic);
	const auto &item = bench.find_item(args.dataset, args.series);
	const auto &spec = bench.find_forecaster(args.forecaster);
	const auto horizon = item.holdout.size();
	const auto b = parse_baseline(baseline);
	const bool explained = parse_mode(mode) == SimulationMode::synthetic || uses_explainer(b);
	auto simulator = bench.simulator(explained ? explainer_of(bench, args) : std::string{});
	if (parse_mode(mode) == SimulationMode::direct) {
		const auto result = simulator.direct_simulatability(item.history, spec, horizon, b, args.seed);
		fmt::print("{}\n", result_record(args.dataset, result).dump(2));
		return 0;
	}
	if (!bench.executor) {
		throw Error(Errc::ConfigInvalid, "synthetic simulatability needs an executor section or --hermetic");
	}
	const auto [plain, guided] = simulator.synthetic_simulatability(item.history, spec, horizon, *bench.executor, args.seed);
	json out = {{"plain", result_record(args.dataset, plain)}, {"guided", result_record(args.dataset, guided)}};
	try {
		out["nss_smape"] = normalized_synthetic_score(guided.distances.smape, plain.distances.smape);
	} catch (const Error &e) {
		out["nss_smape"] = nullptr;
	}
	fmt::print("{}\n", out.dump(2));
	return 0;
}

int cmd_report(const std::string &ledger, const std::string &format, const std::string &metric,
               const std::string &output) {
	write_output(render_report(read_ledger(ledger), parse_report_format(format), metric), output);
	return 0;
}

int cmd_study_items(const std::string &config_path, const std::string &ledger, std::size_t count,
                    const std::string &output) {
	const auto config = load_run_config(config_path);
	std::map<std::string, std::vector<double>> histories;
	for (const auto &dataset : config.datasets) {
		for (const auto &item : select_eval_set(load_dataset(dataset.path), dataset, config.selection_seed)) {
			histories[dataset.name + "|" + item.history.id] = item.history.values;
		}
	}
	const auto items = study::build_item_bank(read_ledger(ledger), histories, count);
	if (items.size() < count) {
		spdlog::warn("only {} agreeing items available (asked for {})", items.size(), count);
	}
	write_output(study::item_bank_json(items).dump(2) + "\n", output);
	return 0;
}

study::StudyServer *active_server = nullptr;

int cmd_serve_study(const std::string &items_path, const std::string &host, int port, const std::string &static_dir,
                    const std::string &event_log, const std::string &target) {
	study::StudyOptions options;
	if (!event_log.empty()) {
		options.event_log = event_log;
	}
	if (target == "ground_truth") {
		options.target = study::ImprovementTarget::ground_truth;
	} else if (target != "model_forecast") {
		throw Error(Errc::ConfigInvalid, "target must be model_forecast or ground_truth");
	}
	study::StudyService service(study::load_item_bank(items_path), options);
	study::StudyServer server(service, static_dir.empty() ? std::nullopt
	                                                      : std::optional<std::filesystem::path>(static_dir));
	active_server = &server;
	std::signal(SIGINT, [](int) {
		if (active_server) {
			active_server->stop();
		}
	});
	spdlog::info("study service on http://{}:{} with {} items", host, port, service.items().size());
	if (!server.listen(host, port)) {
		throw Error(Errc::IoError, fmt::format("cannot listen on {}:{}", host, port));
	}
	return 0;
}

int cmd_convert(const std::string &input, const std::string &output) {
	const auto series = parse_tsf(input);
	write_series_store(output, series);
	fmt::print("{} series written to {}\n", series.size(), output);
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Simulatability evaluation of natural-language forecast explanations"};
	app.require_subcommand(1);
	bool verbose = false;
	app.add_flag("-v,--verbose", verbose, "Debug logging");

	std::string config_path;
	bool hermetic = false;
	bool resume = false;
	auto *run = app.add_subcommand("run", "Run the experiment matrix");
	run->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
	run->add_flag("--hermetic", hermetic, "Use the built-in scripted endpoints and fixture executor");
	run->add_flag("--resume", resume, "Skip items already present in the ledger");

	std::string ledger;
	std::string format = "md";
	std::string metric = "smape";
	std::string output;
	auto *report = app.add_subcommand("report", "Render a ledger as tables");
	report->add_option("--ledger", ledger, "Ledger file (JSON lines)")->required()->check(CLI::ExistingFile);
	report->add_option("--format", format, "md | csv")->check(CLI::IsMember({"md", "markdown", "csv"}));
	report->add_option("--metric", metric, "smape | nmae | nrmse")->check(CLI::IsMember({"smape", "nmae", "nrmse"}));
	report->add_option("-o,--output", output, "Output file (default: stdout)");

	ItemArgs explain_args;
	bool show_chain = false;
	auto *explain = app.add_subcommand("explain", "Explain one forecast");
	add_item_options(explain, explain_args);
	explain->add_flag("--show-chain", show_chain, "Print every prompt and completion of the chain");

	ItemArgs simulate_args;
	std::string mode = "direct";
	std::string baseline = "LLMTime_E";
	auto *simulate = app.add_subcommand("simulate", "Evaluate one item");
	add_item_options(simulate, simulate_args);
	simulate->add_option("--mode", mode, "direct | synthetic")->check(CLI::IsMember({"direct", "synthetic"}));
	simulate->add_option("--baseline", baseline, "LLMTime | LLMTime_R | LLMTime_M | LLMTime_E (direct mode)")
	    ->check(CLI::IsMember({"LLMTime", "LLMTime_R", "LLMTime_M", "LLMTime_E"}));

	std::size_t count = 20;
	std::string items_output;
	auto *items = app.add_subcommand("study-items", "Build a study item bank from a ledger");
	items->add_option("--config", config_path, "Run configuration the ledger came from")->required()->check(CLI::ExistingFile);
	items->add_option("--ledger", ledger, "Ledger with direct and synthetic records")->required()->check(CLI::ExistingFile);
	items->add_option("--count", count, "Number of items");
	items->add_option("-o,--output", items_output, "Item bank file (default: stdout)");

	std::string items_path;
	std::string host = "127.0.0.1";
	int port = 8080;
	std::string static_dir;
	std::string event_log;
	std::string target = "model_forecast";
	auto *serve = app.add_subcommand("serve-study", "Serve the human-study HTTP API");
	serve->add_option("--items", items_path, "Item bank (JSON list)")->required()->check(CLI::ExistingFile);
	serve->add_option("--host", host, "Bind address");
	serve->add_option("--port", port, "Port");
	serve->add_option("--static", static_dir, "Directory with the study UI bundle")->check(CLI::ExistingDirectory);
	serve->add_option("--event-log", event_log, "Append-only event log, replayed at start");
	serve->add_option("--target", target, "Improvement target: model_forecast | ground_truth");

	std::string tsf_in;
	std::string jsonl_out;
	auto *convert = app.add_subcommand("convert", "Convert a .tsf file to the JSON-lines series store");
	convert->add_option("input", tsf_in, ".tsf file")->required()->check(CLI::ExistingFile);
	convert->add_option("output", jsonl_out, ".jsonl file")->required();

	CLI11_PARSE(app, argc, argv);

	spdlog::set_default_logger(spdlog::stderr_color_mt("tsnle"));
	spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

	try {
		if (*run) {
			return cmd_run(config_path, hermetic, resume);
		}
		if (*report) {
			return cmd_report(ledger, format, metric, output);
		}
		if (*explain) {
			return cmd_explain(explain_args, show_chain);
		}
		if (*simulate) {
			return cmd_simulate(simulate_args, mode, baseline);
		}
		if (*items) {
			return cmd_study_items(config_path, ledger, count, items_output);
		}
		if (*serve) {
			return cmd_serve_study(items_path, host, port, static_dir, event_log, target);
		}
		if (*convert) {
			return cmd_convert(tsf_in, jsonl_out);
		}
	} catch (const Error &e) {
		spdlog::error("{}", e.what());
		return 1;
	} catch (const std::exception &e) {
		spdlog::error("unexpected failure: {}", e.what());
		return 1;
	}
	return 0;
}
