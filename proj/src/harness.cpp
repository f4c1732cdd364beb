#include "tsnle/harness.hpp"

#include "tsnle/error.hpp"
#include "tsnle/hermetic.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

namespace tsnle {

using nlohmann::json;

ForecasterSpec parse_forecaster_spec(const json &object) {
	if (!object.is_object() || !object.contains("id") || !object.contains("kind")) {
		throw Error(Errc::ConfigInvalid, "forecaster entries need 'id' and 'kind'");
	}
	ForecasterSpec spec;
	spec.id = object.at("id").get<std::string>();
	try {
		spec.kind = parse_forecaster_kind(object.at("kind").get<std::string>());
	} catch (const Error &e) {
		throw Error(Errc::ConfigInvalid, e.what());
	}
	spec.alpha = object.value("alpha", spec.alpha);
	spec.order = object.value("order", spec.order);
	spec.endpoint = object.value("endpoint", std::string{});
	spec.timeout = std::chrono::milliseconds(object.value("timeout_ms", static_cast<long>(spec.timeout.count())));
	if (object.contains("params")) {
		for (const auto &[k, v] : object.at("params").items()) {
			spec.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
		}
	}
	try {
		validate(spec);
	} catch (const Error &e) {
		throw Error(Errc::ConfigInvalid, "forecaster '" + spec.id + "': " + e.what());
	}
	return spec;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path &base, const std::filesystem::path &p) {
	return p.is_absolute() || base.empty() ? p : base / p;
}

SegmentationConfig parse_segmentation(const json &object) {
	SegmentationConfig config;
	config.min_segment_length = object.value("min_segment_length", config.min_segment_length);
	config.relative_threshold = object.value("relative_threshold", config.relative_threshold);
	config.seasonality_min_acf = object.value("seasonality_min_acf", config.seasonality_min_acf);
	return config;
}

} // namespace

RunConfig parse_run_config(const json &document, const std::filesystem::path &base_dir) {
	if (!document.is_object()) {
		throw Error(Errc::ConfigInvalid, "configuration must be a JSON object");
	}
	RunConfig config;
	try {
		for (const auto &d : document.at("datasets")) {
			auto dataset = parse_dataset_config(d);
			dataset.path = resolve(base_dir, dataset.path);
			config.datasets.push_back(std::move(dataset));
		}
		for (const auto &f : document.at("forecasters")) {
			config.forecasters.push_back(parse_forecaster_spec(f));
		}
		for (const auto &b : document.value("baselines", json::array())) {
			config.baselines.push_back(parse_baseline(b.get<std::string>()));
		}
		if (document.contains("metrics")) {
			config.modes.clear();
			for (const auto &m : document.at("metrics")) {
				config.modes.push_back(parse_mode(m.get<std::string>()));
			}
		}
		for (const auto &e : document.value("endpoints", json::array())) {
			config.endpoints.push_back(llm::parse_endpoint_config(e));
		}
		config.explainer_endpoints = document.value("explainer_endpoints", std::vector<std::string>{});
		config.surrogate_endpoint = document.value("surrogate_endpoint", std::string{});
		config.codegen_endpoint = document.value("codegen_endpoint", config.surrogate_endpoint);
		if (document.contains("executor")) {
			const auto &e = document.at("executor");
			ExecutorConfig executor;
			executor.command = e.at("command").get<std::vector<std::string>>();
			executor.timeout_s = e.value("timeout_s", executor.timeout_s);
			executor.slots = e.value("slots", executor.slots);
			config.executor = executor;
		}
		config.runs = document.value("runs", config.runs);
		if (document.contains("seeds")) {
			config.seeds = document.at("seeds").get<std::vector<std::int64_t>>();
		} else {
			for (int r = 0; r < config.runs; ++r) {
				config.seeds.push_back(r + 1);
			}
		}
		config.parallelism = document.value("parallelism", config.parallelism);
		config.output_dir = resolve(base_dir, document.value("output_dir", std::string("results")));
		if (document.contains("cache_dir") && !document.at("cache_dir").is_null()) {
			config.cache_dir = resolve(base_dir, document.at("cache_dir").get<std::string>());
		}
		config.selection_seed = document.value("selection_seed", config.selection_seed);

		auto &sim = config.simulation;
		if (document.contains("explainer")) {
			const auto &e = document.at("explainer");
			sim.explainer.precision = e.value("precision", sim.explainer.precision);
			sim.explainer.max_completion_chars = e.value("max_completion_chars", sim.explainer.max_completion_chars);
			if (e.contains("segmentation")) {
				sim.explainer.segmentation = parse_segmentation(e.at("segmentation"));
			}
		}
		if (document.contains("surrogate")) {
			const auto &s = document.at("surrogate");
			sim.surrogate.precision = s.value("precision", sim.surrogate.precision);
			sim.surrogate.max_parse_retries = s.value("max_parse_retries", sim.surrogate.max_parse_retries);
			sim.surrogate.rescale = s.value("rescale", sim.surrogate.rescale);
			sim.surrogate.rescale_quantile = s.value("rescale_quantile", sim.surrogate.rescale_quantile);
		}
		sim.codegen_retries = document.value("codegen_retries", sim.codegen_retries);
		if (document.contains("synthetic_length") && !document.at("synthetic_length").is_null()) {
			sim.synthetic_length = document.at("synthetic_length").get<std::size_t>();
		}
		if (config.executor) {
			sim.executor_timeout_s = config.executor->timeout_s;
		}
	} catch (const json::exception &e) {
		throw Error(Errc::ConfigInvalid, e.what());
	}
	validate(config);
	return config;
}

RunConfig load_run_config(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(Errc::IoError, "cannot open " + path.string());
	}
	json document;
	try {
		document = json::parse(in, nullptr, true, true);
	} catch (const json::exception &e) {
		throw Error(Errc::ConfigInvalid, path.string() + ": " + e.what());
	}
	return parse_run_config(document, path.parent_path());
}

void validate(const RunConfig &config) {
	auto fail = [](const std::string &message) { throw Error(Errc::ConfigInvalid, message); };
	if (config.datasets.empty()) {
		fail("no datasets configured");
	}
	if (config.forecasters.empty()) {
		fail("no forecasters configured");
	}
	if (config.modes.empty()) {
		fail("no metrics configured");
	}
	const bool direct = std::find(config.modes.begin(), config.modes.end(), SimulationMode::direct) != config.modes.end();
	const bool synthetic =
	    std::find(config.modes.begin(), config.modes.end(), SimulationMode::synthetic) != config.modes.end();
	if (direct && config.baselines.empty()) {
		fail("direct simulatability needs at least one baseline");
	}
	if (config.runs < 1) {
		fail("runs must be positive");
	}
	if (config.seeds.size() != static_cast<std::size_t>(config.runs)) {
		fail("seeds must list exactly one seed per run");
	}
	if (std::set<std::int64_t>(config.seeds.begin(), config.seeds.end()).size() != config.seeds.size()) {
		fail("seeds must be distinct");
	}
	if (config.parallelism < 1) {
		fail("parallelism must be positive");
	}
	if (config.simulation.codegen_retries < 0 || config.simulation.surrogate.max_parse_retries < 0) {
		fail("retry counts must be non-negative");
	}

	std::set<std::string> names;
	for (const auto &d : config.datasets) {
		if (!names.insert(d.name).second) {
			fail("duplicate dataset name '" + d.name + "'");
		}
	}
	std::set<std::string> forecasters;
	for (const auto &f : config.forecasters) {
		if (!forecasters.insert(f.id).second) {
			fail("duplicate forecaster id '" + f.id + "'");
		}
	}
	std::set<std::string> endpoints;
	for (const auto &e : config.endpoints) {
		if (!endpoints.insert(e.id).second) {
			fail("duplicate endpoint id '" + e.id + "'");
		}
	}
	auto require_endpoint = [&](const std::string &id, const char *role) {
		if (id.empty()) {
			fail(std::string(role) + " endpoint is not set");
		}
		if (!endpoints.count(id)) {
			fail(std::string(role) + " endpoint '" + id + "' is not registered");
		}
	};
	require_endpoint(config.surrogate_endpoint, "surrogate");
	const bool needs_explainer =
	    synthetic || std::any_of(config.baselines.begin(), config.baselines.end(), uses_explainer);
	if (needs_explainer && config.explainer_endpoints.empty()) {
		fail("the configured baselines need at least one explainer endpoint");
	}
	for (const auto &id : config.explainer_endpoints) {
		require_endpoint(id, "explainer");
	}
	if (synthetic) {
		require_endpoint(config.codegen_endpoint, "codegen");
	}
	if (config.executor && (config.executor->command.empty() || config.executor->slots < 1 ||
	                        config.executor->timeout_s < 1 || config.executor->timeout_s > 60)) {
		fail("executor needs a command, slots >= 1 and timeout_s in [1, 60]");
	}
}

// --- workbench ------------------------------------------------------------------

Workbench Workbench::create(RunConfig config, bool hermetic) {
	validate(config);
	Workbench bench;
	bench.hermetic = hermetic;

	llm::GatewayOptions options;
	if (!hermetic) {
		options.cache_dir = config.cache_dir;
	}
	bench.gateway = std::make_unique<llm::Gateway>(options);
	for (const auto &endpoint : config.endpoints) {
		if (hermetic || endpoint.kind == "scripted") {
			bench.gateway->register_endpoint(endpoint, hermetic::make_scripted_backend());
		} else {
			bench.gateway->register_endpoint(endpoint, std::make_shared<llm::OpenAiBackend>(
			                                               endpoint.base_url, endpoint.model, endpoint.api_key_env));
		}
	}

	if (hermetic) {
		bench.executor = std::make_unique<hermetic::FixtureExecutor>();
	} else if (config.executor) {
		bench.executor = std::make_unique<SubprocessExecutor>(config.executor->command, config.executor->slots);
	} else if (std::find(config.modes.begin(), config.modes.end(), SimulationMode::synthetic) != config.modes.end()) {
		throw Error(Errc::ConfigInvalid, "synthetic simulatability needs an executor section");
	}

	for (const auto &dataset : config.datasets) {
		bench.eval_sets[dataset.name] = select_eval_set(load_dataset(dataset.path), dataset, config.selection_seed);
	}
	bench.config = std::move(config);
	return bench;
}

Simulator Workbench::simulator(const std::string &explainer_endpoint) {
	SimulationEndpoints endpoints{explainer_endpoint, config.surrogate_endpoint, config.codegen_endpoint};
	return Simulator(*gateway, endpoints, config.simulation);
}

const EvalItem &Workbench::find_item(const std::string &dataset, const std::string &series_id) const {
	const auto set = eval_sets.find(dataset);
	if (set == eval_sets.end()) {
		throw Error(Errc::ConfigInvalid, "unknown dataset '" + dataset + "'");
	}
	for (const auto &item : set->second) {
		if (item.history.id == series_id) {
			return item;
		}
	}
	throw Error(Errc::ConfigInvalid, "series '" + series_id + "' is not in the evaluation set of '" + dataset + "'");
}

const ForecasterSpec &Workbench::find_forecaster(const std::string &id) const {
	for (const auto &f : config.forecasters) {
		if (f.id == id) {
			return f;
		}
	}
	throw Error(Errc::ConfigInvalid, "unknown forecaster '" + id + "'");
}

// --- ledger ---------------------------------------------------------------------

std::string ledger_key(const std::string &dataset, const std::string &series_id, const std::string &forecaster_id,
                       const std::string &explainer, Baseline baseline, SimulationMode mode, std::int64_t seed) {
	return fmt::format("{}|{}|{}|{}|{}|{}|{}", dataset, series_id, forecaster_id, explainer, baseline_name(baseline),
	                   mode_name(mode), seed);
}

namespace {

json report_json(const DistanceReport &r) {
	return {{"smape", r.smape}, {"nmae", r.nmae}, {"nrmse", r.nrmse}};
}

DistanceReport report_from(const json &j) {
	return {j.at("smape").get<double>(), j.at("nmae").get<double>(), j.at("nrmse").get<double>()};
}

json base_record(const std::string &dataset, const std::string &series_id, const std::string &forecaster_id,
                 const std::string &explainer, Baseline baseline, SimulationMode mode, std::int64_t seed) {
	return {{"key", ledger_key(dataset, series_id, forecaster_id, explainer, baseline, mode, seed)},
	        {"dataset", dataset},
	        {"series_id", series_id},
	        {"forecaster_id", forecaster_id},
	        {"explainer_endpoint", explainer},
	        {"baseline", baseline_name(baseline)},
	        {"mode", mode_name(mode)},
	        {"seed", seed}};
}

} // namespace

json result_record(const std::string &dataset, const SimulationResult &result) {
	const std::string explainer = result.explainer_endpoint.empty() ? "-" : result.explainer_endpoint;
	json record = base_record(dataset, result.series_id, result.forecaster_id, explainer, result.baseline, result.mode,
	                          result.run_seed);
	record["status"] = "ok";
	record["surrogate_values"] = result.surrogate_values;
	record["reference_values"] = result.reference_values;
	record["distances"] = report_json(result.distances);
	if (result.explanation) {
		record["explanation"] = *result.explanation;
	}
	if (result.tip) {
		record["tip"] = *result.tip;
	}
	if (result.generator_code) {
		record["generator_code"] = *result.generator_code;
	}
	if (result.synthetic_history) {
		record["synthetic_history"] = *result.synthetic_history;
	}
	return record;
}

json error_record(const std::string &dataset, const std::string &series_id, const std::string &forecaster_id,
                  const std::string &explainer, Baseline baseline, SimulationMode mode, std::int64_t seed,
                  const std::string &code, const std::string &message) {
	json record = base_record(dataset, series_id, forecaster_id, explainer, baseline, mode, seed);
	record["status"] = "error";
	record["error"] = {{"code", code}, {"message", message}};
	return record;
}

std::vector<json> read_ledger(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(Errc::IoError, "cannot open " + path.string());
	}
	std::vector<json> records;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (line.empty()) {
			continue;
		}
		try {
			records.push_back(json::parse(line));
		} catch (const json::exception &) {
			// A torn final line from an interrupted run is dropped; it will be redone on resume.
			spdlog::warn("{}:{}: skipping unparsable ledger line", path.string(), line_no);
		}
	}
	return records;
}

// --- summary --------------------------------------------------------------------

namespace {

struct CellKey {
	std::string dataset;
	std::string mode;
	std::string baseline;
	std::string explainer;
	std::string forecaster;
	auto operator<=>(const CellKey &) const = default;
};

std::optional<double> macro_mean(const std::map<std::int64_t, std::vector<double>> &per_run) {
	double total = 0.0;
	std::size_t runs = 0;
	for (const auto &[seed, values] : per_run) {
		if (values.empty()) {
			continue;
		}
		double sum = 0.0;
		for (double v : values) {
			sum += v;
		}
		total += sum / static_cast<double>(values.size());
		++runs;
	}
	if (runs == 0) {
		return std::nullopt;
	}
	return total / static_cast<double>(runs);
}

} // namespace

std::vector<CellSummary> summarize(const std::vector<json> &records) {
	struct Accumulator {
		std::map<std::int64_t, std::vector<DistanceReport>> distances;
		std::map<std::int64_t, std::vector<double>> nss[3];
		std::set<std::int64_t> seeds;
		std::size_t records = 0;
		std::size_t errors = 0;
	};
	std::map<CellKey, Accumulator> cells;
	for (const auto &r : records) {
		CellKey key{r.at("dataset"), r.at("mode"), r.at("baseline"), r.at("explainer_endpoint"), r.at("forecaster_id")};
		auto &acc = cells[key];
		const auto seed = r.at("seed").get<std::int64_t>();
		acc.seeds.insert(seed);
		++acc.records;
		if (r.at("status") != "ok") {
			++acc.errors;
			continue;
		}
		acc.distances[seed].push_back(report_from(r.at("distances")));
		if (r.contains("nss")) {
			const char *names[3] = {"smape", "nmae", "nrmse"};
			for (int m = 0; m < 3; ++m) {
				const auto &v = r.at("nss").at(names[m]);
				if (!v.is_null()) {
					acc.nss[m][seed].push_back(v.get<double>());
				}
			}
		}
	}

	std::vector<CellSummary> out;
	for (const auto &[key, acc] : cells) {
		CellSummary cell;
		cell.dataset = key.dataset;
		cell.mode = parse_mode(key.mode);
		cell.baseline = parse_baseline(key.baseline);
		cell.explainer = key.explainer;
		cell.forecaster = key.forecaster;
		cell.records = acc.records;
		cell.errors = acc.errors;
		cell.runs = acc.seeds.size();
		if (!acc.distances.empty()) {
			std::vector<std::vector<DistanceReport>> per_run;
			for (const auto &[seed, reports] : acc.distances) {
				per_run.push_back(reports);
			}
			cell.distances = aggregate(per_run);
		}
		const auto s = macro_mean(acc.nss[0]);
		const auto a = macro_mean(acc.nss[1]);
		const auto q = macro_mean(acc.nss[2]);
		if (s || a || q) {
			const double nan = std::numeric_limits<double>::quiet_NaN();
			cell.nss = DistanceReport{s.value_or(nan), a.value_or(nan), q.value_or(nan)};
		}
		out.push_back(std::move(cell));
	}
	return out;
}

json summary_json(const std::vector<CellSummary> &cells) {
	json out = json::array();
	std::size_t errors = 0;
	for (const auto &c : cells) {
		json cell = {{"dataset", c.dataset},     {"mode", mode_name(c.mode)}, {"baseline", baseline_name(c.baseline)},
		             {"explainer", c.explainer}, {"forecaster", c.forecaster}, {"records", c.records},
		             {"errors", c.errors},       {"runs", c.runs}};
		cell["distances"] = c.distances ? report_json(*c.distances) : json(nullptr);
		if (c.nss) {
			cell["nss"] = report_json(*c.nss);
		}
		errors += c.errors;
		out.push_back(std::move(cell));
	}
	return {{"cells", out}, {"errors", errors}};
}

// --- matrix -----------------------------------------------------------------------

namespace {

struct WorkItem {
	std::string dataset;
	const EvalItem *item = nullptr;
	const ForecasterSpec *forecaster = nullptr;
	std::string explainer; // "-" when the baseline runs no explainer
	Baseline baseline = Baseline::LLMTime;
	SimulationMode mode = SimulationMode::direct;
	std::int64_t seed = 0;

	std::string key() const {
		return ledger_key(dataset, item->history.id, forecaster->id, explainer, baseline, mode, seed);
	}
};

std::vector<WorkItem> enumerate(const Workbench &bench) {
	const auto &config = bench.config;
	std::vector<WorkItem> items;
	for (const auto &dataset : config.datasets) {
		for (const auto &eval : bench.eval_sets.at(dataset.name)) {
			for (const auto &forecaster : config.forecasters) {
				for (const auto seed : config.seeds) {
					WorkItem base{dataset.name, &eval, &forecaster, "-", Baseline::LLMTime, SimulationMode::direct, seed};
					for (const auto mode : config.modes) {
						if (mode == SimulationMode::direct) {
							for (const auto baseline : config.baselines) {
								base.baseline = baseline;
								base.mode = mode;
								if (uses_explainer(baseline)) {
									for (const auto &e : config.explainer_endpoints) {
										base.explainer = e;
										items.push_back(base);
									}
								} else {
									base.explainer = "-";
									items.push_back(base);
								}
							}
						} else {
							for (const auto &e : config.explainer_endpoints) {
								items.push_back({dataset.name, &eval, &forecaster, e, Baseline::LLMTime_E, mode, seed});
							}
						}
					}
				}
			}
		}
	}
	return items;
}

json nss_json(const SimulationResult &plain, const SimulationResult &guided) {
	auto one = [](double with_expl, double base) -> json {
		try {
			return normalized_synthetic_score(with_expl, base);
		} catch (const Error &e) {
			if (e.code() == Errc::BothZero) {
				return nullptr;
			}
			throw;
		}
	};
	return {{"smape", one(guided.distances.smape, plain.distances.smape)},
	        {"nmae", one(guided.distances.nmae, plain.distances.nmae)},
	        {"nrmse", one(guided.distances.nrmse, plain.distances.nrmse)}};
}

std::vector<json> process(const WorkItem &w, Simulator &simulator, GeneratorExecutor *executor) {
	const auto horizon = w.item->holdout.size();
	try {
		if (w.mode == SimulationMode::direct) {
			return {result_record(w.dataset, simulator.direct_simulatability(w.item->history, *w.forecaster, horizon,
			                                                                 w.baseline, w.seed))};
		}
		if (!executor) {
			throw Error(Errc::ExecutorFailed, "no executor configured");
		}
		auto [plain, guided] =
		    simulator.synthetic_simulatability(w.item->history, *w.forecaster, horizon, *executor, w.seed);
		plain.explainer_endpoint = w.explainer;
		json plain_record = result_record(w.dataset, plain);
		json guided_record = result_record(w.dataset, guided);
		guided_record["nss"] = nss_json(plain, guided);
		// The pair's completeness marker (the guided record) goes last.
		return {std::move(plain_record), std::move(guided_record)};
	} catch (const Error &e) {
		return {error_record(w.dataset, w.item->history.id, w.forecaster->id, w.explainer, w.baseline, w.mode, w.seed,
		                     std::string(to_string(e.code())), e.what())};
	} catch (const std::exception &e) {
		return {error_record(w.dataset, w.item->history.id, w.forecaster->id, w.explainer, w.baseline, w.mode, w.seed,
		                     "Internal", e.what())};
	}
}

} // namespace

RunOutcome run_matrix(Workbench &bench, bool resume) {
	const auto &config = bench.config;
	std::filesystem::create_directories(config.output_dir);
	RunOutcome outcome;
	outcome.ledger_path = config.output_dir / "ledger.jsonl";

	std::set<std::string> done;
	if (resume && std::filesystem::exists(outcome.ledger_path)) {
		for (const auto &record : read_ledger(outcome.ledger_path)) {
			done.insert(record.at("key").get<std::string>());
		}
	} else {
		std::filesystem::remove(outcome.ledger_path);
	}

	std::vector<WorkItem> pending;
	for (auto &w : enumerate(bench)) {
		if (done.count(w.key())) {
			++outcome.skipped;
		} else {
			pending.push_back(std::move(w));
		}
	}

	std::map<std::string, std::unique_ptr<Simulator>> simulators;
	simulators["-"] = std::make_unique<Simulator>(
	    bench.simulator(config.explainer_endpoints.empty() ? std::string{} : config.explainer_endpoints.front()));
	for (const auto &e : config.explainer_endpoints) {
		simulators[e] = std::make_unique<Simulator>(bench.simulator(e));
	}

	std::ofstream ledger(outcome.ledger_path, std::ios::binary | std::ios::app);
	if (!ledger) {
		throw Error(Errc::IoError, "cannot open " + outcome.ledger_path.string());
	}
	std::mutex ledger_mutex;
	spdlog::info("matrix: {} items pending, {} already in the ledger", pending.size(), outcome.skipped);

	const auto count = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(dynamic) num_threads(config.parallelism)
	for (std::ptrdiff_t i = 0; i < count; ++i) {
		const auto &w = pending[static_cast<std::size_t>(i)];
		const auto records = process(w, *simulators.at(w.explainer), bench.executor.get());
		std::lock_guard<std::mutex> lock(ledger_mutex);
		for (const auto &r : records) {
			ledger << r.dump() << '\n';
			++outcome.written;
			if (r.at("status") != "ok") {
				++outcome.errors;
				spdlog::warn("{}: {}", r.at("key").get<std::string>(), r.at("error").at("message").get<std::string>());
			}
		}
		ledger.flush();
	}
	ledger.close();

	outcome.summary = summarize(read_ledger(outcome.ledger_path));
	std::ofstream summary(config.output_dir / "summary.json", std::ios::trunc);
	summary << summary_json(outcome.summary).dump(2) << '\n';

	json usage = json::object();
	for (const auto &[endpoint, u] : bench.gateway->usage()) {
		usage[endpoint] = {{"requests", u.requests},          {"backend_calls", u.backend_calls},
		                   {"cache_hits", u.cache_hits},      {"retries", u.retries},
		                   {"prompt_tokens", u.prompt_tokens}, {"completion_tokens", u.completion_tokens}};
	}
	std::ofstream usage_out(config.output_dir / "usage.json", std::ios::trunc);
	usage_out << usage.dump(2) << '\n';
	return outcome;
}

} // namespace tsnle
