#pragma once

#include "tsnle/datasets.hpp"
#include "tsnle/executor.hpp"
#include "tsnle/forecasters.hpp"
#include "tsnle/llm_gateway.hpp"
#include "tsnle/simulatability.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsnle {

struct ExecutorConfig {
	std::vector<std::string> command; // argv of the sandbox runner
	int timeout_s = 10;
	int slots = 1;
};

struct RunConfig {
	std::vector<DatasetConfig> datasets;
	std::vector<ForecasterSpec> forecasters;
	std::vector<Baseline> baselines;
	std::vector<SimulationMode> modes{SimulationMode::direct};
	std::vector<llm::EndpointConfig> endpoints;
	std::vector<std::string> explainer_endpoints;
	std::string surrogate_endpoint;
	std::string codegen_endpoint; // defaults to the surrogate endpoint
	std::optional<ExecutorConfig> executor;
	int runs = 3;
	std::vector<std::int64_t> seeds;
	int parallelism = 1;
	std::filesystem::path output_dir = "results";
	std::optional<std::filesystem::path> cache_dir;
	std::uint64_t selection_seed = 0;
	SimulationConfig simulation;
};

ForecasterSpec parse_forecaster_spec(const nlohmann::json &object);
/// Relative dataset, executor and output paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json &document, const std::filesystem::path &base_dir = {});
RunConfig load_run_config(const std::filesystem::path &path);
/// Throws ConfigInvalid.
void validate(const RunConfig &config);

/// Gateway, executor and evaluation sets built from a configuration.
/// In hermetic mode every endpoint is served by the scripted backend and the
/// executor interprets fixture directives in-process.
struct Workbench {
	RunConfig config;
	bool hermetic = false;
	std::unique_ptr<llm::Gateway> gateway;
	std::unique_ptr<GeneratorExecutor> executor; // null when synthetic mode is unavailable
	std::map<std::string, std::vector<EvalItem>> eval_sets; // by dataset name

	static Workbench create(RunConfig config, bool hermetic);
	Simulator simulator(const std::string &explainer_endpoint);
	const EvalItem &find_item(const std::string &dataset, const std::string &series_id) const;
	const ForecasterSpec &find_forecaster(const std::string &id) const;
};

/// Identifies one ledger record: dataset|series|forecaster|explainer|baseline|mode|seed.
std::string ledger_key(const std::string &dataset, const std::string &series_id, const std::string &forecaster_id,
                       const std::string &explainer, Baseline baseline, SimulationMode mode, std::int64_t seed);

nlohmann::json result_record(const std::string &dataset, const SimulationResult &result);
nlohmann::json error_record(const std::string &dataset, const std::string &series_id, const std::string &forecaster_id,
                            const std::string &explainer, Baseline baseline, SimulationMode mode, std::int64_t seed,
                            const std::string &code, const std::string &message);

std::vector<nlohmann::json> read_ledger(const std::filesystem::path &path);

/// Aggregate over one (dataset, mode, baseline, explainer, forecaster) cell.
struct CellSummary {
	std::string dataset;
	SimulationMode mode = SimulationMode::direct;
	Baseline baseline = Baseline::LLMTime;
	std::string explainer;
	std::string forecaster;
	std::optional<DistanceReport> distances; // empty when every item failed
	std::optional<DistanceReport> nss;       // synthetic LLMTime_E cells only
	std::size_t records = 0;
	std::size_t errors = 0;
	std::size_t runs = 0;
};

/// Macro-average per run, then across runs. Error records are counted, not averaged.
std::vector<CellSummary> summarize(const std::vector<nlohmann::json> &records);
nlohmann::json summary_json(const std::vector<CellSummary> &cells);

struct RunOutcome {
	std::filesystem::path ledger_path;
	std::size_t written = 0;
	std::size_t skipped = 0; // already present when resuming
	std::size_t errors = 0;  // item failures in this invocation
	std::vector<CellSummary> summary;
};

/// Runs every matrix cell, appending to <output_dir>/ledger.jsonl and
/// writing <output_dir>/summary.json. Item failures become error records.
RunOutcome run_matrix(Workbench &bench, bool resume);

enum class ReportFormat { markdown, csv };
ReportFormat parse_report_format(const std::string &name);

/// Tables grouped by dataset; rows are baselines (direct) or explainer
/// endpoints (synthetic NSS), columns are forecasters. `metric` is
/// smape | nmae | nrmse. Throws EmptyLedger.
std::string render_report(const std::vector<nlohmann::json> &records, ReportFormat format,
                          const std::string &metric = "smape");

} // namespace tsnle
