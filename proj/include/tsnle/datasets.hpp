#pragma once

#include "tsnle/timeseries.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsnle {

struct DatasetConfig {
	std::string name; // tourism | m3 | m1 | custom
	std::filesystem::path path;
	Frequency frequency_filter = Frequency::yearly;
	std::size_t horizon = 6;
	std::optional<std::size_t> max_series;
	std::size_t min_history = 12;
};

/// Defaults for the yearly subsets: tourism horizon 4, m3 and m1 horizon 6,
/// min_history twice the horizon.
DatasetConfig default_dataset_config(const std::string &name, std::filesystem::path path = {});
/// Throws ConfigInvalid.
void validate(const DatasetConfig &config);
/// Missing keys fall back to default_dataset_config(name).
DatasetConfig parse_dataset_config(const nlohmann::json &object);

/// Parses .tsf text. Series ids come from the first attribute; the
/// @frequency header sets every series' frequency. `source` labels the series.
std::vector<TimeSeries> parse_tsf_text(std::string_view text, const std::string &source = {});
std::vector<TimeSeries> parse_tsf(const std::filesystem::path &path);

struct EvalItem {
	TimeSeries history;
	std::vector<double> holdout;
};

/// Frequency filter, length filter, tail split, optional seeded subsample.
/// Input order is preserved. Throws NoSeriesLeft.
std::vector<EvalItem> select_eval_set(const std::vector<TimeSeries> &all, const DatasetConfig &config,
                                      std::uint64_t seed);

/// JSON-lines store: one {"id", "frequency", "values"} record per line.
void write_series_store(const std::filesystem::path &path, const std::vector<TimeSeries> &series);
std::vector<TimeSeries> read_series_store(const std::filesystem::path &path);

/// Loads a dataset file by extension: .tsf or .jsonl.
std::vector<TimeSeries> load_dataset(const std::filesystem::path &path);

} // namespace tsnle
