#include "tsnle/datasets.hpp"

#include "tsnle/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace tsnle {

DatasetConfig default_dataset_config(const std::string &name, std::filesystem::path path) {
	DatasetConfig config;
	config.name = name;
	config.path = std::move(path);
	config.horizon = name == "tourism" ? 4 : 6;
	config.min_history = 2 * config.horizon;
	return config;
}

void validate(const DatasetConfig &config) {
	if (config.horizon < 1) {
		throw Error(Errc::ConfigInvalid, "dataset '" + config.name + "': horizon must be at least 1");
	}
	if (config.min_history < 2 * config.horizon) {
		throw Error(Errc::ConfigInvalid, "dataset '" + config.name + "': min_history must be at least twice the horizon");
	}
	if (config.max_series && *config.max_series == 0) {
		throw Error(Errc::ConfigInvalid, "dataset '" + config.name + "': max_series must be positive");
	}
}

DatasetConfig parse_dataset_config(const nlohmann::json &object) {
	if (!object.is_object() || !object.contains("name") || !object.contains("path")) {
		throw Error(Errc::ConfigInvalid, "dataset entries need 'name' and 'path'");
	}
	DatasetConfig config = default_dataset_config(object.at("name").get<std::string>(),
	                                              object.at("path").get<std::string>());
	if (object.contains("frequency")) {
		const auto label = object.at("frequency").get<std::string>();
		config.frequency_filter = parse_frequency(label);
	}
	if (object.contains("horizon")) {
		config.horizon = object.at("horizon").get<std::size_t>();
		if (!object.contains("min_history")) {
			config.min_history = 2 * config.horizon;
		}
	}
	if (object.contains("min_history")) {
		config.min_history = object.at("min_history").get<std::size_t>();
	}
	if (object.contains("max_series") && !object.at("max_series").is_null()) {
		config.max_series = object.at("max_series").get<std::size_t>();
	}
	validate(config);
	return config;
}

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
		s.remove_prefix(1);
	}
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
		s.remove_suffix(1);
	}
	return s;
}

std::vector<double> parse_values(std::string_view field, std::size_t line_no) {
	std::vector<double> values;
	std::size_t pos = 0;
	while (pos <= field.size()) {
		const auto comma = field.find(',', pos);
		const auto token = trim(field.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
		if (token == "?") {
			throw Error(Errc::MissingValues, "line " + std::to_string(line_no) + ": series contains missing values");
		}
		double v = 0.0;
		const auto *first = token.data();
		const auto *last = token.data() + token.size();
		if (!token.empty() && *first == '+') {
			++first;
		}
		const auto [ptr, ec] = std::from_chars(first, last, v);
		if (token.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
			throw Error(Errc::MalformedRow,
			            "line " + std::to_string(line_no) + ": bad value '" + std::string(token) + "'");
		}
		values.push_back(v);
		if (comma == std::string_view::npos) {
			break;
		}
		pos = comma + 1;
	}
	return values;
}

} // namespace

std::vector<TimeSeries> parse_tsf_text(std::string_view text, const std::string &source) {
	std::size_t attributes = 0;
	std::string frequency_label;
	bool in_data = false;
	bool any_content = false;
	std::vector<TimeSeries> out;

	std::size_t line_no = 0;
	std::size_t pos = 0;
	while (pos < text.size()) {
		const auto nl = text.find('\n', pos);
		const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
		pos = nl == std::string_view::npos ? text.size() : nl + 1;
		++line_no;
		if (line.empty() || line.front() == '#') {
			continue;
		}
		any_content = true;

		if (!in_data) {
			if (line.front() != '@') {
				throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": expected a header line");
			}
			const auto space = line.find_first_of(" \t");
			const auto key = line.substr(0, space);
			const auto value = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
			if (key == "@data") {
				if (attributes == 0) {
					throw Error(Errc::MalformedHeader, "@data before any @attribute");
				}
				in_data = true;
			} else if (key == "@attribute") {
				if (value.empty()) {
					throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": @attribute needs a name");
				}
				++attributes;
			} else if (key == "@frequency") {
				frequency_label = std::string(value);
			} else if (key.size() < 2) {
				throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": empty directive");
			}
			// @relation, @horizon, @missing, @equallength and others are informational.
			continue;
		}

		std::vector<std::string_view> fields;
		std::size_t start = 0;
		for (std::size_t i = 0; i < attributes; ++i) {
			const auto colon = line.find(':', start);
			if (colon == std::string_view::npos) {
				throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": expected " +
				                                    std::to_string(attributes + 1) + " ':'-separated fields");
			}
			fields.push_back(line.substr(start, colon - start));
			start = colon + 1;
		}
		TimeSeries series;
		series.id = std::string(trim(fields.front()));
		if (series.id.empty()) {
			throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": empty series name");
		}
		series.values = parse_values(line.substr(start), line_no);
		series.frequency = parse_frequency(frequency_label);
		series.frequency_label = frequency_label;
		series.source = source;
		out.push_back(std::move(series));
	}

	if (!any_content) {
		throw Error(Errc::EmptyFile, "no content");
	}
	if (!in_data) {
		throw Error(Errc::MalformedHeader, "missing @data section");
	}
	if (out.empty()) {
		throw Error(Errc::EmptyFile, "@data section holds no series");
	}
	return out;
}

namespace {

std::string read_file(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(Errc::IoError, "cannot open " + path.string());
	}
	std::ostringstream buffer;
	buffer << in.rdbuf();
	return buffer.str();
}

} // namespace

std::vector<TimeSeries> parse_tsf(const std::filesystem::path &path) {
	return parse_tsf_text(read_file(path), path.stem().string());
}

std::vector<EvalItem> select_eval_set(const std::vector<TimeSeries> &all, const DatasetConfig &config,
                                      std::uint64_t seed) {
	validate(config);
	std::vector<std::size_t> keep;
	for (std::size_t i = 0; i < all.size(); ++i) {
		const auto &s = all[i];
		if (s.frequency == config.frequency_filter && s.size() >= config.min_history + config.horizon) {
			keep.push_back(i);
		}
	}
	if (keep.empty()) {
		throw Error(Errc::NoSeriesLeft, "dataset '" + config.name + "': no series pass the frequency and length filters");
	}

	if (config.max_series && *config.max_series < keep.size()) {
		// Partial Fisher-Yates over positions, then restore input order.
		std::mt19937_64 rng(seed);
		for (std::size_t i = 0; i < *config.max_series; ++i) {
			const auto j = i + static_cast<std::size_t>(rng() % (keep.size() - i));
			std::swap(keep[i], keep[j]);
		}
		keep.resize(*config.max_series);
		std::sort(keep.begin(), keep.end());
	}

	std::vector<EvalItem> items;
	items.reserve(keep.size());
	for (const auto i : keep) {
		const auto &s = all[i];
		const auto split = s.values.end() - static_cast<std::ptrdiff_t>(config.horizon);
		EvalItem item;
		item.history = s;
		item.history.values.assign(s.values.begin(), split);
		item.holdout.assign(split, s.values.end());
		items.push_back(std::move(item));
	}
	return items;
}

void write_series_store(const std::filesystem::path &path, const std::vector<TimeSeries> &series) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw Error(Errc::IoError, "cannot write " + path.string());
	}
	for (const auto &s : series) {
		nlohmann::json record = {
		    {"id", s.id}, {"frequency", frequency_name(s.frequency, s.frequency_label)}, {"values", s.values}};
		out << record.dump() << '\n';
	}
}

std::vector<TimeSeries> read_series_store(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(Errc::IoError, "cannot open " + path.string());
	}
	std::vector<TimeSeries> out;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		try {
			const auto record = nlohmann::json::parse(line);
			TimeSeries s;
			s.id = record.at("id").get<std::string>();
			s.frequency_label = record.value("frequency", std::string{});
			s.frequency = parse_frequency(s.frequency_label);
			s.values = record.at("values").get<std::vector<double>>();
			s.source = path.stem().string();
			validate(s);
			out.push_back(std::move(s));
		} catch (const nlohmann::json::exception &e) {
			throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
		}
	}
	if (out.empty()) {
		throw Error(Errc::EmptyFile, path.string() + " holds no series");
	}
	return out;
}

std::vector<TimeSeries> load_dataset(const std::filesystem::path &path) {
	if (path.extension() == ".jsonl") {
		return read_series_store(path);
	}
	return parse_tsf(path);
}

} // namespace tsnle
