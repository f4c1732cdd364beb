#include "support.hpp"

#include "tsnle/datasets.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <numeric>

using namespace tsnle;

namespace {

const char *kHeader = "@relation r\n@attribute series_name string\n@frequency yearly\n@horizon 6\n@data\n";

std::vector<TimeSeries> ramps(std::size_t count, std::size_t length) {
	std::vector<TimeSeries> out;
	for (std::size_t i = 0; i < count; ++i) {
		std::vector<double> v(length);
		std::iota(v.begin(), v.end(), static_cast<double>(100 * i));
		out.push_back(support::series("S" + std::to_string(i), v));
	}
	return out;
}

} // namespace

TEST_SUITE("datasets") {

TEST_CASE("tsf fixture parses to the hand-written values") {
	const auto all = parse_tsf(support::fixture("tsf/two_series.tsf"));
	REQUIRE(all.size() == 2);
	CHECK(all[0].id == "T1");
	CHECK(all[0].values == std::vector<double>{1.5, 2.25, 3, 4.125, 5, 6.5, 7.75, 9, 10.5, 12, 13.25, 15});
	CHECK(all[1].id == "T2");
	CHECK(all[1].values == std::vector<double>{100, 98.5, 97, 99.25, 101, 102.5, 104, 103.75, 105, 107.5, 110,
	                                           111.25, 113, 115.5});
	for (const auto &s : all) {
		CHECK(s.frequency == Frequency::yearly);
		CHECK(s.source == "two_series");
	}
	CHECK(load_dataset(support::fixture("tsf/two_series.tsf")).size() == 2);
}

TEST_CASE("tsf errors") {
	CHECK(support::code_of([] { parse_tsf_text("@attribute series_name string\nA:1,2,3\n"); }) ==
	      Errc::MalformedHeader);
	CHECK(support::code_of([] { parse_tsf_text("A:1,2,3\n"); }) == Errc::MalformedHeader);
	CHECK(support::code_of([] { parse_tsf_text(std::string(kHeader) + "A:1,?,3\n"); }) == Errc::MissingValues);
	CHECK(support::code_of([] { parse_tsf_text(std::string(kHeader) + "A:1,x,3\n"); }) == Errc::MalformedRow);
	CHECK(support::code_of([] { parse_tsf_text(std::string(kHeader) + "no separator\n"); }) == Errc::MalformedRow);
	CHECK(support::code_of([] { parse_tsf_text(""); }) == Errc::EmptyFile);
	CHECK(support::code_of([] { parse_tsf_text("# only a comment\n\n"); }) == Errc::EmptyFile);
	CHECK(support::code_of([] { parse_tsf_text(kHeader); }) == Errc::EmptyFile);
	CHECK(support::code_of([] { parse_tsf("/nonexistent/file.tsf"); }) == Errc::IoError);
}

TEST_CASE("tsf frequency labels") {
	const auto q = parse_tsf_text("@attribute n string\n@frequency quarterly\n@data\nQ:1,2\n");
	CHECK(q[0].frequency == Frequency::quarterly);
	const auto other = parse_tsf_text("@attribute n string\n@frequency 10_minutes\n@data\nX:1,2\n");
	CHECK(other[0].frequency == Frequency::other);
	CHECK(other[0].frequency_label == "10_minutes");
}

TEST_CASE("evaluation set selection") {
	auto all = ramps(3, 20);
	all.push_back(support::series("short", std::vector<double>(17, 1.0)));
	auto monthly = support::series("monthly", std::vector<double>(40, 2.0));
	monthly.frequency = Frequency::monthly;
	all.push_back(monthly);

	auto config = default_dataset_config("m3");
	CHECK(config.horizon == 6);
	CHECK(config.min_history == 12);
	const auto items = select_eval_set(all, config, 1);
	REQUIRE(items.size() == 3);
	for (std::size_t i = 0; i < items.size(); ++i) {
		CHECK(items[i].history.id == "S" + std::to_string(i));
		CHECK(items[i].history.size() == 14);
		CHECK(items[i].holdout.size() == 6);
		auto joined = items[i].history.values;
		joined.insert(joined.end(), items[i].holdout.begin(), items[i].holdout.end());
		CHECK(joined == all[i].values);
	}

	config.max_series = 2;
	const auto a = select_eval_set(ramps(10, 20), config, 99);
	const auto b = select_eval_set(ramps(10, 20), config, 99);
	REQUIRE(a.size() == 2);
	CHECK(a[0].history.id == b[0].history.id);
	CHECK(a[1].history.id == b[1].history.id);
	CHECK(a[0].history.id < a[1].history.id);

	config.max_series.reset();
	CHECK(support::code_of([&] { select_eval_set(ramps(2, 17), config, 1); }) == Errc::NoSeriesLeft);
	CHECK(default_dataset_config("tourism").horizon == 4);
}

TEST_CASE("series store round trip") {
	support::TempDir dir;
	auto series = ramps(2, 5);
	series[1].values[2] = 0.1 + 0.2;
	const auto path = dir.path() / "store.jsonl";
	write_series_store(path, series);
	const auto back = load_dataset(path);
	REQUIRE(back.size() == 2);
	for (std::size_t i = 0; i < 2; ++i) {
		CHECK(back[i].id == series[i].id);
		CHECK(back[i].values == series[i].values);
		CHECK(back[i].frequency == Frequency::yearly);
	}
	{
		std::ofstream(dir.path() / "bad.jsonl") << "{\"id\": \"x\"}\n";
	}
	CHECK(support::code_of([&] { read_series_store(dir.path() / "bad.jsonl"); }) == Errc::MalformedRow);
	{
		std::ofstream(dir.path() / "empty.jsonl") << "\n";
	}
	CHECK(support::code_of([&] { read_series_store(dir.path() / "empty.jsonl"); }) == Errc::EmptyFile);
}

TEST_CASE("dataset config parsing") {
	const auto c = parse_dataset_config(nlohmann::json::parse(R"({"name": "tourism", "path": "t.tsf"})"));
	CHECK(c.horizon == 4);
	CHECK(c.min_history == 8);
	const auto d = parse_dataset_config(
	    nlohmann::json::parse(R"({"name": "custom", "path": "x.tsf", "horizon": 3, "max_series": 5})"));
	CHECK(d.horizon == 3);
	CHECK(d.min_history == 6);
	CHECK(d.max_series == 5u);
	CHECK(support::code_of([] { parse_dataset_config(nlohmann::json::parse(R"({"name": "m1"})")); }) ==
	      Errc::ConfigInvalid);
	CHECK(support::code_of([] {
		      parse_dataset_config(nlohmann::json::parse(R"({"name": "m1", "path": "p", "horizon": 4, "min_history": 5})"));
	      }) == Errc::ConfigInvalid);
	CHECK(support::code_of([] {
		      parse_dataset_config(nlohmann::json::parse(R"({"name": "m1", "path": "p", "max_series": 0})"));
	      }) == Errc::ConfigInvalid);
}

} // TEST_SUITE
