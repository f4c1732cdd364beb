#include "tsnle/study.hpp"

#include "tsnle/error.hpp"
#include "tsnle/harness.hpp"
#include "tsnle/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

namespace tsnle::study {

using nlohmann::json;

std::string label_name(Label label) {
	return label == Label::useful ? "useful" : "not_useful";
}

Label parse_label(const std::string &name) {
	if (name == "useful") {
		return Label::useful;
	}
	if (name == "not_useful") {
		return Label::not_useful;
	}
	throw Error(Errc::OutOfRange, "label must be 'useful' or 'not_useful'");
}

std::string pass_name(Pass pass) {
	return pass == Pass::without ? "without" : "with";
}

Pass parse_pass(const std::string &name) {
	if (name == "without") {
		return Pass::without;
	}
	if (name == "with") {
		return Pass::with;
	}
	throw Error(Errc::OutOfRange, "pass must be 'without' or 'with'");
}

// --- item bank ------------------------------------------------------------------

std::vector<StudyItem> parse_item_bank(const json &document) {
	if (!document.is_array()) {
		throw Error(Errc::ConfigInvalid, "item bank must be a JSON list");
	}
	std::vector<StudyItem> items;
	std::set<std::string> ids;
	try {
		for (const auto &entry : document) {
			StudyItem item;
			item.item_id = entry.at("item_id").get<std::string>();
			item.history = entry.at("history").get<std::vector<double>>();
			item.horizon = entry.at("horizon").get<std::size_t>();
			item.explanation_text = entry.at("explanation_text").get<std::string>();
			item.reference_forecast = entry.at("reference_forecast").get<std::vector<double>>();
			item.metric_label = parse_label(entry.at("metric_label").get<std::string>());
			if (entry.contains("ground_truth") && !entry.at("ground_truth").is_null()) {
				item.ground_truth = entry.at("ground_truth").get<std::vector<double>>();
			}
			if (item.history.empty() || item.horizon == 0 || item.reference_forecast.size() != item.horizon ||
			    (item.ground_truth && item.ground_truth->size() != item.horizon)) {
				throw Error(Errc::ConfigInvalid, "item '" + item.item_id + "' has inconsistent lengths");
			}
			if (!ids.insert(item.item_id).second) {
				throw Error(Errc::ConfigInvalid, "duplicate item id '" + item.item_id + "'");
			}
			items.push_back(std::move(item));
		}
	} catch (const json::exception &e) {
		throw Error(Errc::ConfigInvalid, std::string("item bank: ") + e.what());
	}
	if (items.empty()) {
		throw Error(Errc::ItemBankEmpty, "item bank holds no items");
	}
	return items;
}

std::vector<StudyItem> load_item_bank(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(Errc::IoError, "cannot open " + path.string());
	}
	try {
		return parse_item_bank(json::parse(in));
	} catch (const json::exception &e) {
		throw Error(Errc::ConfigInvalid, path.string() + ": " + e.what());
	}
}

json item_bank_json(const std::vector<StudyItem> &items) {
	json out = json::array();
	for (const auto &item : items) {
		json entry = {{"item_id", item.item_id},
		              {"history", item.history},
		              {"horizon", item.horizon},
		              {"explanation_text", item.explanation_text},
		              {"reference_forecast", item.reference_forecast},
		              {"metric_label", label_name(item.metric_label)}};
		if (item.ground_truth) {
			entry["ground_truth"] = *item.ground_truth;
		}
		out.push_back(std::move(entry));
	}
	return out;
}

std::vector<StudyItem> build_item_bank(const std::vector<json> &ledger,
                                       const std::map<std::string, std::vector<double>> &histories,
                                       std::size_t count) {
	auto find = [&](const std::string &key) -> const json * {
		for (const auto &r : ledger) {
			if (r.at("key") == key && r.at("status") == "ok") {
				return &r;
			}
		}
		return nullptr;
	};

	std::vector<StudyItem> by_label[2];
	for (const auto &r : ledger) {
		if (r.at("status") != "ok" || r.at("mode") != "direct" || r.at("baseline") != "LLMTime_E") {
			continue;
		}
		const auto dataset = r.at("dataset").get<std::string>();
		const auto series = r.at("series_id").get<std::string>();
		const auto forecaster = r.at("forecaster_id").get<std::string>();
		const auto explainer = r.at("explainer_endpoint").get<std::string>();
		const auto seed = r.at("seed").get<std::int64_t>();
		const json *plain =
		    find(ledger_key(dataset, series, forecaster, "-", Baseline::LLMTime, SimulationMode::direct, seed));
		const json *synthetic =
		    find(ledger_key(dataset, series, forecaster, explainer, Baseline::LLMTime_E, SimulationMode::synthetic, seed));
		const auto history = histories.find(dataset + "|" + series);
		if (!plain || !synthetic || history == histories.end() || !synthetic->contains("nss") ||
		    synthetic->at("nss").at("smape").is_null()) {
			continue;
		}
		const auto verdict = classify_usefulness(r.at("distances").at("smape").get<double>(),
		                                         plain->at("distances").at("smape").get<double>(),
		                                         synthetic->at("nss").at("smape").get<double>());
		if (verdict == Usefulness::disagree) {
			continue;
		}
		StudyItem item;
		item.item_id = fmt::format("{}~{}~{}~{}~{}", dataset, series, forecaster, explainer, seed);
		item.history = history->second;
		item.reference_forecast = r.at("reference_values").get<std::vector<double>>();
		item.horizon = item.reference_forecast.size();
		item.explanation_text = r.value("explanation", std::string{});
		item.metric_label = verdict == Usefulness::useful ? Label::useful : Label::not_useful;
		by_label[item.metric_label == Label::useful ? 0 : 1].push_back(std::move(item));
	}

	std::vector<StudyItem> out;
	std::size_t next[2] = {0, 0};
	for (int side = 0; out.size() < count; side ^= 1) {
		if (next[side] >= by_label[side].size()) {
			break;
		}
		out.push_back(by_label[side][next[side]++]);
	}
	return out;
}

// --- summary ---------------------------------------------------------------------

namespace {

std::optional<double> mean(const std::vector<double> &values) {
	if (values.empty()) {
		return std::nullopt;
	}
	double sum = 0.0;
	for (double v : values) {
		sum += v;
	}
	return sum / static_cast<double>(values.size());
}

const StudyItem &item_by_id(const std::vector<StudyItem> &items, const std::string &id) {
	for (const auto &item : items) {
		if (item.item_id == id) {
			return item;
		}
	}
	throw Error(Errc::UnknownItem, "item '" + id + "' is not in the bank");
}

std::string now_iso() {
	const std::time_t t = std::time(nullptr);
	std::tm tm{};
	gmtime_r(&t, &tm);
	char buffer[32];
	std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buffer;
}

json optional_json(const std::optional<double> &v) {
	return v ? json(*v) : json(nullptr);
}

} // namespace

StudySummary study_summary(const std::vector<StudySession> &sessions, const std::vector<StudyItem> &items,
                           ImprovementTarget target) {
	StudySummary summary;
	for (const auto &s : sessions) {
		if (!s.completed()) {
			continue;
		}
		for (const auto &r : s.responses) {
			const auto &item = item_by_id(items, r.item_id);
			if (s.part == 1) {
				const auto &truth = target == ImprovementTarget::ground_truth ? item.ground_truth : item.reference_forecast;
				if (!truth) {
					throw Error(Errc::ConfigInvalid, "item '" + item.item_id + "' has no ground truth");
				}
				Part1Outcome o;
				o.session_id = s.session_id;
				o.annotator_id = s.annotator_id;
				o.item_id = item.item_id;
				o.metric_label = item.metric_label;
				o.smape_without = smape(*truth, *r.without_pass);
				o.smape_with = smape(*truth, *r.with_pass);
				o.improvement = o.smape_without - o.smape_with;
				if (o.smape_without > 0.0) {
					o.relative_improvement = o.improvement / o.smape_without;
				}
				o.improved = o.improvement > 0.0;
				summary.part1.push_back(std::move(o));
			} else {
				summary.part2.push_back({s.session_id, s.annotator_id, item.item_id, item.metric_label, *r.label});
			}
		}
		++(s.part == 1 ? summary.completed_part1 : summary.completed_part2);
	}
	if (summary.completed_part1 + summary.completed_part2 == 0) {
		throw Error(Errc::NoCompletedSessions, "no completed sessions");
	}

	std::vector<double> abs_u, abs_n, rel_u, rel_n;
	std::vector<bool> improved, metric;
	std::map<std::string, std::pair<std::vector<bool>, std::vector<bool>>> per_annotator;
	for (const auto &o : summary.part1) {
		const bool useful = o.metric_label == Label::useful;
		(useful ? abs_u : abs_n).push_back(o.improvement);
		if (o.relative_improvement) {
			(useful ? rel_u : rel_n).push_back(*o.relative_improvement);
		}
		improved.push_back(o.improved);
		metric.push_back(useful);
		per_annotator[o.annotator_id].first.push_back(o.improved);
		per_annotator[o.annotator_id].second.push_back(useful);
	}
	summary.mean_improvement_useful = mean(abs_u);
	summary.mean_improvement_not_useful = mean(abs_n);
	summary.mean_relative_improvement_useful = mean(rel_u);
	summary.mean_relative_improvement_not_useful = mean(rel_n);
	if (!improved.empty()) {
		summary.part1_kappa = cohen_kappa(improved, metric);
		for (const auto &[annotator, labels] : per_annotator) {
			summary.part1_kappa_by_annotator[annotator] = cohen_kappa(labels.first, labels.second);
		}
	}

	std::vector<bool> human, metric2;
	std::map<std::string, std::pair<std::vector<bool>, std::vector<bool>>> per_annotator2;
	for (const auto &o : summary.part2) {
		human.push_back(o.human_label == Label::useful);
		metric2.push_back(o.metric_label == Label::useful);
		per_annotator2[o.annotator_id].first.push_back(human.back());
		per_annotator2[o.annotator_id].second.push_back(metric2.back());
	}
	if (!human.empty()) {
		summary.part2_kappa = cohen_kappa(human, metric2);
		for (const auto &[annotator, labels] : per_annotator2) {
			summary.part2_kappa_by_annotator[annotator] = cohen_kappa(labels.first, labels.second);
		}
	}
	return summary;
}

json summary_json(const StudySummary &summary) {
	json part1 = json::array();
	for (const auto &o : summary.part1) {
		part1.push_back({{"session_id", o.session_id},
		                 {"annotator_id", o.annotator_id},
		                 {"item_id", o.item_id},
		                 {"metric_label", label_name(o.metric_label)},
		                 {"smape_without", o.smape_without},
		                 {"smape_with", o.smape_with},
		                 {"improvement", o.improvement},
		                 {"relative_improvement", optional_json(o.relative_improvement)},
		                 {"improved", o.improved}});
	}
	json part2 = json::array();
	for (const auto &o : summary.part2) {
		part2.push_back({{"session_id", o.session_id},
		                 {"annotator_id", o.annotator_id},
		                 {"item_id", o.item_id},
		                 {"metric_label", label_name(o.metric_label)},
		                 {"human_label", label_name(o.human_label)}});
	}
	return {{"completed_sessions", {{"part1", summary.completed_part1}, {"part2", summary.completed_part2}}},
	        {"part1",
	         {{"kappa", optional_json(summary.part1_kappa)},
	          {"kappa_by_annotator", summary.part1_kappa_by_annotator},
	          {"mean_improvement", {{"useful", optional_json(summary.mean_improvement_useful)},
	                                {"not_useful", optional_json(summary.mean_improvement_not_useful)}}},
	          {"mean_relative_improvement", {{"useful", optional_json(summary.mean_relative_improvement_useful)},
	                                         {"not_useful", optional_json(summary.mean_relative_improvement_not_useful)}}},
	          {"items", part1}}},
	        {"part2",
	         {{"kappa", optional_json(summary.part2_kappa)},
	          {"kappa_by_annotator", summary.part2_kappa_by_annotator},
	          {"items", part2}}}};
}

// --- service ----------------------------------------------------------------------

StudyService::StudyService(std::vector<StudyItem> items, StudyOptions options)
    : items_(std::move(items)), options_(std::move(options)) {
	if (options_.target == ImprovementTarget::ground_truth) {
		for (const auto &item : items_) {
			if (!item.ground_truth) {
				throw Error(Errc::ConfigInvalid, "ground-truth target needs ground_truth on item '" + item.item_id + "'");
			}
		}
	}
	if (options_.event_log && std::filesystem::exists(*options_.event_log)) {
		replay(*options_.event_log);
	}
}

StudySession StudyService::create_session(const std::string &annotator_id, int part, bool consent) {
	if (!consent) {
		throw Error(Errc::ConsentMissing, "consent must be given before any item is served");
	}
	if (items_.empty()) {
		throw Error(Errc::ItemBankEmpty, "item bank holds no items");
	}
	if (part != 1 && part != 2) {
		throw Error(Errc::WrongPart, "part must be 1 or 2");
	}
	if (annotator_id.empty()) {
		throw Error(Errc::OutOfRange, "annotator_id must not be empty");
	}
	std::lock_guard<std::mutex> lock(mutex_);
	StudySession s;
	static thread_local std::mt19937_64 rng{std::random_device{}()};
	s.session_id = fmt::format("s{:04d}-{:012x}", ++counter_, rng() & 0xFFFFFFFFFFFFULL);
	s.annotator_id = annotator_id;
	s.part = part;
	s.consent = true;
	s.started_at = now_iso();
	for (const auto &item : items_) {
		s.responses.push_back({item.item_id, std::nullopt, std::nullopt, std::nullopt});
	}
	log_event({{"event", "session"},
	           {"session_id", s.session_id},
	           {"annotator_id", s.annotator_id},
	           {"part", part},
	           {"at", s.started_at}});
	sessions_[s.session_id] = s;
	session_order_.push_back(s.session_id);
	return s;
}

StudySession &StudyService::find_session(const std::string &session_id) {
	const auto it = sessions_.find(session_id);
	if (it == sessions_.end()) {
		throw Error(Errc::UnknownSession, "unknown session '" + session_id + "'");
	}
	return it->second;
}

const StudySession &StudyService::find_session(const std::string &session_id) const {
	const auto it = sessions_.find(session_id);
	if (it == sessions_.end()) {
		throw Error(Errc::UnknownSession, "unknown session '" + session_id + "'");
	}
	return it->second;
}

std::size_t StudyService::item_index(const std::string &item_id) const {
	for (std::size_t i = 0; i < items_.size(); ++i) {
		if (items_[i].item_id == item_id) {
			return i;
		}
	}
	throw Error(Errc::UnknownItem, "unknown item '" + item_id + "'");
}

json StudyService::next(const std::string &session_id) const {
	std::lock_guard<std::mutex> lock(mutex_);
	const auto &s = find_session(session_id);
	std::size_t remaining = 0;
	std::optional<std::size_t> pending;
	for (std::size_t i = 0; i < s.responses.size(); ++i) {
		const auto &r = s.responses[i];
		const bool done = s.part == 1 ? r.with_pass.has_value() : r.label.has_value();
		if (!done) {
			++remaining;
			if (!pending) {
				pending = i;
			}
		}
	}
	json payload = {{"session_id", s.session_id}, {"part", s.part}, {"remaining", remaining}, {"done", !pending}};
	if (!pending) {
		return payload;
	}
	const auto &item = items_[*pending];
	json body = {{"item_id", item.item_id}, {"history", item.history}, {"horizon", item.horizon}};
	if (s.part == 1) {
		const bool with = s.responses[*pending].without_pass.has_value();
		body["pass"] = pass_name(with ? Pass::with : Pass::without);
		if (with) {
			body["explanation_text"] = item.explanation_text;
		}
	} else {
		body["explanation_text"] = item.explanation_text;
		body["reference_forecast"] = item.reference_forecast;
	}
	payload["item"] = std::move(body);
	return payload;
}

void StudyService::apply_part1(StudySession &s, std::size_t index, Pass pass, const std::vector<double> &values) {
	if (s.part != 1) {
		throw Error(Errc::WrongPart, "session '" + s.session_id + "' is a part-2 session");
	}
	const auto &item = items_[index];
	auto &r = s.responses[index];
	auto &slot = pass == Pass::without ? r.without_pass : r.with_pass;
	if (slot) {
		throw Error(Errc::DuplicateSubmission, pass_name(pass) + " pass already submitted for '" + item.item_id + "'");
	}
	if (pass == Pass::with && !r.without_pass) {
		throw Error(Errc::WrongOrder, "the without pass must precede the with pass");
	}
	if (values.size() != item.horizon) {
		throw Error(Errc::WrongLength,
		            fmt::format("expected {} values, got {}", item.horizon, values.size()));
	}
	double lo = item.history.front();
	double hi = lo;
	for (const auto &seq : {std::cref(item.history), std::cref(item.reference_forecast)}) {
		for (double v : seq.get()) {
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
	}
	const double span = hi > lo ? hi - lo : std::max(std::fabs(hi), 1.0);
	for (double v : values) {
		if (!std::isfinite(v) || v < lo - span || v > hi + span) {
			throw Error(Errc::OutOfRange, fmt::format("value {} outside the allowed range [{}, {}]", v, lo - span, hi + span));
		}
	}
	slot = values;
	mark_completion(s);
}

void StudyService::apply_part2(StudySession &s, std::size_t index, Label label) {
	if (s.part != 2) {
		throw Error(Errc::WrongPart, "session '" + s.session_id + "' is a part-1 session");
	}
	auto &r = s.responses[index];
	if (r.label) {
		throw Error(Errc::DuplicateSubmission, "label already submitted for '" + r.item_id + "'");
	}
	r.label = label;
	mark_completion(s);
}

void StudyService::mark_completion(StudySession &s) {
	const bool all = std::all_of(s.responses.begin(), s.responses.end(), [&](const AnnotationRecord &r) {
		return s.part == 1 ? r.with_pass.has_value() : r.label.has_value();
	});
	if (all && !s.completed_at) {
		s.completed_at = now_iso();
	}
}

void StudyService::submit_part1(const std::string &session_id, const std::string &item_id, Pass pass,
                                const std::vector<double> &values) {
	std::lock_guard<std::mutex> lock(mutex_);
	auto &s = find_session(session_id);
	apply_part1(s, item_index(item_id), pass, values);
	log_event({{"event", "forecast"},
	           {"session_id", session_id},
	           {"item_id", item_id},
	           {"pass", pass_name(pass)},
	           {"values", values},
	           {"at", now_iso()}});
}

void StudyService::submit_part2(const std::string &session_id, const std::string &item_id, Label label) {
	std::lock_guard<std::mutex> lock(mutex_);
	auto &s = find_session(session_id);
	apply_part2(s, item_index(item_id), label);
	log_event({{"event", "label"},
	           {"session_id", session_id},
	           {"item_id", item_id},
	           {"label", label_name(label)},
	           {"at", now_iso()}});
}

StudySession StudyService::session(const std::string &session_id) const {
	std::lock_guard<std::mutex> lock(mutex_);
	return find_session(session_id);
}

std::vector<StudySession> StudyService::sessions() const {
	std::lock_guard<std::mutex> lock(mutex_);
	std::vector<StudySession> out;
	for (const auto &id : session_order_) {
		out.push_back(sessions_.at(id));
	}
	return out;
}

StudySummary StudyService::summary() const {
	return study_summary(sessions(), items_, options_.target);
}

void StudyService::log_event(const json &event) {
	if (!options_.event_log) {
		return;
	}
	std::ofstream out(*options_.event_log, std::ios::app);
	if (!out) {
		throw Error(Errc::IoError, "cannot append to " + options_.event_log->string());
	}
	out << event.dump() << '\n';
}

void StudyService::replay(const std::filesystem::path &path) {
	std::ifstream in(path);
	std::string line;
	while (std::getline(in, line)) {
		if (line.empty()) {
			continue;
		}
		const auto e = json::parse(line);
		const auto kind = e.at("event").get<std::string>();
		if (kind == "session") {
			StudySession s;
			s.session_id = e.at("session_id").get<std::string>();
			s.annotator_id = e.at("annotator_id").get<std::string>();
			s.part = e.at("part").get<int>();
			s.consent = true;
			s.started_at = e.value("at", std::string{});
			for (const auto &item : items_) {
				s.responses.push_back({item.item_id, std::nullopt, std::nullopt, std::nullopt});
			}
			session_order_.push_back(s.session_id);
			sessions_[s.session_id] = std::move(s);
			++counter_;
		} else if (kind == "forecast") {
			apply_part1(find_session(e.at("session_id")), item_index(e.at("item_id")), parse_pass(e.at("pass")),
			            e.at("values").get<std::vector<double>>());
		} else if (kind == "label") {
			apply_part2(find_session(e.at("session_id")), item_index(e.at("item_id")), parse_label(e.at("label")));
		}
	}
}

} // namespace tsnle::study
