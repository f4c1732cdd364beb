#pragma once

#include "tsnle/simulatability.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tsnle::study {

enum class Label { useful, not_useful };
enum class Pass { without, with };

std::string label_name(Label label);
Label parse_label(const std::string &name);
std::string pass_name(Pass pass);
Pass parse_pass(const std::string &name);

struct StudyItem {
	std::string item_id;
	std::vector<double> history;
	std::size_t horizon = 0;
	std::string explanation_text;
	std::vector<double> reference_forecast; // never served in part 1
	Label metric_label = Label::useful;
	std::optional<std::vector<double>> ground_truth;
};

/// Throws ItemBankEmpty / ConfigInvalid.
std::vector<StudyItem> parse_item_bank(const nlohmann::json &document);
std::vector<StudyItem> load_item_bank(const std::filesystem::path &path);
nlohmann::json item_bank_json(const std::vector<StudyItem> &items);

/// Items where the direct and synthetic votes agree, alternating labels until
/// `count` are chosen or a label runs out. `histories` maps "dataset|series" to
/// the history the ledger was computed on.
std::vector<StudyItem> build_item_bank(const std::vector<nlohmann::json> &ledger,
                                       const std::map<std::string, std::vector<double>> &histories, std::size_t count);

struct AnnotationRecord {
	std::string item_id;
	std::optional<std::vector<double>> without_pass;
	std::optional<std::vector<double>> with_pass;
	std::optional<Label> label;
};

struct StudySession {
	std::string session_id;
	std::string annotator_id;
	int part = 1;
	bool consent = false;
	std::vector<AnnotationRecord> responses; // bank order
	std::string started_at;
	std::optional<std::string> completed_at;

	bool completed() const noexcept { return completed_at.has_value(); }
};

/// Part-1 improvement target. The model forecast is what the metrics simulate.
enum class ImprovementTarget { model_forecast, ground_truth };

struct Part1Outcome {
	std::string session_id;
	std::string annotator_id;
	std::string item_id;
	Label metric_label = Label::useful;
	double smape_without = 0.0;
	double smape_with = 0.0;
	double improvement = 0.0;                   // smape_without - smape_with
	std::optional<double> relative_improvement; // improvement / smape_without
	bool improved = false;
};

struct Part2Outcome {
	std::string session_id;
	std::string annotator_id;
	std::string item_id;
	Label metric_label = Label::useful;
	Label human_label = Label::useful;
};

struct StudySummary {
	std::vector<Part1Outcome> part1;
	std::vector<Part2Outcome> part2;
	std::optional<double> mean_improvement_useful;
	std::optional<double> mean_improvement_not_useful;
	std::optional<double> mean_relative_improvement_useful;
	std::optional<double> mean_relative_improvement_not_useful;
	std::optional<double> part1_kappa; // pooled over every (session, item)
	std::map<std::string, double> part1_kappa_by_annotator;
	std::optional<double> part2_kappa;
	std::map<std::string, double> part2_kappa_by_annotator;
	std::size_t completed_part1 = 0;
	std::size_t completed_part2 = 0;
};

/// Pure function of the completed sessions. Throws NoCompletedSessions.
StudySummary study_summary(const std::vector<StudySession> &sessions, const std::vector<StudyItem> &items,
                           ImprovementTarget target = ImprovementTarget::model_forecast);
nlohmann::json summary_json(const StudySummary &summary);

struct StudyOptions {
	ImprovementTarget target = ImprovementTarget::model_forecast;
	/// Append-only event log; replayed on construction when it exists.
	std::optional<std::filesystem::path> event_log;
};

/// Session bookkeeping behind the HTTP API. Thread-safe.
class StudyService {
public:
	explicit StudyService(std::vector<StudyItem> items, StudyOptions options = {});

	/// Throws ConsentMissing, ItemBankEmpty, WrongPart (part not 1 or 2).
	StudySession create_session(const std::string &annotator_id, int part, bool consent);

	/// Next pending item and pass, or {"done": true}. Part-1 payloads carry
	/// the explanation only on the `with` pass and never the reference forecast.
	nlohmann::json next(const std::string &session_id) const;

	/// Throws UnknownSession, UnknownItem, WrongPart, WrongOrder, WrongLength,
	/// OutOfRange, DuplicateSubmission.
	void submit_part1(const std::string &session_id, const std::string &item_id, Pass pass,
	                  const std::vector<double> &values);
	void submit_part2(const std::string &session_id, const std::string &item_id, Label label);

	StudySession session(const std::string &session_id) const;
	std::vector<StudySession> sessions() const;
	StudySummary summary() const;
	const std::vector<StudyItem> &items() const noexcept { return items_; }

private:
	StudySession &find_session(const std::string &session_id);
	const StudySession &find_session(const std::string &session_id) const;
	std::size_t item_index(const std::string &item_id) const;
	void apply_part1(StudySession &s, std::size_t index, Pass pass, const std::vector<double> &values);
	void apply_part2(StudySession &s, std::size_t index, Label label);
	void mark_completion(StudySession &s);
	void log_event(const nlohmann::json &event);
	void replay(const std::filesystem::path &path);

	std::vector<StudyItem> items_;
	StudyOptions options_;
	mutable std::mutex mutex_;
	std::map<std::string, StudySession> sessions_;
	std::vector<std::string> session_order_;
	std::uint64_t counter_ = 0;
};

} // namespace tsnle::study
