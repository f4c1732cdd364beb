#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace tsnle {

/// Runs LLM-written `generate_series` code and returns the produced values.
/// Implementations throw ExecutorFailed (any execution failure) or
/// NonFiniteSeries (output contains NaN/inf).
class GeneratorExecutor {
public:
	virtual ~GeneratorExecutor() = default;
	virtual std::vector<double> execute(const std::string &code, std::size_t length, int timeout_s) = 0;
};

/// Speaks the executor protocol with a child process: one JSON request
/// {"code", "length", "timeout_s"} on stdin, one JSON reply
/// {"ok": true, "values": [...]} or {"ok": false, "error": "..."} on stdout.
/// A nonzero exit status or a reply later than timeout_s + grace is a failure.
/// At most `slots` children run at once.
class SubprocessExecutor : public GeneratorExecutor {
public:
	explicit SubprocessExecutor(std::vector<std::string> command, int slots = 1,
	                            std::chrono::milliseconds grace = std::chrono::seconds(2));
	~SubprocessExecutor() override;

	std::vector<double> execute(const std::string &code, std::size_t length, int timeout_s) override;

private:
	struct Slots;
	std::vector<std::string> command_;
	std::unique_ptr<Slots> slots_;
	std::chrono::milliseconds grace_;
};

/// Raw result of one child process run.
struct ProcessOutput {
	int exit_status = -1; // -1 when killed or terminated by a signal
	bool timed_out = false;
	std::string stdout_text;
	std::string stderr_text;
};

/// Spawns `command`, feeds `input` to stdin and collects output until exit or
/// `deadline` elapses (the process group is then killed).
ProcessOutput run_process(const std::vector<std::string> &command, const std::string &input,
                          std::chrono::milliseconds deadline);

} // namespace tsnle
