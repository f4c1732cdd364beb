#include "tsnle/executor.hpp"

#include "tsnle/error.hpp"
#include "tsnle/timeseries.hpp"
#include "json_lenient.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <semaphore>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace tsnle {

namespace {

class Fd {
public:
	Fd() = default;
	explicit Fd(int fd) : fd_(fd) {}
	Fd(const Fd &) = delete;
	Fd &operator=(const Fd &) = delete;
	Fd(Fd &&other) noexcept : fd_(other.release()) {}
	Fd &operator=(Fd &&other) noexcept {
		reset(other.release());
		return *this;
	}
	~Fd() { reset(); }

	int get() const noexcept { return fd_; }
	int release() noexcept { return std::exchange(fd_, -1); }
	void reset(int fd = -1) noexcept {
		if (fd_ >= 0) {
			::close(fd_);
		}
		fd_ = fd;
	}

private:
	int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
	int fds[2];
	if (::pipe2(fds, O_CLOEXEC) != 0) {
		throw Error(Errc::ExecutorFailed, std::string("pipe2 failed: ") + std::strerror(errno));
	}
	return {Fd(fds[0]), Fd(fds[1])};
}

class SpawnActions {
public:
	SpawnActions() { posix_spawn_file_actions_init(&actions_); }
	~SpawnActions() { posix_spawn_file_actions_destroy(&actions_); }
	posix_spawn_file_actions_t *get() { return &actions_; }

private:
	posix_spawn_file_actions_t actions_;
};

class SpawnAttr {
public:
	SpawnAttr() { posix_spawnattr_init(&attr_); }
	~SpawnAttr() { posix_spawnattr_destroy(&attr_); }
	posix_spawnattr_t *get() { return &attr_; }

private:
	posix_spawnattr_t attr_;
};

} // namespace

ProcessOutput run_process(const std::vector<std::string> &command, const std::string &input,
                          std::chrono::milliseconds deadline) {
	if (command.empty()) {
		throw Error(Errc::ExecutorFailed, "empty executor command");
	}
	// A child that exits without reading its input must not take us down with SIGPIPE.
	static std::once_flag ignore_sigpipe;
	std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

	auto [in_read, in_write] = make_pipe();
	auto [out_read, out_write] = make_pipe();
	auto [err_read, err_write] = make_pipe();

	SpawnActions actions;
	posix_spawn_file_actions_adddup2(actions.get(), in_read.get(), STDIN_FILENO);
	posix_spawn_file_actions_adddup2(actions.get(), out_write.get(), STDOUT_FILENO);
	posix_spawn_file_actions_adddup2(actions.get(), err_write.get(), STDERR_FILENO);
	SpawnAttr attr;
	posix_spawnattr_setflags(attr.get(), POSIX_SPAWN_SETPGROUP);
	posix_spawnattr_setpgroup(attr.get(), 0);

	std::vector<char *> argv;
	for (const auto &arg : command) {
		argv.push_back(const_cast<char *>(arg.c_str()));
	}
	argv.push_back(nullptr);

	pid_t pid = 0;
	const int rc = posix_spawnp(&pid, argv[0], actions.get(), attr.get(), argv.data(), environ);
	if (rc != 0) {
		throw Error(Errc::ExecutorFailed, "cannot start '" + command[0] + "': " + std::strerror(rc));
	}
	in_read.reset();
	out_write.reset();
	err_write.reset();
	::fcntl(in_write.get(), F_SETFL, O_NONBLOCK);

	ProcessOutput output;
	std::size_t written = 0;
	if (input.empty()) {
		in_write.reset();
	}
	const auto stop_at = std::chrono::steady_clock::now() + deadline;
	char buf[4096];

	while (out_read.get() >= 0 || err_read.get() >= 0) {
		const auto remaining =
		    std::chrono::duration_cast<std::chrono::milliseconds>(stop_at - std::chrono::steady_clock::now());
		if (remaining.count() <= 0) {
			output.timed_out = true;
			break;
		}
		pollfd fds[3];
		nfds_t count = 0;
		const auto add = [&](const Fd &fd, short events) {
			if (fd.get() >= 0) {
				fds[count++] = pollfd{fd.get(), events, 0};
			}
		};
		add(in_write, POLLOUT);
		add(out_read, POLLIN);
		add(err_read, POLLIN);
		const int ready = ::poll(fds, count, static_cast<int>(remaining.count()));
		if (ready < 0 && errno != EINTR) {
			break;
		}
		for (nfds_t i = 0; i < count; ++i) {
			if (fds[i].revents == 0) {
				continue;
			}
			if (fds[i].fd == in_write.get()) {
				const auto n = ::write(in_write.get(), input.data() + written, input.size() - written);
				if (n > 0) {
					written += static_cast<std::size_t>(n);
				}
				if (n < 0 && errno != EAGAIN) {
					in_write.reset();
				} else if (written == input.size()) {
					in_write.reset();
				}
				continue;
			}
			Fd &source = fds[i].fd == out_read.get() ? out_read : err_read;
			std::string &sink = &source == &out_read ? output.stdout_text : output.stderr_text;
			const auto n = ::read(source.get(), buf, sizeof(buf));
			if (n > 0) {
				sink.append(buf, static_cast<std::size_t>(n));
			} else if (n == 0 || errno != EAGAIN) {
				source.reset();
			}
		}
	}

	if (output.timed_out) {
		::kill(-pid, SIGKILL);
	}
	int status = 0;
	while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
	}
	output.exit_status = WIFEXITED(status) && !output.timed_out ? WEXITSTATUS(status) : -1;
	return output;
}

struct SubprocessExecutor::Slots {
	explicit Slots(int n) : semaphore(n) {}
	std::counting_semaphore<1024> semaphore;
};

SubprocessExecutor::SubprocessExecutor(std::vector<std::string> command, int slots, std::chrono::milliseconds grace)
    : command_(std::move(command)), grace_(grace) {
	if (command_.empty()) {
		throw Error(Errc::InvalidSpec, "executor command is empty");
	}
	if (slots < 1 || slots > 1024) {
		throw Error(Errc::InvalidSpec, "executor slots must be in [1, 1024]");
	}
	slots_ = std::make_unique<Slots>(slots);
}

SubprocessExecutor::~SubprocessExecutor() = default;

std::vector<double> SubprocessExecutor::execute(const std::string &code, std::size_t length, int timeout_s) {
	if (code.empty() || length == 0 || timeout_s <= 0) {
		throw Error(Errc::ExecutorFailed, "invalid execution request");
	}
	const nlohmann::json request = {{"code", code}, {"length", length}, {"timeout_s", timeout_s}};

	slots_->semaphore.acquire();
	ProcessOutput output;
	try {
		output = run_process(command_, request.dump(), std::chrono::seconds(timeout_s) + grace_);
	} catch (...) {
		slots_->semaphore.release();
		throw;
	}
	slots_->semaphore.release();

	if (output.timed_out) {
		throw Error(Errc::ExecutorFailed, "executor exceeded " + std::to_string(timeout_s) + "s");
	}
	if (output.exit_status != 0) {
		throw Error(Errc::ExecutorFailed,
		            "executor exited with status " + std::to_string(output.exit_status) + ": " + output.stderr_text);
	}
	const auto reply = detail::parse_json_lenient(output.stdout_text);
	if (reply.is_discarded() || !reply.is_object() || !reply.contains("ok") || !reply["ok"].is_boolean()) {
		throw Error(Errc::ExecutorFailed, "executor reply is not a protocol document");
	}
	if (!reply["ok"].get<bool>()) {
		throw Error(Errc::ExecutorFailed, "generator failed: " + reply.value("error", std::string("unknown error")));
	}
	if (!reply.contains("values") || !reply["values"].is_array()) {
		throw Error(Errc::ExecutorFailed, "executor reply has no values");
	}
	std::vector<double> values;
	for (const auto &v : reply["values"]) {
		if (v.is_null()) {
			values.push_back(std::nan(""));
		} else if (v.is_number()) {
			values.push_back(v.get<double>());
		} else {
			throw Error(Errc::ExecutorFailed, "non-numeric value in executor reply");
		}
	}
	if (values.size() != length) {
		throw Error(Errc::ExecutorFailed, "generator produced " + std::to_string(values.size()) + " values, expected " +
		                                      std::to_string(length));
	}
	if (!all_finite(values)) {
		throw Error(Errc::NonFiniteSeries, "generator produced non-finite values");
	}
	return values;
}

} // namespace tsnle
