#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tsnle::llm {

struct GenerationParams {
	double temperature = 1.0;
	double top_p = 1.0;
	double repetition_penalty = 1.0;
	int max_tokens = 1024;
	std::optional<std::int64_t> seed;

	/// temperature 1.0, used for the closed-model surrogate.
	static GenerationParams closed_model() { return {}; }
	/// temperature 0.9, top_p 0.9, repetition penalty 1.1.
	static GenerationParams open_model() { return {0.9, 0.9, 1.1, 1024, std::nullopt}; }
};

/// Throws InvalidRange when a field is out of its domain.
void validate(const GenerationParams &params);

struct ChatRequest {
	std::string system;
	std::string user;
	GenerationParams params;
	std::string endpoint_id;

	/// The prompt exactly as rendered from its template.
	std::string prompt() const { return system + "\n\n" + user; }
};

/// Splits a single-block prompt at its first blank line into system + user.
ChatRequest split_prompt(const std::string &prompt, const GenerationParams &params, const std::string &endpoint_id);

struct Completion {
	std::string text;
	std::int64_t prompt_tokens = 0;
	std::int64_t completion_tokens = 0;
};

/// A transport to one model. Implementations throw TransportError or
/// RateLimited for retriable failures; anything else propagates unchanged.
class Backend {
public:
	virtual ~Backend() = default;
	virtual Completion complete(const ChatRequest &request) = 0;
};

/// Routes requests by substring pattern to canned text or a responder callback.
class ScriptedBackend : public Backend {
public:
	using Responder = std::function<std::string(const ChatRequest &)>;

	void add(const std::string &pattern, const std::string &response);
	void add(const std::string &pattern, Responder responder);

	Completion complete(const ChatRequest &request) override;

private:
	std::vector<std::pair<std::string, Responder>> rules_;
};

/// OpenAI-compatible /chat/completions over HTTP(S). The API key is read
/// from the environment variable named in `api_key_env` at request time.
class OpenAiBackend : public Backend {
public:
	OpenAiBackend(std::string base_url, std::string model, std::string api_key_env,
	              std::chrono::milliseconds timeout = std::chrono::seconds(120));

	Completion complete(const ChatRequest &request) override;

private:
	std::string base_url_;
	std::string model_;
	std::string api_key_env_;
	std::chrono::milliseconds timeout_;
};

class Clock {
public:
	using time_point = std::chrono::steady_clock::time_point;
	virtual ~Clock() = default;
	virtual time_point now() = 0;
	virtual void sleep_for(std::chrono::nanoseconds duration) = 0;
};

class SteadyClock : public Clock {
public:
	time_point now() override;
	void sleep_for(std::chrono::nanoseconds duration) override;
};

/// Simulated time: sleeping advances the clock instantly.
class ManualClock : public Clock {
public:
	time_point now() override;
	void sleep_for(std::chrono::nanoseconds duration) override;
	void advance(std::chrono::nanoseconds duration);

private:
	std::mutex mutex_;
	time_point now_{};
};

/// At most `requests_per_minute` acquisitions in any sliding 60 s window.
class RateLimiter {
public:
	RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);

	/// Blocks (through the clock) until a slot is free. Returns the grant time.
	Clock::time_point acquire();

private:
	int limit_;
	std::shared_ptr<Clock> clock_;
	std::mutex mutex_;
	std::deque<Clock::time_point> grants_;
};

/// Content-addressed completion cache; in memory, optionally mirrored to a
/// directory with one file per key.
class ResponseCache {
public:
	explicit ResponseCache(std::optional<std::filesystem::path> directory = std::nullopt);

	static std::string key(const ChatRequest &request);

	std::optional<std::string> get(const std::string &key);
	void put(const std::string &key, const Completion &completion);

private:
	std::optional<std::filesystem::path> directory_;
	std::shared_mutex mutex_;
	std::unordered_map<std::string, std::string> entries_;
};

struct EndpointConfig {
	std::string id;
	std::string kind = "openai"; // openai | scripted
	std::string base_url;
	std::string model;
	std::string api_key_env;
	int requests_per_minute = 0; // 0 = unlimited
	int max_retries = 3;
	std::chrono::milliseconds base_backoff{500};
	GenerationParams params;
};

/// Parses one endpoint object of the run configuration.
EndpointConfig parse_endpoint_config(const nlohmann::json &object);

struct EndpointUsage {
	std::int64_t requests = 0;
	std::int64_t backend_calls = 0;
	std::int64_t cache_hits = 0;
	std::int64_t retries = 0;
	std::int64_t prompt_tokens = 0;
	std::int64_t completion_tokens = 0;
};

struct GatewayOptions {
	std::optional<std::filesystem::path> cache_dir;
	std::shared_ptr<Clock> clock;
};

/// Uniform chat-completion front door: cache, retries with exponential
/// backoff, per-endpoint rate limiting and usage accounting.
class Gateway {
public:
	explicit Gateway(GatewayOptions options = {});
	~Gateway();

	void register_endpoint(const EndpointConfig &config, std::shared_ptr<Backend> backend);

	/// Registers a scripted backend under a fresh id and returns that id.
	/// Throws InvalidSpec when one pattern contains another.
	std::string register_scripted_backend(const std::vector<std::pair<std::string, std::string>> &script);
	std::string register_scripted_backend(std::shared_ptr<ScriptedBackend> backend);

	bool has_endpoint(const std::string &endpoint_id) const;
	GenerationParams default_params(const std::string &endpoint_id) const;

	std::string complete(const ChatRequest &request);

	EndpointUsage usage(const std::string &endpoint_id) const;
	std::map<std::string, EndpointUsage> usage() const;

private:
	struct Endpoint;
	Endpoint &endpoint(const std::string &endpoint_id) const;

	std::shared_ptr<Clock> clock_;
	ResponseCache cache_;
	mutable std::mutex registry_mutex_;
	std::map<std::string, std::unique_ptr<Endpoint>> endpoints_;
	int scripted_counter_ = 0;
};

} // namespace tsnle::llm
