#include "tsnle/llm_gateway.hpp"

#include "tsnle/error.hpp"
#include "tsnle/http_util.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace tsnle::llm {

using json = nlohmann::json;

void validate(const GenerationParams &params) {
	if (!(params.temperature >= 0.0)) {
		throw Error(Errc::InvalidRange, "temperature must be >= 0");
	}
	if (!(params.top_p > 0.0 && params.top_p <= 1.0)) {
		throw Error(Errc::InvalidRange, "top_p must be in (0, 1]");
	}
	if (!(params.repetition_penalty >= 1.0)) {
		throw Error(Errc::InvalidRange, "repetition_penalty must be >= 1");
	}
	if (params.max_tokens <= 0) {
		throw Error(Errc::InvalidRange, "max_tokens must be positive");
	}
}

ChatRequest split_prompt(const std::string &prompt, const GenerationParams &params, const std::string &endpoint_id) {
	const auto split = prompt.find("\n\n");
	if (split == std::string::npos || split == 0 || split + 2 >= prompt.size()) {
		throw Error(Errc::PreconditionFailed, "prompt has no instruction/body split");
	}
	return ChatRequest{prompt.substr(0, split), prompt.substr(split + 2), params, endpoint_id};
}

// --- scripted backend -------------------------------------------------------

void ScriptedBackend::add(const std::string &pattern, const std::string &response) {
	add(pattern, [response](const ChatRequest &) { return response; });
}

void ScriptedBackend::add(const std::string &pattern, Responder responder) {
	if (pattern.empty()) {
		throw Error(Errc::InvalidSpec, "empty script pattern");
	}
	for (const auto &[existing, _] : rules_) {
		if (existing.find(pattern) != std::string::npos || pattern.find(existing) != std::string::npos) {
			throw Error(Errc::InvalidSpec, "script patterns overlap: '" + existing + "' and '" + pattern + "'");
		}
	}
	rules_.emplace_back(pattern, std::move(responder));
}

Completion ScriptedBackend::complete(const ChatRequest &request) {
	const std::string prompt = request.prompt();
	const Responder *match = nullptr;
	for (const auto &[pattern, responder] : rules_) {
		if (prompt.find(pattern) != std::string::npos) {
			if (match) {
				throw Error(Errc::ScriptMiss, "request matches more than one script pattern");
			}
			match = &responder;
		}
	}
	if (!match) {
		throw Error(Errc::ScriptMiss, "no script pattern matches the request");
	}
	Completion completion;
	completion.text = (*match)(request);
	completion.prompt_tokens = static_cast<std::int64_t>(prompt.size() / 4);
	completion.completion_tokens = static_cast<std::int64_t>(completion.text.size() / 4);
	return completion;
}

// --- OpenAI-compatible backend ---------------------------------------------

OpenAiBackend::OpenAiBackend(std::string base_url, std::string model, std::string api_key_env,
                             std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), model_(std::move(model)), api_key_env_(std::move(api_key_env)),
      timeout_(timeout) {
	http::parse_url(base_url_);
}

Completion OpenAiBackend::complete(const ChatRequest &request) {
	const auto url = http::parse_url(base_url_);
	auto client = http::make_client(url, timeout_);

	httplib::Headers headers;
	if (!api_key_env_.empty()) {
		const char *key = std::getenv(api_key_env_.c_str());
		if (!key || !*key) {
			throw Error(Errc::ConfigInvalid, "environment variable " + api_key_env_ + " is not set");
		}
		headers.emplace("Authorization", std::string("Bearer ") + key);
	}

	json body = {
	    {"model", model_},
	    {"messages", json::array({{{"role", "system"}, {"content", request.system}},
	                              {{"role", "user"}, {"content", request.user}}})},
	    {"temperature", request.params.temperature},
	    {"top_p", request.params.top_p},
	    {"max_tokens", request.params.max_tokens},
	};
	if (request.params.repetition_penalty != 1.0) {
		body["repetition_penalty"] = request.params.repetition_penalty;
	}
	if (request.params.seed) {
		body["seed"] = *request.params.seed;
	}

	const auto result = client->Post(url.path + "/chat/completions", headers, body.dump(), "application/json");
	if (!result) {
		throw Error(Errc::TransportError, "request to " + base_url_ + " failed: " + httplib::to_string(result.error()));
	}
	if (result->status == 429) {
		throw Error(Errc::RateLimited, "endpoint " + base_url_ + " returned HTTP 429");
	}
	if (result->status >= 500) {
		throw Error(Errc::TransportError, "endpoint " + base_url_ + " returned HTTP " + std::to_string(result->status));
	}
	if (result->status != 200) {
		throw Error(Errc::MalformedResponse,
		            "endpoint " + base_url_ + " returned HTTP " + std::to_string(result->status) + ": " + result->body);
	}

	const auto reply = json::parse(result->body, nullptr, false);
	if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
		throw Error(Errc::MalformedResponse, "completion response has no choices");
	}
	const auto &message = reply["choices"][0]["message"];
	Completion completion;
	if (message.contains("content") && message["content"].is_string()) {
		completion.text = message["content"].get<std::string>();
	}
	if (reply.contains("usage")) {
		completion.prompt_tokens = reply["usage"].value("prompt_tokens", std::int64_t{0});
		completion.completion_tokens = reply["usage"].value("completion_tokens", std::int64_t{0});
	}
	return completion;
}

// --- clocks and rate limiting ------------------------------------------------

Clock::time_point SteadyClock::now() {
	return std::chrono::steady_clock::now();
}

void SteadyClock::sleep_for(std::chrono::nanoseconds duration) {
	std::this_thread::sleep_for(duration);
}

Clock::time_point ManualClock::now() {
	std::lock_guard<std::mutex> lock(mutex_);
	return now_;
}

void ManualClock::sleep_for(std::chrono::nanoseconds duration) {
	advance(duration);
}

void ManualClock::advance(std::chrono::nanoseconds duration) {
	std::lock_guard<std::mutex> lock(mutex_);
	now_ += duration;
}

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
    : limit_(requests_per_minute), clock_(std::move(clock)) {
	if (limit_ <= 0) {
		throw Error(Errc::InvalidRange, "requests_per_minute must be positive");
	}
}

Clock::time_point RateLimiter::acquire() {
	constexpr auto window = std::chrono::seconds(60);
	std::unique_lock<std::mutex> lock(mutex_);
	for (;;) {
		const auto now = clock_->now();
		while (!grants_.empty() && grants_.front() + window <= now) {
			grants_.pop_front();
		}
		if (static_cast<int>(grants_.size()) < limit_) {
			grants_.push_back(now);
			return now;
		}
		const auto wait = grants_.front() + window - now;
		lock.unlock();
		clock_->sleep_for(wait);
		lock.lock();
	}
}

// --- cache --------------------------------------------------------------------

namespace {

std::string sha256_hex(const std::string &data) {
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int length = 0;
	EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
	std::string hex;
	hex.reserve(length * 2);
	for (unsigned int i = 0; i < length; ++i) {
		hex += fmt::format("{:02x}", digest[i]);
	}
	return hex;
}

std::string utc_timestamp() {
	const std::time_t now = std::time(nullptr);
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

constexpr const char *cache_magic = "tsnle-cache 1";

} // namespace

ResponseCache::ResponseCache(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {
	if (directory_) {
		std::filesystem::create_directories(*directory_);
	}
}

std::string ResponseCache::key(const ChatRequest &request) {
	const json material = {request.endpoint_id,
	                       request.system,
	                       request.user,
	                       request.params.temperature,
	                       request.params.top_p,
	                       request.params.repetition_penalty,
	                       request.params.max_tokens,
	                       request.params.seed ? json(*request.params.seed) : json(nullptr)};
	return sha256_hex(material.dump());
}

std::optional<std::string> ResponseCache::get(const std::string &key) {
	{
		std::shared_lock<std::shared_mutex> lock(mutex_);
		if (auto it = entries_.find(key); it != entries_.end()) {
			return it->second;
		}
	}
	if (!directory_) {
		return std::nullopt;
	}
	std::ifstream in(*directory_ / (key + ".txt"), std::ios::binary);
	if (!in) {
		return std::nullopt;
	}
	std::string line;
	if (!std::getline(in, line) || line != cache_magic) {
		return std::nullopt;
	}
	while (std::getline(in, line) && !line.empty()) {
	}
	std::ostringstream rest;
	rest << in.rdbuf();
	std::string text = rest.str();

	std::unique_lock<std::shared_mutex> lock(mutex_);
	entries_.emplace(key, text);
	return text;
}

void ResponseCache::put(const std::string &key, const Completion &completion) {
	std::unique_lock<std::shared_mutex> lock(mutex_);
	entries_[key] = completion.text;
	if (!directory_) {
		return;
	}
	const auto final_path = *directory_ / (key + ".txt");
	const auto tmp_path = *directory_ / (key + ".tmp");
	{
		std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
		out << cache_magic << '\n'
		    << "timestamp: " << utc_timestamp() << '\n'
		    << "prompt_tokens: " << completion.prompt_tokens << '\n'
		    << "completion_tokens: " << completion.completion_tokens << "\n\n"
		    << completion.text;
		if (!out) {
			throw Error(Errc::IoError, "cannot write cache entry " + tmp_path.string());
		}
	}
	std::filesystem::rename(tmp_path, final_path);
}

// --- endpoint configuration --------------------------------------------------

EndpointConfig parse_endpoint_config(const json &object) {
	if (!object.is_object() || !object.contains("id") || !object["id"].is_string()) {
		throw Error(Errc::ConfigInvalid, "endpoint entry needs a string 'id'");
	}
	EndpointConfig config;
	config.id = object["id"].get<std::string>();
	config.kind = object.value("kind", std::string("openai"));
	config.base_url = object.value("base_url", std::string());
	config.model = object.value("model", std::string());
	config.api_key_env = object.value("api_key_env", std::string());
	config.requests_per_minute = object.value("requests_per_minute", 0);
	config.max_retries = object.value("max_retries", 3);
	config.base_backoff = std::chrono::milliseconds(object.value("base_backoff_ms", 500));
	const std::string family = object.value("family", std::string("closed"));
	config.params = family == "open" ? GenerationParams::open_model() : GenerationParams::closed_model();
	if (object.contains("params")) {
		const auto &p = object["params"];
		config.params.temperature = p.value("temperature", config.params.temperature);
		config.params.top_p = p.value("top_p", config.params.top_p);
		config.params.repetition_penalty = p.value("repetition_penalty", config.params.repetition_penalty);
		config.params.max_tokens = p.value("max_tokens", config.params.max_tokens);
	}
	if (object.contains("api_key")) {
		throw Error(Errc::ConfigInvalid, "endpoint '" + config.id + "': API keys belong in environment variables");
	}
	if (config.kind == "openai" && (config.base_url.empty() || config.model.empty())) {
		throw Error(Errc::ConfigInvalid, "endpoint '" + config.id + "' needs base_url and model");
	}
	if (config.kind != "openai" && config.kind != "scripted") {
		throw Error(Errc::ConfigInvalid, "endpoint '" + config.id + "' has unknown kind '" + config.kind + "'");
	}
	validate(config.params);
	return config;
}

// --- gateway -------------------------------------------------------------------

struct Gateway::Endpoint {
	EndpointConfig config;
	std::shared_ptr<Backend> backend;
	std::unique_ptr<RateLimiter> limiter;
	mutable std::mutex usage_mutex;
	EndpointUsage usage;
};

Gateway::Gateway(GatewayOptions options)
    : clock_(options.clock ? options.clock : std::make_shared<SteadyClock>()), cache_(options.cache_dir) {
}

Gateway::~Gateway() = default;

void Gateway::register_endpoint(const EndpointConfig &config, std::shared_ptr<Backend> backend) {
	if (!backend) {
		throw Error(Errc::InvalidSpec, "endpoint '" + config.id + "' has no backend");
	}
	validate(config.params);
	auto entry = std::make_unique<Endpoint>();
	entry->config = config;
	entry->backend = std::move(backend);
	if (config.requests_per_minute > 0) {
		entry->limiter = std::make_unique<RateLimiter>(config.requests_per_minute, clock_);
	}
	std::lock_guard<std::mutex> lock(registry_mutex_);
	endpoints_[config.id] = std::move(entry);
}

std::string Gateway::register_scripted_backend(const std::vector<std::pair<std::string, std::string>> &script) {
	auto backend = std::make_shared<ScriptedBackend>();
	for (const auto &[pattern, response] : script) {
		backend->add(pattern, response);
	}
	return register_scripted_backend(std::move(backend));
}

std::string Gateway::register_scripted_backend(std::shared_ptr<ScriptedBackend> backend) {
	std::string id;
	{
		std::lock_guard<std::mutex> lock(registry_mutex_);
		id = "scripted-" + std::to_string(++scripted_counter_);
	}
	EndpointConfig config;
	config.id = id;
	config.kind = "scripted";
	register_endpoint(config, std::move(backend));
	return id;
}

bool Gateway::has_endpoint(const std::string &endpoint_id) const {
	std::lock_guard<std::mutex> lock(registry_mutex_);
	return endpoints_.count(endpoint_id) > 0;
}

Gateway::Endpoint &Gateway::endpoint(const std::string &endpoint_id) const {
	std::lock_guard<std::mutex> lock(registry_mutex_);
	const auto it = endpoints_.find(endpoint_id);
	if (it == endpoints_.end()) {
		throw Error(Errc::EndpointUnknown, "no endpoint registered as '" + endpoint_id + "'");
	}
	return *it->second;
}

GenerationParams Gateway::default_params(const std::string &endpoint_id) const {
	return endpoint(endpoint_id).config.params;
}

std::string Gateway::complete(const ChatRequest &request) {
	Endpoint &ep = endpoint(request.endpoint_id);
	if (request.system.empty() || request.user.empty()) {
		throw Error(Errc::PreconditionFailed, "chat request needs both system and user text");
	}
	validate(request.params);

	const std::string key = ResponseCache::key(request);
	{
		std::lock_guard<std::mutex> lock(ep.usage_mutex);
		++ep.usage.requests;
	}
	if (auto cached = cache_.get(key)) {
		std::lock_guard<std::mutex> lock(ep.usage_mutex);
		++ep.usage.cache_hits;
		return *cached;
	}

	for (int attempt = 0;; ++attempt) {
		if (ep.limiter) {
			ep.limiter->acquire();
		}
		try {
			{
				std::lock_guard<std::mutex> lock(ep.usage_mutex);
				++ep.usage.backend_calls;
			}
			Completion completion = ep.backend->complete(request);
			if (completion.text.find_first_not_of(" \t\r\n") == std::string::npos) {
				throw Error(Errc::EmptyCompletion, "endpoint '" + request.endpoint_id + "' returned an empty completion");
			}
			{
				std::lock_guard<std::mutex> lock(ep.usage_mutex);
				ep.usage.prompt_tokens += completion.prompt_tokens;
				ep.usage.completion_tokens += completion.completion_tokens;
			}
			cache_.put(key, completion);
			return completion.text;
		} catch (const Error &e) {
			const bool retriable = e.code() == Errc::TransportError || e.code() == Errc::RateLimited;
			if (!retriable || attempt >= ep.config.max_retries) {
				throw;
			}
			{
				std::lock_guard<std::mutex> lock(ep.usage_mutex);
				++ep.usage.retries;
			}
			clock_->sleep_for(ep.config.base_backoff * (1 << attempt));
		}
	}
}

EndpointUsage Gateway::usage(const std::string &endpoint_id) const {
	Endpoint &ep = endpoint(endpoint_id);
	std::lock_guard<std::mutex> lock(ep.usage_mutex);
	return ep.usage;
}

std::map<std::string, EndpointUsage> Gateway::usage() const {
	std::vector<std::string> ids;
	{
		std::lock_guard<std::mutex> lock(registry_mutex_);
		for (const auto &[id, _] : endpoints_) {
			ids.push_back(id);
		}
	}
	std::map<std::string, EndpointUsage> out;
	for (const auto &id : ids) {
		out[id] = usage(id);
	}
	return out;
}

} // namespace tsnle::llm
