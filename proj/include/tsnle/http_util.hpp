#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace httplib {
class Client;
}

namespace tsnle::http {

/// scheme://host[:port][/base/path]
struct Url {
	std::string scheme;
	std::string host;
	int port = 0;
	std::string path; // without trailing slash, may be empty
};

/// Throws InvalidSpec for anything that is not an http(s) URL.
Url parse_url(const std::string &url);

/// A client for `url` with connect/read timeouts set to `timeout`.
std::unique_ptr<httplib::Client> make_client(const Url &url, std::chrono::milliseconds timeout);

} // namespace tsnle::http
