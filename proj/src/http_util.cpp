#include "tsnle/http_util.hpp"

#include "tsnle/error.hpp"

#include <httplib.h>

#include <charconv>

namespace tsnle::http {

Url parse_url(const std::string &url) {
	Url out;
	const auto scheme_end = url.find("://");
	if (scheme_end == std::string::npos) {
		throw Error(Errc::InvalidSpec, "URL without scheme: '" + url + "'");
	}
	out.scheme = url.substr(0, scheme_end);
	if (out.scheme != "http" && out.scheme != "https") {
		throw Error(Errc::InvalidSpec, "unsupported URL scheme '" + out.scheme + "'");
	}
	const auto authority_begin = scheme_end + 3;
	const auto path_begin = url.find('/', authority_begin);
	const std::string authority =
	    url.substr(authority_begin, path_begin == std::string::npos ? std::string::npos : path_begin - authority_begin);
	out.path = path_begin == std::string::npos ? "" : url.substr(path_begin);
	while (!out.path.empty() && out.path.back() == '/') {
		out.path.pop_back();
	}

	const auto colon = authority.rfind(':');
	if (colon != std::string::npos && authority.find(']') == std::string::npos) {
		out.host = authority.substr(0, colon);
		const auto port_text = authority.substr(colon + 1);
		const auto parsed = std::from_chars(port_text.data(), port_text.data() + port_text.size(), out.port);
		if (parsed.ec != std::errc() || parsed.ptr != port_text.data() + port_text.size() || out.port <= 0 ||
		    out.port > 65535) {
			throw Error(Errc::InvalidSpec, "bad port in URL '" + url + "'");
		}
	} else {
		out.host = authority;
		out.port = out.scheme == "https" ? 443 : 80;
	}
	if (out.host.empty()) {
		throw Error(Errc::InvalidSpec, "URL without host: '" + url + "'");
	}
	return out;
}

std::unique_ptr<httplib::Client> make_client(const Url &url, std::chrono::milliseconds timeout) {
	auto client = std::make_unique<httplib::Client>(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
	const auto seconds = static_cast<time_t>(timeout.count() / 1000);
	const auto micros = static_cast<time_t>((timeout.count() % 1000) * 1000);
	client->set_connection_timeout(seconds, micros);
	client->set_read_timeout(seconds, micros);
	client->set_write_timeout(seconds, micros);
	return client;
}

} // namespace tsnle::http
