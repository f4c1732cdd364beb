#pragma once

#include "tsnle/error.hpp"
#include "tsnle/study.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace tsnle::study {

/// HTTP+JSON front end of a StudyService:
///   POST /sessions                              {annotator_id, part, consent}
///   GET  /sessions/{id}/next
///   POST /sessions/{id}/items/{item}/forecast   {pass, values}
///   POST /sessions/{id}/items/{item}/label      {label}
///   GET  /summary
/// Errors come back as {"error": code, "message": text} with a 4xx status.
class StudyServer {
public:
	StudyServer(StudyService &service, std::optional<std::filesystem::path> static_dir = std::nullopt);
	~StudyServer();

	/// Blocks until stop().
	bool listen(const std::string &host, int port);
	/// Binds an ephemeral port and returns it; follow with listen_after_bind().
	int bind_to_any_port(const std::string &host);
	bool listen_after_bind();
	void wait_until_ready() const;
	void stop();

private:
	void install_routes();

	StudyService &service_;
	std::unique_ptr<httplib::Server> server_;
};

/// HTTP status for a service error code.
int http_status(Errc code) noexcept;

} // namespace tsnle::study
