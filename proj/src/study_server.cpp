#include "tsnle/study_server.hpp"

#include "tsnle/error.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace tsnle::study {

using nlohmann::json;

int http_status(Errc code) noexcept {
	switch (code) {
	case Errc::UnknownSession:
	case Errc::UnknownItem: return 404;
	case Errc::ConsentMissing: return 403;
	case Errc::WrongOrder:
	case Errc::DuplicateSubmission:
	case Errc::NoCompletedSessions: return 409;
	case Errc::WrongPart:
	case Errc::WrongLength:
	case Errc::OutOfRange:
	case Errc::ItemBankEmpty: return 400;
	default: return 500;
	}
}

namespace {

void reply(httplib::Response &res, int status, const json &body) {
	res.status = status;
	res.set_content(body.dump(), "application/json");
}

template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
	return [handler](const httplib::Request &req, httplib::Response &res) {
		try {
			handler(req, res);
		} catch (const Error &e) {
			reply(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
		} catch (const json::exception &e) {
			reply(res, 400, {{"error", "BadRequest"}, {"message", e.what()}});
		} catch (const std::exception &e) {
			spdlog::error("study server: {}", e.what());
			reply(res, 500, {{"error", "Internal"}, {"message", "internal error"}});
		}
	};
}

json body_of(const httplib::Request &req) {
	json body = json::parse(req.body);
	if (!body.is_object()) {
		throw json::type_error::create(302, "request body must be a JSON object", nullptr);
	}
	return body;
}

} // namespace

StudyServer::StudyServer(StudyService &service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
	install_routes();
	if (static_dir && !server_->set_mount_point("/", static_dir->string())) {
		throw Error(Errc::IoError, "cannot serve static files from " + static_dir->string());
	}
}

StudyServer::~StudyServer() {
	stop();
}

void StudyServer::install_routes() {
	server_->Post("/sessions", guarded([this](const httplib::Request &req, httplib::Response &res) {
		const auto body = body_of(req);
		const auto s = service_.create_session(body.at("annotator_id").get<std::string>(), body.at("part").get<int>(),
		                                       body.value("consent", false));
		reply(res, 201, {{"session_id", s.session_id}, {"part", s.part}, {"pending", s.responses.size()}});
	}));
	server_->Get("/sessions/:id/next", guarded([this](const httplib::Request &req, httplib::Response &res) {
		reply(res, 200, service_.next(req.path_params.at("id")));
	}));
	server_->Post("/sessions/:id/items/:item/forecast",
	              guarded([this](const httplib::Request &req, httplib::Response &res) {
		              const auto body = body_of(req);
		              service_.submit_part1(req.path_params.at("id"), req.path_params.at("item"),
		                                    parse_pass(body.at("pass").get<std::string>()),
		                                    body.at("values").get<std::vector<double>>());
		              reply(res, 200, {{"ok", true}});
	              }));
	server_->Post("/sessions/:id/items/:item/label", guarded([this](const httplib::Request &req, httplib::Response &res) {
		const auto body = body_of(req);
		service_.submit_part2(req.path_params.at("id"), req.path_params.at("item"),
		                      parse_label(body.at("label").get<std::string>()));
		reply(res, 200, {{"ok", true}});
	}));
	server_->Get("/summary", guarded([this](const httplib::Request &, httplib::Response &res) {
		reply(res, 200, summary_json(service_.summary()));
	}));
}

bool StudyServer::listen(const std::string &host, int port) {
	return server_->listen(host, port);
}

int StudyServer::bind_to_any_port(const std::string &host) {
	return server_->bind_to_any_port(host);
}

bool StudyServer::listen_after_bind() {
	return server_->listen_after_bind();
}

void StudyServer::wait_until_ready() const {
	server_->wait_until_ready();
}

void StudyServer::stop() {
	if (server_) {
		server_->stop();
	}
}

} // namespace tsnle::study
