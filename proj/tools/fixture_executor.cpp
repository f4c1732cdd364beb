// Reads one executor request from stdin and answers on stdout, evaluating
// the `# fixture: ...` directive in the code instead of running it.
// Extra directive: `crash` exits with status 3 without replying.

#include "tsnle/error.hpp"
#include "tsnle/hermetic.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <iostream>
#include <iterator>
#include <thread>

int main() {
	using nlohmann::json;
	std::string input((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
	json request;
	try {
		request = json::parse(input);
	} catch (const json::exception &e) {
		std::cout << json{{"ok", false}, {"error", std::string("bad request: ") + e.what()}}.dump() << '\n';
		return 0;
	}
	const auto code = request.value("code", std::string{});
	const auto length = request.value("length", std::size_t{0});
	const auto directive = tsnle::hermetic::fixture_directive(code);

	if (directive == "crash") {
		std::cerr << "fixture: crashing on request\n";
		return 3;
	}
	if (directive == "loop") {
		for (;;) {
			std::this_thread::sleep_for(std::chrono::hours(1));
		}
	}
	try {
		const auto values = tsnle::hermetic::run_fixture_code(code, length);
		std::cout << json{{"ok", true}, {"values", values}}.dump() << '\n';
	} catch (const tsnle::Error &e) {
		std::cout << json{{"ok", false}, {"error", e.what()}}.dump() << '\n';
	}
	return 0;
}
