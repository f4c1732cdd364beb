#pragma once

#include "tsnle/executor.hpp"
#include "tsnle/llm_gateway.hpp"

#include <memory>
#include <string>
#include <vector>

/// Deterministic stand-ins for the LLM endpoints and the code sandbox, used
/// by `run --hermetic` and the test suites. Nothing here touches the network.
namespace tsnle::hermetic {

/// A scripted backend that answers every prompt the pipeline issues:
///  - explainer stages: fixed prose; the final stage quotes the forecast values;
///  - forecast tip: passes the quoted values through;
///  - tip-guided surrogate: returns the values quoted in the tip;
///  - plain surrogate: copies the last `horizon` encoded values (a window-naive continuation);
///  - constant surrogate: returns zeros;
///  - code generation: a numpy ramp consistent with the quoted forecast.
std::shared_ptr<llm::ScriptedBackend> make_scripted_backend();

/// Evaluates the `# fixture: ...` directive embedded in generator code:
///   ramp(start, step)  start + step * i for i in [0, length)
///   loop               never returns (simulated hang)
///   nan                a ramp with one NaN
///   short              one value fewer than requested
///   fail               reports an execution error
/// Throws ExecutorFailed for fail/loop/missing directives.
std::vector<double> run_fixture_code(const std::string &code, std::size_t length);

/// In-process executor interpreting fixture directives. Applies the same
/// length and finiteness checks as the subprocess protocol.
class FixtureExecutor : public GeneratorExecutor {
public:
	std::vector<double> execute(const std::string &code, std::size_t length, int timeout_s) override;
};

/// Fixture name of the directive in `code`, or empty when there is none.
std::string fixture_directive(const std::string &code);

} // namespace tsnle::hermetic
