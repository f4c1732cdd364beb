#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsnle {

enum class Errc {
	// core-timeseries
	EmptySeries,
	NonFinite,
	InvalidRange,
	InsufficientNumbers,
	// metrics
	LengthMismatch,
	EmptyInput,
	ZeroReference,
	BothZero,
	// forecasters
	InvalidSpec,
	HistoryTooShort,
	ExternalUnavailable,
	MalformedResponse,
	NonFiniteOutput,
	// llm-gateway
	EndpointUnknown,
	RateLimited,
	TransportError,
	EmptyCompletion,
	ScriptMiss,
	// explainer / surrogate
	PreconditionFailed,
	ChainAborted,
	ParseFailed,
	// simulatability
	NoGeneratorTag,
	EmptyCode,
	CodegenFailed,
	ExecutorFailed,
	NonFiniteSeries,
	// datasets
	MalformedHeader,
	MalformedRow,
	MissingValues,
	EmptyFile,
	NoSeriesLeft,
	// harness
	ConfigInvalid,
	EmptyLedger,
	// study
	ConsentMissing,
	ItemBankEmpty,
	UnknownSession,
	UnknownItem,
	WrongPart,
	WrongOrder,
	WrongLength,
	OutOfRange,
	DuplicateSubmission,
	NoCompletedSessions,
	// generic
	IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure in the library is reported as an Error carrying a code the
/// caller can branch on; the message is for humans.
class Error : public std::runtime_error {
public:
	Error(Errc code, const std::string &message);

	Errc code() const noexcept { return code_; }

private:
	Errc code_;
};

} // namespace tsnle
