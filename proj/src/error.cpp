#include "tsnle/error.hpp"

namespace tsnle {

std::string_view to_string(Errc code) noexcept {
	switch (code) {
	case Errc::EmptySeries: return "EmptySeries";
	case Errc::NonFinite: return "NonFinite";
	case Errc::InvalidRange: return "InvalidRange";
	case Errc::InsufficientNumbers: return "InsufficientNumbers";
	case Errc::LengthMismatch: return "LengthMismatch";
	case Errc::EmptyInput: return "EmptyInput";
	case Errc::ZeroReference: return "ZeroReference";
	case Errc::BothZero: return "BothZero";
	case Errc::InvalidSpec: return "InvalidSpec";
	case Errc::HistoryTooShort: return "HistoryTooShort";
	case Errc::ExternalUnavailable: return "ExternalUnavailable";
	case Errc::MalformedResponse: return "MalformedResponse";
	case Errc::NonFiniteOutput: return "NonFiniteOutput";
	case Errc::EndpointUnknown: return "EndpointUnknown";
	case Errc::RateLimited: return "RateLimited";
	case Errc::TransportError: return "TransportError";
	case Errc::EmptyCompletion: return "EmptyCompletion";
	case Errc::ScriptMiss: return "ScriptMiss";
	case Errc::PreconditionFailed: return "PreconditionFailed";
	case Errc::ChainAborted: return "ChainAborted";
	case Errc::ParseFailed: return "ParseFailed";
	case Errc::NoGeneratorTag: return "NoGeneratorTag";
	case Errc::EmptyCode: return "EmptyCode";
	case Errc::CodegenFailed: return "CodegenFailed";
	case Errc::ExecutorFailed: return "ExecutorFailed";
	case Errc::NonFiniteSeries: return "NonFiniteSeries";
	case Errc::MalformedHeader: return "MalformedHeader";
	case Errc::MalformedRow: return "MalformedRow";
	case Errc::MissingValues: return "MissingValues";
	case Errc::EmptyFile: return "EmptyFile";
	case Errc::NoSeriesLeft: return "NoSeriesLeft";
	case Errc::ConfigInvalid: return "ConfigInvalid";
	case Errc::EmptyLedger: return "EmptyLedger";
	case Errc::ConsentMissing: return "ConsentMissing";
	case Errc::ItemBankEmpty: return "ItemBankEmpty";
	case Errc::UnknownSession: return "UnknownSession";
	case Errc::UnknownItem: return "UnknownItem";
	case Errc::WrongPart: return "WrongPart";
	case Errc::WrongOrder: return "WrongOrder";
	case Errc::WrongLength: return "WrongLength";
	case Errc::OutOfRange: return "OutOfRange";
	case Errc::DuplicateSubmission: return "DuplicateSubmission";
	case Errc::NoCompletedSessions: return "NoCompletedSessions";
	case Errc::IoError: return "IoError";
	}
	return "Unknown";
}

Error::Error(Errc code, const std::string &message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {
}

} // namespace tsnle
