#include "mgen/error.hpp"

namespace mgen {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ManifestMalformed: return "ManifestMalformed";
        case ErrorCode::SourceMissing: return "SourceMissing";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::AdapterSpawnFailure: return "AdapterSpawnFailure";
        case ErrorCode::AdapterInvalid: return "AdapterInvalid";
        case ErrorCode::ResultFileMissing: return "ResultFileMissing";
        case ErrorCode::ResultFileMalformed: return "ResultFileMalformed";
        case ErrorCode::CoverageUnsupported: return "CoverageUnsupported";
        case ErrorCode::ReportMalformed: return "ReportMalformed";
        case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
        case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::ReplayMiss: return "ReplayMiss";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::TranscriptMalformed: return "TranscriptMalformed";
        case ErrorCode::NoCodeBlock: return "NoCodeBlock";
        case ErrorCode::NoNewTests: return "NoNewTests";
        case ErrorCode::NotAnExtension: return "NotAnExtension";
        case ErrorCode::EmptyAfterExclusion: return "EmptyAfterExclusion";
        case ErrorCode::NotCertified: return "NotCertified";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::StaleMutant: return "StaleMutant";
    }
    return "Unknown";
}

}  // namespace mgen
