#include "tcsim/errors.hpp"

namespace tcsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::DuplicateBlock: return "DuplicateBlock";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::AlreadyRead: return "AlreadyRead";
    case ErrorCode::AlreadyCompleted: return "AlreadyCompleted";
    case ErrorCode::NotBegun: return "NotBegun";
    case ErrorCode::IncompleteRound: return "IncompleteRound";
    case ErrorCode::UnresolvedAncestry: return "UnresolvedAncestry";
    case ErrorCode::MissingTwin: return "MissingTwin";
    case ErrorCode::NotAClosureTrace: return "NotAClosureTrace";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::UnpairedTraces: return "UnpairedTraces";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::UnknownRound: return "UnknownRound";
    }
    return "Unknown";
}

} // namespace tcsim
