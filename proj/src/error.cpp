#include "onn/error.hpp"

namespace onn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EdgeNotFound: return "EdgeNotFound";
    case ErrorCode::InfiniteDistance: return "InfiniteDistance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NoEligibleEdge: return "NoEligibleEdge";
    case ErrorCode::NonPositiveLoss: return "NonPositiveLoss";
    case ErrorCode::NoSurgeryEvents: return "NoSurgeryEvents";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::RetryExhausted: return "RetryExhausted";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::FileFormat: return "FileFormat";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

}  // namespace onn
