#include "projtrac/error.hpp"

namespace projtrac {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DivisionByZeroConstantTerm: return "DivisionByZeroConstantTerm";
        case ErrorCode::IncompatibleJets: return "IncompatibleJets";
        case ErrorCode::NonPositiveConstantTerm: return "NonPositiveConstantTerm";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::OrderExhausted: return "OrderExhausted";
        case ErrorCode::NoBoundaryVariable: return "NoBoundaryVariable";
        case ErrorCode::EvaluationOutsideDomain: return "EvaluationOutsideDomain";
        case ErrorCode::SingularMetric: return "SingularMetric";
        case ErrorCode::ChartMismatch: return "ChartMismatch";
        case ErrorCode::NotRicciFlat: return "NotRicciFlat";
        case ErrorCode::BoundaryNotDefined: return "BoundaryNotDefined";
        case ErrorCode::ScaleNotDistinguished: return "ScaleNotDistinguished";
        case ErrorCode::GaugeMismatch: return "GaugeMismatch";
        case ErrorCode::NotNull: return "NotNull";
        case ErrorCode::SingularPairing: return "SingularPairing";
        case ErrorCode::OnBoundary: return "OnBoundary";
        case ErrorCode::NullInfinityAnchor: return "NullInfinityAnchor";
        case ErrorCode::PoleDetected: return "PoleDetected";
        case ErrorCode::VanishingN: return "VanishingN";
        case ErrorCode::NotAdaptedScale: return "NotAdaptedScale";
        case ErrorCode::AnchorInsideHorizon: return "AnchorInsideHorizon";
        case ErrorCode::RemovedPoint: return "RemovedPoint";
        case ErrorCode::ConfigParseError: return "ConfigParseError";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::UnknownQuantity: return "UnknownQuantity";
    }
    return "Unknown";
}

}  // namespace projtrac
