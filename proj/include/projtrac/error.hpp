#pragma once
#include <stdexcept>
#include <string>

namespace projtrac {

enum class ErrorCode {
    DivisionByZeroConstantTerm,
    IncompatibleJets,
    NonPositiveConstantTerm,
    UnknownVariable,
    OrderExhausted,
    NoBoundaryVariable,
    EvaluationOutsideDomain,
    SingularMetric,
    ChartMismatch,
    NotRicciFlat,
    BoundaryNotDefined,
    ScaleNotDistinguished,
    GaugeMismatch,
    NotNull,
    SingularPairing,
    OnBoundary,
    NullInfinityAnchor,
    PoleDetected,
    VanishingN,
    NotAdaptedScale,
    AnchorInsideHorizon,
    RemovedPoint,
    ConfigParseError,
    UnknownModel,
    UnknownQuantity,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace projtrac
