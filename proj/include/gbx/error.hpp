// Error type shared by every layer of the engine.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbx {

enum class ErrorCode {
    DivisionByZero,
    UnknownCoordinate,
    PoleAtPoint,
    NegativeBaseFractionalPower,
    NonRationalValue,
    ChartViolation,
    ContextMismatch,
    WrongBidegree,
    NotAStructure,
    NotAMultivector,
    NotAForm,
    NotASection,
    NotHomogeneous,
    SingularWeight,
    Degenerate,
    NotInvertibleOnChart,
    SkewConditionFails,
    MissingTensor,
    SideConditionFails,
    TorsionNonzero,
    NotPoisson,
    NotOrthogonal,
    SquareMismatch,
    WrongDegree,
    NotABaseFunction,
    EffectivityRequired,
    NotClosed,
    PfaffianNotUnit,
    DegenerateForm,
    SyntaxError,
    TypeError,
    UnboundName,
    Unsupported,
};

std::string_view to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse errors carry a 1-based source position.
class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& msg)
        : Error(ErrorCode::SyntaxError,
                std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }

private:
    int line_, col_;
};

} // namespace gbx
