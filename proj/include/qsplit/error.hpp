// Error type shared by every module. Each failure carries a code so the CLI
// can map it to an exit status and tests can assert on the kind.
#pragma once

#include <stdexcept>
#include <string>

namespace qsplit {

enum class ErrorCode {
    NotHermitian,
    NonSquare,
    NotPositive,
    ShapeMismatch,
    ObjectMismatch,
    CategoryMismatch,
    FunctorMismatch,
    NotIsomorphic,
    StructuralMismatch,
    LevelOutOfRange,
    NoSolution,
    NeverStable,
    AxiomFailure,
    NotSeparable,
    DimensionMismatch,
    NotAlgebra,
    AlgebraMismatch,
    NotUnital,
    BadBasis,
    NonCommutingSquare,
    MissingSimple,
    SquareSolveFailure,
    ParseError,
    ValidationError,
    ParameterOutOfRange,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ObjectMismatch: return "ObjectMismatch";
    case ErrorCode::CategoryMismatch: return "CategoryMismatch";
    case ErrorCode::FunctorMismatch: return "FunctorMismatch";
    case ErrorCode::NotIsomorphic: return "NotIsomorphic";
    case ErrorCode::StructuralMismatch: return "StructuralMismatch";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NeverStable: return "NeverStable";
    case ErrorCode::AxiomFailure: return "AxiomFailure";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAlgebra: return "NotAlgebra";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::NotUnital: return "NotUnital";
    case ErrorCode::BadBasis: return "BadBasis";
    case ErrorCode::NonCommutingSquare: return "NonCommutingSquare";
    case ErrorCode::MissingSimple: return "MissingSimple";
    case ErrorCode::SquareSolveFailure: return "SquareSolveFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    }
    return "Unknown";
}

}  // namespace qsplit
