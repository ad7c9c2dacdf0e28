#pragma once

#include <stdexcept>
#include <string>

namespace mpclo {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct AsymmetricInput : Error {
    explicit AsymmetricInput(const std::string& msg) : Error("asymmetric input: " + msg) {}
};

struct SingularGram : Error {
    explicit SingularGram(const std::string& msg) : Error("singular gram matrix: " + msg) {}
};

struct OrthogonalityViolation : Error {
    explicit OrthogonalityViolation(const std::string& msg) : Error("orthogonality violation: " + msg) {}
};

struct ParamDimensionMismatch : Error {
    explicit ParamDimensionMismatch(const std::string& msg) : Error("parameter dimension mismatch: " + msg) {}
};

struct NotSolvable : Error {
    std::string status;
    NotSolvable(const std::string& st, const std::string& msg) : Error("not solvable (" + st + "): " + msg), status(st) {}
};

struct InfeasibleWitness : Error {
    explicit InfeasibleWitness(const std::string& msg) : Error("infeasible witness: " + msg) {}
};

struct OutsideTheta : Error {
    explicit OutsideTheta(const std::string& msg) : Error("parameter outside theta: " + msg) {}
};

struct UndefinedMap : Error {
    explicit UndefinedMap(const std::string& msg) : Error("map undefined: " + msg) {}
};

struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(const std::string& msg) : Error("unsupported dimension: " + msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

}  // namespace mpclo
