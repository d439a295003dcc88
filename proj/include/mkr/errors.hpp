#pragma once

#include <stdexcept>
#include <string>

namespace mkr {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A kernel spec violates a construction invariant (bad alpha, s <= d, singular mix matrix, ...).
struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

/// Table-backed kernel evaluation requested outside the tabulated range.
struct TableMissing : Error {
    explicit TableMissing(const std::string& msg) : Error(msg) {}
};

/// A Green's-function table cannot meet the aliasing budget at the requested resolution.
struct ResolutionTooCoarse : Error {
    explicit ResolutionTooCoarse(const std::string& msg) : Error(msg) {}
};

struct ProbeRangeInvalid : Error {
    explicit ProbeRangeInvalid(const std::string& msg) : Error(msg) {}
};

struct TooManyCenters : Error {
    explicit TooManyCenters(const std::string& msg) : Error(msg) {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

struct InvalidConfig : Error {
    explicit InvalidConfig(const std::string& msg) : Error(msg) {}
};

struct RankDeficientSupport : Error {
    explicit RankDeficientSupport(const std::string& msg) : Error(msg) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

}  // namespace mkr
