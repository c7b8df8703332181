#pragma once

#include <stdexcept>
#include <string>

namespace pexmap {

struct BoundViolation : std::runtime_error {
    explicit BoundViolation(const std::string& what) : std::runtime_error(what) {}
};

struct EpochNotFound : std::runtime_error {
    explicit EpochNotFound(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRange : std::runtime_error {
    explicit IndexOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct StepOverflow : std::runtime_error {
    explicit StepOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct OutsideDomain : std::runtime_error {
    explicit OutsideDomain(const std::string& what) : std::runtime_error(what) {}
};

struct BoundaryHit : std::runtime_error {
    explicit BoundaryHit(const std::string& what) : std::runtime_error(what) {}
};

struct CoverageFailure : std::runtime_error {
    explicit CoverageFailure(const std::string& what) : std::runtime_error(what) {}
};

struct DisjointnessFailure : std::runtime_error {
    explicit DisjointnessFailure(const std::string& what) : std::runtime_error(what) {}
};

struct WindowTooShort : std::runtime_error {
    explicit WindowTooShort(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    int iterations;
    NoConvergence(const std::string& what, int iters)
        : std::runtime_error(what + " (iterations=" + std::to_string(iters) + ")"), iterations(iters) {}
};

}  // namespace pexmap
