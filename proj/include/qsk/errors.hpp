#pragma once

#include <stdexcept>
#include <string>

namespace qsk {

/// Base class for all library failures. `code()` is a short machine-readable
/// tag used by the CLI for its one-line failure reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error("convergence", w) {}
};
struct GridError : Error {
    explicit GridError(const std::string& w) : Error("grid", w) {}
};
struct StabilityError : Error {
    explicit StabilityError(const std::string& w) : Error("stability", w) {}
};
struct CompositionError : Error {
    explicit CompositionError(const std::string& w) : Error("composition", w) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error("validation", w) {}
};
struct SimulationError : Error {
    explicit SimulationError(const std::string& w) : Error("simulation", w) {}
};
struct StatsError : Error {
    explicit StatsError(const std::string& w) : Error("stats", w) {}
};
struct BoundsError : Error {
    explicit BoundsError(const std::string& w) : Error("bounds", w) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& w) : Error("infeasible", w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error("io", w) {}
};

} // namespace qsk
