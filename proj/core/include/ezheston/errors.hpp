#pragma once

#include <stdexcept>
#include <string>

namespace ezheston {

// Base for everything thrown by this library. `kind()` is a stable,
// machine-readable tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Bad config file: unknown key, missing key, unparsable value.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("ConfigError", msg) {}
};

// Parameter set rejected by validation.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("ValidationError", msg) {}
};

// Preferences outside the domain of the requested solver.
struct InvalidPreferences : Error {
    explicit InvalidPreferences(const std::string& msg) : Error("InvalidPreferences", msg) {}
};

// Quadratic for the slope coefficient has no real root.
struct NoRealRoot : Error {
    explicit NoRealRoot(const std::string& msg) : Error("NoRealRoot", msg) {}
};

// Real roots exist but none satisfies the sign rule.
struct NoAdmissibleRoot : Error {
    explicit NoAdmissibleRoot(const std::string& msg) : Error("NoAdmissibleRoot", msg) {}
};

// Damped fixed-point iteration failed to reach tolerance.
struct NonConvergence : Error {
    explicit NonConvergence(const std::string& msg) : Error("NonConvergence", msg) {}
};

// Discriminant of the time-dependent slope equation is negative.
struct ComplexA4 : Error {
    explicit ComplexA4(const std::string& msg) : Error("ComplexA4", msg) {}
};

// ODE integration produced a non-finite or blown-up state.
struct StepRejected : Error {
    explicit StepRejected(const std::string& msg) : Error("StepRejected", msg) {}
};

// Ensemble handed to a consumer built on a different grid/seed.
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& msg) : Error("GridMismatch", msg) {}
};

// Finite-difference solve lost positivity or blew up.
struct InstabilityDetected : Error {
    explicit InstabilityDetected(const std::string& msg) : Error("InstabilityDetected", msg) {}
};

// Function argument outside its mathematical domain.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("DomainError", msg) {}
};

} // namespace ezheston
