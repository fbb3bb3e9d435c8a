#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rti {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration failed validation. Collects every violation, not just the first.
struct ConfigRejected : Error {
    std::vector<std::string> issues;
    explicit ConfigRejected(std::vector<std::string> list)
        : Error(join(list)), issues(std::move(list)) {}
    explicit ConfigRejected(const std::string& one)
        : ConfigRejected(std::vector<std::string>{one}) {}

  private:
    static std::string join(const std::vector<std::string>& list) {
        std::string s = "config rejected:";
        for (const auto& e : list) s += "\n  - " + e;
        return s;
    }
};

// The hydrostatic profile left the pressure law's valid range before the wall.
struct DepthTooLarge : Error {
    double x3;  // where the density crossed the floor
    DepthTooLarge(const std::string& what, double where) : Error(what), x3(where) {}
};

// Iterative eigensolver ran out of iterations; carries the best iterate found.
struct ConvergenceFailure : Error {
    double best_mu;
    double residual;
    int iterations;
    ConvergenceFailure(const std::string& what, double mu, double res, int iters)
        : Error(what), best_mu(mu), residual(res), iterations(iters) {}
};

// Root bracketing for the fixed-point equation failed in an unexpected way.
struct BracketFailure : Error {
    using Error::Error;
};

struct ZeroVector : Error {
    using Error::Error;
};

// A mode was requested at a horizontal frequency that disagrees with the
// dispersion point it is built from.
struct FrameMismatch : Error {
    using Error::Error;
};

struct DerivativeOrderUnavailable : Error {
    using Error::Error;
};

// Field samples exactly on the interface need a side flag.
struct InterfaceSample : Error {
    using Error::Error;
};

struct SingularCoefficient : Error {
    using Error::Error;
};

struct InsufficientHistory : Error {
    using Error::Error;
};

struct BlowupDetected : Error {
    using Error::Error;
};

struct NonGrowingSeries : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line;
    ParseError(const std::string& what, int line_no) : Error(what), line(line_no) {}
};

// A frequency-band search hit its ceiling without meeting its target.
struct SearchExhausted : Error {
    double r_limit;
    SearchExhausted(const std::string& what, double limit) : Error(what), r_limit(limit) {}
};

}  // namespace rti
