#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rti/eigensolve.hpp"

namespace rti {

enum class ModeStatus {
    unstable,         // growing mode found, lambda > 0
    stable,           // no growing mode even without the rotation feedback
    no_growing_mode,  // unstable at s = 0 but rotation closes the window
    failed,           // solver failure at this point (sweeps keep going)
};

const char* to_string(ModeStatus status);

struct DispersionPoint {
    double xi_abs = 0.0;
    double s_star = 0.0;       // fixed point of s = 1/lambda^2(|xi|, s)
    double lambda = 0.0;       // growth rate; 0 unless unstable
    double lambda0 = 0.0;      // rotation-free rate; 0 when stable at s = 0
    double fp_residual = 0.0;  // |s_star lambda^2 - 1| from an independent re-solve
    double mu_residual = 0.0;  // eigen residual of that re-solve
    ModeStatus status = ModeStatus::stable;
};

// Rotation-free growth rate sqrt(-mu(0)); empty when mu(0) >= -1e-12.
std::optional<double> lambda_no_rotation(const EquilibriumProfile& profile, double xi_abs);

// F(s) = -s mu(s) - 1, whose root is the fixed point. F(0) = -1 exactly.
// Empty marks mu(s) >= 0: rotation has stabilized this s and every larger
// one, so a bracket search can stop.
std::optional<double> F_of_s(const EquilibriumProfile& profile, double xi_abs, double s);

// Geometric bracket expansion upward from 1/lambda0^2 (F < 0 below it, so
// the first sign change brackets the smallest root), then bisection.
DispersionPoint solve_fixed_point(const EquilibriumProfile& profile, double xi_abs);

struct DispersionCurve {
    std::vector<DispersionPoint> points;
    // least-squares fit of lambda^2 against |xi| over the unstable points in
    // the upper half of the sweep
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    int fit_count = 0;
};

// Independent solves over an ascending |xi| list; failures become status
// markers, never abort the sweep.
DispersionCurve dispersion_curve(const EquilibriumProfile& profile,
                                 const std::vector<double>& xi_list);

}  // namespace rti
