#pragma once

#include <array>

#include "rti/modes.hpp"

namespace rti {

// Smooth radial bump amplitude·exp(-1/((r-r3)(r4-r))) on the open annulus
// (r3, r4), identically zero outside. Infinitely differentiable, so the
// synthesized fields inherit every derivative bound from the modes alone.
struct RadialAmplitude {
    double r3 = 0.0;
    double r4 = 0.0;
    double amplitude = 1.0;

    double operator()(double r) const;
    void validate() const;  // requires 0 < r3 < r4 and amplitude > 0
};

enum class FieldComponent { eta, v, q };

// A growing solution synthesized from one mode per radial quadrature node of
// the annulus. Each mode is stored in its reference frame and sign-aligned
// with its radial neighbor, so the family varies continuously in |xi| and
// pointwise evaluation does not suffer artificial cancellation.
struct SynthesisField {
    EquilibriumProfile profile;
    RadialAmplitude amplitude;
    int n_theta = 0;  // angular nodes for pointwise evaluation; always even
    int k_max = 0;    // highest Sobolev order the mode stacks honor

    std::vector<double> r_nodes, r_weights;  // Gauss-Legendre over (r3, r4)
    std::vector<NormalMode> modes;           // one per radial node
    double lambda_min = 0.0, lambda_max = 0.0;
};

// Solves one mode per radial node (workers in parallel when threads > 1; the
// result is identical for any thread count). Throws Error when some radial
// node has no growing mode. An odd n_theta is rounded up: pointwise
// evaluation needs the angular grid closed under xi -> -xi to return real
// fields by exact conjugate pairing.
SynthesisField build_field(const EquilibriumProfile& profile, const RadialAmplitude& amplitude,
                           int n_r = 64, int n_theta = 16, int k_max = 3, int threads = 1);

// Piecewise Sobolev norm of one synthesized component at time t:
//   sum_{j<=k} (1/4pi^2) int (1+|xi|^2)^{k-j} |f e^{lambda t}|^2
//                            ||d^j of the component profile||^2_{L2(I-) u L2(I+)} dxi,
// where the component profile is w_hat for eta, lambda w_hat for v, and
// -rho0 (xi1 phi + xi2 theta + psi') = -w/p'(rho0) for q. The integrand is
// independent of the angle of xi, so the xi-integral collapses to the radial
// quadrature times 2pi.
double hk_norm(const SynthesisField& field, FieldComponent which, int k, double t);

// Same norm with the angular integral done numerically against the rotated
// horizontal pair: a plumbing check of the frame equivariance, expected to
// agree with hk_norm to rounding.
double hk_norm_polar(const SynthesisField& field, FieldComponent which, int k, double t);

// 2pi int r (1+r^2)^exponent f(r)^2 dr, the frequency-weighted amplitude
// mass that controls every t = 0 norm.
double amplitude_weight_integral(const RadialAmplitude& amplitude, int exponent, int n_r = 256);

struct SandwichReport {
    bool lower_ok = false;
    bool upper_ok = false;
    double norm0 = 0.0;
    double norm_t = 0.0;
    double lower = 0.0;  // e^{t lambda_min} norm0
    double upper = 0.0;  // e^{t lambda_max} norm0
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double slack = 0.0;
};

// Checks e^{t lambda_min} ||.(0)|| <= ||.(t)|| <= e^{t lambda_max} ||.(0)||
// with the given relative slack. The extremes are taken over the solved
// radial nodes, so for the quadrature-defined norm the sandwich is an exact
// consequence of termwise growth.
SandwichReport growth_sandwich(const SynthesisField& field, FieldComponent which, int k, double t,
                               double slack = 1e-6);

struct FieldSample {
    std::array<double, 3> eta{};
    std::array<double, 3> v{};
    double q = 0.0;
    double imag_residue = 0.0;  // worst |imaginary part| relative to the sample scale
};

// Pointwise synthesis at time t and position x by polar quadrature. The
// angular grid pairs xi with -xi exactly, so the assembled values are real
// to rounding; the residue records how close. x3 = 0 needs a side flag.
FieldSample evaluate_field(const SynthesisField& field, double t, const std::array<double, 3>& x,
                           int side = 0);

struct IllposedEntry {
    int n = 0;
    double r_lower = 0.0;  // annulus (r_lower, r_lower + 1)
    int n_side = 0;        // elements per side used for this entry
    double amplitude = 0.0;
    double init_norm = 0.0;   // ||eta||_{H^j} + ||v||_{H^j} + ||q||_{H^j} at t = 0
    double grown_norm = 0.0;  // ||eta||_{H^k} at t = T0
    double lambda_min = 0.0;
    bool found = false;
};

struct IllposedOptions {
    double r_start = 8.0;
    double r_factor = 2.0;
    double r_limit = 1024.0;
    int n_r = 24;
    double elements_per_freq = 2.0;  // side resolution keeps pace with the annulus
    int threads = 1;
};

// Discontinuous-dependence sequence: for each n <= n_max, climbs a geometric
// ladder of annuli (R, R+1), rescaling the amplitude so the measured initial
// norm is exactly 1/n, until the measured ||eta(T0)||_{H^k} reaches alpha.
// Higher annuli oscillate on the scale 1/R vertically, so the grid is
// refined along the way; each entry records the resolution it used. Entries
// that top out are reported with found = false; if even n = 1 tops out the
// configuration cannot exhibit the growth at reachable frequencies and
// SearchExhausted is thrown instead.
std::vector<IllposedEntry> illposed_sequence(const EquilibriumProfile& profile, int j, int k,
                                             double alpha, double T0, int n_max,
                                             const IllposedOptions& opts = {});

}  // namespace rti
