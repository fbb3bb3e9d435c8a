#pragma once

#include <complex>

#include "rti/modes.hpp"

namespace rti {

using Cplx = std::complex<double>;

// Single-frequency snapshot of the linearized flow. Horizontal components
// and the density-reduced q live per element; the vertical components are
// nodal with the wall values pinned to zero. q_hat itself is rho0(x3) times
// q_rho on each element: keeping the density inside the stored dof makes the
// pressure-flux integrals of the momentum update exact for the quadrature
// the variational forms use, so a pencil eigenvector is an eigenvector of
// this generator too, not merely close to one.
struct SpectralState {
    std::array<double, 2> xi{};
    double time = 0.0;
    std::vector<Cplx> eta1, eta2, v1, v2;  // per element
    std::vector<Cplx> q_rho;               // per element; q_hat = rho0 * q_rho
    std::vector<Cplx> eta3, v3;            // per node, first/last always zero
};

// d/dt of the state under the linearized dynamics at the state's frequency:
//   eta' = v,
//   q'   = -rho0 (i xi1 v1 + i xi2 v2 + d3 v3),
//   rho0 v' = -grad_hat(p'(rho0) q) - g q e3 - g rho0 grad_hat(eta3)
//             + 2 rho0 omega (v2 e1 - v1 e2),
// with grad_hat = (i xi1, i xi2, d3). The vertical momentum row is tested
// against nodal hats (one mass solve), which enforces the pressure-flux
// interface condition weakly and the wall condition exactly.
SpectralState rhs(const SpectralState& state, const EquilibriumProfile& profile);

// Scalar history of one evolution. Norms are plain L2 over (-m, l); the
// energy columns hold the two sides of the quadratic energy identity
//   d/dt int rho0/2 |v_t|^2 + p'(rho0) rho0 / 2 |div v - g v3/p'(rho0)|^2
//     = d/dt g [rho0] / 2 |v3(0)|^2,
// evaluated with centered time differences, so their first and last entries
// are NaN.
struct EvolveSeries {
    std::vector<double> t;
    std::vector<double> norm_eta, norm_v, norm_q;
    std::vector<double> energy_lhs, energy_rhs;
    SpectralState final_state;
};

// Classical fourth-order stepping from state0 to time T in steps of dt.
// Throws Error when dt breaches the acoustic limit min h / max sqrt(p'),
// BlowupDetected when any norm passes 1e12 times its initial value.
EvolveSeries evolve(const SpectralState& state0, const EquilibriumProfile& profile, double dt,
                    double T);

struct GrowthFit {
    double lambda_hat = 0.0;
    double band = 0.0;  // one-sigma slope error from the fit residuals
    int n_used = 0;
};

// Log-linear least squares on norm_v over the second half of the series,
// past any transient. Throws Error on fewer than 20 usable samples,
// NonGrowingSeries when the slope is not positive.
GrowthFit growth_fit(const EvolveSeries& series);

// Max over interior samples of |(lhs - rhs)(t) - (lhs - rhs)(t_first)|
// normalized by (t - t_first) and the peak magnitude of the identity's two
// sides: the accumulated violation of the energy identity per unit time.
// Zero data reports zero. Throws InsufficientHistory below 5 samples.
double energy_identity_drift(const EvolveSeries& series);

// |[v3]| and |[p'(rho0) q]| at the interface. The first is structurally
// zero (one shared dof); the second measures how far the natural weak
// enforcement lets the flux drift.
std::array<double, 2> interface_jumps(const SpectralState& state,
                                      const EquilibriumProfile& profile);

// Growing-mode tuple (eta, v, q) = (w, lambda w, -rho0 |xi| phi - rho0 psi')
// in the mode's physical frame.
SpectralState mode_initial_state(const NormalMode& mode);

// Reproducible noise on every dof, walls pinned; for dominant-mode studies.
SpectralState random_initial_state(const EquilibriumProfile& profile,
                                   const std::array<double, 2>& xi, unsigned seed);

}  // namespace rti
