#pragma once

#include <array>
#include <iosfwd>

#include "rti/dispersion.hpp"

namespace rti {

// Taylor tables of the reference-frame profiles about one node, one side of
// the interface. phi is algebraically slaved to (psi, w), so the three jets
// satisfy the first-order mode system exactly through the node.
struct ModeJet {
    Series phi;
    Series psi;
    Series w;  // p'(rho0) rho0 (|xi| phi + psi')
};

// j-th x3-derivative of the reference-frame fields at one point.
struct ModeSample {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double w = 0.0;
};

// A single growing mode at horizontal frequency xi. The profiles are stored
// in the frame where xi points along e1; the physical horizontal pair is the
// stored (phi, theta) rotated by (frame_c, frame_s). psi and w do not rotate.
struct NormalMode {
    std::array<double, 2> xi{};
    double xi_abs = 0.0;
    double lambda = 0.0;  // growth rate from the dispersion fixed point
    double s_star = 0.0;
    double mu = 0.0;  // -lambda^2; the stack algebra uses this value throughout
    double omega = 0.0;
    double frame_c = 1.0;  // rotation taking (|xi|, 0) to xi
    double frame_s = 0.0;
    double theta_factor = 0.0;  // reference-frame theta = theta_factor * phi

    // minimizer data in the reference frame
    std::vector<double> psi_nodes;     // every node, boundary zeros included
    std::vector<double> phi_elements;  // one value per element

    // filled by derivative_stack
    Grid1D grid;
    int k_max = -1;  // highest derivative order honored; -1 before the stack
    std::vector<ModeJet> jets_minus;  // nodes 0..interface, interface from below
    std::vector<ModeJet> jets_plus;   // nodes interface..last, from above
    double j_norm = 0.0;              // sqrt((1/2) integral rho0 (phi^2 + psi^2))

    bool has_stack() const { return k_max >= 0; }
    const ModeJet& jet(int node, int side) const;
};

// Physical-frame horizontal pair from the stored reference pair.
inline std::array<double, 2> rotate_horizontal(const NormalMode& m, double phi, double theta) {
    return {m.frame_c * phi - m.frame_s * theta, m.frame_s * phi + m.frame_c * theta};
}

// Assembles the mode data from a solved dispersion point and the pencil
// minimizer at its s_star. xi may point anywhere; only its length must match
// the point. theta is slaved to phi by the rotation identity, which is what
// makes the theta-direction momentum equation hold identically.
NormalMode build_mode(const DispersionPoint& point, const EigenResult& eig,
                      const std::array<double, 2>& xi, double omega);

// Extends the mode with per-node Taylor tables of (phi, psi, w) to order
// k_max on each side, by recursively differentiating the first-order system
//   psi' = w / (p'(rho0) rho0) - |xi| phi,
//   w'   = -mu rho0 psi - g |xi| rho0 phi,
//   phi  = |xi| (w - g rho0 psi) / (rho0 (mu + 4 omega^2 / mu)),
// using the analytic density tables. Repeated numerical differentiation
// would lose a factor of h per order; the recursion loses nothing.
NormalMode derivative_stack(NormalMode mode, const EquilibriumProfile& profile, int k_max);

// Reference-frame fields and their j-th derivatives at x3, evaluated from
// the nearest node's tables on that side. side resolves x3 = 0.
ModeSample sample_mode(const NormalMode& mode, int j, double x3, int side = 0);

enum class ModeField { phi, theta, psi };

// Integral over both open sides of the squared j-th derivative of one
// reference-frame component.
double mode_deriv_l2sq(const NormalMode& mode, ModeField field, int j);

// Strong-form defect of the mode equations, normalized by the J-norm:
//   r1: momentum along xi, evaluated on the raw minimizer (no derivatives
//       of the discrete fields beyond psi', so this is an honest measure);
//   r2: momentum orthogonal to xi; identically zero because theta is
//       defined by the identity that equation states;
//   r3: vertical momentum, with w' taken from the derivative stack;
//   jump_res: mismatch of the one-sided variational fluxes at 0 (the psi
//       jump vanishes by the shared dof);
//   bc_res: |psi(-m)| + |psi(l)|, zero by construction of the dof layout.
struct OdeResidual {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double jump_res = 0.0;
    double bc_res = 0.0;
};

OdeResidual ode_residual(const NormalMode& mode, const EquilibriumProfile& profile);

// JSON dump: physical-frame nodal profiles with the interface sample
// duplicated (one per side), plus every derivative order the stack honors.
void dump_mode(const NormalMode& mode, std::ostream& out);

// Full chain at frequency xi = (xi_abs, 0): fixed point, pencil minimizer at
// s_star, mode assembly, derivative stack.
NormalMode solve_mode(const EquilibriumProfile& profile, double xi_abs, int k_max);

}  // namespace rti
