#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "rti/equilibrium.hpp"
#include "rti/grid.hpp"

namespace rti {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Per-element integrals of the profile weights against the local linear
// basis N0 (falling) and N1 (rising). 3-point Gauss, which is exact for the
// polynomial degrees assembled from them. Shared by the variational pencil
// and the time-domain operators so both discretizations see the same
// geometry.
struct ElementIntegrals {
    double h = 0.0;
    double rho = 0.0;      // integral of rho0
    double w = 0.0;        // integral of p'(rho0) rho0
    double rho_N0 = 0.0;   // integral of rho0 N0
    double rho_N1 = 0.0;
    double rho_N00 = 0.0;  // integral of rho0 N0 N0
    double rho_N01 = 0.0;
    double rho_N11 = 0.0;
};

std::vector<ElementIntegrals> profile_integrals(const EquilibriumProfile& profile);

// Matrices of the quadratic energy and mass forms in the Hessian convention:
// the scalar energy of a dof vector x is (x . E0 x)/2 + s (x . E1 x)/2, the
// mass is (x . J x)/2. With that convention every form/mass ratio matches
// the underlying integral ratio with no stray factors of two.
struct FormPencil {
    double xi_abs = 0.0;
    double g = 0.0;
    double omega = 0.0;
    Grid1D grid;
    DofLayout layout;
    SparseMatrix E0;  // symmetric
    SparseMatrix E1;  // diagonal on phi dofs, zero elsewhere
    SparseMatrix J;   // symmetric positive definite
};

FormPencil assemble_pencil(const EquilibriumProfile& profile, double xi_abs);

// Interpolant of the wedge pair psi = (1 - x3/l)^(|xi|/2) above and
// (1 + x3/m)^(|xi|/2) below, phi = -psi'/|xi|: nodal values for psi and
// exact elementwise means for phi. Needs |xi| >= 2 so psi' is bounded.
Vector test_pair(const Grid1D& grid, double xi_abs);

// ((E0 + s E1) x . x) / (J x . x); scale invariant.
double rayleigh_quotient(const FormPencil& pencil, double s, const Vector& x);

// Writes the three matrices in a coordinate text format, for debugging.
void dump_pencil(const FormPencil& pencil, std::ostream& out);

}  // namespace rti
