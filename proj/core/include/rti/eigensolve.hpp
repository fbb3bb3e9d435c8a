#pragma once

#include <vector>

#include "rti/forms.hpp"

namespace rti {

enum class PencilSolver {
    automatic,  // dense below 200 dofs, iterative above
    iterative,
    dense,
};

struct EigenOptions {
    PencilSolver solver = PencilSolver::automatic;
    // Residual target for the iterative path. The solver stops at the larger
    // of this and the factorization noise floor of the assembled matrices, so
    // very fine grids do not spin pointlessly.
    double tolerance = 1e-10;
    int max_iterations = 500;
    const Vector* seed = nullptr;  // warm start; defaults to the wedge pair
};

struct EigenResult {
    double mu = 0.0;
    Vector vector;          // normalized so J x . x = 2
    double residual = 0.0;  // ||(E0 + s E1) x - mu J x|| / ||x||
    int iterations = 0;     // 0 for the dense path
    bool outside_instability_regime = false;  // set when |xi| = 0
    DofLayout layout;
};

// Smallest eigenvalue of (E0 + s E1) x = mu J x with its minimizer.
// The iterative path brackets the bottom eigenvalue by factorization inertia
// before inverse iteration, so it cannot silently converge to a higher one.
EigenResult min_eigen(const FormPencil& pencil, double s, const EigenOptions& opts = {});

struct MuCurve {
    std::vector<double> s;
    std::vector<EigenResult> points;
    double lipschitz = 0.0;  // max |d mu / d s| between consecutive samples
};

// min_eigen over an ascending list of s values, warm starting each solve
// from the previous minimizer.
MuCurve mu_curve(const FormPencil& pencil, const std::vector<double>& s_values,
                 const EigenOptions& opts = {});

// psi dof at the interface node.
double psi_at_interface(const EigenResult& result);

}  // namespace rti
