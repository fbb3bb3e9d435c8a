#pragma once

#include <utility>
#include <vector>

#include "rti/errors.hpp"
#include "rti/grid.hpp"
#include "rti/pressure_law.hpp"
#include "rti/series.hpp"

namespace rti {

// Two-layer fluid configuration. The upper law lives on (0,l), the lower on
// (-m,0); the interface carries a single pressure P* and a density jump.
struct FluidConfig {
    PressureLaw upper_law;
    PressureLaw lower_law;
    double g = 1.0;                  // gravity (g = 0 allowed for neutral test setups)
    double omega = 0.0;              // rotation rate
    double m = 1.0;                  // lower depth
    double l = 1.0;                  // upper depth
    double interface_pressure = 1.0; // P*

    // Collects every violation; throws ConfigRejected listing all of them.
    void validate() const;
};

// (rho at 0-, rho at 0+). Rejects configurations whose interface density
// does not jump upward (the light-over-heavy arrangement is not unstable).
std::pair<double, double> solve_interface_densities(const FluidConfig& cfg);

struct IntegrateOptions {
    int rk_substeps = 4;  // RK4 substeps per element
    int jet_order = 12;   // order of the per-node Taylor tables
};

// Steady density profile solving d p(rho)/dx3 = -g rho on each side, with
// p(rho) = P* at the interface. Immutable after construction; per-node Taylor
// tables give pointwise values and derivatives of rho anywhere on each side.
class EquilibriumProfile {
  public:
    FluidConfig cfg;
    Grid1D grid;

    double rho_minus0() const { return rho_minus_.back(); }
    double rho_plus0() const { return rho_plus_.front(); }
    double rho_jump() const { return rho_plus0() - rho_minus0(); }
    double rho_inf() const { return rho_inf_; }
    double rho_sup() const { return rho_sup_; }

    const PressureLaw& law(int side) const { return side < 0 ? cfg.lower_law : cfg.upper_law; }

    // Nodal density. At the interface node the two sides disagree; side picks one.
    double rho_node(int node, int side) const;

    // Pointwise density at x3 on the given side (side inferred from the sign
    // of x3 when nonzero; required at x3 = 0).
    double rho(double x3, int side = 0) const;
    double dp_drho(double x3, int side = 0) const;      // p'(rho(x3))
    double rho_deriv(int j, double x3, int side = 0) const;

    // Taylor table of rho about a node, on the given side of the interface.
    const Series& rho_jet(int node, int side) const;

    // Taylor table of rho about the anchor node nearest to x3 (same side);
    // outputs the offset dx = x3 - node position.
    const Series& jet_near(double x3, int side, double& dx) const;

    friend EquilibriumProfile integrate_hydrostatic(const FluidConfig&, int,
                                                    const IntegrateOptions&);

  private:
    std::vector<double> rho_minus_;  // nodes 0 .. interface
    std::vector<double> rho_plus_;   // nodes interface .. last
    std::vector<Series> jet_minus_;
    std::vector<Series> jet_plus_;
    double rho_inf_ = 0.0;
    double rho_sup_ = 0.0;

    int side_of(double x3, int side) const;
};

EquilibriumProfile integrate_hydrostatic(const FluidConfig& cfg, int n_elements_per_side,
                                         const IntegrateOptions& opts = {});

}  // namespace rti
