#include "rti/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rti {

void FluidConfig::validate() const {
    std::vector<std::string> issues;
    upper_law.collect_issues("upper law", issues);
    lower_law.collect_issues("lower law", issues);
    if (!std::isfinite(g) || g < 0.0) issues.push_back("gravity g must be finite and >= 0");
    if (!std::isfinite(omega) || omega < 0.0)
        issues.push_back("rotation omega must be finite and >= 0");
    if (!(m > 0.0) || !std::isfinite(m)) issues.push_back("lower depth m must be positive");
    if (!(l > 0.0) || !std::isfinite(l)) issues.push_back("upper depth l must be positive");
    if (!(interface_pressure > 0.0) || !std::isfinite(interface_pressure))
        issues.push_back("interface pressure must be positive");
    // equal laws give equal interface densities and no jump to destabilize
    if (upper_law.kind == lower_law.kind && upper_law.K == lower_law.K &&
        upper_law.gamma == lower_law.gamma)
        issues.push_back("the pressure laws must be distinct");
    if (!issues.empty()) throw ConfigRejected(issues);
}

std::pair<double, double> solve_interface_densities(const FluidConfig& cfg) {
    cfg.validate();
    double below = cfg.lower_law.rho_of_p(cfg.interface_pressure);
    double above = cfg.upper_law.rho_of_p(cfg.interface_pressure);
    if (!(above > below)) {
        throw ConfigRejected("interface density must jump upward: rho(0+) = " +
                             std::to_string(above) + " <= rho(0-) = " + std::to_string(below));
    }
    return {below, above};
}

namespace {

// Taylor table about a point where rho = rho0, for the profile equation
// rho' = -g rho / p'(rho). Coefficient n+1 of rho depends only on
// coefficients <= n of the right-hand side, so filling order by order with a
// fresh right-hand side each round is exact at every order.
Series ode_jet(const PressureLaw& law, double g, double rho0, int order) {
    Series rho(order);
    rho[0] = rho0;
    if (g == 0.0) return rho;
    for (int n = 0; n < order; ++n) {
        Series f = rho * (-g) / law.dp_series(rho);
        rho[n + 1] = f[n] / static_cast<double>(n + 1);
    }
    return rho;
}

double slope_or_throw(const PressureLaw& law, double g, double rho, double x3) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw DepthTooLarge("density reached zero before the wall near x3 = " + std::to_string(x3),
                            x3);
    double dp = law.dp(rho);
    if (!(dp > 0.0) || !std::isfinite(dp))
        throw DepthTooLarge("pressure law degenerated before the wall near x3 = " +
                                std::to_string(x3),
                            x3);
    return -g * rho / dp;
}

// One RK4 step of size dh starting from (x3, rho).
double rk4_step(const PressureLaw& law, double g, double rho, double x3, double dh) {
    double k1 = slope_or_throw(law, g, rho, x3);
    double k2 = slope_or_throw(law, g, rho + 0.5 * dh * k1, x3 + 0.5 * dh);
    double k3 = slope_or_throw(law, g, rho + 0.5 * dh * k2, x3 + 0.5 * dh);
    double k4 = slope_or_throw(law, g, rho + dh * k3, x3 + dh);
    return rho + dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

int EquilibriumProfile::side_of(double x3, int side) const {
    if (side != 0) return side < 0 ? -1 : +1;
    if (x3 > 0.0) return +1;
    if (x3 < 0.0) return -1;
    throw InterfaceSample("sample at x3 = 0 needs a side flag");
}

double EquilibriumProfile::rho_node(int node, int side) const {
    int i0 = grid.interface_node();
    int s = side;
    if (s == 0) {
        if (node == i0) throw InterfaceSample("interface node value needs a side flag");
        s = node < i0 ? -1 : +1;
    }
    if (s < 0) {
        assert(node >= 0 && node <= i0);
        return rho_minus_[static_cast<size_t>(node)];
    }
    assert(node >= i0 && node < grid.n_nodes());
    return rho_plus_[static_cast<size_t>(node - i0)];
}

const Series& EquilibriumProfile::rho_jet(int node, int side) const {
    int i0 = grid.interface_node();
    int s = side;
    if (s == 0) {
        if (node == i0) throw InterfaceSample("interface jet needs a side flag");
        s = node < i0 ? -1 : +1;
    }
    if (s < 0) {
        assert(node >= 0 && node <= i0);
        return jet_minus_[static_cast<size_t>(node)];
    }
    assert(node >= i0 && node < grid.n_nodes());
    return jet_plus_[static_cast<size_t>(node - i0)];
}

const Series& EquilibriumProfile::jet_near(double x3, int side, double& dx) const {
    int s = side_of(x3, side);
    int i0 = grid.interface_node();
    int node;
    if (s < 0) {
        if (x3 < -grid.m - 1e-12 || x3 > 0.0)
            throw Error("sample at x3 = " + std::to_string(x3) + " is outside the lower layer");
        double h = grid.m / static_cast<double>(grid.ne_minus);
        node = static_cast<int>(std::lround((x3 + grid.m) / h));
        node = std::clamp(node, 0, i0);
    } else {
        if (x3 > grid.l + 1e-12 || x3 < 0.0)
            throw Error("sample at x3 = " + std::to_string(x3) + " is outside the upper layer");
        double h = grid.l / static_cast<double>(grid.ne_plus);
        node = i0 + static_cast<int>(std::lround(x3 / h));
        node = std::clamp(node, i0, grid.n_nodes() - 1);
    }
    dx = x3 - grid.node(node);
    return rho_jet(node, s);
}

double EquilibriumProfile::rho(double x3, int side) const {
    double dx;
    const Series& jet = jet_near(x3, side, dx);
    return jet.eval(dx);
}

double EquilibriumProfile::dp_drho(double x3, int side) const {
    int s = side_of(x3, side);
    return law(s).dp(rho(x3, s));
}

double EquilibriumProfile::rho_deriv(int j, double x3, int side) const {
    double dx;
    const Series& jet = jet_near(x3, side, dx);
    if (j > jet.order())
        throw DerivativeOrderUnavailable("derivative order " + std::to_string(j) +
                                         " exceeds the stored table (order " +
                                         std::to_string(jet.order()) + ")");
    return jet.deriv(j, dx);
}

EquilibriumProfile integrate_hydrostatic(const FluidConfig& cfg, int n_elements_per_side,
                                         const IntegrateOptions& opts) {
    if (n_elements_per_side < 1) throw Error("need at least one element per side");
    if (opts.rk_substeps < 1) throw Error("need at least one RK substep");
    if (opts.jet_order < 1) throw Error("need jet order >= 1");

    auto [rho_m0, rho_p0] = solve_interface_densities(cfg);

    EquilibriumProfile prof;
    prof.cfg = cfg;
    prof.grid = Grid1D::uniform(cfg.m, cfg.l, n_elements_per_side);
    const Grid1D& grid = prof.grid;
    int i0 = grid.interface_node();

    prof.rho_plus_.resize(static_cast<size_t>(grid.ne_plus) + 1);
    prof.rho_plus_[0] = rho_p0;
    for (int e = i0; e < grid.n_elements(); ++e) {
        double rho = prof.rho_plus_[static_cast<size_t>(e - i0)];
        double x3 = grid.node(e);
        double dh = grid.h(e) / static_cast<double>(opts.rk_substeps);
        for (int k = 0; k < opts.rk_substeps; ++k) {
            rho = rk4_step(cfg.upper_law, cfg.g, rho, x3, dh);
            x3 += dh;
        }
        slope_or_throw(cfg.upper_law, cfg.g, rho, grid.node(e + 1));  // node value must be valid
        prof.rho_plus_[static_cast<size_t>(e - i0 + 1)] = rho;
    }

    prof.rho_minus_.resize(static_cast<size_t>(grid.ne_minus) + 1);
    prof.rho_minus_[static_cast<size_t>(i0)] = rho_m0;
    for (int e = i0 - 1; e >= 0; --e) {
        double rho = prof.rho_minus_[static_cast<size_t>(e) + 1];
        double x3 = grid.node(e + 1);
        double dh = -grid.h(e) / static_cast<double>(opts.rk_substeps);
        for (int k = 0; k < opts.rk_substeps; ++k) {
            rho = rk4_step(cfg.lower_law, cfg.g, rho, x3, dh);
            x3 += dh;
        }
        slope_or_throw(cfg.lower_law, cfg.g, rho, grid.node(e));
        prof.rho_minus_[static_cast<size_t>(e)] = rho;
    }

    prof.jet_plus_.resize(prof.rho_plus_.size());
    for (size_t k = 0; k < prof.rho_plus_.size(); ++k)
        prof.jet_plus_[k] = ode_jet(cfg.upper_law, cfg.g, prof.rho_plus_[k], opts.jet_order);
    prof.jet_minus_.resize(prof.rho_minus_.size());
    for (size_t k = 0; k < prof.rho_minus_.size(); ++k)
        prof.jet_minus_[k] = ode_jet(cfg.lower_law, cfg.g, prof.rho_minus_[k], opts.jet_order);

    auto [min_m, max_m] = std::minmax_element(prof.rho_minus_.begin(), prof.rho_minus_.end());
    auto [min_p, max_p] = std::minmax_element(prof.rho_plus_.begin(), prof.rho_plus_.end());
    prof.rho_inf_ = std::min(*min_m, *min_p);
    prof.rho_sup_ = std::max(*max_m, *max_p);

    return prof;
}

}  // namespace rti
