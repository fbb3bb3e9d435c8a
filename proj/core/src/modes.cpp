#include "rti/modes.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"

namespace rti {

namespace {

constexpr double kGaussT[3] = {-0.774596669241483377, 0.0, 0.774596669241483377};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

Series trunc(const Series& s, int order) {
    Series r(order);
    for (int i = 0; i <= order && i <= s.order(); ++i) r[i] = s[i];
    return r;
}

// One-sided value of w at an end node of element e, extracted variationally:
// integrating (w hat)' with the strong identity w' = -mu rho psi - g xi rho phi
// gives w at the node where the hat is 1. This sidesteps any interpolation of
// the piecewise-constant phi, so the value is clean second order, and the two
// extractions at the interface differ by exactly the discrete eigen-equation
// row there.
double one_sided_flux(const Grid1D& grid, const EquilibriumProfile& profile,
                      const std::vector<double>& psi_nodes,
                      const std::vector<double>& phi_elements, double mu, double xi, int e,
                      bool rising) {
    double h = grid.h(e);
    double mid = grid.midpoint(e);
    int side = grid.side_of_element(e);
    double g = profile.cfg.g;
    double psi_l = psi_nodes[static_cast<size_t>(e)];
    double psi_r = psi_nodes[static_cast<size_t>(e) + 1];
    double dpsi = (psi_r - psi_l) / h;
    double phi_e = phi_elements[static_cast<size_t>(e)];
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        double x = mid + 0.5 * h * kGaussT[k];
        double rho = profile.rho(x, side);
        double dp = profile.dp_drho(x, side);
        double n1 = (x - grid.node(e)) / h;
        double hat = rising ? n1 : 1.0 - n1;
        double psi_h = (1.0 - n1) * psi_l + n1 * psi_r;
        double w_h = dp * rho * (xi * phi_e + dpsi);
        double forcing = (g * xi * rho * phi_e + mu * rho * psi_h) * hat;
        acc += 0.5 * h * kGaussW[k] * (rising ? w_h / h - forcing : w_h / h + forcing);
    }
    return acc;
}

int nearest_node(const Grid1D& grid, double x3, int side) {
    int i0 = grid.interface_node();
    if (side < 0) {
        double h = grid.m / grid.ne_minus;
        int i = static_cast<int>(std::lround((x3 + grid.m) / h));
        return std::max(0, std::min(i, i0));
    }
    double h = grid.l / grid.ne_plus;
    int i = i0 + static_cast<int>(std::lround(x3 / h));
    return std::max(i0, std::min(i, grid.n_nodes() - 1));
}

int resolve_side(double x3, int side) {
    if (x3 < 0.0) return -1;
    if (x3 > 0.0) return +1;
    if (side == 0) throw InterfaceSample("mode sample at x3 = 0 needs a side flag");
    return side;
}

}  // namespace

const ModeJet& NormalMode::jet(int node, int side) const {
    int i0 = grid.interface_node();
    if (node < i0 || (node == i0 && side < 0))
        return jets_minus[static_cast<size_t>(node)];
    return jets_plus[static_cast<size_t>(node - i0)];
}

NormalMode build_mode(const DispersionPoint& point, const EigenResult& eig,
                      const std::array<double, 2>& xi, double omega) {
    double len = std::hypot(xi[0], xi[1]);
    if (std::abs(len - point.xi_abs) > 1e-12 * std::max(1.0, point.xi_abs))
        throw FrameMismatch("|xi| disagrees with the dispersion point it was solved at");
    if (point.status != ModeStatus::unstable)
        throw Error("a normal mode requires an unstable dispersion point");

    NormalMode m;
    m.xi = xi;
    m.xi_abs = point.xi_abs;
    m.lambda = point.lambda;
    m.s_star = point.s_star;
    m.mu = -point.lambda * point.lambda;
    m.omega = omega;
    m.frame_c = xi[0] / len;
    m.frame_s = xi[1] / len;
    m.theta_factor = omega == 0.0 ? 0.0 : -2.0 * omega / (point.lambda * point.lambda);

    const DofLayout& lay = eig.layout;
    m.psi_nodes.assign(static_cast<size_t>(lay.n_nodes), 0.0);
    for (int i = 1; i <= lay.n_nodes - 2; ++i)
        m.psi_nodes[static_cast<size_t>(i)] = eig.vector[lay.psi(i)];
    m.phi_elements.resize(static_cast<size_t>(lay.n_elements));
    for (int e = 0; e < lay.n_elements; ++e)
        m.phi_elements[static_cast<size_t>(e)] = eig.vector[lay.phi(e)];
    return m;
}

NormalMode derivative_stack(NormalMode mode, const EquilibriumProfile& profile, int k_max) {
    const Grid1D& grid = profile.grid;
    if (static_cast<int>(mode.psi_nodes.size()) != grid.n_nodes())
        throw Error("mode and profile grids disagree");
    if (k_max < 1) throw Error("derivative stack order must be at least 1");

    int rho_order = profile.rho_jet(grid.interface_node(), +1).order();
    if (k_max > rho_order + 1)
        throw DerivativeOrderUnavailable("derivative stack order exceeds the density tables");
    // headroom above k_max keeps off-node evaluations of the k_max-th
    // derivative accurate; the recursion gains one order over rho's tables
    int order = std::min(k_max + 4, rho_order + 1);

    double xi = mode.xi_abs;
    double mu = mode.mu;
    double D = mu + 4.0 * mode.omega * mode.omega / mu;
    if (D == 0.0) throw SingularCoefficient("mu + 4 omega^2 / mu vanished");
    double g = profile.cfg.g;

    int i0 = grid.interface_node();
    mode.grid = grid;
    mode.jets_minus.clear();
    mode.jets_plus.clear();

    auto build_side = [&](int side, int node_first, int node_last, int e_first, int e_last,
                          std::vector<ModeJet>& out) {
        for (int node = node_first; node <= node_last; ++node) {
            Series rho = trunc(profile.rho_jet(node, side), order);
            Series dp = profile.law(side).dp_series(rho);
            Series one = Series::constant(1.0, order);
            Series inv_rho = one / rho;
            Series inv_dprho = one / (dp * rho);

            double psi0 = mode.psi_nodes[static_cast<size_t>(node)];
            // seed w by flux extraction from the adjacent elements of this
            // side (one-sided at the side's ends), then recover the nodal phi
            // through the same algebraic relation the recursion uses
            double w0 = 0.0;
            int n_adj = 0;
            if (node - 1 >= e_first) {
                w0 += one_sided_flux(grid, profile, mode.psi_nodes, mode.phi_elements, mu, xi,
                                     node - 1, true);
                ++n_adj;
            }
            if (node <= e_last) {
                w0 += one_sided_flux(grid, profile, mode.psi_nodes, mode.phi_elements, mu, xi,
                                     node, false);
                ++n_adj;
            }
            w0 /= static_cast<double>(n_adj);

            Series psi(order), w(order);
            psi[0] = psi0;
            w[0] = w0;
            for (int n = 0; n < order; ++n) {
                Series phi = (w * inv_rho - g * psi) * (xi / D);
                Series psi_rhs = w * inv_dprho - xi * phi;
                Series w_rhs = (rho * psi) * (-mu) - (rho * phi) * (g * xi);
                psi[n + 1] = psi_rhs[n] / static_cast<double>(n + 1);
                w[n + 1] = w_rhs[n] / static_cast<double>(n + 1);
            }
            Series phi = (w * inv_rho - g * psi) * (xi / D);
            out.push_back({phi, psi, w});
        }
    };
    build_side(-1, 0, i0, 0, grid.ne_minus - 1, mode.jets_minus);
    build_side(+1, i0, grid.n_nodes() - 1, grid.ne_minus, grid.n_elements() - 1,
               mode.jets_plus);
    mode.k_max = k_max;

    // mass form of the stored profiles; the minimizer normalization makes it 1
    double acc = 0.0;
    for (int e = 0; e < grid.n_elements(); ++e) {
        double h = grid.h(e);
        double mid = grid.midpoint(e);
        int side = grid.side_of_element(e);
        for (int k = 0; k < 3; ++k) {
            double x = mid + 0.5 * h * kGaussT[k];
            ModeSample s = sample_mode(mode, 0, x, side);
            acc += 0.5 * h * kGaussW[k] * profile.rho(x, side) * (s.phi * s.phi + s.psi * s.psi);
        }
    }
    mode.j_norm = std::sqrt(0.5 * acc);
    return mode;
}

ModeSample sample_mode(const NormalMode& mode, int j, double x3, int side) {
    if (!mode.has_stack()) throw Error("derivative stack not built");
    if (j < 0 || j > mode.k_max)
        throw DerivativeOrderUnavailable("mode derivative order not carried by the stack");
    side = resolve_side(x3, side);
    int node = nearest_node(mode.grid, x3, side);
    const ModeJet& jet = mode.jet(node, side);
    double dx = x3 - mode.grid.node(node);
    ModeSample s;
    s.phi = jet.phi.deriv(j, dx);
    s.theta = mode.theta_factor * s.phi;
    s.psi = jet.psi.deriv(j, dx);
    s.w = jet.w.deriv(j, dx);
    return s;
}

double mode_deriv_l2sq(const NormalMode& mode, ModeField field, int j) {
    if (!mode.has_stack()) throw Error("derivative stack not built");
    if (j < 0 || j > mode.k_max)
        throw DerivativeOrderUnavailable("mode derivative order not carried by the stack");
    if (field == ModeField::theta)
        return mode.theta_factor * mode.theta_factor * mode_deriv_l2sq(mode, ModeField::phi, j);
    const Grid1D& grid = mode.grid;
    double acc = 0.0;
    for (int e = 0; e < grid.n_elements(); ++e) {
        double h = grid.h(e);
        double mid = grid.midpoint(e);
        int side = grid.side_of_element(e);
        for (int k = 0; k < 3; ++k) {
            double x = mid + 0.5 * h * kGaussT[k];
            int node = nearest_node(grid, x, side);
            const ModeJet& jet = mode.jet(node, side);
            double dx = x - grid.node(node);
            double v = field == ModeField::phi ? jet.phi.deriv(j, dx) : jet.psi.deriv(j, dx);
            acc += 0.5 * h * kGaussW[k] * v * v;
        }
    }
    return acc;
}

OdeResidual ode_residual(const NormalMode& mode, const EquilibriumProfile& profile) {
    if (!mode.has_stack() || mode.k_max < 1) throw Error("derivative stack required to order 1");
    const Grid1D& grid = mode.grid;
    double xi = mode.xi_abs;
    double mu = mode.mu;
    double D = mu + 4.0 * mode.omega * mode.omega / mu;
    double g = profile.cfg.g;

    // Strong-form defects sampled at element midpoints, where every piece of
    // the minimizer data is second order: the elementwise phi, the linear
    // psi interpolant, the mean slope, and the centered difference of the
    // nodal w. Off-midpoint sampling would see the O(h) interpolation error
    // of the piecewise-constant fields instead of the solution error.
    OdeResidual r;
    double acc1 = 0.0, acc3 = 0.0;
    int i0 = grid.interface_node();
    for (int e = 0; e < grid.n_elements(); ++e) {
        double h = grid.h(e);
        double mid = grid.midpoint(e);
        int side = grid.side_of_element(e);
        double psi_l = mode.psi_nodes[static_cast<size_t>(e)];
        double psi_r = mode.psi_nodes[static_cast<size_t>(e) + 1];
        double dpsi = (psi_r - psi_l) / h;
        double phi_e = mode.phi_elements[static_cast<size_t>(e)];
        double rho = profile.rho(mid, side);
        double dp = profile.dp_drho(mid, side);
        double psi_h = 0.5 * (psi_l + psi_r);
        double w_h = dp * rho * (xi * phi_e + dpsi);
        // momentum along xi (algebraic once w is formed from the data)
        double f1 = -D * rho * phi_e + xi * (w_h - g * rho * psi_h);
        // vertical momentum; w' as the centered difference of the
        // flux-extracted nodal values, so the defect is purely the data's
        double w_l = mode.jet(e, e <= i0 - 1 ? -1 : +1).w[0];
        double w_r = mode.jet(e + 1, e + 1 <= i0 ? -1 : +1).w[0];
        double f3 = -mu * rho * psi_h - (w_r - w_l) / h - g * xi * rho * phi_e;
        acc1 += h * f1 * f1;
        acc3 += h * f3 * f3;
    }
    r.r1 = std::sqrt(acc1) / mode.j_norm;
    r.r2 = 0.0;  // theta is defined by the equation it would be tested against
    r.r3 = std::sqrt(acc3) / mode.j_norm;

    // The two one-sided interface extractions differ by exactly the discrete
    // eigen-equation row at the interface hat, so the jump measures solver
    // and quadrature consistency, not resolution.
    double w_below =
        one_sided_flux(grid, profile, mode.psi_nodes, mode.phi_elements, mu, xi, i0 - 1, true);
    double w_above =
        one_sided_flux(grid, profile, mode.psi_nodes, mode.phi_elements, mu, xi, i0, false);
    double psi_jump = 0.0;  // single shared dof at the interface
    r.jump_res = (std::abs(w_above - w_below) + psi_jump) / mode.j_norm;
    r.bc_res = (std::abs(mode.psi_nodes.front()) + std::abs(mode.psi_nodes.back())) / mode.j_norm;
    return r;
}

void dump_mode(const NormalMode& mode, std::ostream& out) {
    if (!mode.has_stack()) throw Error("derivative stack not built");
    const Grid1D& grid = mode.grid;
    int i0 = grid.interface_node();

    auto collect = [&](int j) {
        nlohmann::json arrs;
        std::vector<double> phi, theta, psi;
        auto push = [&](int node, int side) {
            const ModeJet& jet = mode.jet(node, side);
            double p = jet.phi.deriv(j, 0.0);
            auto h = rotate_horizontal(mode, p, mode.theta_factor * p);
            phi.push_back(h[0]);
            theta.push_back(h[1]);
            psi.push_back(jet.psi.deriv(j, 0.0));
        };
        for (int node = 0; node <= i0; ++node) push(node, -1);
        for (int node = i0; node < grid.n_nodes(); ++node) push(node, +1);
        arrs["phi"] = phi;
        arrs["theta"] = theta;
        arrs["psi"] = psi;
        return arrs;
    };

    nlohmann::json j;
    j["xi"] = {mode.xi[0], mode.xi[1]};
    j["lambda"] = mode.lambda;
    std::vector<double> xs;
    for (int node = 0; node <= i0; ++node) xs.push_back(grid.node(node));
    for (int node = i0; node < grid.n_nodes(); ++node) xs.push_back(grid.node(node));
    j["grid"] = xs;
    nlohmann::json base = collect(0);
    j["phi"] = base["phi"];
    j["theta"] = base["theta"];
    j["psi"] = base["psi"];
    nlohmann::json deriv;
    for (int order = 1; order <= mode.k_max; ++order) deriv[std::to_string(order)] = collect(order);
    j["derivatives"] = deriv;
    out << j.dump(2) << "\n";
}

NormalMode solve_mode(const EquilibriumProfile& profile, double xi_abs, int k_max) {
    DispersionPoint point = solve_fixed_point(profile, xi_abs);
    if (point.status != ModeStatus::unstable)
        throw Error(std::string("no growing mode at this frequency: ") + to_string(point.status));
    FormPencil pencil = assemble_pencil(profile, xi_abs);
    EigenResult eig = min_eigen(pencil, point.s_star);
    NormalMode mode = build_mode(point, eig, {xi_abs, 0.0}, profile.cfg.omega);
    return derivative_stack(std::move(mode), profile, k_max);
}

}  // namespace rti
