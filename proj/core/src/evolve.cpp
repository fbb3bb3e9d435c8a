#include "rti/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rti/errors.hpp"

namespace rti {

namespace {

// 3-point Gauss on [-1,1], matching the variational assembly
constexpr double kGaussT[3] = {-0.77459666924148338, 0.0, 0.77459666924148338};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

constexpr Cplx kI{0.0, 1.0};

struct ElementWeights {
    double h = 0.0;
    double rho = 0.0, rho2 = 0.0, w = 0.0;
    double rho_N0 = 0.0, rho_N1 = 0.0;
    double rho_N00 = 0.0, rho_N01 = 0.0, rho_N11 = 0.0;
    double rq_N00 = 0.0, rq_N01 = 0.0, rq_N11 = 0.0;  // rho / p'(rho), hat-weighted
};

// Quadrature tables plus the factorized interior-node mass matrix: everything
// the generator needs that depends only on (profile, grid).
struct Workspace {
    const Grid1D* grid = nullptr;
    double g = 0.0, omega = 0.0;
    std::vector<ElementWeights> el;
    double w_minus0 = 0.0, w_plus0 = 0.0, jump_rho = 0.0;
    double c_max = 0.0, h_min = 0.0;
    std::vector<double> mass_diag, mass_lower;  // LDL^T of int rho hat_i hat_j
};

Workspace build_workspace(const EquilibriumProfile& profile) {
    const Grid1D& grid = profile.grid;
    Workspace ws;
    ws.grid = &grid;
    ws.g = profile.cfg.g;
    ws.omega = profile.cfg.omega;
    ws.el.resize(static_cast<size_t>(grid.n_elements()));
    ws.h_min = std::numeric_limits<double>::infinity();

    for (int e = 0; e < grid.n_elements(); ++e) {
        int side = grid.side_of_element(e);
        double x0 = grid.node(e);
        double h = grid.h(e);
        ElementWeights& q = ws.el[static_cast<size_t>(e)];
        q.h = h;
        ws.h_min = std::min(ws.h_min, h);
        for (int k = 0; k < 3; ++k) {
            double t = 0.5 * (kGaussT[k] + 1.0);
            double wq = 0.5 * h * kGaussW[k];
            double rho = profile.rho(x0 + h * t, side);
            double dp = profile.law(side).dp(rho);
            double n0 = 1.0 - t, n1 = t;
            q.rho += wq * rho;
            q.rho2 += wq * rho * rho;
            q.w += wq * dp * rho;
            q.rho_N0 += wq * rho * n0;
            q.rho_N1 += wq * rho * n1;
            q.rho_N00 += wq * rho * n0 * n0;
            q.rho_N01 += wq * rho * n0 * n1;
            q.rho_N11 += wq * rho * n1 * n1;
            q.rq_N00 += wq * rho / dp * n0 * n0;
            q.rq_N01 += wq * rho / dp * n0 * n1;
            q.rq_N11 += wq * rho / dp * n1 * n1;
            ws.c_max = std::max(ws.c_max, std::sqrt(dp));
        }
    }

    double rm = profile.rho_node(grid.interface_node(), -1);
    double rp = profile.rho_node(grid.interface_node(), +1);
    ws.w_minus0 = profile.law(-1).dp(rm) * rm;
    ws.w_plus0 = profile.law(+1).dp(rp) * rp;
    ws.jump_rho = rp - rm;

    // tridiagonal LDL^T over interior nodes
    int ni = grid.n_nodes() - 2;
    std::vector<double> diag(static_cast<size_t>(ni), 0.0), off(static_cast<size_t>(ni - 1), 0.0);
    for (int e = 0; e < grid.n_elements(); ++e) {
        const ElementWeights& q = ws.el[static_cast<size_t>(e)];
        int n0 = e, n1 = e + 1;  // left and right node of the element
        if (n0 >= 1 && n0 <= ni) diag[static_cast<size_t>(n0) - 1] += q.rho_N00;
        if (n1 >= 1 && n1 <= ni) diag[static_cast<size_t>(n1) - 1] += q.rho_N11;
        if (n0 >= 1 && n1 <= ni) off[static_cast<size_t>(n0) - 1] += q.rho_N01;
    }
    ws.mass_diag.resize(static_cast<size_t>(ni));
    ws.mass_lower.resize(static_cast<size_t>(ni) - 1);
    ws.mass_diag[0] = diag[0];
    for (int j = 1; j < ni; ++j) {
        double l = off[static_cast<size_t>(j) - 1] / ws.mass_diag[static_cast<size_t>(j) - 1];
        ws.mass_lower[static_cast<size_t>(j) - 1] = l;
        ws.mass_diag[static_cast<size_t>(j)] =
            diag[static_cast<size_t>(j)] - l * off[static_cast<size_t>(j) - 1];
    }
    return ws;
}

// in-place solve of (int rho hat hat) x = b over interior nodes
void mass_solve(const Workspace& ws, std::vector<Cplx>& b) {
    size_t ni = ws.mass_diag.size();
    for (size_t j = 1; j < ni; ++j) b[j] -= ws.mass_lower[j - 1] * b[j - 1];
    for (size_t j = 0; j < ni; ++j) b[j] /= ws.mass_diag[j];
    for (size_t j = ni - 1; j-- > 0;) b[j] -= ws.mass_lower[j] * b[j + 1];
}

void check_shape(const SpectralState& s, const Grid1D& grid) {
    size_t ne = static_cast<size_t>(grid.n_elements());
    size_t nn = static_cast<size_t>(grid.n_nodes());
    if (s.eta1.size() != ne || s.eta2.size() != ne || s.v1.size() != ne || s.v2.size() != ne ||
        s.q_rho.size() != ne || s.eta3.size() != nn || s.v3.size() != nn)
        throw Error("state does not match the profile grid");
}

void rhs_impl(const Workspace& ws, const SpectralState& s, SpectralState& out) {
    const Grid1D& grid = *ws.grid;
    size_t ne = static_cast<size_t>(grid.n_elements());
    size_t nn = static_cast<size_t>(grid.n_nodes());
    double xi1 = s.xi[0], xi2 = s.xi[1];
    double g = ws.g, omega = ws.omega;

    out.xi = s.xi;
    out.time = s.time;
    out.eta1 = s.v1;
    out.eta2 = s.v2;
    out.eta3 = s.v3;
    out.v1.assign(ne, Cplx{});
    out.v2.assign(ne, Cplx{});
    out.q_rho.assign(ne, Cplx{});
    out.v3.assign(nn, Cplx{});

    for (size_t e = 0; e < ne; ++e) {
        const ElementWeights& q = ws.el[e];
        Cplx div = kI * xi1 * s.v1[e] + kI * xi2 * s.v2[e] + (s.v3[e + 1] - s.v3[e]) / q.h;
        out.q_rho[e] = -div;
        // horizontal momentum, element-averaged; the rho weight divides out
        Cplx press = q.w * s.q_rho[e] + g * (q.rho_N0 * s.eta3[e] + q.rho_N1 * s.eta3[e + 1]);
        out.v1[e] = -kI * xi1 * press / q.rho + 2.0 * omega * s.v2[e];
        out.v2[e] = -kI * xi2 * press / q.rho - 2.0 * omega * s.v1[e];
    }

    // vertical momentum against interior hats; walls stay pinned
    for (size_t e = 0; e < ne; ++e) {
        const ElementWeights& q = ws.el[e];
        Cplx deta3 = (s.eta3[e + 1] - s.eta3[e]) / q.h;
        Cplx flux = q.w / q.h * s.q_rho[e];
        size_t n0 = e, n1 = e + 1;
        if (n1 <= nn - 2)
            out.v3[n1] += flux - g * q.rho_N1 * (s.q_rho[e] + deta3);
        if (n0 >= 1)
            out.v3[n0] += -flux - g * q.rho_N0 * (s.q_rho[e] + deta3);
    }
    {
        // view the interior slice through the mass matrix
        std::vector<Cplx> b(out.v3.begin() + 1, out.v3.end() - 1);
        mass_solve(ws, b);
        std::copy(b.begin(), b.end(), out.v3.begin() + 1);
        out.v3.front() = Cplx{};
        out.v3.back() = Cplx{};
    }
}

constexpr std::vector<Cplx> SpectralState::*kFields[] = {
    &SpectralState::eta1, &SpectralState::eta2, &SpectralState::v1, &SpectralState::v2,
    &SpectralState::q_rho, &SpectralState::eta3, &SpectralState::v3};

void add_scaled(SpectralState& acc, double a, const SpectralState& d) {
    for (auto f : kFields) {
        auto& dst = acc.*f;
        const auto& src = d.*f;
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
    }
}

double norm_pair_sq(const Workspace& ws, const std::vector<Cplx>& c1,
                    const std::vector<Cplx>& c2, const std::vector<Cplx>& nodal) {
    double acc = 0.0;
    for (size_t e = 0; e < ws.el.size(); ++e) {
        double h = ws.el[e].h;
        acc += h * (std::norm(c1[e]) + std::norm(c2[e]));
        Cplx a = nodal[e], b = nodal[e + 1];
        acc += h * (std::norm(a) + (a * std::conj(b)).real() + std::norm(b)) / 3.0;
    }
    return acc;
}

double norm_q_sq(const Workspace& ws, const std::vector<Cplx>& q_rho) {
    double acc = 0.0;
    for (size_t e = 0; e < ws.el.size(); ++e) acc += ws.el[e].rho2 * std::norm(q_rho[e]);
    return acc;
}

struct VSnapshot {
    std::vector<Cplx> v1, v2, v3;
};

// both sides of the energy identity at the middle snapshot, with the time
// derivative of v taken as the centered difference of the neighbors
std::array<double, 2> energy_sides(const Workspace& ws, const std::array<double, 2>& xi,
                                   const VSnapshot& prev, const VSnapshot& mid,
                                   const VSnapshot& next, double dt) {
    double ke = 0.0, pe = 0.0;
    double inv2dt = 1.0 / (2.0 * dt);
    for (size_t e = 0; e < ws.el.size(); ++e) {
        const ElementWeights& q = ws.el[e];
        Cplx dv1 = (next.v1[e] - prev.v1[e]) * inv2dt;
        Cplx dv2 = (next.v2[e] - prev.v2[e]) * inv2dt;
        Cplx dv3l = (next.v3[e] - prev.v3[e]) * inv2dt;
        Cplx dv3r = (next.v3[e + 1] - prev.v3[e + 1]) * inv2dt;
        ke += q.rho * (std::norm(dv1) + std::norm(dv2));
        ke += q.rho_N00 * std::norm(dv3l) + 2.0 * q.rho_N01 * (dv3l * std::conj(dv3r)).real() +
              q.rho_N11 * std::norm(dv3r);

        Cplx div = kI * xi[0] * mid.v1[e] + kI * xi[1] * mid.v2[e] +
                   (mid.v3[e + 1] - mid.v3[e]) / q.h;
        Cplx a = mid.v3[e], b = mid.v3[e + 1];
        pe += q.w * std::norm(div);
        pe -= 2.0 * ws.g *
              (std::conj(div) * (q.rho_N0 * a + q.rho_N1 * b)).real();
        pe += ws.g * ws.g *
              (q.rq_N00 * std::norm(a) + 2.0 * q.rq_N01 * (a * std::conj(b)).real() +
               q.rq_N11 * std::norm(b));
    }
    double lhs = 0.5 * (ke + pe);
    double rhs = 0.5 * ws.g * ws.jump_rho *
                 std::norm(mid.v3[static_cast<size_t>(ws.grid->interface_node())]);
    return {lhs, rhs};
}

VSnapshot snapshot(const SpectralState& s) { return {s.v1, s.v2, s.v3}; }

}  // namespace

SpectralState rhs(const SpectralState& state, const EquilibriumProfile& profile) {
    check_shape(state, profile.grid);
    Workspace ws = build_workspace(profile);
    SpectralState out;
    rhs_impl(ws, state, out);
    return out;
}

EvolveSeries evolve(const SpectralState& state0, const EquilibriumProfile& profile, double dt,
                    double T) {
    check_shape(state0, profile.grid);
    if (!(dt > 0.0) || !(T > 0.0)) throw Error("evolve needs positive dt and T");
    Workspace ws = build_workspace(profile);
    if (dt > ws.h_min / ws.c_max) throw Error("time step exceeds the acoustic limit");

    long n = std::lround(T / dt);
    if (n < 1) n = 1;

    EvolveSeries series;
    auto nan = std::numeric_limits<double>::quiet_NaN();
    series.t.reserve(static_cast<size_t>(n) + 1);

    SpectralState y = state0;
    SpectralState k1, k2, k3, k4, tmp;

    auto push_norms = [&](const SpectralState& s) {
        series.t.push_back(s.time);
        series.norm_eta.push_back(std::sqrt(norm_pair_sq(ws, s.eta1, s.eta2, s.eta3)));
        series.norm_v.push_back(std::sqrt(norm_pair_sq(ws, s.v1, s.v2, s.v3)));
        series.norm_q.push_back(std::sqrt(norm_q_sq(ws, s.q_rho)));
        series.energy_lhs.push_back(nan);
        series.energy_rhs.push_back(nan);
    };
    push_norms(y);
    double scale0 =
        series.norm_eta[0] + series.norm_v[0] + series.norm_q[0] + 1e-300;

    VSnapshot ring[3];
    ring[0] = snapshot(y);

    for (long k = 0; k < n; ++k) {
        rhs_impl(ws, y, k1);
        tmp = y;
        add_scaled(tmp, 0.5 * dt, k1);
        rhs_impl(ws, tmp, k2);
        tmp = y;
        add_scaled(tmp, 0.5 * dt, k2);
        rhs_impl(ws, tmp, k3);
        tmp = y;
        add_scaled(tmp, dt, k3);
        rhs_impl(ws, tmp, k4);
        add_scaled(y, dt / 6.0, k1);
        add_scaled(y, dt / 3.0, k2);
        add_scaled(y, dt / 3.0, k3);
        add_scaled(y, dt / 6.0, k4);
        y.time = static_cast<double>(k + 1) * dt;

        push_norms(y);
        size_t at = static_cast<size_t>(k) + 1;
        double total = series.norm_eta[at] + series.norm_v[at] + series.norm_q[at];
        if (!std::isfinite(total) || total > 1e12 * scale0)
            throw BlowupDetected("norms exceeded 1e12 times the initial data");

        ring[(k + 1) % 3] = snapshot(y);
        if (k >= 1) {
            auto sides = energy_sides(ws, y.xi, ring[(k - 1) % 3], ring[k % 3],
                                      ring[(k + 1) % 3], dt);
            series.energy_lhs[static_cast<size_t>(k)] = sides[0];
            series.energy_rhs[static_cast<size_t>(k)] = sides[1];
        }
    }
    series.final_state = std::move(y);
    return series;
}

GrowthFit growth_fit(const EvolveSeries& series) {
    size_t n = series.t.size();
    if (n == 0) throw Error("empty series");
    double t_half = series.t.back() / 2.0;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    int m = 0;
    for (size_t k = 0; k < n; ++k) {
        if (series.t[k] < t_half) continue;
        double v = series.norm_v[k];
        if (!(v > 0.0)) throw NonGrowingSeries("velocity norm vanished in the fit window");
        double x = series.t[k], y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    if (m < 20) throw Error("growth fit needs at least 20 samples past the transient");

    double mx = sx / m, my = sy / m;
    double cxx = sxx - m * mx * mx;
    double cxy = sxy - m * mx * my;
    double slope = cxy / cxx;
    if (!(slope > 0.0)) throw NonGrowingSeries("fitted growth rate is not positive");

    double ssr = (syy - m * my * my) - slope * cxy;
    if (ssr < 0.0) ssr = 0.0;  // rounding on an exact exponential
    GrowthFit fit;
    fit.lambda_hat = slope;
    fit.band = std::sqrt(ssr / (m - 2) / cxx);
    fit.n_used = m;
    return fit;
}

double energy_identity_drift(const EvolveSeries& series) {
    size_t n = series.t.size();
    if (n < 5) throw InsufficientHistory("drift needs at least 5 samples");

    double scale = 0.0;
    for (size_t k = 1; k + 1 < n; ++k)
        scale = std::max(scale, std::abs(series.energy_lhs[k]) + std::abs(series.energy_rhs[k]));
    if (scale == 0.0) return 0.0;

    double base = series.energy_lhs[1] - series.energy_rhs[1];
    double t0 = series.t[1];
    double drift = 0.0;
    for (size_t k = 2; k + 1 < n; ++k) {
        double d = series.energy_lhs[k] - series.energy_rhs[k] - base;
        drift = std::max(drift, std::abs(d) / ((series.t[k] - t0) * scale));
    }
    return drift;
}

std::array<double, 2> interface_jumps(const SpectralState& state,
                                      const EquilibriumProfile& profile) {
    check_shape(state, profile.grid);
    int i0 = profile.grid.interface_node();
    double rm = profile.rho_node(i0, -1);
    double rp = profile.rho_node(i0, +1);
    double wm = profile.law(-1).dp(rm) * rm;
    double wp = profile.law(+1).dp(rp) * rp;
    Cplx pq_minus = wm * state.q_rho[static_cast<size_t>(i0) - 1];
    Cplx pq_plus = wp * state.q_rho[static_cast<size_t>(i0)];
    // v3 holds one dof per node, so its jump cannot even be represented
    return {0.0, std::abs(pq_plus - pq_minus)};
}

SpectralState mode_initial_state(const NormalMode& mode) {
    const Grid1D& grid = mode.grid;
    if (grid.n_nodes() == 0) throw Error("mode carries no grid");
    size_t ne = static_cast<size_t>(grid.n_elements());
    size_t nn = static_cast<size_t>(grid.n_nodes());

    SpectralState s;
    s.xi = mode.xi;
    s.time = 0.0;
    s.eta1.resize(ne);
    s.eta2.resize(ne);
    s.v1.resize(ne);
    s.v2.resize(ne);
    s.q_rho.resize(ne);
    s.eta3.resize(nn);
    s.v3.resize(nn);

    double lam = mode.lambda;
    for (size_t e = 0; e < ne; ++e) {
        double phi = mode.phi_elements[e];
        auto lab = rotate_horizontal(mode, phi, mode.theta_factor * phi);
        s.eta1[e] = -kI * lab[0];
        s.eta2[e] = -kI * lab[1];
        s.v1[e] = lam * s.eta1[e];
        s.v2[e] = lam * s.eta2[e];
        double dpsi = (mode.psi_nodes[e + 1] - mode.psi_nodes[e]) / grid.h(static_cast<int>(e));
        s.q_rho[e] = -(mode.xi_abs * phi + dpsi);
    }
    for (size_t i = 0; i < nn; ++i) {
        s.eta3[i] = mode.psi_nodes[i];
        s.v3[i] = lam * mode.psi_nodes[i];
    }
    return s;
}

SpectralState random_initial_state(const EquilibriumProfile& profile,
                                   const std::array<double, 2>& xi, unsigned seed) {
    const Grid1D& grid = profile.grid;
    size_t ne = static_cast<size_t>(grid.n_elements());
    size_t nn = static_cast<size_t>(grid.n_nodes());

    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] { return Cplx(u(gen), u(gen)); };

    SpectralState s;
    s.xi = xi;
    s.time = 0.0;
    s.eta1.resize(ne);
    s.eta2.resize(ne);
    s.v1.resize(ne);
    s.v2.resize(ne);
    s.q_rho.resize(ne);
    s.eta3.resize(nn);
    s.v3.resize(nn);
    for (size_t e = 0; e < ne; ++e) {
        s.eta1[e] = draw();
        s.eta2[e] = draw();
        s.v1[e] = draw();
        s.v2[e] = draw();
        s.q_rho[e] = draw();
    }
    for (size_t i = 1; i + 1 < nn; ++i) {
        s.eta3[i] = draw();
        s.v3[i] = draw();
    }
    return s;
}

}  // namespace rti
