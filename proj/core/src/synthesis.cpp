#include "rti/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "rti/eigensolve.hpp"
#include "rti/forms.hpp"

namespace rti {
namespace {

constexpr double kGaussT[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {0.5555555555555556, 0.8888888888888888, 0.5555555555555556};

// Legendre nodes and weights on (a, b) by Newton iteration; ascending nodes.
void gauss_legendre(int n, double a, double b, std::vector<double>& xs, std::vector<double>& ws) {
    xs.assign(static_cast<size_t>(n), 0.0);
    ws.assign(static_cast<size_t>(n), 0.0);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        size_t slot = static_cast<size_t>(n - 1 - i);  // guesses come out descending
        xs[slot] = mid + half * x;
        ws[slot] = 2.0 * half / ((1.0 - x * x) * dp * dp);
    }
}

Series refit(const Series& s, int order) {
    Series r(order);
    for (int i = 0; i <= std::min(order, s.order()); ++i) r[i] = s[i];
    return r;
}

int closer_end_node(const Grid1D& grid, int e, double x) {
    return x - grid.node(e) <= grid.node(e + 1) - x ? e : e + 1;
}

// L2(I-) u L2(I+) of the j-th derivatives of q / (f e^{lambda t}) = -w/p'(rho0),
// all orders up to k in one grid walk.
std::vector<double> q_deriv_l2sq_all(const NormalMode& mode, const EquilibriumProfile& profile,
                                     int k) {
    const Grid1D& grid = mode.grid;
    std::vector<double> acc(static_cast<size_t>(k) + 1, 0.0);
    for (int e = 0; e < grid.n_elements(); ++e) {
        double h = grid.h(e);
        double mid = grid.midpoint(e);
        int side = grid.side_of_element(e);
        for (int g = 0; g < 3; ++g) {
            double x = mid + 0.5 * h * kGaussT[g];
            int node = closer_end_node(grid, e, x);
            double dx = x - grid.node(node);
            const ModeJet& jet = mode.jet(node, side);
            Series dp = profile.law(side).dp_series(profile.rho_jet(node, side));
            int ord = std::min(jet.w.order(), dp.order());
            Series qs = refit(jet.w, ord) / refit(dp, ord);
            for (int j = 0; j <= k; ++j) {
                double v = qs.deriv(j, dx);
                acc[static_cast<size_t>(j)] += 0.5 * h * kGaussW[g] * v * v;
            }
        }
    }
    return acc;
}

void negate_mode(NormalMode& m) {
    for (auto& v : m.psi_nodes) v = -v;
    for (auto& v : m.phi_elements) v = -v;
    for (auto* jets : {&m.jets_minus, &m.jets_plus})
        for (auto& jet : *jets) {
            jet.phi = jet.phi * -1.0;
            jet.psi = jet.psi * -1.0;
            jet.w = jet.w * -1.0;
        }
}

double mode_dot(const NormalMode& a, const NormalMode& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.psi_nodes.size(); ++i) acc += a.psi_nodes[i] * b.psi_nodes[i];
    for (size_t e = 0; e < a.phi_elements.size(); ++e) acc += a.phi_elements[e] * b.phi_elements[e];
    return acc;
}

}  // namespace

double RadialAmplitude::operator()(double r) const {
    if (r <= r3 || r >= r4) return 0.0;
    return amplitude * std::exp(-1.0 / ((r - r3) * (r4 - r)));
}

void RadialAmplitude::validate() const {
    if (!(r3 > 0.0) || !(r4 > r3)) throw Error("amplitude annulus needs 0 < r3 < r4");
    if (!(amplitude > 0.0)) throw Error("amplitude must be positive");
}

SynthesisField build_field(const EquilibriumProfile& profile, const RadialAmplitude& amplitude,
                           int n_r, int n_theta, int k_max, int threads) {
    amplitude.validate();
    if (n_r < 1) throw Error("radial quadrature needs at least one node");
    if (k_max < 0) throw Error("negative Sobolev order");

    SynthesisField field;
    field.profile = profile;
    field.amplitude = amplitude;
    field.n_theta = std::max(2, n_theta + (n_theta & 1));
    field.k_max = k_max;
    if (n_r < 1) throw Error("at least one radial quadrature node is required");
    if (k_max < 0) throw Error("negative Sobolev order");
    gauss_legendre(n_r, amplitude.r3, amplitude.r4, field.r_nodes, field.r_weights);
    field.modes.resize(static_cast<size_t>(n_r));

    // one spare order so the top requested derivative keeps a Taylor
    // correction term inside each element
    int k_stack = k_max + 1;
    std::vector<std::string> failures(static_cast<size_t>(n_r));
    auto solve_slot = [&](size_t i) {
        try {
            double r = field.r_nodes[i];
            DispersionPoint point = solve_fixed_point(profile, r);
            if (point.status != ModeStatus::unstable)
                throw Error("no growing mode at |xi| = " + std::to_string(r));
            EigenResult eig = min_eigen(assemble_pencil(profile, r), point.s_star);
            field.modes[i] = derivative_stack(
                build_mode(point, eig, {r, 0.0}, profile.cfg.omega), profile, k_stack);
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    };

    int workers = std::clamp(threads, 1, n_r);
    if (workers == 1) {
        for (size_t i = 0; i < field.modes.size(); ++i) solve_slot(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (size_t i = static_cast<size_t>(w); i < field.modes.size();
                     i += static_cast<size_t>(workers))
                    solve_slot(i);
            });
        for (auto& th : pool) th.join();
    }
    for (size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw Error("annulus node " + std::to_string(i) + ": " + failures[i]);

    // eigenvector signs are arbitrary per node; align each with its inner
    // neighbor so the family is continuous in |xi|
    for (size_t i = 1; i < field.modes.size(); ++i)
        if (mode_dot(field.modes[i], field.modes[i - 1]) < 0.0) negate_mode(field.modes[i]);

    field.lambda_min = field.lambda_max = field.modes.front().lambda;
    for (const auto& m : field.modes) {
        field.lambda_min = std::min(field.lambda_min, m.lambda);
        field.lambda_max = std::max(field.lambda_max, m.lambda);
    }
    return field;
}

double hk_norm(const SynthesisField& field, FieldComponent which, int k, double t) {
    if (k < 0) throw Error("negative Sobolev order");
    if (k > field.k_max)
        throw DerivativeOrderUnavailable("field stacks were not built to this order");
    double total = 0.0;
    for (size_t i = 0; i < field.modes.size(); ++i) {
        const NormalMode& m = field.modes[i];
        double r = field.r_nodes[i];
        double f = field.amplitude(r);
        double tf2 = m.theta_factor * m.theta_factor;
        std::vector<double> dq;
        if (which == FieldComponent::q) dq = q_deriv_l2sq_all(m, field.profile, k);
        double shell = 0.0;
        for (int j = 0; j <= k; ++j) {
            double base;
            if (which == FieldComponent::q)
                base = dq[static_cast<size_t>(j)];
            else
                base = (1.0 + tf2) * mode_deriv_l2sq(m, ModeField::phi, j) +
                       mode_deriv_l2sq(m, ModeField::psi, j);
            if (which == FieldComponent::v) base *= m.lambda * m.lambda;
            shell += std::pow(1.0 + r * r, k - j) * base;
        }
        total += r * field.r_weights[i] * f * f * std::exp(2.0 * m.lambda * t) * shell;
    }
    return std::sqrt(total / (2.0 * M_PI));
}

double hk_norm_polar(const SynthesisField& field, FieldComponent which, int k, double t) {
    if (k < 0) throw Error("negative Sobolev order");
    if (k > field.k_max)
        throw DerivativeOrderUnavailable("field stacks were not built to this order");
    const Grid1D& grid = field.profile.grid;
    int n_gp = grid.n_elements() * 3;
    double total = 0.0;
    std::vector<double> wgt(static_cast<size_t>(n_gp));
    std::vector<std::vector<double>> sp, ss, sq, spr;
    for (size_t i = 0; i < field.modes.size(); ++i) {
        const NormalMode& m = field.modes[i];
        double r = field.r_nodes[i];
        double f = field.amplitude(r);
        double tf = m.theta_factor;

        // cache the j-th derivative samples at every quadrature point of the
        // vertical grid; phi and psi go through the public pointwise sampler
        sp.assign(static_cast<size_t>(k) + 1, std::vector<double>(static_cast<size_t>(n_gp)));
        ss = sp;
        sq = sp;
        spr = sp;
        for (int e = 0; e < grid.n_elements(); ++e) {
            double h = grid.h(e);
            double mid = grid.midpoint(e);
            int side = grid.side_of_element(e);
            for (int g = 0; g < 3; ++g) {
                size_t p = static_cast<size_t>(e * 3 + g);
                double x = mid + 0.5 * h * kGaussT[g];
                int node = closer_end_node(grid, e, x);
                double dx = x - grid.node(node);
                const ModeJet& jet = m.jet(node, side);
                const Series& rho = field.profile.rho_jet(node, side);
                Series dp = field.profile.law(side).dp_series(rho);
                int ord = std::min(jet.w.order(), dp.order());
                Series qs = refit(jet.w, ord) / refit(dp, ord);
                Series pr = refit(rho, ord) * refit(jet.phi, ord);
                wgt[p] = 0.5 * h * kGaussW[g];
                for (int j = 0; j <= k; ++j) {
                    ModeSample msj = sample_mode(m, j, x, side);
                    sp[static_cast<size_t>(j)][p] = msj.phi;
                    ss[static_cast<size_t>(j)][p] = msj.psi;
                    sq[static_cast<size_t>(j)][p] = qs.deriv(j, dx);
                    spr[static_cast<size_t>(j)][p] = pr.deriv(j, dx);
                }
            }
        }

        double shell = 0.0;
        for (int a = 0; a < field.n_theta; ++a) {
            double alpha = 2.0 * M_PI * a / field.n_theta;
            double c = std::cos(alpha), s = std::sin(alpha);
            // xi . (phi_lab, theta_lab) collapses to r phi by equivariance;
            // evaluated literally here so the collapse is tested, not assumed
            double along = r * (c * (c - s * tf) + s * (s + c * tf));
            for (int j = 0; j <= k; ++j) {
                double term = 0.0;
                const auto& pj = sp[static_cast<size_t>(j)];
                const auto& sj = ss[static_cast<size_t>(j)];
                const auto& qj = sq[static_cast<size_t>(j)];
                const auto& rj = spr[static_cast<size_t>(j)];
                for (size_t p = 0; p < pj.size(); ++p) {
                    double v2;
                    if (which == FieldComponent::q) {
                        double v = qj[p] + (along - r) * rj[p];
                        v2 = v * v;
                    } else {
                        double lab1 = c * pj[p] - s * tf * pj[p];
                        double lab2 = s * pj[p] + c * tf * pj[p];
                        v2 = lab1 * lab1 + lab2 * lab2 + sj[p] * sj[p];
                    }
                    term += wgt[p] * v2;
                }
                if (which == FieldComponent::v) term *= m.lambda * m.lambda;
                shell += std::pow(1.0 + r * r, k - j) * term;
            }
        }
        shell *= 2.0 * M_PI / field.n_theta;
        total += r * field.r_weights[i] * f * f * std::exp(2.0 * m.lambda * t) * shell;
    }
    return std::sqrt(total / (4.0 * M_PI * M_PI));
}

double amplitude_weight_integral(const RadialAmplitude& amplitude, int exponent, int n_r) {
    amplitude.validate();
    std::vector<double> xs, ws;
    gauss_legendre(n_r, amplitude.r3, amplitude.r4, xs, ws);
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double f = amplitude(xs[i]);
        acc += ws[i] * xs[i] * std::pow(1.0 + xs[i] * xs[i], exponent) * f * f;
    }
    return 2.0 * M_PI * acc;
}

SandwichReport growth_sandwich(const SynthesisField& field, FieldComponent which, int k, double t,
                               double slack) {
    SandwichReport rep;
    rep.slack = slack;
    rep.lambda_min = field.lambda_min;
    rep.lambda_max = field.lambda_max;
    rep.norm0 = hk_norm(field, which, k, 0.0);
    rep.norm_t = hk_norm(field, which, k, t);
    rep.lower = std::exp(t * field.lambda_min) * rep.norm0;
    rep.upper = std::exp(t * field.lambda_max) * rep.norm0;
    rep.lower_ok = rep.norm_t >= rep.lower * (1.0 - slack);
    rep.upper_ok = rep.norm_t <= rep.upper * (1.0 + slack);
    return rep;
}

FieldSample evaluate_field(const SynthesisField& field, double t, const std::array<double, 3>& x,
                           int side) {
    const Grid1D& grid = field.profile.grid;
    double x3 = x[2];
    if (x3 <= -grid.m || x3 >= grid.l) throw Error("x3 outside the fluid layers");
    if (x3 == 0.0 && side == 0)
        throw InterfaceSample("field evaluation at x3 = 0 needs a side flag");
    // the hint only breaks the tie on the interface itself
    int side_eff = x3 > 0.0 ? +1 : (x3 < 0.0 ? -1 : side);

    using C = std::complex<double>;
    std::array<C, 3> eta{}, v{};
    C q{};
    for (size_t i = 0; i < field.modes.size(); ++i) {
        const NormalMode& m = field.modes[i];
        double r = field.r_nodes[i];
        ModeSample ms = sample_mode(m, 0, x3, side_eff);
        double qv = -ms.w / field.profile.dp_drho(x3, side_eff);
        double coef = field.amplitude(r) * std::exp(m.lambda * t) * r * field.r_weights[i] /
                      (2.0 * M_PI * field.n_theta);
        for (int a = 0; a < field.n_theta; ++a) {
            double alpha = 2.0 * M_PI * a / field.n_theta;
            double c = std::cos(alpha), s = std::sin(alpha);
            C phase = coef * std::exp(C(0.0, r * (x[0] * c + x[1] * s)));
            double lab1 = c * ms.phi - s * ms.theta;
            double lab2 = s * ms.phi + c * ms.theta;
            std::array<C, 3> w_hat = {C(0.0, -lab1), C(0.0, -lab2), C(ms.psi, 0.0)};
            for (int d = 0; d < 3; ++d) {
                eta[static_cast<size_t>(d)] += phase * w_hat[static_cast<size_t>(d)];
                v[static_cast<size_t>(d)] += m.lambda * phase * w_hat[static_cast<size_t>(d)];
            }
            q += phase * qv;
        }
    }

    FieldSample out;
    double scale = 0.0, worst = 0.0;
    auto put = [&](C z, double& slot) {
        slot = z.real();
        scale = std::max(scale, std::abs(z.real()));
        worst = std::max(worst, std::abs(z.imag()));
    };
    for (int d = 0; d < 3; ++d) {
        put(eta[static_cast<size_t>(d)], out.eta[static_cast<size_t>(d)]);
        put(v[static_cast<size_t>(d)], out.v[static_cast<size_t>(d)]);
    }
    put(q, out.q);
    out.imag_residue = scale > 0.0 ? worst / scale : worst;
    return out;
}

std::vector<IllposedEntry> illposed_sequence(const EquilibriumProfile& profile, int j, int k,
                                             double alpha, double T0, int n_max,
                                             const IllposedOptions& opts) {
    if (k < 0 || j < k) throw Error("sequence orders need j >= k >= 0");
    if (!(alpha > 0.0) || !(T0 > 0.0)) throw Error("alpha and T0 must be positive");
    if (n_max < 1) throw Error("n_max must be at least 1");

    int floor_side = std::max(profile.grid.ne_minus, profile.grid.ne_plus);
    std::vector<IllposedEntry> entries;
    double r = opts.r_start;
    // successive n revisit the rung where n-1 stopped, so keep that field
    double cached_r = -1.0;
    SynthesisField cached;
    for (int n = 1; n <= n_max; ++n) {
        IllposedEntry entry;
        entry.n = n;
        while (r <= opts.r_limit) {
            int n_side =
                std::max(floor_side, static_cast<int>(std::ceil(opts.elements_per_freq * (r + 1))));
            if (r != cached_r) {
                EquilibriumProfile prof_r = integrate_hydrostatic(profile.cfg, n_side);
                cached = build_field(prof_r, {r, r + 1.0, 1.0}, opts.n_r, 2, std::max(j, k),
                                     opts.threads);
                cached_r = r;
            }
            const SynthesisField& field = cached;
            double init = hk_norm(field, FieldComponent::eta, j, 0.0) +
                          hk_norm(field, FieldComponent::v, j, 0.0) +
                          hk_norm(field, FieldComponent::q, j, 0.0);
            double amp = 1.0 / (n * init);
            double grown = amp * hk_norm(field, FieldComponent::eta, k, T0);
            if (grown >= alpha) {
                entry.r_lower = r;
                entry.n_side = n_side;
                entry.amplitude = amp;
                entry.init_norm = amp * init;
                entry.grown_norm = grown;
                entry.lambda_min = field.lambda_min;
                entry.found = true;
                break;
            }
            r *= opts.r_factor;
        }
        if (!entry.found) {
            if (n == 1)
                throw SearchExhausted(
                    "no annulus below the frequency ceiling grows fast enough", opts.r_limit);
            entry.r_lower = opts.r_limit;
        }
        entries.push_back(entry);
    }
    return entries;
}

}  // namespace rti
