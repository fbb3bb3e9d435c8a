#include "rti/dispersion.hpp"

#include <cmath>

#include "rti/errors.hpp"
#include "rti/parallel.hpp"

namespace rti {

namespace {

constexpr double kStableMu = -1e-12;

// Warm-started mu(s) evaluations on one pencil. Each solve seeds from the
// previous minimizer, which keeps the inner eigensolves to a few iterations
// across a bracket search.
class MuEvaluator {
  public:
    explicit MuEvaluator(const FormPencil& pencil) : pencil_(pencil) {}

    double operator()(double s) {
        EigenOptions opts;
        if (have_seed_) opts.seed = &seed_;
        EigenResult r = min_eigen(pencil_, s, opts);
        seed_ = r.vector;
        have_seed_ = true;
        return r.mu;
    }

  private:
    const FormPencil& pencil_;
    Vector seed_;
    bool have_seed_ = false;
};

double f_value(double s, double mu) { return s == 0.0 ? -1.0 : -s * mu - 1.0; }

}  // namespace

const char* to_string(ModeStatus status) {
    switch (status) {
        case ModeStatus::unstable: return "unstable";
        case ModeStatus::stable: return "stable";
        case ModeStatus::no_growing_mode: return "no_growing_mode";
        case ModeStatus::failed: return "failed";
    }
    return "failed";
}

std::optional<double> lambda_no_rotation(const EquilibriumProfile& profile, double xi_abs) {
    auto pencil = assemble_pencil(profile, xi_abs);
    double mu0 = min_eigen(pencil, 0.0).mu;
    if (mu0 >= kStableMu) return std::nullopt;
    return std::sqrt(-mu0);
}

std::optional<double> F_of_s(const EquilibriumProfile& profile, double xi_abs, double s) {
    if (!(s >= 0.0)) throw Error("s must be nonnegative");
    if (s == 0.0) return -1.0;
    auto pencil = assemble_pencil(profile, xi_abs);
    double mu = min_eigen(pencil, s).mu;
    if (mu >= 0.0) return std::nullopt;
    return f_value(s, mu);
}

DispersionPoint solve_fixed_point(const EquilibriumProfile& profile, double xi_abs) {
    DispersionPoint point;
    point.xi_abs = xi_abs;

    auto pencil = assemble_pencil(profile, xi_abs);
    MuEvaluator mu(pencil);

    double mu0 = mu(0.0);
    if (mu0 >= kStableMu) {
        point.status = ModeStatus::stable;
        return point;
    }
    point.lambda0 = std::sqrt(-mu0);

    // Below s0 = 1/lambda0^2 the root function is strictly negative:
    // -mu(s) <= -mu(0), so s(-mu(s)) < s0 lambda0^2 = 1. The smallest root
    // therefore lives in the first geometric interval where F changes sign.
    double s0 = 1.0 / (point.lambda0 * point.lambda0);
    double a = s0;
    double mu_a = mu(a);
    if (mu_a >= 0.0) {
        point.status = ModeStatus::no_growing_mode;
        return point;
    }
    double fa = f_value(a, mu_a);
    if (fa >= 0.0) {
        // With no rotation F(s0) is zero up to roundoff; anything clearly
        // positive would contradict the monotonicity of mu.
        if (fa > 1e-9)
            throw BracketFailure("F(1/lambda0^2) > 0 contradicts monotonicity of mu");
        point.s_star = a;
        point.lambda = 1.0 / std::sqrt(a);
        point.status = ModeStatus::unstable;
        EigenResult fresh = min_eigen(pencil, a);
        point.fp_residual = std::abs(a * (-fresh.mu) - 1.0);
        point.mu_residual = fresh.residual;
        return point;
    }

    double b = a;
    double fb = fa;
    bool bracketed = false;
    for (int k = 0; k < 60 && !bracketed; ++k) {
        b *= 2.0;
        double mu_b = mu(b);
        if (mu_b >= 0.0) {
            // mu is nondecreasing: F(s) <= -1 from here on, no root anywhere
            point.status = ModeStatus::no_growing_mode;
            return point;
        }
        fb = f_value(b, mu_b);
        if (fb >= 0.0) {
            bracketed = true;
        } else {
            a = b;
            fa = fb;
        }
    }
    if (!bracketed)
        throw BracketFailure("no sign change of F within 60 doublings of s (xi_abs = " +
                             std::to_string(xi_abs) + ")");

    // Bisection well past the 1e-10 relative target: the fixed-point residual
    // scales like |F'| times the bracket width, and F' can be large when
    // rotation nearly closes the window.
    while ((b - a) > 1e-13 * b) {
        double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;  // double resolution exhausted
        double mu_mid = mu(mid);
        double fm = mu_mid >= 0.0 ? -1.0 : f_value(mid, mu_mid);
        if (fm >= 0.0)
            b = mid;
        else
            a = mid;
    }

    point.s_star = 0.5 * (a + b);
    point.lambda = 1.0 / std::sqrt(point.s_star);
    point.status = ModeStatus::unstable;

    // Independent re-solve, cold seeded, for the reported residuals.
    EigenResult fresh = min_eigen(pencil, point.s_star);
    point.fp_residual = std::abs(point.s_star * (-fresh.mu) - 1.0);
    point.mu_residual = fresh.residual;
    return point;
}

DispersionCurve dispersion_curve(const EquilibriumProfile& profile,
                                 const std::vector<double>& xi_list) {
    for (size_t i = 1; i < xi_list.size(); ++i)
        if (!(xi_list[i] > xi_list[i - 1])) throw Error("xi list must be strictly ascending");

    DispersionCurve curve;
    curve.points.resize(xi_list.size());
    parallel_for(static_cast<int>(xi_list.size()), [&](int i) {
        double xi = xi_list[static_cast<size_t>(i)];
        try {
            curve.points[static_cast<size_t>(i)] = solve_fixed_point(profile, xi);
        } catch (const Error&) {
            DispersionPoint bad;
            bad.xi_abs = xi;
            bad.status = ModeStatus::failed;
            curve.points[static_cast<size_t>(i)] = bad;
        }
    });

    // lambda^2 against |xi| over the unstable points of the upper half
    size_t start = xi_list.size() / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (size_t i = start; i < curve.points.size(); ++i) {
        const DispersionPoint& p = curve.points[i];
        if (p.status != ModeStatus::unstable) continue;
        double x = p.xi_abs;
        double y = p.lambda * p.lambda;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    curve.fit_count = n;
    if (n >= 2) {
        double det = n * sxx - sx * sx;
        if (det != 0.0) {
            curve.fit_slope = (n * sxy - sx * sy) / det;
            curve.fit_intercept = (sy * sxx - sx * sxy) / det;
        }
    }
    return curve;
}

}  // namespace rti
