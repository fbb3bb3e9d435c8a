#include "rti/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <string>

#include "rti/errors.hpp"

namespace rti {

namespace {

double j_norm2(const SparseMatrix& J, const Vector& x) { return x.dot(J * x); }

void j_normalize(const SparseMatrix& J, Vector& x) {
    double n2 = j_norm2(J, x);
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw ZeroVector("cannot J-normalize this vector");
    x *= std::sqrt(2.0 / n2);
}

// Deterministic orientation: interface psi positive when it carries any
// weight, otherwise the first largest-magnitude entry positive.
void fix_sign(const DofLayout& layout, Vector& x) {
    double amax = x.cwiseAbs().maxCoeff();
    double pivot = x[layout.interface_psi()];
    if (std::abs(pivot) <= 1e-8 * amax) {
        for (int i = 0; i < x.size(); ++i) {
            if (std::abs(x[i]) == amax) {
                pivot = x[i];
                break;
            }
        }
    }
    if (pivot < 0.0) x = -x;
}

struct Measured {
    double mu;
    double res;
};

Measured measure(const SparseMatrix& A, const SparseMatrix& J, const Vector& x) {
    Vector ax = A * x;
    Vector jx = J * x;
    double mu = x.dot(ax) / x.dot(jx);
    double res = (ax - mu * jx).norm() / x.norm();
    return {mu, res};
}

double max_abs_coeff(const SparseMatrix& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
}

// LDLT factorizations of A - sigma J reused across shifts. The inertia of
// the factor counts pencil eigenvalues below sigma (Sylvester), which is what
// lets the solver certify it is converging to the bottom of the spectrum.
class ShiftedFactor {
  public:
    ShiftedFactor(const SparseMatrix& A, const SparseMatrix& J) : A_(A), J_(J) {
        SparseMatrix pattern = A_ - 0.5 * J_;  // structural union
        solver_.analyzePattern(pattern);
    }

    // Count of eigenvalues below sigma, or -1 on a failed factorization
    // (shift too close to an eigenvalue).
    int try_factorize(double sigma) {
        SparseMatrix m = A_ - sigma * J_;
        solver_.factorize(m);
        if (solver_.info() != Eigen::Success) return -1;
        const auto& d = solver_.vectorD();
        int neg = 0;
        for (int i = 0; i < d.size(); ++i) {
            double di = d[i];
            if (!std::isfinite(di) || di == 0.0) return -1;
            if (di < 0.0) ++neg;
        }
        return neg;
    }

    // Factorize with a tiny downward nudge on failure; updates sigma to the
    // shift actually used. Nudging down never changes a zero count, since an
    // inertia of zero means nothing lies below sigma at all.
    int factorize(double& sigma, double scale) {
        for (int attempt = 0; attempt < 6; ++attempt) {
            int c = try_factorize(sigma);
            if (c >= 0) return c;
            sigma -= std::ldexp(1e-12 * scale, attempt);
        }
        throw ConvergenceFailure("shifted factorization kept hitting an eigenvalue", 0.0, 0.0, 0);
    }

    Vector solve(const Vector& b) const { return solver_.solve(b); }

  private:
    const SparseMatrix& A_;
    const SparseMatrix& J_;
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

EigenResult dense_path(const FormPencil& pencil, const SparseMatrix& A) {
    Eigen::MatrixXd ad = A;
    Eigen::MatrixXd jd = pencil.J;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, jd);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("dense generalized eigensolve failed", 0.0, 0.0, 0);
    EigenResult r;
    r.layout = pencil.layout;
    r.vector = es.eigenvectors().col(0);
    j_normalize(pencil.J, r.vector);
    fix_sign(pencil.layout, r.vector);
    Measured m = measure(A, pencil.J, r.vector);
    r.mu = m.mu;
    r.residual = m.res;
    r.iterations = 0;
    return r;
}

EigenResult iterative_path(const FormPencil& pencil, const SparseMatrix& A,
                           const EigenOptions& opts) {
    const SparseMatrix& J = pencil.J;
    const int n = pencil.layout.total();

    double scale = std::max(1.0, std::max(max_abs_coeff(A), max_abs_coeff(J)));
    double target = std::max(opts.tolerance,
                             64.0 * std::numeric_limits<double>::epsilon() * scale);

    Vector x;
    if (opts.seed && opts.seed->size() == n)
        x = *opts.seed;
    else if (pencil.xi_abs >= 2.0)
        x = test_pair(pencil.grid, pencil.xi_abs);
    else
        x = Vector::Ones(n);
    j_normalize(J, x);

    // The quadratic form is bounded below by -g|xi| times the mass form
    // (shared quadrature points make the bound hold discretely), so this
    // shift is below the whole spectrum up to roundoff slack.
    double gxi = pencil.g * pencil.xi_abs;
    double lo = -gxi - 1e-9 * (1.0 + gxi) -
                64.0 * std::numeric_limits<double>::epsilon() * scale;

    ShiftedFactor factor(A, J);
    for (int widen = 0; factor.factorize(lo, scale) > 0; ++widen) {
        if (widen > 60)
            throw ConvergenceFailure("could not find a floor under the spectrum", 0.0, 0.0, 0);
        lo -= std::max(1.0, gxi) * std::ldexp(1.0, widen);
    }
    double hi = measure(A, J, x).mu;  // any quotient sits above the bottom eigenvalue

    // Narrow (lo, hi] around the bottom eigenvalue by inertia bisection,
    // leaving the factorization at the final lo.
    auto tighten = [&](double goal) {
        while (hi - lo > goal) {
            double mid = 0.5 * (lo + hi);
            int c = factor.factorize(mid, scale);
            if (c == 0)
                lo = mid;
            else
                hi = mid;
        }
        factor.factorize(lo, scale);
    };

    double width = hi - lo;
    tighten(std::max(width / 256.0, 1e-13 * scale));

    EigenResult best;
    best.layout = pencil.layout;
    best.residual = std::numeric_limits<double>::infinity();
    best.outside_instability_regime = (pencil.xi_abs == 0.0);

    double res_checkpoint = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        Vector y = factor.solve(J * x);
        if (!y.allFinite()) {
            double nudged = lo;
            factor.factorize(nudged, 2.0 * scale);
            lo = nudged;
            continue;
        }
        x = y;
        j_normalize(J, x);
        Measured m = measure(A, J, x);
        hi = std::min(hi, m.mu);
        if (m.res < best.residual) {
            best.mu = m.mu;
            best.vector = x;
            best.residual = m.res;
            best.iterations = iter;
        }
        if (m.res <= target) {
            best.iterations = iter;
            return best;
        }
        if (iter % 8 == 0) {
            if (m.res > 0.25 * res_checkpoint) tighten((hi - lo) / 64.0);
            res_checkpoint = m.res;
        }
    }
    throw ConvergenceFailure("inverse iteration did not reach the residual target", best.mu,
                             best.residual, best.iterations);
}

}  // namespace

EigenResult min_eigen(const FormPencil& pencil, double s, const EigenOptions& opts) {
    if (!(s >= 0.0)) throw Error("s must be nonnegative");
    SparseMatrix A = pencil.E0 + s * pencil.E1;

    bool dense = opts.solver == PencilSolver::dense ||
                 (opts.solver == PencilSolver::automatic && pencil.layout.total() < 200);
    EigenResult r = dense ? dense_path(pencil, A) : iterative_path(pencil, A, opts);
    r.outside_instability_regime = (pencil.xi_abs == 0.0);
    r.layout = pencil.layout;
    fix_sign(pencil.layout, r.vector);
    return r;
}

MuCurve mu_curve(const FormPencil& pencil, const std::vector<double>& s_values,
                 const EigenOptions& opts) {
    for (size_t i = 1; i < s_values.size(); ++i)
        if (!(s_values[i] >= s_values[i - 1])) throw Error("s values must be ascending");

    MuCurve curve;
    curve.s = s_values;
    curve.points.reserve(s_values.size());
    EigenOptions local = opts;
    for (size_t i = 0; i < s_values.size(); ++i) {
        if (!curve.points.empty()) local.seed = &curve.points.back().vector;
        try {
            curve.points.push_back(min_eigen(pencil, s_values[i], local));
        } catch (const ConvergenceFailure& e) {
            throw ConvergenceFailure(std::string(e.what()) + " at s = " +
                                         std::to_string(s_values[i]),
                                     e.best_mu, e.residual, e.iterations);
        }
    }
    for (size_t i = 1; i < curve.points.size(); ++i) {
        double ds = s_values[i] - s_values[i - 1];
        if (ds > 0.0)
            curve.lipschitz = std::max(
                curve.lipschitz, std::abs(curve.points[i].mu - curve.points[i - 1].mu) / ds);
    }
    return curve;
}

double psi_at_interface(const EigenResult& result) {
    return result.vector[result.layout.interface_psi()];
}

}  // namespace rti
