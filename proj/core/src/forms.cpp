#include "rti/forms.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "rti/errors.hpp"

namespace rti {

namespace {

// 3-point Gauss on [-1,1]
constexpr double kGaussT[3] = {-0.77459666924148338, 0.0, 0.77459666924148338};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

std::vector<ElementIntegrals> profile_integrals(const EquilibriumProfile& profile) {
    const Grid1D& grid = profile.grid;
    std::vector<ElementIntegrals> out(static_cast<size_t>(grid.n_elements()));
    for (int e = 0; e < grid.n_elements(); ++e) {
        int side = grid.side_of_element(e);
        const PressureLaw& law = profile.law(side);
        double x0 = grid.node(e);
        double h = grid.h(e);
        ElementIntegrals acc;
        acc.h = h;
        for (int k = 0; k < 3; ++k) {
            double t = 0.5 * (kGaussT[k] + 1.0);  // in (0,1), strictly interior
            double x = x0 + h * t;
            double wq = 0.5 * h * kGaussW[k];
            double rho = profile.rho(x, side);
            double w = law.dp(rho) * rho;
            double n0 = 1.0 - t;
            double n1 = t;
            acc.rho += wq * rho;
            acc.w += wq * w;
            acc.rho_N0 += wq * rho * n0;
            acc.rho_N1 += wq * rho * n1;
            acc.rho_N00 += wq * rho * n0 * n0;
            acc.rho_N01 += wq * rho * n0 * n1;
            acc.rho_N11 += wq * rho * n1 * n1;
        }
        out[static_cast<size_t>(e)] = acc;
    }
    return out;
}

namespace {

// Collects upper-triangle entries and mirrors them, so A(i,j) and A(j,i) are
// the same double bit for bit.
class SymmetricBuilder {
  public:
    explicit SymmetricBuilder(int n) : n_(n) {}

    void add(int r, int c, double v) {
        if (r > c) std::swap(r, c);
        upper_.emplace_back(r, c, v);
    }

    SparseMatrix build() const {
        std::vector<Eigen::Triplet<double>> all;
        all.reserve(2 * upper_.size());
        for (const auto& t : upper_) {
            all.emplace_back(t.row(), t.col(), t.value());
            if (t.row() != t.col()) all.emplace_back(t.col(), t.row(), t.value());
        }
        SparseMatrix m(n_, n_);
        m.setFromTriplets(all.begin(), all.end());
        m.makeCompressed();
        return m;
    }

  private:
    int n_;
    std::vector<Eigen::Triplet<double>> upper_;
};

}  // namespace

FormPencil assemble_pencil(const EquilibriumProfile& profile, double xi_abs) {
    if (!(xi_abs >= 0.0)) throw Error("xi_abs must be nonnegative");
    const Grid1D& grid = profile.grid;
    DofLayout layout = DofLayout::of(grid);
    double g = profile.cfg.g;
    double omega = profile.cfg.omega;

    auto table = profile_integrals(profile);

    int n = layout.total();
    SymmetricBuilder e0(n), e1(n), j(n);

    for (int e = 0; e < grid.n_elements(); ++e) {
        const ElementIntegrals& q = table[static_cast<size_t>(e)];
        int n0 = e, n1 = e + 1;
        int fdof = layout.phi(e);
        double stiff = q.w / (q.h * q.h);  // integral of w Na' Nb', up to sign

        if (layout.node_is_dof(n0)) {
            int p0 = layout.psi(n0);
            e0.add(p0, p0, stiff);
            // psi-phi coupling: |xi| w N0' - g |xi| rho N0, with N0' = -1/h
            e0.add(p0, fdof, -xi_abs * q.w / q.h - g * xi_abs * q.rho_N0);
            j.add(p0, p0, q.rho_N00);
        }
        if (layout.node_is_dof(n1)) {
            int p1 = layout.psi(n1);
            e0.add(p1, p1, stiff);
            e0.add(p1, fdof, xi_abs * q.w / q.h - g * xi_abs * q.rho_N1);
            j.add(p1, p1, q.rho_N11);
        }
        if (layout.node_is_dof(n0) && layout.node_is_dof(n1))
            e0.add(layout.psi(n0), layout.psi(n1), -stiff);
        if (layout.node_is_dof(n0) && layout.node_is_dof(n1))
            j.add(layout.psi(n0), layout.psi(n1), q.rho_N01);

        e0.add(fdof, fdof, xi_abs * xi_abs * q.w);
        e1.add(fdof, fdof, 4.0 * omega * omega * q.rho);
        j.add(fdof, fdof, q.rho);
    }

    FormPencil pencil;
    pencil.xi_abs = xi_abs;
    pencil.g = g;
    pencil.omega = omega;
    pencil.grid = grid;
    pencil.layout = layout;
    pencil.E0 = e0.build();
    pencil.E1 = e1.build();
    pencil.J = j.build();
    return pencil;
}

Vector test_pair(const Grid1D& grid, double xi_abs) {
    if (!(xi_abs >= 2.0)) throw Error("test pair needs xi_abs >= 2");
    DofLayout layout = DofLayout::of(grid);
    double q = 0.5 * xi_abs;

    auto wedge = [&](double x3) {
        if (x3 >= 0.0) return std::pow(1.0 - x3 / grid.l, q);
        return std::pow(1.0 + x3 / grid.m, q);
    };

    Vector x = Vector::Zero(layout.total());
    for (int i = 1; i <= grid.n_nodes() - 2; ++i) x[layout.psi(i)] = wedge(grid.node(i));
    for (int e = 0; e < grid.n_elements(); ++e) {
        double left = wedge(grid.node(e));
        double right = wedge(grid.node(e + 1));
        // exact elementwise mean of -psi'/|xi|
        x[layout.phi(e)] = -(right - left) / (xi_abs * grid.h(e));
    }
    return x;
}

double rayleigh_quotient(const FormPencil& pencil, double s, const Vector& x) {
    if (x.size() == 0 || x.squaredNorm() == 0.0) throw ZeroVector("rayleigh quotient of 0");
    double num = x.dot(pencil.E0 * x) + s * x.dot(pencil.E1 * x);
    double den = x.dot(pencil.J * x);
    return num / den;
}

namespace {

void dump_matrix(const char* name, const SparseMatrix& m, std::ostream& out) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace

void dump_pencil(const FormPencil& pencil, std::ostream& out) {
    out << std::setprecision(17);
    out << "pencil xi_abs " << pencil.xi_abs << " g " << pencil.g << " omega " << pencil.omega
        << '\n';
    dump_matrix("E0", pencil.E0, out);
    dump_matrix("E1", pencil.E1, out);
    dump_matrix("J", pencil.J, out);
}

}  // namespace rti
