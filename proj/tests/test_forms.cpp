#include <cmath>
#include <random>

#include "doctest.h"
#include "rti/forms.hpp"

using namespace rti;

namespace {

FluidConfig affine_pair() {
    FluidConfig cfg;
    cfg.upper_law = PressureLaw::affine(1.0);
    cfg.lower_law = PressureLaw::affine(2.0);
    cfg.interface_pressure = 2.0;
    cfg.g = 1.0;
    return cfg;
}

// rho = 1 above, 1/2 below, p' rho = 1 on both sides, no gravity
FluidConfig unit_weight() {
    FluidConfig cfg;
    cfg.upper_law = PressureLaw::affine(1.0);
    cfg.lower_law = PressureLaw::affine(2.0);
    cfg.interface_pressure = 1.0;
    cfg.g = 0.0;
    cfg.omega = 1.0;
    return cfg;
}

Vector random_vector(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = dist(rng);
    return x;
}

}  // namespace

TEST_CASE("hand-computed pencil on two elements") {
    // constant weights, one element per side, |xi| = 1, omega = 1:
    // every integral is a low-degree polynomial, done by hand.
    auto prof = integrate_hydrostatic(unit_weight(), 1);
    auto pencil = assemble_pencil(prof, 1.0);

    REQUIRE(pencil.layout.total() == 3);
    Eigen::MatrixXd E0 = pencil.E0;
    Eigen::MatrixXd E1 = pencil.E1;
    Eigen::MatrixXd J = pencil.J;

    // dofs: phi_0 -> 0, psi(0) -> 1, phi_1 -> 2
    Eigen::MatrixXd E0_expect(3, 3);
    E0_expect << 1, 1, 0, 1, 2, -1, 0, -1, 1;
    CHECK((E0 - E0_expect).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::MatrixXd E1_expect = Eigen::Vector3d(2.0, 0.0, 4.0).asDiagonal();
    CHECK((E1 - E1_expect).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::MatrixXd J_expect = Eigen::Vector3d(0.5, 0.5, 1.0).asDiagonal();
    CHECK((J - J_expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pencil matrices are bitwise symmetric") {
    auto prof = integrate_hydrostatic(affine_pair(), 24);
    auto pencil = assemble_pencil(prof, 3.7);
    for (const SparseMatrix* m : {&pencil.E0, &pencil.E1, &pencil.J}) {
        Eigen::MatrixXd d = *m;
        for (int i = 0; i < d.rows(); ++i)
            for (int c = i + 1; c < d.cols(); ++c) CHECK(d(i, c) == d(c, i));
    }
}

TEST_CASE("no rotation means no s dependence") {
    auto prof = integrate_hydrostatic(affine_pair(), 8);
    auto pencil = assemble_pencil(prof, 2.0);
    CHECK(pencil.E1.nonZeros() > 0);
    CHECK(Eigen::MatrixXd(pencil.E1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero frequency decouples the fields") {
    auto prof = integrate_hydrostatic(affine_pair(), 8);
    auto pencil = assemble_pencil(prof, 0.0);
    Eigen::MatrixXd E0 = pencil.E0;
    const DofLayout& lay = pencil.layout;
    for (int e = 0; e < lay.n_elements; ++e) {
        CHECK(E0(lay.phi(e), lay.phi(e)) == 0.0);
        for (int i = 1; i <= lay.n_nodes - 2; ++i) CHECK(E0(lay.phi(e), lay.psi(i)) == 0.0);
    }
}

TEST_CASE("wedge pair interpolant") {
    Grid1D grid = Grid1D::uniform(1.0, 1.0, 4);
    DofLayout lay = DofLayout::of(grid);

    Vector x2 = test_pair(grid, 2.0);
    CHECK(x2[lay.psi(grid.interface_node())] == 1.0);
    CHECK(x2[lay.psi(6)] == doctest::Approx(0.5).epsilon(1e-15));  // node at l/2

    Vector x4 = test_pair(grid, 4.0);
    CHECK(x4[lay.psi(2)] == doctest::Approx(0.25).epsilon(1e-15));  // node at -1/2

    // phi is the exact mean of -psi'/|xi|: summing h*phi over a side
    // telescopes to (psi(0) - psi(wall))/|xi| = 1/|xi|
    double acc = 0.0;
    for (int e = grid.interface_node(); e < grid.n_elements(); ++e)
        acc += grid.h(e) * x4[lay.phi(e)];
    CHECK(acc == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(test_pair(grid, 1.5), Error);
}

TEST_CASE("quotient is scale invariant and rejects zero") {
    auto prof = integrate_hydrostatic(affine_pair(), 12);
    auto pencil = assemble_pencil(prof, 4.0);
    Vector x = test_pair(prof.grid, 4.0);

    double q1 = rayleigh_quotient(pencil, 0.3, x);
    double q3 = rayleigh_quotient(pencil, 0.3, Vector(3.0 * x));
    CHECK(q1 == doctest::Approx(q3).epsilon(1e-14));

    CHECK_THROWS_AS(rayleigh_quotient(pencil, 0.3, Vector(Vector::Zero(x.size()))), ZeroVector);
}

TEST_CASE("quotient is nondecreasing in s") {
    auto prof = integrate_hydrostatic(unit_weight(), 6);
    auto pencil = assemble_pencil(prof, 2.0);
    std::mt19937 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x = random_vector(pencil.layout.total(), rng);
        double s1 = 2.0 * static_cast<double>(trial) / 50.0;
        double q_lo = rayleigh_quotient(pencil, s1, x);
        double q_hi = rayleigh_quotient(pencil, s1 + 0.6, x);
        CHECK(q_hi >= q_lo - 1e-12 * std::abs(q_lo));
    }
}

TEST_CASE("energy is bounded below by -g|xi|") {
    auto prof = integrate_hydrostatic(affine_pair(), 16);
    for (double xi : {2.0, 5.0, 11.0}) {
        auto pencil = assemble_pencil(prof, xi);
        std::mt19937 rng(7);
        for (int trial = 0; trial < 1000; ++trial) {
            Vector x = random_vector(pencil.layout.total(), rng);
            CHECK(rayleigh_quotient(pencil, 0.0, x) >= -prof.cfg.g * xi - 1e-9);
        }
    }
}

TEST_CASE("negative quotient at moderate frequency") {
    // the jump term -g [rho] / 2 dominates once |xi| is large enough
    auto prof = integrate_hydrostatic(affine_pair(), 32);
    auto pencil = assemble_pencil(prof, 12.0);
    Vector x = test_pair(prof.grid, 12.0);
    CHECK(rayleigh_quotient(pencil, 0.0, x) < 0.0);
}

TEST_CASE("discrete quotient converges to the continuum value") {
    // continuum quotient of the wedge pair at |xi| = 4, s = 0.7, omega = 1/2
    // for the affine profile pair: fixed by 200-point Gauss on the closed
    // forms rho+ = 2 e^{-x}, rho- = e^{-x/2}, psi = (1 -+ x)^2.
    const double q_continuum = -0.49615762764985205;

    FluidConfig cfg = affine_pair();
    cfg.omega = 0.5;

    double err[3];
    int n = 16;
    for (int k = 0; k < 3; ++k, n *= 2) {
        auto prof = integrate_hydrostatic(cfg, n);
        auto pencil = assemble_pencil(prof, 4.0);
        Vector x = test_pair(prof.grid, 4.0);
        err[k] = std::abs(rayleigh_quotient(pencil, 0.7, x) - q_continuum);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.8);
    CHECK(std::log2(err[1] / err[2]) > 1.8);
}
