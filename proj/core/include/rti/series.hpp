#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace rti {

// Truncated Taylor series about a base point: c[0] + c[1] dx + ... + c[n] dx^n.
// All arithmetic truncates at the common order. Used for analytic derivative
// tables of the equilibrium profile and for the mode bootstrap recursion,
// where repeated numerical differentiation would lose accuracy.
class Series {
  public:
    Series() = default;
    explicit Series(int order) : c_(static_cast<size_t>(order) + 1, 0.0) {}
    static Series constant(double v, int order) {
        Series s(order);
        s.c_[0] = v;
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double& operator[](int i) { return c_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c_[static_cast<size_t>(i)]; }

    Series operator+(const Series& b) const {
        Series r = *this;
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    Series operator-(const Series& b) const {
        Series r = *this;
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    Series operator*(double a) const {
        Series r = *this;
        for (auto& v : r.c_) v *= a;
        return r;
    }
    Series operator*(const Series& b) const {
        Series r(order());
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; i + j < c_.size(); ++j) r.c_[i + j] += c_[i] * b.c_[j];
        return r;
    }

    // Quotient this/b, b[0] != 0. Standard recurrence.
    Series operator/(const Series& b) const {
        assert(b.c_[0] != 0.0);
        Series w(order());
        for (size_t n = 0; n < c_.size(); ++n) {
            double acc = c_[n];
            for (size_t k = 1; k <= n; ++k) acc -= b.c_[k] * w.c_[n - k];
            w.c_[n] = acc / b.c_[0];
        }
        return w;
    }

    // u^alpha for u[0] > 0, via the recurrence u w' = alpha w u'.
    Series pow(double alpha) const {
        assert(c_[0] > 0.0);
        Series w(order());
        w.c_[0] = std::pow(c_[0], alpha);
        for (size_t n = 1; n < c_.size(); ++n) {
            double acc = 0.0;
            for (size_t k = 1; k <= n; ++k)
                acc += (alpha * static_cast<double>(k) - static_cast<double>(n - k)) * c_[k] *
                       w.c_[n - k];
            w.c_[n] = acc / (static_cast<double>(n) * c_[0]);
        }
        return w;
    }

    // Series of the derivative (one order shorter, padded with zero).
    Series derivative() const {
        Series r(order());
        for (size_t n = 1; n < c_.size(); ++n)
            r.c_[n - 1] = static_cast<double>(n) * c_[n];
        return r;
    }

    // Value at offset dx from the base point.
    double eval(double dx) const {
        double acc = 0.0;
        for (size_t i = c_.size(); i-- > 0;) acc = acc * dx + c_[i];
        return acc;
    }

    // j-th derivative value at offset dx.
    double deriv(int j, double dx = 0.0) const {
        if (j > order()) return 0.0;
        // coefficients of the j-th derivative series, evaluated by Horner
        double acc = 0.0;
        for (int i = order(); i >= j; --i) {
            double f = 1.0;
            for (int k = 0; k < j; ++k) f *= static_cast<double>(i - k);
            acc = acc * dx + f * c_[static_cast<size_t>(i)];
        }
        return acc;
    }

  private:
    std::vector<double> c_;
};

inline Series operator*(double a, const Series& s) { return s * a; }

}  // namespace rti
