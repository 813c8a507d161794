#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "degel/errors.hpp"

namespace degel {

using Vector = std::vector<double>;

/// Dense symmetric n-by-n matrix, row-major storage.
class SymMat {
  public:
    SymMat() = default;
    explicit SymMat(int n, double fill = 0.0) : n_(n), a_(static_cast<size_t>(n) * n, fill) {}

    static SymMat identity(int n) {
        SymMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// e ⊗ e for a (not necessarily unit) vector e.
    static SymMat outer(const Vector& e) {
        SymMat m(static_cast<int>(e.size()));
        for (int i = 0; i < m.n_; ++i)
            for (int j = 0; j < m.n_; ++j) m(i, j) = e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)];
        return m;
    }

    int n() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    SymMat& axpy(double c, const SymMat& other) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += c * other.a_[i];
        return *this;
    }

    SymMat& scale(double c) {
        for (auto& v : a_) v *= c;
        return *this;
    }

    /// pᵀ M p.
    double quad(const Vector& p) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
            double row = 0.0;
            for (int j = 0; j < n_; ++j) row += (*this)(i, j) * p[static_cast<size_t>(j)];
            s += p[static_cast<size_t>(i)] * row;
        }
        return s;
    }

  private:
    int n_ = 0;
    std::vector<double> a_;
};

inline double norm2(const Vector& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

/// Eigenvalues of a symmetric matrix, ascending. Closed form for n<=3,
/// cyclic Jacobi sweeps otherwise (plenty for the small dimensions used here).
Vector sym_eigenvalues(const SymMat& m);

} // namespace degel
