#pragma once

#include "common.hpp"

#include <random>

namespace prlab {

/// Dense symmetric d x d matrix, d <= 3, row-major storage.
struct SymMat {
    int d = 1;
    std::array<double, 9> a{};

    SymMat() = default;
    explicit SymMat(int dim) : d(dim) {}

    double operator()(int i, int j) const { return a[i * 3 + j]; }
    double& operator()(int i, int j) { return a[i * 3 + j]; }

    /// Sets both (i,j) and (j,i).
    void set(int i, int j, double v) {
        a[i * 3 + j] = v;
        a[j * 3 + i] = v;
    }

    static SymMat identity(int dim, double s = 1.0) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = s;
        return m;
    }
    static SymMat diag(int dim, const Vec& v) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = v[i];
        return m;
    }

    double trace() const;
    double max_abs_entry() const;
    /// Largest absolute eigenvalue.
    double spectral_norm() const;
    bool is_symmetric(double tol = 1e-12) const;
};

SymMat operator+(const SymMat& m, const SymMat& n);
SymMat operator-(const SymMat& m, const SymMat& n);
SymMat operator*(double s, const SymMat& m);

/// tr(AM) for symmetric A, M.
double trace_product(const SymMat& A, const SymMat& M);

double quad_form(const SymMat& M, const Vec& v);

struct Eigen {
    Vec values{};
    std::array<Vec, kMaxDim> vectors{};  // vectors[k] is the k-th eigenvector
};

/// Cyclic Jacobi rotations; stops when the off-diagonal Frobenius mass is below tol.
Eigen jacobi_eigen(const SymMat& M, double tol = 1e-13, int max_sweeps = 100);

/// Reassembles sum_k values[k] v_k v_k^T.
SymMat from_eigen(int d, const Vec& values, const std::array<Vec, kMaxDim>& vectors);

/// Random symmetric matrix with entries ~ U(-scale, scale).
SymMat random_sym(int d, std::mt19937_64& rng, double scale = 1.0);

/// Random orthonormal basis via Gram-Schmidt on Gaussian vectors.
std::array<Vec, kMaxDim> random_rotation(int d, std::mt19937_64& rng);

}  // namespace prlab
