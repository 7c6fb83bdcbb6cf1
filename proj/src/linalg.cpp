#include "linalg.hpp"

#include <algorithm>

namespace prlab {

double SymMat::trace() const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += (*this)(i, i);
    return s;
}

double SymMat::max_abs_entry() const {
    double m = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

double SymMat::spectral_norm() const {
    const Eigen e = jacobi_eigen(*this);
    double m = 0.0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(e.values[i]));
    return m;
}

bool SymMat::is_symmetric(double tol) const {
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

SymMat operator+(const SymMat& m, const SymMat& n) {
    SymMat r(m.d);
    for (int k = 0; k < 9; ++k) r.a[k] = m.a[k] + n.a[k];
    return r;
}

SymMat operator-(const SymMat& m, const SymMat& n) {
    SymMat r(m.d);
    for (int k = 0; k < 9; ++k) r.a[k] = m.a[k] - n.a[k];
    return r;
}

SymMat operator*(double s, const SymMat& m) {
    SymMat r(m.d);
    for (int k = 0; k < 9; ++k) r.a[k] = s * m.a[k];
    return r;
}

double trace_product(const SymMat& A, const SymMat& M) {
    double s = 0.0;
    for (int i = 0; i < A.d; ++i)
        for (int j = 0; j < A.d; ++j) s += A(i, j) * M(j, i);
    return s;
}

double quad_form(const SymMat& M, const Vec& v) {
    double s = 0.0;
    for (int i = 0; i < M.d; ++i)
        for (int j = 0; j < M.d; ++j) s += v[i] * M(i, j) * v[j];
    return s;
}

Eigen jacobi_eigen(const SymMat& M, double tol, int max_sweeps) {
    const int d = M.d;
    double a[3][3];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a[i][j] = 0.5 * (M(i, j) + M(j, i));

    const double scale = std::max(1.0, M.max_abs_entry());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
        if (std::sqrt(off) <= tol * scale) break;

        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    Eigen e;
    for (int k = 0; k < d; ++k) {
        e.values[k] = a[k][k];
        for (int i = 0; i < d; ++i) e.vectors[k][i] = v[i][k];
    }
    return e;
}

SymMat from_eigen(int d, const Vec& values, const std::array<Vec, kMaxDim>& vectors) {
    SymMat m(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) += values[k] * vectors[k][i] * vectors[k][j];
    return m;
}

SymMat random_sym(int d, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> U(-scale, scale);
    SymMat m(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) m.set(i, j, U(rng));
    return m;
}

std::array<Vec, kMaxDim> random_rotation(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::array<Vec, kMaxDim> q{};
    for (int k = 0; k < d; ++k) {
        Vec v{};
        for (int i = 0; i < d; ++i) v[i] = N(rng);
        for (int j = 0; j < k; ++j) {
            const double c = dot(v, q[j], d);
            for (int i = 0; i < d; ++i) v[i] -= c * q[j][i];
        }
        const double n = std::sqrt(norm2(v, d));
        for (int i = 0; i < d; ++i) v[i] /= n;
        q[k] = v;
    }
    return q;
}

}  // namespace prlab
