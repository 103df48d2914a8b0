#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rigidity {

// Deterministic sampling on top of mt19937_64. The std:: distributions are
// implementation-defined, so the mapping from raw bits to doubles is done here
// to keep seeded runs identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    int sign() { return (engine_() >> 63) ? 1 : -1; }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    Eigen::MatrixXd normal_matrix(int rows, int cols) {
        Eigen::MatrixXd m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    /// Haar-ish random orthogonal matrix (QR of a Gaussian matrix with sign fix).
    Eigen::MatrixXd orthogonal(int n) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(n, n));
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i)
            if (r(i, i) < 0) q.col(i) *= -1.0;
        return q;
    }

    /// Matrix with singular values in [lo, hi]: U diag(s) V^T.
    Eigen::MatrixXd well_conditioned(int n, double lo = 0.5, double hi = 2.0) {
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = uniform(lo, hi);
        const Eigen::MatrixXd u = orthogonal(n);
        const Eigen::MatrixXd v = orthogonal(n);
        return u * s.asDiagonal() * v.transpose();
    }

    /// Symmetric matrix Q^T diag(±s_i) Q with |s_i| in [lo, hi] and exactly
    /// `negatives` negative eigenvalues.
    Eigen::MatrixXd symmetric_with_signature(int n, int negatives, double lo = 0.5, double hi = 2.0) {
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = uniform(lo, hi) * (i < negatives ? -1.0 : 1.0);
        const Eigen::MatrixXd q = orthogonal(n);
        Eigen::MatrixXd m = q.transpose() * s.asDiagonal() * q;
        return 0.5 * (m + m.transpose());
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rigidity
