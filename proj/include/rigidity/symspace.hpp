#pragma once

/**
 * @file symspace.hpp
 * @brief Canonical Riemannian geometry of the cone of positive-definite forms.
 *
 * Tangent vectors at b are symmetric matrices, paired by
 *     <X, Y>_b = trace(b^-1 X b^-1 Y).
 * GL(n) acts by b -> M^T b M and is isometric. Curves arrive as samples;
 * tangents come from three-point finite differences and integrals from the
 * trapezoidal rule on the given grid.
 */

#include "rigidity/tolerances.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace rigidity::symspace {

class SpdPoint {
public:
    /// Throws InvalidInput if `matrix` is not symmetric positive-definite.
    explicit SpdPoint(const Eigen::MatrixXd& matrix, double spectral_tol = Tolerances{}.spectral);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::MatrixXd& inverse() const { return inverse_; }

    /// M^T b M.
    SpdPoint pullback(const Eigen::MatrixXd& m) const;

private:
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd inverse_;
};

class SpdCurve {
public:
    struct Sample {
        double t;
        SpdPoint point;
    };

    /// Parameters must increase strictly; a closed curve must end where it starts (to 1e-10).
    SpdCurve(std::vector<Sample> samples, bool closed);

    const std::vector<Sample>& samples() const { return samples_; }
    bool closed() const { return closed_; }
    std::size_t size() const { return samples_.size(); }
    int dim() const { return samples_.front().point.dim(); }

    /// Sample-wise M^T c(t) M.
    SpdCurve pullback(const Eigen::MatrixXd& m) const;
    /// Closed curves only: start the loop at sample `shift` (parameters stay increasing).
    SpdCurve rotated(std::size_t shift) const;

private:
    std::vector<Sample> samples_;
    bool closed_;
};

/// trace(b^-1 X b^-1 Y). Throws InvalidInput if X or Y is not symmetric of matching size.
double spd_inner(const SpdPoint& b, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Finite-difference tangents at every sample (periodic for closed curves).
std::vector<Eigen::MatrixXd> tangents(const SpdCurve& c);

/// Speed sqrt(<c', c'>) at every sample.
std::vector<double> speeds(const SpdCurve& c);

/// Trapezoidal length. Throws InvalidInput with fewer than 2 samples.
double curve_length(const SpdCurve& c);

/// m samples equally spaced in arc length; output parameters are arc lengths in [0, l].
/// Throws InvalidInput for a zero-length curve or m < 2.
SpdCurve arclength_reparam(const SpdCurve& c, int m);

/// (1/l) * integral of f over the arc-length parameterization of a closed curve.
/// Throws InvalidInput for open or zero-length curves.
SpdPoint circle_mean(const SpdCurve& c);

} // namespace rigidity::symspace
