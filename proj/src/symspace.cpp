#include "rigidity/symspace.hpp"

#include "rigidity/errors.hpp"
#include "rigidity/multilinear.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rigidity::symspace {

namespace {

bool is_symmetric(const Eigen::MatrixXd& x) {
    if (x.rows() != x.cols()) return false;
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    return (x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

} // namespace

SpdPoint::SpdPoint(const Eigen::MatrixXd& matrix, double spectral_tol) {
    if (matrix.rows() < 1 || !is_symmetric(matrix)) throw InvalidInput("SpdPoint: matrix must be square and symmetric");
    matrix_ = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (!(ev(0) > 0.0) || ev(0) < spectral_tol * ev(ev.size() - 1))
        throw InvalidInput("SpdPoint: matrix is not positive-definite");
    inverse_ = matrix_.llt().solve(Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols()));
    inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

SpdPoint SpdPoint::pullback(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd p = m.transpose() * matrix_ * m;
    return SpdPoint(0.5 * (p + p.transpose()));
}

SpdCurve::SpdCurve(std::vector<Sample> samples, bool closed) : samples_(std::move(samples)), closed_(closed) {
    if (samples_.empty()) throw InvalidInput("SpdCurve: no samples");
    const int n = samples_.front().point.dim();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (samples_[i].point.dim() != n) throw InvalidInput("SpdCurve: samples have different dimensions");
        if (i > 0 && !(samples_[i].t > samples_[i - 1].t))
            throw InvalidInput("SpdCurve: parameters must increase strictly");
    }
    if (closed_) {
        if (samples_.size() < 3) throw InvalidInput("SpdCurve: a closed curve needs at least 3 samples");
        const auto& first = samples_.front().point.matrix();
        const auto& last = samples_.back().point.matrix();
        const double scale = std::max(1.0, first.cwiseAbs().maxCoeff());
        if ((first - last).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidInput("SpdCurve: closed curve does not return to its first sample");
    }
}

SpdCurve SpdCurve::pullback(const Eigen::MatrixXd& m) const {
    std::vector<Sample> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back({s.t, s.point.pullback(m)});
    if (closed_) out.back().point = out.front().point;
    return SpdCurve(std::move(out), closed_);
}

SpdCurve SpdCurve::rotated(std::size_t shift) const {
    if (!closed_) throw InvalidInput("SpdCurve::rotated: curve is not closed");
    const std::size_t distinct = samples_.size() - 1;
    shift %= distinct;
    const double period = samples_.back().t - samples_.front().t;
    std::vector<Sample> out;
    out.reserve(samples_.size());
    for (std::size_t k = 0; k <= distinct; ++k) {
        const std::size_t src = (shift + k) % distinct;
        const double t = samples_[src].t + (shift + k >= distinct ? period : 0.0);
        out.push_back({t, samples_[src].point});
    }
    return SpdCurve(std::move(out), true);
}

double spd_inner(const SpdPoint& b, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    const int n = b.dim();
    if (x.rows() != n || y.rows() != n || !is_symmetric(x) || !is_symmetric(y))
        throw InvalidInput("spd_inner: tangent vectors must be symmetric matrices of the point's size");
    return (b.inverse() * x * b.inverse() * y).trace();
}

std::vector<Eigen::MatrixXd> tangents(const SpdCurve& c) {
    const auto& s = c.samples();
    const std::size_t count = s.size();
    if (count < 2) throw InvalidInput("tangents: need at least 2 samples");
    std::vector<Eigen::MatrixXd> out(count);

    // three-point derivative at t_mid from (t_prev, t_mid, t_next), any spacing
    const auto central = [](const Eigen::MatrixXd& fp, const Eigen::MatrixXd& f0, const Eigen::MatrixXd& fn,
                            double h1, double h2) -> Eigen::MatrixXd {
        return -h2 / (h1 * (h1 + h2)) * fp + (h2 - h1) / (h1 * h2) * f0 + h1 / (h2 * (h1 + h2)) * fn;
    };

    if (c.closed()) {
        const std::size_t distinct = count - 1;
        const double period = s.back().t - s.front().t;
        for (std::size_t i = 0; i < distinct; ++i) {
            const std::size_t prev = i == 0 ? distinct - 1 : i - 1;
            const double t_prev = i == 0 ? s[prev].t - period : s[prev].t;
            out[i] = central(s[prev].point.matrix(), s[i].point.matrix(), s[i + 1].point.matrix(), s[i].t - t_prev,
                             s[i + 1].t - s[i].t);
        }
        out[distinct] = out[0];
        return out;
    }

    if (count == 2) {
        const Eigen::MatrixXd d = (s[1].point.matrix() - s[0].point.matrix()) / (s[1].t - s[0].t);
        out[0] = d;
        out[1] = d;
        return out;
    }
    for (std::size_t i = 1; i + 1 < count; ++i)
        out[i] = central(s[i - 1].point.matrix(), s[i].point.matrix(), s[i + 1].point.matrix(), s[i].t - s[i - 1].t,
                         s[i + 1].t - s[i].t);
    {
        const double h1 = s[1].t - s[0].t, h2 = s[2].t - s[1].t;
        out[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * s[0].point.matrix() + (h1 + h2) / (h1 * h2) * s[1].point.matrix() -
                 h1 / (h2 * (h1 + h2)) * s[2].point.matrix();
    }
    {
        const std::size_t e = count - 1;
        const double h1 = s[e - 1].t - s[e - 2].t, h2 = s[e].t - s[e - 1].t;
        out[e] = h2 / (h1 * (h1 + h2)) * s[e - 2].point.matrix() - (h1 + h2) / (h1 * h2) * s[e - 1].point.matrix() +
                 (2 * h2 + h1) / (h2 * (h1 + h2)) * s[e].point.matrix();
    }
    return out;
}

std::vector<double> speeds(const SpdCurve& c) {
    const auto tan = tangents(c);
    std::vector<double> out(tan.size());
    for (std::size_t i = 0; i < tan.size(); ++i) {
        const Eigen::MatrixXd sym = 0.5 * (tan[i] + tan[i].transpose());
        out[i] = std::sqrt(std::max(0.0, spd_inner(c.samples()[i].point, sym, sym)));
    }
    return out;
}

namespace {

std::vector<double> cumulative_length(const SpdCurve& c) {
    const auto sp = speeds(c);
    const auto& s = c.samples();
    std::vector<double> cum(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (sp[i - 1] + sp[i]) * (s[i].t - s[i - 1].t);
    return cum;
}

} // namespace

double curve_length(const SpdCurve& c) {
    if (c.size() < 2) throw InvalidInput("curve_length: need at least 2 samples");
    return cumulative_length(c).back();
}

SpdCurve arclength_reparam(const SpdCurve& c, int m) {
    if (m < 2) throw InvalidInput("arclength_reparam: need at least 2 output samples");
    if (c.size() < 2) throw InvalidInput("arclength_reparam: need at least 2 samples");
    const auto cum = cumulative_length(c);
    const double total = cum.back();
    if (!(total > 0.0)) throw InvalidInput("arclength_reparam: curve has zero length");
    const auto& s = c.samples();

    std::vector<SpdCurve::Sample> out;
    out.reserve(static_cast<std::size_t>(m));
    std::size_t seg = 0;
    for (int j = 0; j < m; ++j) {
        const double target = total * static_cast<double>(j) / static_cast<double>(m - 1);
        if (j == m - 1) {
            out.push_back({total, s.back().point});
            break;
        }
        while (seg + 2 < s.size() && cum[seg + 1] < target) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double alpha = span > 0.0 ? std::clamp((target - cum[seg]) / span, 0.0, 1.0) : 0.0;
        const Eigen::MatrixXd mat = (1.0 - alpha) * s[seg].point.matrix() + alpha * s[seg + 1].point.matrix();
        out.push_back({target, SpdPoint(0.5 * (mat + mat.transpose()))});
    }
    if (c.closed()) out.back().point = out.front().point;
    return SpdCurve(std::move(out), c.closed());
}

SpdPoint circle_mean(const SpdCurve& c) {
    if (!c.closed()) throw InvalidInput("circle_mean: curve is not closed");
    const auto sp = speeds(c);
    const auto& s = c.samples();
    const std::size_t distinct = s.size() - 1;
    const double period = s.back().t - s.front().t;

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(c.dim(), c.dim());
    double length = 0.0;
    for (std::size_t i = 0; i < distinct; ++i) {
        const double t_prev = i == 0 ? s[distinct - 1].t - period : s[i - 1].t;
        const double weight = 0.5 * (s[i + 1].t - t_prev) * sp[i];
        acc += weight * s[i].point.matrix();
        length += weight;
    }
    if (!(length > 0.0)) throw InvalidInput("circle_mean: curve has zero length");
    acc /= length;
    return SpdPoint(0.5 * (acc + acc.transpose()));
}

} // namespace rigidity::symspace
