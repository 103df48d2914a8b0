#include "rigidity/kernel.hpp"

#include "rigidity/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rigidity {

double LinearSystem::residual(const Eigen::VectorXd& x) const {
    if (x.size() != rows.cols()) throw InvalidInput("LinearSystem::residual: vector has the wrong length");
    if (rows.rows() == 0) return 0.0;
    return (rows * x).cwiseAbs().maxCoeff();
}

std::vector<int> LinearSystem::columns_of(const std::string& tensor) const {
    std::vector<int> cols;
    for (std::size_t c = 0; c < unknowns.size(); ++c)
        if (unknowns[c].tensor == tensor) cols.push_back(static_cast<int>(c));
    return cols;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::rigid: return "rigid";
    case Verdict::non_rigid: return "non_rigid";
    case Verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::optional<int> KernelReport::projection(const std::string& name) const {
    for (const auto& [block, dim] : projections)
        if (block == name) return dim;
    return std::nullopt;
}

KernelReport compute_kernel(const LinearSystem& system, const Tolerances& tol) {
    const int m = system.equation_count();
    const int n = system.unknown_count();
    if (static_cast<int>(system.unknowns.size()) != n)
        throw InvalidInput("compute_kernel: label count does not match column count");

    KernelReport report;
    report.unknowns = n;
    report.equations = m;
    report.tol = tol.rank;

    Eigen::VectorXd sigma;
    Eigen::MatrixXd v;
    if (m > 0 && n > 0) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(system.rows, Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success) throw NumericalFailure("compute_kernel: SVD did not converge");
        sigma = svd.singularValues();
        v = svd.matrixV();
    } else {
        v = Eigen::MatrixXd::Identity(n, n);
    }
    if (!sigma.allFinite()) throw NumericalFailure("compute_kernel: non-finite singular values");

    report.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double cut = tol.rank * sigma_max;
    int rank = 0;
    if (sigma_max > 0.0)
        while (rank < sigma.size() && sigma(rank) >= cut) ++rank;

    report.kernel_dim = n - rank;
    report.kernel_basis = v.rightCols(n - rank);

    if (rank == 0) {
        report.gap_ratio = std::numeric_limits<double>::infinity();
    } else {
        const double noise_floor = std::numeric_limits<double>::epsilon() * std::max(m, n) * sigma_max;
        const double first_dropped = rank < sigma.size() ? sigma(rank) : 0.0;
        report.gap_ratio = sigma(rank - 1) / std::max(first_dropped, noise_floor);
    }

    if (report.gap_ratio < tol.min_gap_ratio)
        report.verdict = Verdict::indeterminate;
    else
        report.verdict = report.kernel_dim == 0 ? Verdict::rigid : Verdict::non_rigid;
    return report;
}

int projected_rank(const Eigen::MatrixXd& basis, const std::vector<int>& indices, double rel_tol) {
    if (basis.cols() == 0 || indices.empty()) return 0;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(indices.size()), basis.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = basis.row(indices[i]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    const auto& s = svd.singularValues();
    // the basis is orthonormal, so the absolute scale of the projection is meaningful
    const double cut = std::max(rel_tol, 1e-12);
    int r = 0;
    while (r < s.size() && s(r) >= cut) ++r;
    return r;
}

void add_projections(KernelReport& report, const LinearSystem& system, const std::vector<std::string>& blocks,
                     double rel_tol) {
    for (const auto& block : blocks)
        report.projections.emplace_back(block, projected_rank(report.kernel_basis, system.columns_of(block), rel_tol));
}

double distance_to_span(const Eigen::MatrixXd& basis, const Eigen::VectorXd& x) {
    const double norm = x.norm();
    if (norm == 0.0) return 0.0;
    if (basis.cols() == 0) return 1.0;
    const Eigen::VectorXd proj = basis * (basis.transpose() * x);
    return (x - proj).norm() / norm;
}

} // namespace rigidity
