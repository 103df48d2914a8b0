#pragma once

// Homogeneous linear systems and SVD-based kernel certificates.

#include "rigidity/multilinear.hpp"
#include "rigidity/tolerances.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace rigidity {

/// Which coefficient a column stands for: tensor name, argument axes (sorted for packed
/// tensors), and output axis (-1 for scalar-valued unknowns).
struct UnknownLabel {
    std::string tensor;
    std::vector<int> axes;
    int output = -1;
};

/// rows * x = 0. One row per scalar constraint, one column per packed unknown.
struct LinearSystem {
    std::vector<UnknownLabel> unknowns;
    Eigen::MatrixXd rows;

    int unknown_count() const { return static_cast<int>(rows.cols()); }
    int equation_count() const { return static_cast<int>(rows.rows()); }
    double coefficient_scale() const { return rows.size() == 0 ? 0.0 : rows.cwiseAbs().maxCoeff(); }
    /// max_i |(rows * x)_i|
    double residual(const Eigen::VectorXd& x) const;
    /// Columns whose label names `tensor`, in order.
    std::vector<int> columns_of(const std::string& tensor) const;
};

enum class Verdict { rigid, non_rigid, indeterminate };

const char* to_string(Verdict v);

struct KernelReport {
    int unknowns = 0;
    int equations = 0;
    std::vector<double> singular_values; ///< descending, min(equations, unknowns) entries
    int kernel_dim = 0;
    Eigen::MatrixXd kernel_basis;        ///< unknowns x kernel_dim, orthonormal columns
    double tol = 0.0;
    double gap_ratio = 0.0;              ///< last kept / max(first dropped, noise floor); +inf if nothing is kept
    Verdict verdict = Verdict::indeterminate;
    /// Dimensions of the kernel projected onto named unknown blocks (e.g. "A", "K").
    std::vector<std::pair<std::string, int>> projections;

    std::optional<int> projection(const std::string& name) const;
};

/// Kernel of a homogeneous system by full SVD with relative cut tol.rank.
KernelReport compute_kernel(const LinearSystem& system, const Tolerances& tol = {});

/// Rank of the rows `indices` of `basis` (the projection of span(basis) onto those coordinates).
int projected_rank(const Eigen::MatrixXd& basis, const std::vector<int>& indices, double rel_tol);

/// Adds projection dimensions for each named block to the report.
void add_projections(KernelReport& report, const LinearSystem& system, const std::vector<std::string>& blocks,
                     double rel_tol);

/// Distance from x to span(basis) (orthonormal columns), relative to |x|.
double distance_to_span(const Eigen::MatrixXd& basis, const Eigen::VectorXd& x);

} // namespace rigidity
