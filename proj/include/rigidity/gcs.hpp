#pragma once

/**
 * @file gcs.hpp
 * @brief Charts of generalized conformal structures and of lightlike metrics.
 *
 * A GCS chart is a field (x, r) -> a(x, r) of positive-definite forms on R^n,
 * each coefficient an exact rational function. Variables are x^1..x^n followed
 * by r. A lightlike chart on R^n has coordinates (x^1..x^{n-1}, t) and a
 * metric that vanishes on d/dt.
 */

#include "rigidity/multilinear.hpp"
#include "rigidity/polynomial.hpp"
#include "rigidity/tolerances.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rigidity::gcs {

using Interval = std::pair<double, double>;
using FieldMatrix = std::vector<std::vector<RationalField>>;

inline constexpr int kDefaultGrid = 5;

class GcsChart {
public:
    /// Validates symmetry of `a`, nonvanishing denominators with a consistent sign and
    /// positive-definiteness on a `grid`-per-axis sample of domain x interval.
    GcsChart(int n, std::vector<Interval> domain, Interval interval, FieldMatrix a, std::string name = "chart",
             int grid = kDefaultGrid);

    int n() const { return n_; }
    const std::vector<Interval>& domain() const { return domain_; }
    const Interval& interval() const { return interval_; }
    const RationalField& entry(int i, int j) const { return a_[i][j]; }
    const FieldMatrix& entries() const { return a_; }
    const std::string& name() const { return name_; }
    int validation_grid() const { return grid_; }

    bool contains(std::span<const double> x, double r) const;

private:
    int n_;
    std::vector<Interval> domain_;
    Interval interval_;
    FieldMatrix a_;
    std::string name_;
    int grid_;
};

class LightlikeChart {
public:
    /// n is the total dimension. `b` is n x n; its last row and column must be
    /// identically zero and the base block positive-definite on the sample grid.
    LightlikeChart(int n, std::vector<Interval> domain, Interval interval, FieldMatrix b,
                   std::string name = "lightlike_chart", int grid = kDefaultGrid);

    int n() const { return n_; }
    int base_dim() const { return n_ - 1; }
    const std::vector<Interval>& domain() const { return domain_; }
    const Interval& interval() const { return interval_; }
    const RationalField& entry(int i, int j) const { return b_[i][j]; }
    const FieldMatrix& entries() const { return b_; }
    const std::string& name() const { return name_; }
    int validation_grid() const { return grid_; }

    bool contains(std::span<const double> x, double t) const;

private:
    int n_;
    std::vector<Interval> domain_;
    Interval interval_;
    FieldMatrix b_;
    std::string name_;
    int grid_;
};

using AnyChart = std::variant<GcsChart, LightlikeChart>;

/// a(x, r). Throws InvalidInput out of the domain, on a vanishing denominator, or if the
/// form is not positive-definite at the point.
BilinForm eval_metric(const GcsChart& c, std::span<const double> x, double r);
/// The full degenerate n x n matrix b(x, t).
Eigen::MatrixXd eval_metric(const LightlikeChart& c, std::span<const double> x, double t);

/// D^m d_r^l a at a point. One matrix per degree-m multi-index of x-directions
/// (lexicographic, as enumerate_sym_indices); the value on W_1..W_m is the
/// polarized sum.
struct PartialTensor {
    int dim = 0;     ///< matrix size
    int x_dims = 0;  ///< number of x-directions the W-slots range over
    int m = 0;
    int l = 0;
    std::vector<Eigen::MatrixXd> blocks;

    const Eigen::MatrixXd& at(const SymIndex& idx) const;
    /// (D^m d_r^l a)(W_1, ..., W_m) as a matrix.
    Eigen::MatrixXd apply(std::span<const Eigen::VectorXd> w) const;
};

/// Throws InvalidInput for m > 2 or l > 1, and as eval_metric.
PartialTensor eval_partials(const GcsChart& c, std::span<const double> x, double r, int m, int l);
PartialTensor eval_partials(const LightlikeChart& c, std::span<const double> x, double t, int m, int l);

struct GenericityReport {
    int grid = 0;
    int samples = 0;
    bool nowhere_tr = false; ///< d_r a != 0 at every sample
    bool generic = false;    ///< d_r a nondegenerate at every sample
    double worst_min_abs_eig = 0.0;
    std::vector<double> worst_point; ///< (x..., r) where the minimum is attained
    std::optional<std::vector<double>> first_vanishing;  ///< a sample with d_r a = 0
    std::optional<std::vector<double>> first_degenerate; ///< a sample with d_r a degenerate
};

/// Throws InvalidInput for grid < 2.
GenericityReport genericity_report(const GcsChart& c, int grid, const Tolerances& tol = {});
/// Uses the base block of d_t b.
GenericityReport genericity_report(const LightlikeChart& c, int grid, const Tolerances& tol = {});

/// Result of the pointwise check at one (x, r).
struct PointGenericity {
    bool nonzero = false;
    bool nondegenerate = false;
    double min_abs_eig = 0.0;
    Signature signature;
};
PointGenericity point_genericity(const Eigen::MatrixXd& j, const Eigen::MatrixXd& j01, const Tolerances& tol = {});

/// The tautological lightlike metric: b = a on dx-slots, zero on dt.
LightlikeChart lift_to_lightlike(const GcsChart& c);
/// a(x, r) = b(x, t = r). Throws InvalidInput if d_t is not exactly the kernel or if
/// d_t b vanishes identically (transversally Riemannian, no GCS).
GcsChart quotient_to_gcs(const LightlikeChart& lc);

struct CatalogEntry {
    std::string name;
    std::string kind; ///< "gcs" or "lightlike"
    std::string description;
    std::string params;
};
const std::vector<CatalogEntry>& catalog();

/// Throws InvalidInput for an unknown name, unknown or malformed params, or params
/// that violate the structure's hypotheses.
AnyChart builtin(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

/// Chart JSON: {"n", "domain", "interval", "entries": [{"i","j","num","den"}], "kind"?, "grid"?}
/// or {"builtin": name, "params": {...}}.
AnyChart chart_from_json(const nlohmann::json& j);
nlohmann::json chart_to_json(const GcsChart& c);
nlohmann::json chart_to_json(const LightlikeChart& c);

/// Uniform grid with `per_axis` points on each of the given intervals (a single point for lo == hi).
std::vector<std::vector<double>> sample_grid(const std::vector<Interval>& box, int per_axis);

} // namespace rigidity::gcs
