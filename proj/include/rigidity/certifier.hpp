#pragma once

/**
 * @file certifier.hpp
 * @brief Jet-level isometry equations at a point, assembled as kernel computations.
 *
 * With a trivial 1-jet imposed (phi(p) = p, phi' = Id, k(p, r) = r):
 *   level 1:  0 = Dk(W) J01(U,V) + J(phi''(U,W),V) + J(U,phi''(V,W))
 *   level 2:  J(phi'''(U,W1,W2),V) + J(U,phi'''(V,W1,W2)) = -D2k(W1,W2) J01(U,V)
 * Level 2 is the generalized braid system with J' = -J01.
 */

#include "rigidity/gcs.hpp"
#include "rigidity/kernel.hpp"
#include "rigidity/tolerances.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rigidity::certifier {

/// Unknowns "phi2" (n * n(n+1)/2, packed, output last) then "Dk" (n).
LinearSystem level1_equations(const BilinForm& j, const BilinForm& j01);
/// Throws InvalidInput if J01 = 0 (relative to the scale of J).
KernelReport level1_kernel(const BilinForm& j, const BilinForm& j01, const Tolerances& tol = {});
/// Delegates to the generalized braid kernel with J' = -J01; blocks "A" (phi''') and "K" (D2k).
KernelReport level2_kernel(const BilinForm& j, const BilinForm& j01, const Tolerances& tol = {});

KernelReport level1_system(const gcs::GcsChart& c, std::span<const double> p, double r, const Tolerances& tol = {});
KernelReport level2_system(const gcs::GcsChart& c, std::span<const double> p, double r, const Tolerances& tol = {});

/// A normalized kernel vector: largest entry +1, with its residual on the originating rows.
struct Witness {
    Eigen::VectorXd vector;
    double residual = 0.0; ///< max |rows * v| / coefficient scale
    std::vector<UnknownLabel> labels;
};
Witness make_witness(const LinearSystem& system, const KernelReport& report);

struct SampleCertificate {
    double r = 0.0;
    gcs::PointGenericity genericity;
    std::optional<KernelReport> level1; ///< absent when J01 vanishes at the point
    std::string level1_note;
    KernelReport level2;
    std::string verdict; ///< "2-rigid", "non-rigid", "indeterminate", "indeterminate-by-hypothesis"
    std::optional<Witness> witness;
};

struct Certificate {
    std::string structure;
    int n = 0;
    std::vector<double> point;
    gcs::GenericityReport genericity;
    std::vector<SampleCertificate> samples; ///< in the order of r_samples
    std::string verdict;
    Tolerances tol;
};

/// Throws InvalidInput if p is outside the domain or r_samples is empty.
/// `threads` > 1 evaluates samples concurrently; the output does not depend on it.
Certificate gcs_certificate(const gcs::GcsChart& c, std::span<const double> p, const std::vector<double>& r_samples,
                            int grid = gcs::kDefaultGrid, const Tolerances& tol = {}, int threads = 1);

// ------------------------------------------------------------------------------------------
// Lightlike charts, total dimension n with kernel direction d/dt last.

/// Unknown "phi2": all n directions in both slots, values in the n-1 base directions.
/// Rows: g(phi''(U,W),V) + g(U,phi''(V,W)) = 0 for U <= V and all W, g the degenerate metric.
LinearSystem lightlike_step1_equations(const Eigen::MatrixXd& g);
KernelReport lightlike_step1_system(const gcs::LightlikeChart& lc, std::span<const double> p, double t,
                                    const Tolerances& tol = {});

/// phi''' and delta'' with every slot in the n-1 base directions: the generalized braid system
/// on the base with J = g, J' = -g01.
KernelReport lightlike_step2_system(const gcs::LightlikeChart& lc, std::span<const double> p, double t,
                                    const Tolerances& tol = {});

/// Same equations with the W-slots over all n directions (phi''': Sym^3(R^n) -> base,
/// delta'': Sym^2(R^n)). Unknowns "A" then "K". Informational: the d/dt components are
/// not determined by these equations.
LinearSystem lightlike_transverse_equations(const Eigen::MatrixXd& g, const Eigen::MatrixXd& g01);

struct LightlikeCertificate {
    std::string structure;
    int n = 0;
    std::vector<double> point;
    double t = 0.0;
    gcs::PointGenericity genericity;
    gcs::GenericityReport grid_genericity;
    KernelReport step1;
    KernelReport step2;
    KernelReport transverse;
    std::vector<std::string> unconstrained;
    std::string verdict; ///< "(3,1) sub-rigid", "non-sub-rigid", "indeterminate", "withheld-by-hypothesis"
    std::optional<Witness> witness;
    Tolerances tol;
};

LightlikeCertificate lightlike_subrigidity_certificate(const gcs::LightlikeChart& lc, std::span<const double> p,
                                                       double t, int grid = gcs::kDefaultGrid,
                                                       const Tolerances& tol = {});

} // namespace rigidity::certifier
