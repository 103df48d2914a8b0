#pragma once

/**
 * @file prolongation.hpp
 * @brief Cartan prolongations of linear subspaces of End(R^n).
 *
 * The d-th prolongation of a subspace h is the space of symmetric (d+1)-linear
 * maps A: R^n x ... x R^n -> R^n such that for every fixed (u_1, ..., u_d) the
 * endomorphism u -> A(u, u_1, ..., u_d) lies in h. Bracket closure of h is
 * never used, so any spanning list is accepted.
 */

#include "rigidity/kernel.hpp"
#include "rigidity/multilinear.hpp"
#include "rigidity/tolerances.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rigidity::prolongation {

/// Matrices are vectorized column-major: X(i, j) sits at j * n + i.
class MatrixAlgebra {
public:
    MatrixAlgebra(int n, std::vector<Eigen::MatrixXd> generators, double rel_tol = Tolerances{}.rank);

    int n() const { return n_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const std::vector<Eigen::MatrixXd>& generators() const { return generators_; }
    /// n^2 x dim, orthonormal columns (Frobenius inner product).
    const Eigen::MatrixXd& basis_vectors() const { return basis_; }
    /// n^2 x (n^2 - dim), orthonormal basis of the Frobenius complement.
    const Eigen::MatrixXd& complement_vectors() const { return complement_; }
    std::vector<Eigen::MatrixXd> basis() const;

    /// Frobenius norm of the component of X orthogonal to the subspace.
    double distance(const Eigen::MatrixXd& x) const;

private:
    int n_;
    std::vector<Eigen::MatrixXd> generators_;
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd complement_;
};

Eigen::VectorXd vectorize(const Eigen::MatrixXd& x);
Eigen::MatrixXd unvectorize(const Eigen::VectorXd& v, int n);

// Catalog.
MatrixAlgebra so(int n);
MatrixAlgebra co(int n);
/// {X : X^T B + B X = 0} for a symmetric B.
MatrixAlgebra orthogonal_algebra(const Eigen::MatrixXd& b);
/// Orthogonal algebra of x_1^2 + ... + x_{n-1}^2 on R^n (kernel along the last axis).
MatrixAlgebra lightlike_orth(int n);
MatrixAlgebra one_param(const Eigen::MatrixXd& r);
/// g h g^-1.
MatrixAlgebra conjugate(const MatrixAlgebra& h, const Eigen::MatrixXd& g);

struct ProlongationSpace {
    int order = 0;
    std::vector<SymTensor> basis;
    int dim = 0;
    KernelReport report;
};

/// Largest packed unknown count prolongation_space will assemble.
inline constexpr std::size_t kUnknownCap = 20000;
inline constexpr int kMaxOrder = 5;

LinearSystem prolongation_system(const MatrixAlgebra& h, int order);

/// Throws InvalidInput for order < 1 or when n*C(n+d, d+1) exceeds kUnknownCap.
ProlongationSpace prolongation_space(const MatrixAlgebra& h, int order, const Tolerances& tol = {});

/// max over basis tuples (u_1..u_d) of the distance of u -> A(u, u_1..u_d) from h,
/// relative to the largest coefficient of A (0 for the zero tensor).
double membership_residual(const MatrixAlgebra& h, const SymTensor& a);

/// A rank-one element W = v a^T of the subspace.
struct Rank1Witness {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd covector; ///< a
    Eigen::VectorXd vector;   ///< v, unit norm
    double ratio = 0.0;       ///< sigma_2 / sigma_1 of `matrix`
};

/// Heuristic search; std::nullopt is not a proof that no rank-one element exists.
std::optional<Rank1Witness> find_rank1(const MatrixAlgebra& h, int trials, std::uint64_t seed,
                                       const Tolerances& tol = {});

/// L_d(x_1, ..., x_{d+1}) = <a,x_1> ... <a,x_{d+1}> v. Throws InvalidInput on zero a or v.
SymTensor rank1_witness_prolongation(const Eigen::VectorXd& a, const Eigen::VectorXd& v, int order);

struct FiniteType {
    int order = 0;
};
struct InfiniteType {
    Rank1Witness witness;
    SymTensor first_prolongation; ///< L_1 built from the witness
};
struct UnknownBeyond {
    int max_order = 0;
};

struct TypeReport {
    std::variant<FiniteType, InfiniteType, UnknownBeyond> result;
    std::vector<int> dims;            ///< dim h_d for d = 0, 1, ... as computed
    std::vector<KernelReport> reports; ///< one per computed order d >= 1
    bool indeterminate = false;       ///< some rank decision had a poor singular-value gap
};

/// Throws InvalidInput for max_order outside [1, kMaxOrder].
TypeReport finite_type(const MatrixAlgebra& h, int max_order, int trials = 16, std::uint64_t seed = 0,
                       const Tolerances& tol = {});

struct StabilizerSample {
    Eigen::MatrixXd point;   ///< SPD b_k
    Eigen::MatrixXd tangent; ///< symmetric t_k != 0
};

/// {X : X^T b_k + b_k X in R t_k for every k}. Throws InvalidInput on an empty list.
MatrixAlgebra curve_stabilizer_algebra(const std::vector<StabilizerSample>& samples, const Tolerances& tol = {});

} // namespace rigidity::prolongation
