#pragma once

/**
 * @file multilinear.hpp
 * @brief Packed storage for fully symmetric multilinear maps on R^n.
 *
 * A degree-d symmetric tensor is stored once per multiset of axes (a SymIndex),
 * in lexicographic order. The stored coefficient is the value of the full tensor
 * at any arrangement of that multiset, so evaluation has to sum over the
 * distinct permutations of each index. Vector-valued tensors keep the output
 * axis last: coefficient (k, o) lives at k * n + o.
 */

#include "rigidity/tolerances.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace rigidity {

/// Binomial coefficient C(n, k); 0 when k < 0 or k > n.
std::size_t binomial(int n, int k);

/// Non-decreasing tuple of axis indices.
struct SymIndex {
    std::vector<int> entries;

    int degree() const { return static_cast<int>(entries.size()); }
    friend bool operator==(const SymIndex&, const SymIndex&) = default;
    friend auto operator<=>(const SymIndex&, const SymIndex&) = default;
};

/// All SymIndex of degree d over n axes, lexicographically ordered. Length C(n+d-1, d).
std::vector<SymIndex> enumerate_sym_indices(int n, int d);

/// Position of a (sorted) index tuple in the enumeration of enumerate_sym_indices(n, size).
std::size_t sym_index_rank(int n, std::span<const int> sorted_entries);

/// Position of an arbitrary (unsorted) tuple; sorts a copy first.
std::size_t sym_index_rank_unsorted(int n, std::span<const int> entries);

/// Number of distinct arrangements of the multiset.
std::size_t permutation_count(const SymIndex& idx);

enum class Codomain { scalar, vector };

/// Dense full (unpacked) coefficient array, row-major over (i_1, ..., i_d, out).
struct FullTensor {
    int n = 0;
    int degree = 0;
    Codomain codomain = Codomain::scalar;
    std::vector<double> data;

    int outputs() const { return codomain == Codomain::vector ? n : 1; }
    std::size_t offset(std::span<const int> axes, int out = 0) const;
};

class SymTensor {
public:
    SymTensor(int n, int degree, Codomain codomain);
    SymTensor(int n, int degree, Codomain codomain, std::vector<double> coeffs);

    int dim() const { return n_; }
    int degree() const { return degree_; }
    Codomain codomain() const { return codomain_; }
    int outputs() const { return codomain_ == Codomain::vector ? n_ : 1; }
    std::size_t packed_size() const { return packed_; }

    double coeff(std::size_t packed_index, int out = 0) const { return coeffs_[packed_index * outputs() + out]; }
    double& coeff(std::size_t packed_index, int out = 0) { return coeffs_[packed_index * outputs() + out]; }
    double coeff(const SymIndex& idx, int out = 0) const;
    double& coeff(const SymIndex& idx, int out = 0);

    std::span<const double> coeffs() const { return coeffs_; }
    Eigen::Map<const Eigen::VectorXd> as_vector() const {
        return {coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size())};
    }

    /// Value on `degree()` arguments. Scalar tensors return a length-1 vector.
    Eigen::VectorXd evaluate(std::span<const Eigen::VectorXd> args) const;
    double evaluate_scalar(std::span<const Eigen::VectorXd> args) const;

    double max_abs() const;

private:
    int n_;
    int degree_;
    Codomain codomain_;
    std::size_t packed_;
    std::vector<double> coeffs_;
};

/// Full-array evaluation, independent of the packed path.
Eigen::VectorXd evaluate_full(const FullTensor& t, std::span<const Eigen::VectorXd> args);

FullTensor to_full(const SymTensor& t);

/// Average over all argument permutations. Throws InvalidInput on a size mismatch.
SymTensor symmetrize(const FullTensor& t);

/// Change of frame by an invertible M.
/// Scalar forms pull back: result(u...) = T(Mu, ...).
/// Vector-valued maps conjugate: result = M o T o (M^-1, ..., M^-1).
/// Throws InvalidInput if M is singular or of the wrong size.
SymTensor pushforward(const SymTensor& t, const Eigen::MatrixXd& m);

struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;

    bool nondegenerate() const { return zero == 0; }
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Symmetric bilinear form on R^n. Storage is exactly symmetric.
class BilinForm {
public:
    /// Throws InvalidInput if `matrix` is not square or not symmetric to rounding.
    explicit BilinForm(const Eigen::MatrixXd& matrix, double spectral_tol = Tolerances{}.spectral);

    static BilinForm identity(int n);
    static BilinForm diagonal(const Eigen::VectorXd& d);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Signature& signature() const { return signature_; }
    int rank() const { return signature_.positive + signature_.negative; }
    bool nondegenerate() const { return signature_.nondegenerate(); }

    double operator()(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return u.dot(matrix_ * v); }

    SymTensor as_tensor() const;

private:
    Eigen::MatrixXd matrix_;
    Signature signature_;
};

/// Eigenvalue counts (positive, negative, zero) with |lambda| < tol * max|lambda| counted as zero.
Signature form_signature(const Eigen::MatrixXd& symmetric, double tol = Tolerances{}.spectral);
Signature form_signature(const BilinForm& j, double tol = Tolerances{}.spectral);

} // namespace rigidity
