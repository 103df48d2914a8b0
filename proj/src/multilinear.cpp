#include "rigidity/multilinear.hpp"

#include "rigidity/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace rigidity {

std::size_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (int i = 1; i <= k; ++i) result = result * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return result;
}

std::vector<SymIndex> enumerate_sym_indices(int n, int d) {
    if (n < 1 || d < 0) throw InvalidInput("enumerate_sym_indices: need n >= 1 and d >= 0");
    std::vector<SymIndex> out;
    out.reserve(binomial(n + d - 1, d));
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    while (true) {
        out.push_back(SymIndex{cur});
        // advance to the next non-decreasing tuple
        int pos = d - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - 1) --pos;
        if (pos < 0) break;
        const int v = cur[static_cast<std::size_t>(pos)] + 1;
        for (int k = pos; k < d; ++k) cur[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

std::size_t sym_index_rank(int n, std::span<const int> s) {
    const int len = static_cast<int>(s.size());
    std::size_t rank = 0;
    int lo = 0;
    for (int k = 0; k < len; ++k) {
        const int rest = len - k - 1;
        for (int v = lo; v < s[static_cast<std::size_t>(k)]; ++v) rank += binomial(n - v + rest - 1, rest);
        lo = s[static_cast<std::size_t>(k)];
    }
    return rank;
}

std::size_t sym_index_rank_unsorted(int n, std::span<const int> entries) {
    std::vector<int> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end());
    return sym_index_rank(n, sorted);
}

std::size_t permutation_count(const SymIndex& idx) {
    std::size_t count = 1;
    std::size_t run = 0;
    for (std::size_t i = 0; i < idx.entries.size(); ++i) {
        run = (i > 0 && idx.entries[i] == idx.entries[i - 1]) ? run + 1 : 1;
        count = count * (i + 1) / run;
    }
    return count;
}

std::size_t FullTensor::offset(std::span<const int> axes, int out) const {
    std::size_t off = 0;
    for (int a : axes) off = off * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    return off * static_cast<std::size_t>(outputs()) + static_cast<std::size_t>(out);
}

SymTensor::SymTensor(int n, int degree, Codomain codomain)
    : n_(n), degree_(degree), codomain_(codomain), packed_(binomial(n + degree - 1, degree)) {
    if (n < 1 || degree < 0) throw InvalidInput("SymTensor: need n >= 1 and degree >= 0");
    coeffs_.assign(packed_ * static_cast<std::size_t>(outputs()), 0.0);
}

SymTensor::SymTensor(int n, int degree, Codomain codomain, std::vector<double> coeffs) : SymTensor(n, degree, codomain) {
    if (coeffs.size() != coeffs_.size())
        throw InvalidInput("SymTensor: expected " + std::to_string(coeffs_.size()) + " coefficients, got " +
                           std::to_string(coeffs.size()));
    coeffs_ = std::move(coeffs);
}

double SymTensor::coeff(const SymIndex& idx, int out) const { return coeff(sym_index_rank(n_, idx.entries), out); }

double& SymTensor::coeff(const SymIndex& idx, int out) { return coeff(sym_index_rank(n_, idx.entries), out); }

Eigen::VectorXd SymTensor::evaluate(std::span<const Eigen::VectorXd> args) const {
    if (static_cast<int>(args.size()) != degree_) throw InvalidInput("SymTensor::evaluate: wrong number of arguments");
    for (const auto& a : args)
        if (a.size() != n_) throw InvalidInput("SymTensor::evaluate: argument dimension mismatch");

    Eigen::VectorXd result = Eigen::VectorXd::Zero(outputs());
    const auto indices = enumerate_sym_indices(n_, degree_);
    std::vector<int> perm;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        perm = indices[k].entries;
        // sum over the distinct arrangements of the multiset; perm starts sorted
        double weight = 0.0;
        do {
            double prod = 1.0;
            for (int slot = 0; slot < degree_; ++slot)
                prod *= args[static_cast<std::size_t>(slot)](perm[static_cast<std::size_t>(slot)]);
            weight += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int o = 0; o < outputs(); ++o) result(o) += coeff(k, o) * weight;
    }
    return result;
}

double SymTensor::evaluate_scalar(std::span<const Eigen::VectorXd> args) const {
    if (codomain_ != Codomain::scalar) throw InvalidInput("evaluate_scalar on a vector-valued tensor");
    return evaluate(args)(0);
}

double SymTensor::max_abs() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Eigen::VectorXd evaluate_full(const FullTensor& t, std::span<const Eigen::VectorXd> args) {
    if (static_cast<int>(args.size()) != t.degree) throw InvalidInput("evaluate_full: wrong number of arguments");
    Eigen::VectorXd result = Eigen::VectorXd::Zero(t.outputs());
    std::vector<int> axes(static_cast<std::size_t>(t.degree), 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(t.n, t.degree) + 0.5);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int s = t.degree - 1; s >= 0; --s) {
            axes[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(t.n));
            rem /= static_cast<std::size_t>(t.n);
        }
        double prod = 1.0;
        for (int s = 0; s < t.degree; ++s) prod *= args[static_cast<std::size_t>(s)](axes[static_cast<std::size_t>(s)]);
        for (int o = 0; o < t.outputs(); ++o) result(o) += t.data[t.offset(axes, o)] * prod;
    }
    return result;
}

namespace {

// Calls fn(axes) for every full index tuple in row-major order.
template <typename Fn>
void for_each_tuple(int n, int degree, Fn&& fn) {
    std::vector<int> axes(static_cast<std::size_t>(degree), 0);
    while (true) {
        fn(std::span<const int>(axes));
        int pos = degree - 1;
        while (pos >= 0 && axes[static_cast<std::size_t>(pos)] == n - 1) {
            axes[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) return;
        ++axes[static_cast<std::size_t>(pos)];
    }
}

} // namespace

FullTensor to_full(const SymTensor& t) {
    FullTensor full{t.dim(), t.degree(), t.codomain(), {}};
    full.data.assign(static_cast<std::size_t>(std::pow(t.dim(), t.degree()) + 0.5) * static_cast<std::size_t>(t.outputs()),
                     0.0);
    for_each_tuple(t.dim(), t.degree(), [&](std::span<const int> axes) {
        const std::size_t k = sym_index_rank_unsorted(t.dim(), axes);
        for (int o = 0; o < t.outputs(); ++o) full.data[full.offset(axes, o)] = t.coeff(k, o);
    });
    return full;
}

SymTensor symmetrize(const FullTensor& t) {
    const std::size_t expected =
        static_cast<std::size_t>(std::pow(t.n, t.degree) + 0.5) * static_cast<std::size_t>(t.outputs());
    if (t.n < 1 || t.degree < 0 || t.data.size() != expected)
        throw InvalidInput("symmetrize: data has " + std::to_string(t.data.size()) + " entries, expected " +
                           std::to_string(expected));
    SymTensor out(t.n, t.degree, t.codomain);
    const auto indices = enumerate_sym_indices(t.n, t.degree);
    std::vector<int> perm;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        perm = indices[k].entries;
        // every distinct arrangement occurs equally often among all d! permutations
        std::size_t count = 0;
        std::vector<double> sums(static_cast<std::size_t>(t.outputs()), 0.0);
        do {
            ++count;
            for (int o = 0; o < t.outputs(); ++o) sums[static_cast<std::size_t>(o)] += t.data[t.offset(perm, o)];
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int o = 0; o < t.outputs(); ++o)
            out.coeff(k, o) = sums[static_cast<std::size_t>(o)] / static_cast<double>(count);
    }
    return out;
}

SymTensor pushforward(const SymTensor& t, const Eigen::MatrixXd& m) {
    const int n = t.dim();
    if (m.rows() != n || m.cols() != n) throw InvalidInput("pushforward: map has the wrong size");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0 || s(n - 1) < 1e-12 * s(0)) throw InvalidInput("pushforward: map is singular");

    const bool vector_valued = t.codomain() == Codomain::vector;
    const Eigen::MatrixXd arg_map = vector_valued ? Eigen::MatrixXd(m.inverse()) : m;

    SymTensor out(n, t.degree(), t.codomain());
    const auto indices = enumerate_sym_indices(n, t.degree());
    std::vector<Eigen::VectorXd> args(static_cast<std::size_t>(t.degree()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        for (int slot = 0; slot < t.degree(); ++slot)
            args[static_cast<std::size_t>(slot)] = arg_map.col(indices[k].entries[static_cast<std::size_t>(slot)]);
        Eigen::VectorXd value = t.evaluate(args);
        if (vector_valued) value = m * value;
        for (int o = 0; o < t.outputs(); ++o) out.coeff(k, o) = value(o);
    }
    return out;
}

BilinForm::BilinForm(const Eigen::MatrixXd& matrix, double spectral_tol) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) throw InvalidInput("BilinForm: matrix must be square");
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidInput("BilinForm: matrix is not symmetric");
    matrix_ = 0.5 * (matrix + matrix.transpose());
    signature_ = form_signature(matrix_, spectral_tol);
}

BilinForm BilinForm::identity(int n) { return BilinForm(Eigen::MatrixXd::Identity(n, n)); }

BilinForm BilinForm::diagonal(const Eigen::VectorXd& d) { return BilinForm(Eigen::MatrixXd(d.asDiagonal())); }

SymTensor BilinForm::as_tensor() const {
    const int n = dim();
    SymTensor t(n, 2, Codomain::scalar);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) t.coeff(SymIndex{{i, j}}) = matrix_(i, j);
    return t;
}

Signature form_signature(const Eigen::MatrixXd& symmetric, double tol) {
    const int n = static_cast<int>(symmetric.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("form_signature: eigen-decomposition failed");
    const auto& ev = es.eigenvalues();
    const double max_abs = ev.cwiseAbs().maxCoeff();
    Signature sig;
    if (max_abs == 0.0) {
        sig.zero = n;
        return sig;
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(ev(i)) < tol * max_abs)
            ++sig.zero;
        else if (ev(i) > 0)
            ++sig.positive;
        else
            ++sig.negative;
    }
    return sig;
}

Signature form_signature(const BilinForm& j, double tol) { return form_signature(j.matrix(), tol); }

} // namespace rigidity
