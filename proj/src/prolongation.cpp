#include "rigidity/prolongation.hpp"

#include "rigidity/errors.hpp"
#include "rigidity/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace rigidity::prolongation {

Eigen::VectorXd vectorize(const Eigen::MatrixXd& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

Eigen::MatrixXd unvectorize(const Eigen::VectorXd& v, int n) { return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n); }

MatrixAlgebra::MatrixAlgebra(int n, std::vector<Eigen::MatrixXd> generators, double rel_tol)
    : n_(n), generators_(std::move(generators)) {
    if (n < 1) throw InvalidInput("MatrixAlgebra: n must be >= 1");
    const int nn = n * n;
    for (const auto& g : generators_)
        if (g.rows() != n || g.cols() != n)
            throw InvalidInput("MatrixAlgebra: generator is not " + std::to_string(n) + "x" + std::to_string(n));

    if (generators_.empty()) {
        basis_ = Eigen::MatrixXd::Zero(nn, 0);
        complement_ = Eigen::MatrixXd::Identity(nn, nn);
        return;
    }
    Eigen::MatrixXd stacked(nn, static_cast<Eigen::Index>(generators_.size()));
    for (std::size_t k = 0; k < generators_.size(); ++k) stacked.col(static_cast<Eigen::Index>(k)) = vectorize(generators_[k]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    int rank = 0;
    if (s.size() > 0 && s(0) > 0.0)
        while (rank < s.size() && s(rank) >= rel_tol * s(0)) ++rank;
    basis_ = svd.matrixU().leftCols(rank);
    complement_ = svd.matrixU().rightCols(nn - rank);
}

std::vector<Eigen::MatrixXd> MatrixAlgebra::basis() const {
    std::vector<Eigen::MatrixXd> out;
    for (Eigen::Index k = 0; k < basis_.cols(); ++k) out.push_back(unvectorize(basis_.col(k), n_));
    return out;
}

double MatrixAlgebra::distance(const Eigen::MatrixXd& x) const {
    if (complement_.cols() == 0) return 0.0;
    return (complement_.transpose() * vectorize(x)).norm();
}

MatrixAlgebra so(int n) {
    std::vector<Eigen::MatrixXd> gens;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = -1.0;
            gens.push_back(e);
        }
    return MatrixAlgebra(n, std::move(gens));
}

MatrixAlgebra co(int n) {
    auto gens = so(n).generators();
    gens.push_back(Eigen::MatrixXd::Identity(n, n));
    return MatrixAlgebra(n, std::move(gens));
}

MatrixAlgebra orthogonal_algebra(const Eigen::MatrixXd& b) {
    const int n = static_cast<int>(b.rows());
    if (b.cols() != n) throw InvalidInput("orthogonal_algebra: form must be square");
    // rows: (X^T B + B X)_{ij} for i <= j, columns: vec(X)
    const int npairs = n * (n + 1) / 2;
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(npairs, n * n);
    int row = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++row)
            for (int m = 0; m < n; ++m) {
                rows(row, i * n + m) += b(m, j); // X(m,i) B(m,j)
                rows(row, j * n + m) += b(i, m); // B(i,m) X(m,j)
            }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    if (s.size() > 0 && s(0) > 0.0)
        while (rank < s.size() && s(rank) >= Tolerances{}.rank * s(0)) ++rank;
    std::vector<Eigen::MatrixXd> gens;
    for (int k = rank; k < n * n; ++k) gens.push_back(unvectorize(svd.matrixV().col(k), n));
    return MatrixAlgebra(n, std::move(gens));
}

MatrixAlgebra lightlike_orth(int n) {
    if (n < 2) throw InvalidInput("lightlike_orth: n must be >= 2");
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    d(n - 1) = 0.0;
    return orthogonal_algebra(d.asDiagonal());
}

MatrixAlgebra one_param(const Eigen::MatrixXd& r) {
    if (r.rows() != r.cols()) throw InvalidInput("one_param: R must be square");
    return MatrixAlgebra(static_cast<int>(r.rows()), {r});
}

MatrixAlgebra conjugate(const MatrixAlgebra& h, const Eigen::MatrixXd& g) {
    const Eigen::MatrixXd ginv = g.inverse();
    std::vector<Eigen::MatrixXd> gens;
    for (const auto& x : h.generators()) gens.push_back(g * x * ginv);
    return MatrixAlgebra(h.n(), std::move(gens));
}

namespace {

void check_order(int n, int order) {
    if (order < 1) throw InvalidInput("prolongation: order must be >= 1");
    const std::size_t unknowns = static_cast<std::size_t>(n) * binomial(n + order, order + 1);
    if (order > 64 || unknowns > kUnknownCap)
        throw InvalidInput("prolongation: " + std::to_string(unknowns) + " unknowns exceed the cap of " +
                           std::to_string(kUnknownCap));
}

// The matrix of u -> A(u, s_1..s_d) for a fixed sorted tuple s.
Eigen::MatrixXd partial_endomorphism(const SymTensor& a, const SymIndex& s) {
    const int n = a.dim();
    Eigen::MatrixXd x(n, n);
    std::vector<int> full(s.entries.size() + 1);
    for (int u = 0; u < n; ++u) {
        std::copy(s.entries.begin(), s.entries.end(), full.begin());
        full.back() = u;
        const std::size_t k = sym_index_rank_unsorted(n, full);
        for (int o = 0; o < n; ++o) x(o, u) = a.coeff(k, o);
    }
    return x;
}

double ratio_of(const Eigen::MatrixXd& w) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const auto& s = svd.singularValues();
    if (s.size() < 2) return 0.0;
    if (s(0) == 0.0) return 1.0;
    return s(1) / s(0);
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& basis, const Eigen::VectorXd& c) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t j = 0; j < basis.size(); ++j) w += c(static_cast<Eigen::Index>(j)) * basis[j];
    return w;
}

// Alternating projection between span(h) and the rank-one matrices, then a
// Gauss-Newton polish on W(c) - v a^T = 0 with |c| = 1.
Eigen::VectorXd refine_rank1(const MatrixAlgebra& h, const std::vector<Eigen::MatrixXd>& basis, Eigen::VectorXd c,
                             double target) {
    const int n = h.n();
    const int k = static_cast<int>(basis.size());
    c.normalize();
    for (int it = 0; it < 300; ++it) {
        const Eigen::MatrixXd w = combine(basis, c);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        if (s(0) == 0.0) return c;
        if (s(1) / s(0) < 1e-6) break;
        const Eigen::MatrixXd r1 = s(0) * svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
        Eigen::VectorXd next = h.basis_vectors().transpose() * vectorize(r1);
        if (next.norm() == 0.0) return c;
        c = next.normalized();
    }

    Eigen::MatrixXd w = combine(basis, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd0(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s0 = std::sqrt(svd0.singularValues()(0));
    Eigen::VectorXd v = s0 * svd0.matrixU().col(0);
    Eigen::VectorXd a = s0 * svd0.matrixV().col(0);

    const int unknowns = k + 2 * n;
    for (int it = 0; it < 50; ++it) {
        w = combine(basis, c);
        if (ratio_of(w) < 0.01 * target) break;
        Eigen::VectorXd f(n * n + 1);
        f.head(n * n) = vectorize(w - v * a.transpose());
        f(n * n) = c.squaredNorm() - 1.0;
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n * n + 1, unknowns);
        for (int j = 0; j < k; ++j) jac.col(j).head(n * n) = vectorize(basis[static_cast<std::size_t>(j)]);
        for (int col = 0; col < n; ++col)
            for (int row = 0; row < n; ++row) {
                const int e = col * n + row;
                jac(e, k + col) = -v(row);     // d/da_col
                jac(e, k + n + row) = -a(col); // d/dv_row
            }
        jac.row(n * n).head(k) = 2.0 * c.transpose();
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
        c += step.head(k);
        a += step.segment(k, n);
        v += step.tail(n);
        if (!c.allFinite() || c.norm() == 0.0) break;
    }
    return c.normalized();
}

} // namespace

LinearSystem prolongation_system(const MatrixAlgebra& h, int order) {
    const int n = h.n();
    check_order(n, order);
    LinearSystem sys;
    for (const auto& idx : enumerate_sym_indices(n, order + 1))
        for (int o = 0; o < n; ++o) sys.unknowns.push_back({"A", idx.entries, o});

    const Eigen::MatrixXd& comp = h.complement_vectors();
    const auto tuples = enumerate_sym_indices(n, order);
    const Eigen::Index per_tuple = comp.cols();
    sys.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tuples.size()) * per_tuple,
                                     static_cast<Eigen::Index>(sys.unknowns.size()));
    std::vector<int> full(static_cast<std::size_t>(order + 1));
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        const Eigen::Index row0 = static_cast<Eigen::Index>(t) * per_tuple;
        for (int u = 0; u < n; ++u) {
            std::copy(tuples[t].entries.begin(), tuples[t].entries.end(), full.begin());
            full.back() = u;
            const auto k = static_cast<Eigen::Index>(sym_index_rank_unsorted(n, full));
            // entry X(o, u) of the partial endomorphism is the unknown (k, o)
            for (int o = 0; o < n; ++o)
                sys.rows.block(row0, k * n + o, per_tuple, 1) += comp.row(u * n + o).transpose();
        }
    }
    return sys;
}

ProlongationSpace prolongation_space(const MatrixAlgebra& h, int order, const Tolerances& tol) {
    const LinearSystem sys = prolongation_system(h, order);
    ProlongationSpace space;
    space.order = order;
    space.report = compute_kernel(sys, tol);
    space.dim = space.report.kernel_dim;
    const Eigen::MatrixXd& kb = space.report.kernel_basis;
    for (Eigen::Index c = 0; c < kb.cols(); ++c) {
        std::vector<double> coeffs(kb.col(c).data(), kb.col(c).data() + kb.rows());
        space.basis.emplace_back(h.n(), order + 1, Codomain::vector, std::move(coeffs));
    }
    return space;
}

double membership_residual(const MatrixAlgebra& h, const SymTensor& a) {
    if (a.codomain() != Codomain::vector || a.dim() != h.n() || a.degree() < 1)
        throw InvalidInput("membership_residual: expected a vector-valued tensor on R^n of degree >= 1");
    const double scale = a.max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& s : enumerate_sym_indices(a.dim(), a.degree() - 1))
        worst = std::max(worst, h.distance(partial_endomorphism(a, s)));
    return worst / scale;
}

std::optional<Rank1Witness> find_rank1(const MatrixAlgebra& h, int trials, std::uint64_t seed, const Tolerances& tol) {
    if (trials < 1) throw InvalidInput("find_rank1: trials must be >= 1");
    const int k = h.dim();
    if (k == 0) return std::nullopt;
    const auto basis = h.basis();

    // coefficient grid {-1,0,1}^k up to sign; random sign vectors once it gets large
    std::vector<Eigen::VectorXd> grid;
    if (k <= 8) {
        int total = 1;
        for (int i = 0; i < k; ++i) total *= 3;
        for (int code = 1; code < total; ++code) {
            Eigen::VectorXd c(k);
            int rem = code;
            for (int i = 0; i < k; ++i) {
                c(i) = static_cast<double>(rem % 3) - 1.0;
                rem /= 3;
            }
            int first = 0;
            while (c(first) == 0.0) ++first;
            if (c(first) > 0) grid.push_back(c);
        }
    } else {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        for (int i = 0; i < 4096; ++i) {
            Eigen::VectorXd c(k);
            for (int j = 0; j < k; ++j) c(j) = static_cast<double>(static_cast<int>(rng.uniform() * 3.0) - 1);
            if (c.norm() > 0) grid.push_back(c);
        }
    }

    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t g = 0; g < grid.size(); ++g) ranked.emplace_back(ratio_of(combine(basis, grid[g])), g);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<Eigen::VectorXd> starts;
    for (std::size_t i = 0; i < std::min<std::size_t>(ranked.size(), 8); ++i) starts.push_back(grid[ranked[i].second]);
    for (int t = 0; t < trials; ++t) {
        Rng rng(seed + static_cast<std::uint64_t>(t));
        starts.push_back(rng.normal_vector(k));
    }

    for (const auto& start : starts) {
        Eigen::VectorXd c = start.normalized();
        if (ratio_of(combine(basis, c)) >= tol.rank_one) c = refine_rank1(h, basis, c, tol.rank_one);
        const Eigen::MatrixXd w = combine(basis, c);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        if (s(0) == 0.0) continue;
        const double ratio = s.size() > 1 ? s(1) / s(0) : 0.0;
        if (ratio < tol.rank_one) {
            Rank1Witness wit;
            wit.vector = svd.matrixU().col(0);
            wit.covector = s(0) * svd.matrixV().col(0);
            wit.matrix = w;
            wit.ratio = ratio;
            return wit;
        }
    }
    return std::nullopt;
}

SymTensor rank1_witness_prolongation(const Eigen::VectorXd& a, const Eigen::VectorXd& v, int order) {
    if (a.size() != v.size() || a.size() < 1) throw InvalidInput("rank1_witness_prolongation: a and v must match");
    if (a.norm() == 0.0) throw InvalidInput("rank1_witness_prolongation: a must be nonzero");
    if (v.norm() == 0.0) throw InvalidInput("rank1_witness_prolongation: v must be nonzero");
    if (order < 1) throw InvalidInput("rank1_witness_prolongation: order must be >= 1");
    const int n = static_cast<int>(a.size());
    SymTensor l(n, order + 1, Codomain::vector);
    const auto indices = enumerate_sym_indices(n, order + 1);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        double prod = 1.0;
        for (int axis : indices[k].entries) prod *= a(axis);
        for (int o = 0; o < n; ++o) l.coeff(k, o) = prod * v(o);
    }
    return l;
}

TypeReport finite_type(const MatrixAlgebra& h, int max_order, int trials, std::uint64_t seed, const Tolerances& tol) {
    if (max_order < 1 || max_order > kMaxOrder)
        throw InvalidInput("finite_type: max_order must be in [1, " + std::to_string(kMaxOrder) + "]");
    TypeReport out;
    out.dims.push_back(h.dim());
    if (h.dim() == 0) {
        out.result = FiniteType{0};
        return out;
    }

    int first_zero = -1;
    for (int d = 1; d <= max_order; ++d) {
        ProlongationSpace space = prolongation_space(h, d, tol);
        out.dims.push_back(space.dim);
        if (space.report.verdict == Verdict::indeterminate) out.indeterminate = true;
        out.reports.push_back(std::move(space.report));
        if (space.dim == 0 && first_zero < 0) first_zero = d;
        if (space.dim != 0 && first_zero > 0)
            throw NumericalFailure("finite_type: prolongation " + std::to_string(d) + " is nonzero after order " +
                                   std::to_string(first_zero) + " vanished");
    }
    if (first_zero > 0) {
        out.result = FiniteType{first_zero};
        return out;
    }
    if (auto wit = find_rank1(h, trials, seed, tol)) {
        SymTensor l1 = rank1_witness_prolongation(wit->covector, wit->vector, 1);
        out.result = InfiniteType{std::move(*wit), std::move(l1)};
        return out;
    }
    out.result = UnknownBeyond{max_order};
    return out;
}

MatrixAlgebra curve_stabilizer_algebra(const std::vector<StabilizerSample>& samples, const Tolerances& tol) {
    if (samples.empty()) throw InvalidInput("curve_stabilizer_algebra: empty sample list");
    const int n = static_cast<int>(samples.front().point.rows());
    for (const auto& s : samples) {
        if (s.point.rows() != n || s.point.cols() != n || s.tangent.rows() != n || s.tangent.cols() != n)
            throw InvalidInput("curve_stabilizer_algebra: inconsistent sample dimensions");
        if (s.tangent.cwiseAbs().maxCoeff() == 0.0) throw InvalidInput("curve_stabilizer_algebra: zero tangent");
    }
    const int npairs = n * (n + 1) / 2;
    const int nsamples = static_cast<int>(samples.size());
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(npairs * nsamples, n * n + nsamples);
    int row = 0;
    for (int k = 0; k < nsamples; ++k) {
        const auto& b = samples[static_cast<std::size_t>(k)].point;
        const auto& t = samples[static_cast<std::size_t>(k)].tangent;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j, ++row) {
                for (int m = 0; m < n; ++m) {
                    rows(row, i * n + m) += b(m, j);
                    rows(row, j * n + m) += b(i, m);
                }
                rows(row, n * n + k) = -t(i, j);
            }
    }
    LinearSystem sys;
    for (int c = 0; c < n * n; ++c) sys.unknowns.push_back({"X", {c % n, c / n}, -1});
    for (int k = 0; k < nsamples; ++k) sys.unknowns.push_back({"lambda", {k}, -1});
    sys.rows = rows;
    const KernelReport report = compute_kernel(sys, tol);

    const Eigen::MatrixXd x_part = report.kernel_basis.topRows(n * n);
    std::vector<Eigen::MatrixXd> gens;
    for (Eigen::Index c = 0; c < x_part.cols(); ++c) gens.push_back(unvectorize(x_part.col(c), n));
    return MatrixAlgebra(n, std::move(gens), tol.rank);
}

} // namespace rigidity::prolongation
