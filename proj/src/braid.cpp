#include "rigidity/braid.hpp"

#include "rigidity/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace rigidity::braid {

namespace {

void check_dim(const BilinForm& j, int n, const char* what) {
    if (n < 1) throw InvalidInput(std::string(what) + ": n must be >= 1");
    if (j.dim() != n)
        throw InvalidInput(std::string(what) + ": form has dimension " + std::to_string(j.dim()) + ", expected " +
                           std::to_string(n));
}

void append_packed_labels(std::vector<UnknownLabel>& labels, const std::string& name, int n, int degree,
                          bool vector_valued) {
    for (const auto& idx : enumerate_sym_indices(n, degree)) {
        if (vector_valued)
            for (int o = 0; o < n; ++o) labels.push_back({name, idx.entries, o});
        else
            labels.push_back({name, idx.entries, -1});
    }
}

std::size_t rank2(int n, int a, int b) {
    const std::array<int, 2> t{std::min(a, b), std::max(a, b)};
    return sym_index_rank(n, t);
}

Eigen::VectorXd basis(int n, int i) { return Eigen::VectorXd::Unit(n, i); }

} // namespace

LinearSystem classical_braid_system(const BilinForm& j) {
    const int n = j.dim();
    const Eigen::MatrixXd& jm = j.matrix();
    LinearSystem sys;
    append_packed_labels(sys.unknowns, "A", n, 2, true);
    sys.rows = Eigen::MatrixXd::Zero(n * n * n, static_cast<Eigen::Index>(sys.unknowns.size()));
    int row = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w, ++row)
                for (int o = 0; o < n; ++o) {
                    // J(A(U,V),W) + J(A(U,W),V)
                    sys.rows(row, static_cast<Eigen::Index>(rank2(n, u, v)) * n + o) += jm(o, w);
                    sys.rows(row, static_cast<Eigen::Index>(rank2(n, u, w)) * n + o) += jm(o, v);
                }
    return sys;
}

KernelReport classical_braid_kernel(const BilinForm& j, int n, const Tolerances& tol) {
    check_dim(j, n, "classical_braid_kernel");
    const Signature sig = form_signature(j, tol.spectral);
    if (!sig.nondegenerate())
        throw InvalidInput("classical_braid_kernel: J is degenerate (" + std::to_string(sig.zero) +
                           " zero eigenvalue" + (sig.zero == 1 ? "" : "s") + ")");
    return compute_kernel(classical_braid_system(j), tol);
}

LinearSystem trilinear_symskew_system(int n) {
    if (n < 1) throw InvalidInput("trilinear_symskew_system: n must be >= 1");
    LinearSystem sys;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int o = 0; o < n; ++o) sys.unknowns.push_back({"L", {a, b, c}, o});
    const auto col = [n](int a, int b, int c, int o) { return ((a * n + b) * n + c) * n + o; };

    const int sym_rows = n * (n - 1) / 2 * n * n;
    const int skew_rows = n * (n * (n + 1) / 2) * n;
    sys.rows = Eigen::MatrixXd::Zero(sym_rows + skew_rows, n * n * n * n);
    int row = 0;
    // L(a,b,c) = L(b,a,c)
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int o = 0; o < n; ++o, ++row) {
                    sys.rows(row, col(a, b, c, o)) += 1.0;
                    sys.rows(row, col(b, a, c, o)) -= 1.0;
                }
    // L(a,b,c) = -L(a,c,b), including b == c
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = b; c < n; ++c)
                for (int o = 0; o < n; ++o, ++row) {
                    sys.rows(row, col(a, b, c, o)) += 1.0;
                    sys.rows(row, col(a, c, b, o)) += 1.0;
                }
    return sys;
}

KernelReport trilinear_symskew_kernel(int n, const Tolerances& tol) {
    return compute_kernel(trilinear_symskew_system(n), tol);
}

LinearSystem generalized_braid_system(const BilinForm& j, const BilinForm& jp, int n) {
    check_dim(j, n, "generalized_braid_system");
    check_dim(jp, n, "generalized_braid_system");
    const Eigen::MatrixXd& jm = j.matrix();
    const Eigen::MatrixXd& jpm = jp.matrix();

    LinearSystem sys;
    append_packed_labels(sys.unknowns, "A", n, 3, true);
    const Eigen::Index k_offset = static_cast<Eigen::Index>(sys.unknowns.size());
    append_packed_labels(sys.unknowns, "K", n, 2, false);

    const auto pairs = enumerate_sym_indices(n, 2);
    const Eigen::Index npairs = static_cast<Eigen::Index>(pairs.size());
    sys.rows = Eigen::MatrixXd::Zero(npairs * npairs, static_cast<Eigen::Index>(sys.unknowns.size()));

    Eigen::Index row = 0;
    for (const auto& uv : pairs) {
        const int u = uv.entries[0], v = uv.entries[1];
        for (const auto& ww : pairs) {
            const int w = ww.entries[0], wp = ww.entries[1];
            const std::array<int, 3> uvw{u, v, w};
            const std::array<int, 3> uvwp{u, v, wp};
            const auto a_uvw = static_cast<Eigen::Index>(sym_index_rank_unsorted(n, uvw));
            const auto a_uvwp = static_cast<Eigen::Index>(sym_index_rank_unsorted(n, uvwp));
            for (int o = 0; o < n; ++o) {
                sys.rows(row, a_uvw * n + o) += jm(o, wp);
                sys.rows(row, a_uvwp * n + o) += jm(o, w);
            }
            sys.rows(row, k_offset + static_cast<Eigen::Index>(rank2(n, u, v))) -= jpm(w, wp);
            ++row;
        }
    }
    return sys;
}

KernelReport generalized_braid_kernel(const BilinForm& j, const BilinForm& jp, int n, const Tolerances& tol) {
    const LinearSystem sys = generalized_braid_system(j, jp, n);
    KernelReport report = compute_kernel(sys, tol);
    add_projections(report, sys, {"A", "K"}, tol.rank);
    return report;
}

BraidSolution split_solution(const Eigen::VectorXd& x, int n) {
    const std::size_t a_size = binomial(n + 2, 3) * static_cast<std::size_t>(n);
    const std::size_t k_size = binomial(n + 1, 2);
    if (static_cast<std::size_t>(x.size()) != a_size + k_size)
        throw InvalidInput("split_solution: vector length does not match n");
    std::vector<double> a(x.data(), x.data() + a_size);
    std::vector<double> k(x.data() + a_size, x.data() + a_size + k_size);
    return {SymTensor(n, 3, Codomain::vector, std::move(a)), SymTensor(n, 2, Codomain::scalar, std::move(k))};
}

Eigen::VectorXd join_solution(const SymTensor& a, const SymTensor& k) {
    Eigen::VectorXd x(a.as_vector().size() + k.as_vector().size());
    x << a.as_vector(), k.as_vector();
    return x;
}

double tresse_residual(const BilinForm& j, const BilinForm& jp, const BraidSolution& s) {
    const int n = j.dim();
    double worst = 0.0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            const std::array<Eigen::VectorXd, 2> uv{basis(n, u), basis(n, v)};
            const double kuv = s.k.evaluate_scalar(uv);
            for (int w = 0; w < n; ++w) {
                const std::array<Eigen::VectorXd, 3> uvw{basis(n, u), basis(n, v), basis(n, w)};
                const Eigen::VectorXd a_uvw = s.a.evaluate(uvw);
                for (int wp = 0; wp < n; ++wp) {
                    const std::array<Eigen::VectorXd, 3> uvwp{basis(n, u), basis(n, v), basis(n, wp)};
                    const Eigen::VectorXd a_uvwp = s.a.evaluate(uvwp);
                    const double lhs = j(a_uvw, basis(n, wp)) + j(a_uvwp, basis(n, w));
                    worst = std::max(worst, std::abs(lhs - kuv * jp.matrix()(w, wp)));
                }
            }
        }
    return worst;
}

double kj_identity_residual(const BilinForm& jp, const SymTensor& k) {
    const int n = jp.dim();
    const Eigen::MatrixXd& p = jp.matrix();
    Eigen::MatrixXd km(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const std::array<Eigen::VectorXd, 2> ab{basis(n, a), basis(n, b)};
            km(a, b) = k.evaluate_scalar(ab);
        }
    double worst = 0.0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                for (int wp = 0; wp < n; ++wp) {
                    const double r = km(u, v) * p(w, wp) + km(w, wp) * p(u, v) - km(u, w) * p(v, wp) -
                                     km(v, wp) * p(u, w);
                    worst = std::max(worst, std::abs(r));
                }
    return worst;
}

} // namespace rigidity::braid
