#include "rigidity/certifier.hpp"

#include "rigidity/braid.hpp"
#include "rigidity/errors.hpp"

#include <array>
#include <atomic>
#include <exception>
#include <thread>

namespace rigidity::certifier {

namespace {

void append_labels(std::vector<UnknownLabel>& labels, const std::string& name, int n, int degree, int outputs) {
    for (const auto& idx : enumerate_sym_indices(n, degree)) {
        if (outputs == 0)
            labels.push_back({name, idx.entries, -1});
        else
            for (int o = 0; o < outputs; ++o) labels.push_back({name, idx.entries, o});
    }
}

Eigen::Index pair_rank(int n, int a, int b) {
    const std::array<int, 2> t{std::min(a, b), std::max(a, b)};
    return static_cast<Eigen::Index>(sym_index_rank(n, t));
}

Eigen::Index triple_rank(int n, int a, int b, int c) {
    const std::array<int, 3> t{a, b, c};
    return static_cast<Eigen::Index>(sym_index_rank_unsorted(n, t));
}

BilinForm r_derivative(const gcs::GcsChart& c, std::span<const double> p, double r) {
    return BilinForm(gcs::eval_partials(c, p, r, 0, 1).blocks.front());
}

} // namespace

LinearSystem level1_equations(const BilinForm& j, const BilinForm& j01) {
    const int n = j.dim();
    if (j01.dim() != n) throw InvalidInput("level1_equations: J and J01 have different dimensions");
    const Eigen::MatrixXd& jm = j.matrix();
    const Eigen::MatrixXd& dm = j01.matrix();
    LinearSystem sys;
    append_labels(sys.unknowns, "phi2", n, 2, n);
    const Eigen::Index dk = static_cast<Eigen::Index>(sys.unknowns.size());
    append_labels(sys.unknowns, "Dk", n, 1, 0);

    sys.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n * (n + 1) / 2 * n),
                                     static_cast<Eigen::Index>(sys.unknowns.size()));
    Eigen::Index row = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u; v < n; ++v)
            for (int w = 0; w < n; ++w, ++row) {
                for (int o = 0; o < n; ++o) {
                    sys.rows(row, pair_rank(n, u, w) * n + o) += jm(o, v);
                    sys.rows(row, pair_rank(n, v, w) * n + o) += jm(u, o);
                }
                sys.rows(row, dk + w) += dm(u, v);
            }
    return sys;
}

KernelReport level1_kernel(const BilinForm& j, const BilinForm& j01, const Tolerances& tol) {
    if (!(j01.matrix().cwiseAbs().maxCoeff() > tol.spectral * j.matrix().cwiseAbs().maxCoeff()))
        throw InvalidInput("level1: J01 vanishes at the point (the structure is transversally trivial there)");
    const LinearSystem sys = level1_equations(j, j01);
    KernelReport rep = compute_kernel(sys, tol);
    add_projections(rep, sys, {"phi2", "Dk"}, tol.rank);
    return rep;
}

KernelReport level2_kernel(const BilinForm& j, const BilinForm& j01, const Tolerances& tol) {
    return braid::generalized_braid_kernel(j, BilinForm(-j01.matrix()), j.dim(), tol);
}

KernelReport level1_system(const gcs::GcsChart& c, std::span<const double> p, double r, const Tolerances& tol) {
    return level1_kernel(gcs::eval_metric(c, p, r), r_derivative(c, p, r), tol);
}

KernelReport level2_system(const gcs::GcsChart& c, std::span<const double> p, double r, const Tolerances& tol) {
    return level2_kernel(gcs::eval_metric(c, p, r), r_derivative(c, p, r), tol);
}

Witness make_witness(const LinearSystem& system, const KernelReport& report) {
    if (report.kernel_dim == 0) throw InvalidInput("make_witness: the kernel is trivial");
    Eigen::VectorXd v = report.kernel_basis.col(0);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    v /= v(at);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) < 1e-14) v(i) = 0.0;
    Witness w;
    w.vector = v;
    const double scale = system.coefficient_scale();
    w.residual = scale > 0.0 ? system.residual(v) / scale : system.residual(v);
    w.labels = system.unknowns;
    return w;
}

namespace {

SampleCertificate certify_sample(const gcs::GcsChart& c, std::span<const double> p, double r, const Tolerances& tol) {
    SampleCertificate s;
    s.r = r;
    const BilinForm j = gcs::eval_metric(c, p, r);
    const BilinForm j01 = r_derivative(c, p, r);
    s.genericity = gcs::point_genericity(j.matrix(), j01.matrix(), tol);
    if (s.genericity.nonzero)
        s.level1 = level1_kernel(j, j01, tol);
    else
        s.level1_note = "J01 vanishes at the point; level 1 not assembled";
    const BilinForm jp(-j01.matrix());
    const LinearSystem sys = braid::generalized_braid_system(j, jp, c.n());
    s.level2 = braid::generalized_braid_kernel(j, jp, c.n(), tol);

    if (s.level2.kernel_dim > 0) s.witness = make_witness(sys, s.level2);
    if (c.n() < 3)
        s.verdict = "indeterminate-by-hypothesis";
    else if (s.level2.verdict == Verdict::indeterminate)
        s.verdict = "indeterminate";
    else if (s.level2.kernel_dim == 0 && s.genericity.nondegenerate)
        s.verdict = "2-rigid";
    else if (s.level2.kernel_dim > 0)
        s.verdict = "non-rigid";
    else
        s.verdict = "indeterminate";
    return s;
}

} // namespace

Certificate gcs_certificate(const gcs::GcsChart& c, std::span<const double> p, const std::vector<double>& r_samples,
                            int grid, const Tolerances& tol, int threads) {
    if (r_samples.empty()) throw InvalidInput("gcs_certificate: r_samples is empty");
    if (static_cast<int>(p.size()) != c.n()) throw InvalidInput("gcs_certificate: point has the wrong dimension");
    for (double r : r_samples)
        if (!c.contains(p, r)) throw InvalidInput("gcs_certificate: point or r sample outside the chart");

    Certificate cert;
    cert.structure = c.name();
    cert.n = c.n();
    cert.point.assign(p.begin(), p.end());
    cert.genericity = gcs::genericity_report(c, grid, tol);
    cert.tol = tol;

    const std::size_t count = r_samples.size();
    std::vector<std::optional<SampleCertificate>> out(count);
    std::vector<std::exception_ptr> errors(count);
    const auto work = [&](std::size_t i) {
        try {
            out[i] = certify_sample(c, p, r_samples[i], tol);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (auto& s : out) cert.samples.push_back(std::move(*s));

    const auto any = [&](const char* v) {
        for (const auto& s : cert.samples)
            if (s.verdict == v) return true;
        return false;
    };
    if (any("2-rigid"))
        cert.verdict = "2-rigid";
    else if (any("non-rigid"))
        cert.verdict = "non-rigid";
    else if (any("indeterminate-by-hypothesis"))
        cert.verdict = "indeterminate-by-hypothesis";
    else
        cert.verdict = "indeterminate";
    return cert;
}

LinearSystem lightlike_step1_equations(const Eigen::MatrixXd& g) {
    const int n = static_cast<int>(g.rows());
    const int m = n - 1;
    if (n < 2 || g.cols() != n) throw InvalidInput("lightlike_step1_equations: g must be square of size >= 2");
    LinearSystem sys;
    append_labels(sys.unknowns, "phi2", n, 2, m);
    sys.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n * (n + 1) / 2 * n),
                                     static_cast<Eigen::Index>(sys.unknowns.size()));
    Eigen::Index row = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u; v < n; ++v)
            for (int w = 0; w < n; ++w, ++row)
                for (int o = 0; o < m; ++o) {
                    sys.rows(row, pair_rank(n, u, w) * m + o) += g(o, v);
                    sys.rows(row, pair_rank(n, v, w) * m + o) += g(u, o);
                }
    return sys;
}

KernelReport lightlike_step1_system(const gcs::LightlikeChart& lc, std::span<const double> p, double t,
                                    const Tolerances& tol) {
    return compute_kernel(lightlike_step1_equations(gcs::eval_metric(lc, p, t)), tol);
}

namespace {

std::pair<BilinForm, BilinForm> base_forms(const gcs::LightlikeChart& lc, std::span<const double> p, double t) {
    const int m = lc.base_dim();
    const Eigen::MatrixXd g = gcs::eval_metric(lc, p, t);
    const Eigen::MatrixXd g01 = gcs::eval_partials(lc, p, t, 0, 1).blocks.front();
    return {BilinForm(g.topLeftCorner(m, m)), BilinForm(g01.topLeftCorner(m, m))};
}

} // namespace

KernelReport lightlike_step2_system(const gcs::LightlikeChart& lc, std::span<const double> p, double t,
                                    const Tolerances& tol) {
    const auto [j, j01] = base_forms(lc, p, t);
    return level2_kernel(j, j01, tol);
}

LinearSystem lightlike_transverse_equations(const Eigen::MatrixXd& g, const Eigen::MatrixXd& g01) {
    const int n = static_cast<int>(g.rows());
    const int m = n - 1;
    if (n < 2 || g.cols() != n || g01.rows() != n || g01.cols() != n)
        throw InvalidInput("lightlike_transverse_equations: g and g01 must be square of the same size >= 2");
    LinearSystem sys;
    append_labels(sys.unknowns, "A", n, 3, m);
    const Eigen::Index k_offset = static_cast<Eigen::Index>(sys.unknowns.size());
    append_labels(sys.unknowns, "K", n, 2, 0);
    const auto ww = enumerate_sym_indices(n, 2);
    sys.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m * (m + 1) / 2 * ww.size()),
                                     static_cast<Eigen::Index>(sys.unknowns.size()));
    Eigen::Index row = 0;
    for (int u = 0; u < m; ++u)
        for (int v = u; v < m; ++v)
            for (const auto& w : ww) {
                const int w1 = w.entries[0], w2 = w.entries[1];
                for (int o = 0; o < m; ++o) {
                    sys.rows(row, triple_rank(n, u, w1, w2) * m + o) += g(o, v);
                    sys.rows(row, triple_rank(n, v, w1, w2) * m + o) += g(u, o);
                }
                sys.rows(row, k_offset + pair_rank(n, w1, w2)) += g01(u, v);
                ++row;
            }
    return sys;
}

LightlikeCertificate lightlike_subrigidity_certificate(const gcs::LightlikeChart& lc, std::span<const double> p,
                                                       double t, int grid, const Tolerances& tol) {
    if (!lc.contains(p, t)) throw InvalidInput("lightlike certificate: point outside the chart");
    const int n = lc.n();
    LightlikeCertificate cert;
    cert.structure = lc.name();
    cert.n = n;
    cert.point.assign(p.begin(), p.end());
    cert.t = t;
    cert.tol = tol;
    cert.grid_genericity = gcs::genericity_report(lc, grid, tol);

    const Eigen::MatrixXd g = gcs::eval_metric(lc, p, t);
    const Eigen::MatrixXd g01 = gcs::eval_partials(lc, p, t, 0, 1).blocks.front();
    const auto [j, j01] = base_forms(lc, p, t);
    cert.genericity = gcs::point_genericity(j.matrix(), j01.matrix(), tol);

    const LinearSystem step1 = lightlike_step1_equations(g);
    cert.step1 = compute_kernel(step1, tol);
    const BilinForm jp(-j01.matrix());
    const LinearSystem step2 = braid::generalized_braid_system(j, jp, n - 1);
    cert.step2 = braid::generalized_braid_kernel(j, jp, n - 1, tol);
    const LinearSystem transverse = lightlike_transverse_equations(g, g01);
    cert.transverse = compute_kernel(transverse, tol);
    add_projections(cert.transverse, transverse, {"A", "K"}, tol.rank);

    cert.unconstrained = {
        "phi''' and delta'' components with a d/dt argument (see the transverse system)",
        "delta''' and the rest of the 3-jet of delta",
        "all jet components of order >= 4",
    };

    if (cert.step2.kernel_dim > 0)
        cert.witness = make_witness(step2, cert.step2);
    else if (cert.step1.kernel_dim > 0)
        cert.witness = make_witness(step1, cert.step1);

    if (n < 4)
        cert.verdict = "withheld-by-hypothesis";
    else if (cert.step1.verdict == Verdict::indeterminate || cert.step2.verdict == Verdict::indeterminate)
        cert.verdict = "indeterminate";
    else if (cert.step1.kernel_dim == 0 && cert.step2.kernel_dim == 0 && cert.genericity.nondegenerate)
        cert.verdict = "(3,1) sub-rigid";
    else if (cert.step1.kernel_dim > 0 || cert.step2.kernel_dim > 0)
        cert.verdict = "non-sub-rigid";
    else
        cert.verdict = "indeterminate";
    return cert;
}

} // namespace rigidity::certifier
