#include "oracles.hpp"

#include "rigidity/braid.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/rng.hpp"

#include <doctest.h>

using namespace rigidity;
using namespace rigidity::braid;

namespace {

BilinForm diag(std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return BilinForm::diagonal(v);
}

Eigen::VectorXd e1_witness(int n, double k11) {
    SymTensor a(n, 3, Codomain::vector);
    a.coeff(SymIndex{{0, 0, 0}}, 0) = 1.0;
    SymTensor k(n, 2, Codomain::scalar);
    k.coeff(SymIndex{{0, 0}}) = k11;
    return join_solution(a, k);
}

} // namespace

TEST_CASE("system sizes") {
    const auto s3 = generalized_braid_system(BilinForm::identity(3), BilinForm::identity(3), 3);
    CHECK(s3.unknown_count() == 36);
    CHECK(s3.equation_count() == 36);
    CHECK(generalized_braid_system(BilinForm::identity(2), BilinForm::identity(2), 2).unknown_count() == 11);
    CHECK(generalized_braid_system(BilinForm::identity(4), BilinForm::identity(4), 4).unknown_count() == 90);
    CHECK(s3.columns_of("A").size() == 30);
    CHECK(s3.columns_of("K").size() == 6);
}

TEST_CASE("classical braid lemma") {
    for (int n = 1; n <= 5; ++n) {
        CHECK(classical_braid_kernel(BilinForm::identity(n), n).kernel_dim == 0);
        CHECK(trilinear_symskew_kernel(n).kernel_dim == 0);
    }
    CHECK(classical_braid_kernel(diag({-1, 1, 1}), 3).kernel_dim == 0);
    CHECK(classical_braid_kernel(diag({-1, 1, 1, 1}), 4).verdict == Verdict::rigid);
    try {
        classical_braid_kernel(diag({1, 0, 0}), 3);
        FAIL("degenerate form accepted");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("generalized braid lemma, nondegenerate pairs") {
    CHECK(generalized_braid_kernel(BilinForm::identity(3), BilinForm::identity(3), 3).kernel_dim == 0);
    Rng rng(21);
    const BilinForm jp(rng.symmetric_with_signature(4, 2));
    const auto r = generalized_braid_kernel(diag({-1, 1, 1, 1}), jp, 4);
    CHECK(r.kernel_dim == 0);
    CHECK(r.gap_ratio >= 1e6);
    CHECK(r.verdict == Verdict::rigid);
}

TEST_CASE("dimension two is reported, not asserted") {
    const auto r = generalized_braid_kernel(BilinForm::identity(2), BilinForm::identity(2), 2);
    CHECK(r.kernel_dim == oracle::generalized_braid_dim(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("kernel dimension agrees with the dense oracle") {
    Rng rng(22);
    for (int n : {2, 3, 4}) {
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::MatrixXd j = rng.symmetric_with_signature(n, trial % n);
            Eigen::MatrixXd jp = rng.symmetric_with_signature(n, (trial + 1) % n);
            if (trial == 2) {
                // rank-one J': a degenerate case with a nonzero kernel
                const Eigen::VectorXd a = rng.normal_vector(n);
                jp = a * a.transpose();
            }
            const auto r = generalized_braid_kernel(BilinForm(j), BilinForm(jp), n);
            CHECK(r.kernel_dim == oracle::generalized_braid_dim(j, jp));
        }
    }
}

TEST_CASE("degenerate J' admits the e1 witness") {
    // With J(e1,e1) = 1 and A(e1,e1,e1) = e1 the left side at (e1,e1,e1,e1) is 2, so K11 J'11 = 2.
    const auto sys = generalized_braid_system(BilinForm::identity(3), diag({1, 0, 0}), 3);
    const auto r = generalized_braid_kernel(BilinForm::identity(3), diag({1, 0, 0}), 3);
    CHECK(r.kernel_dim >= 1);
    const Eigen::VectorXd plus = e1_witness(3, 2.0);
    CHECK(sys.residual(plus) < 1e-12);
    CHECK(distance_to_span(r.kernel_basis, plus) < 1e-8);
    CHECK(sys.residual(e1_witness(3, -2.0)) > 1.0);

    const auto neg_sys = generalized_braid_system(BilinForm::identity(3), diag({-1, 0, 0}), 3);
    const auto neg = generalized_braid_kernel(BilinForm::identity(3), diag({-1, 0, 0}), 3);
    CHECK(distance_to_span(neg.kernel_basis, e1_witness(3, -2.0)) < 1e-8);
    CHECK(neg_sys.residual(e1_witness(3, -2.0)) < 1e-12);

    const auto s = split_solution(plus, 3);
    CHECK(tresse_residual(BilinForm::identity(3), diag({1, 0, 0}), s) < 1e-12);
}

TEST_CASE("kernel elements satisfy the equations and the K/J' identity") {
    Rng rng(23);
    for (int n : {3, 4}) {
        const Eigen::VectorXd a = rng.normal_vector(n);
        const BilinForm jp(a * a.transpose());
        const BilinForm j(rng.symmetric_with_signature(n, 1));
        const auto sys = generalized_braid_system(j, jp, n);
        const auto r = generalized_braid_kernel(j, jp, n);
        REQUIRE(r.kernel_dim >= 1);
        for (Eigen::Index c = 0; c < r.kernel_basis.cols(); ++c) {
            const Eigen::VectorXd x = r.kernel_basis.col(c);
            CHECK(sys.residual(x) < 1e-8 * sys.coefficient_scale());
            const auto s = split_solution(x, n);
            CHECK(tresse_residual(j, jp, s) < 1e-8);
            CHECK(kj_identity_residual(jp, s.k) < 1e-8);
        }
    }
}

TEST_CASE("congruence invariance") {
    Rng rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 2;
        const Eigen::MatrixXd j = rng.symmetric_with_signature(n, trial % n);
        Eigen::MatrixXd jp = rng.symmetric_with_signature(n, (trial / 2) % n);
        if (trial % 3 == 0) {
            const Eigen::VectorXd a = rng.normal_vector(n);
            jp = a * a.transpose();
        }
        const Eigen::MatrixXd m = rng.well_conditioned(n);
        const Eigen::MatrixXd cj = m.transpose() * j * m;
        const Eigen::MatrixXd cjp = m.transpose() * jp * m;
        const int k0 = generalized_braid_kernel(BilinForm(j), BilinForm(jp), n).kernel_dim;
        const int k1 = generalized_braid_kernel(BilinForm(0.5 * (cj + cj.transpose())), BilinForm(0.5 * (cjp + cjp.transpose())), n).kernel_dim;
        CHECK(k0 == k1);
    }
}

TEST_CASE("scale invariance in J'") {
    Rng rng(25);
    const int n = 3;
    const Eigen::VectorXd a = rng.normal_vector(n);
    const BilinForm j(rng.symmetric_with_signature(n, 0));
    const Eigen::MatrixXd jp = a * a.transpose();
    const auto base = generalized_braid_kernel(j, BilinForm(jp), n);
    for (double c : {-3.0, 0.25, 7.0}) {
        const auto scaled = generalized_braid_kernel(j, BilinForm(c * jp), n);
        CHECK(scaled.kernel_dim == base.kernel_dim);
        CHECK(scaled.projection("A") == base.projection("A"));
        // (A, K) solves the J' system iff (A, K / c) solves the c J' system
        const auto sys = generalized_braid_system(j, BilinForm(c * jp), n);
        for (Eigen::Index col = 0; col < base.kernel_basis.cols(); ++col) {
            auto s = split_solution(base.kernel_basis.col(col), n);
            std::vector<double> k(s.k.coeffs().begin(), s.k.coeffs().end());
            for (auto& x : k) x /= c;
            const Eigen::VectorXd x = join_solution(s.a, SymTensor(n, 2, Codomain::scalar, k));
            CHECK(sys.residual(x) < 1e-10);
        }
    }
}
