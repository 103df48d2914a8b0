#include "oracles.hpp"

#include "rigidity/braid.hpp"
#include "rigidity/certifier.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/prolongation.hpp"
#include "rigidity/rng.hpp"

#include <doctest.h>

using namespace rigidity;
using namespace rigidity::certifier;
using nlohmann::json;

namespace {

gcs::GcsChart chart(const std::string& name, const json& p = json::object()) { return std::get<gcs::GcsChart>(gcs::builtin(name, p)); }

std::vector<double> origin(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); }

struct Forms {
    Eigen::MatrixXd j;
    Eigen::MatrixXd j01;
};

Forms forms_at(const gcs::GcsChart& c, const std::vector<double>& p, double r) {
    return {gcs::eval_metric(c, p, r).matrix(), gcs::eval_partials(c, p, r, 0, 1).blocks[0]};
}

} // namespace

TEST_CASE("level 1 sizes and the conformal prolongation") {
    for (int n : {2, 3, 4}) {
        const auto c = chart("conformal_flat", json{{"n", n}});
        const auto l1 = level1_system(c, origin(n), 1.0);
        CHECK(l1.unknowns == n * n * (n + 1) / 2 + n);
        CHECK(l1.kernel_dim == prolongation::prolongation_space(prolongation::co(n), 1).dim);
        const auto f = forms_at(c, origin(n), 1.0);
        CHECK(l1.kernel_dim == oracle::level1_dim(f.j, f.j01));
    }
    const auto pn = level1_system(chart("product_nonrigid"), origin(3), 2.0);
    CHECK(pn.kernel_dim >= 1);
    const auto f = forms_at(chart("product_nonrigid"), origin(3), 2.0);
    CHECK(pn.kernel_dim == oracle::level1_dim(f.j, f.j01));

    // phi''(e1, e1) = c e1 with Dk(e1) = -2c / J01(e1, e1) * J(e1, e1)
    const auto sys = level1_equations(BilinForm(f.j), BilinForm(f.j01));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.unknown_count());
    const auto phi = sys.columns_of("phi2");
    const auto dk = sys.columns_of("Dk");
    x(phi[0]) = 1.0;
    x(dk[0]) = -2.0 * f.j(0, 0) / f.j01(0, 0);
    CHECK(sys.residual(x) < 1e-12);

    CHECK_THROWS_AS(level1_kernel(BilinForm::identity(3), BilinForm(Eigen::MatrixXd::Zero(3, 3))), InvalidInput);
}

TEST_CASE("level 2 delegates to the generalized braid kernel") {
    for (const std::string name : {"conformal_flat", "product_nonrigid", "linear_hyperbolic"}) {
        const auto c = chart(name);
        const std::vector<double> p{0.2, -0.1, 0.3};
        const double r = 0.5 * (c.interval().first + c.interval().second);
        const auto f = forms_at(c, p, r);
        const auto a = level2_system(c, p, r);
        const auto b = braid::generalized_braid_kernel(BilinForm(f.j), BilinForm(-f.j01), 3);
        CHECK(a.singular_values == b.singular_values);
        CHECK(a.kernel_dim == b.kernel_dim);
        CHECK(a.kernel_dim == oracle::generalized_braid_dim(f.j, -f.j01));
    }
}

TEST_CASE("certificates") {
    const auto cf = gcs_certificate(chart("conformal_flat"), origin(3), {0.5, 1.0, 2.0});
    CHECK(cf.verdict == "2-rigid");
    REQUIRE(cf.samples.size() == 3);
    for (const auto& s : cf.samples) {
        CHECK(s.verdict == "2-rigid");
        CHECK(s.level1->kernel_dim == 3);
        CHECK(s.level2.kernel_dim == 0);
        CHECK_FALSE(s.witness.has_value());
    }

    const auto pn = gcs_certificate(chart("product_nonrigid"), origin(3), {1.0});
    CHECK(pn.verdict == "non-rigid");
    REQUIRE(pn.samples[0].witness.has_value());
    CHECK(pn.samples[0].witness->residual < 1e-8);
    CHECK(pn.samples[0].witness->vector.cwiseAbs().maxCoeff() == doctest::Approx(1.0));

    const auto two = gcs_certificate(chart("conformal_flat", json{{"n", 2}}), origin(2), {1.0});
    CHECK(two.verdict == "indeterminate-by-hypothesis");
    CHECK(two.samples[0].level1.has_value());

    CHECK(gcs_certificate(chart("linear_hyperbolic"), origin(3), {1.5}).verdict == "2-rigid");
    CHECK_THROWS_AS(gcs_certificate(chart("conformal_flat"), std::vector<double>{5, 0, 0}, {1.0}), InvalidInput);
    CHECK_THROWS_AS(gcs_certificate(chart("conformal_flat"), origin(3), {}), InvalidInput);
}

TEST_CASE("perturbation restores rigidity") {
    for (double eps : {1e-2, 1e-1}) {
        const auto c = chart("product_nonrigid", json{{"epsilon", eps}});
        const auto cert = gcs_certificate(c, origin(3), {1.0, 2.0});
        CHECK(cert.verdict == "2-rigid");
        for (const auto& s : cert.samples) {
            CHECK(s.genericity.nondegenerate);
            CHECK(s.level2.kernel_dim == 0);
        }
    }
}

TEST_CASE("kernel witnesses satisfy their rows") {
    Rng rng(61);
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::VectorXd a = rng.normal_vector(3);
        const BilinForm j(rng.symmetric_with_signature(3, 0));
        const BilinForm j01(a * a.transpose());
        const auto sys = braid::generalized_braid_system(j, BilinForm(-j01.matrix()), 3);
        const auto rep = level2_kernel(j, j01);
        REQUIRE(rep.kernel_dim >= 1);
        const Witness w = make_witness(sys, rep);
        CHECK(w.residual < 1e-8);
        CHECK(sys.residual(w.vector) <= 1e-8 * sys.coefficient_scale());
    }
}

TEST_CASE("linear coordinate invariance") {
    // A linear change x = M y replaces (J, J01) by their congruences at the same point.
    Rng rng(62);
    for (const std::string name : {"conformal_flat", "product_nonrigid", "linear_hyperbolic"}) {
        const auto c = chart(name);
        const double r = 0.5 * (c.interval().first + c.interval().second);
        const auto f = forms_at(c, origin(3), r);
        const int l1 = level1_kernel(BilinForm(f.j), BilinForm(f.j01)).kernel_dim;
        const int l2 = level2_kernel(BilinForm(f.j), BilinForm(f.j01)).kernel_dim;
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd m = rng.well_conditioned(3);
            Eigen::MatrixXd j = m.transpose() * f.j * m;
            Eigen::MatrixXd j01 = m.transpose() * f.j01 * m;
            j = 0.5 * (j + j.transpose());
            j01 = 0.5 * (j01 + j01.transpose());
            CHECK(level1_kernel(BilinForm(j), BilinForm(j01)).kernel_dim == l1);
            CHECK(level2_kernel(BilinForm(j), BilinForm(j01)).kernel_dim == l2);
        }
    }
}

TEST_CASE("thread count does not change the certificate") {
    const auto c = chart("product_nonrigid", json{{"epsilon", 0.1}});
    const std::vector<double> rs{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    const auto a = gcs_certificate(c, origin(3), rs, 3, {}, 1);
    const auto b = gcs_certificate(c, origin(3), rs, 3, {}, 4);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].r == b.samples[i].r);
        CHECK(a.samples[i].level2.singular_values == b.samples[i].level2.singular_values);
    }
}

TEST_CASE("lightlike step 1") {
    // n = 2: the base is one-dimensional
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = 1.0;
    CHECK(compute_kernel(lightlike_step1_equations(g)).kernel_dim == 0);
    Eigen::MatrixXd g4 = Eigen::MatrixXd::Identity(4, 4);
    g4(3, 3) = 0.0;
    const auto sys = lightlike_step1_equations(g4);
    CHECK(sys.unknown_count() == 3 * 10);
    CHECK(compute_kernel(sys).kernel_dim == 0);
}

TEST_CASE("lightlike certificates") {
    const auto cf = gcs::lift_to_lightlike(chart("conformal_flat"));
    const auto a = lightlike_subrigidity_certificate(cf, origin(3), 1.0);
    CHECK(a.step1.kernel_dim == 0);
    CHECK(a.step2.kernel_dim == 0);
    CHECK(a.verdict == "(3,1) sub-rigid");
    CHECK(a.unconstrained.size() == 3);

    const auto pn = gcs::lift_to_lightlike(chart("product_nonrigid"));
    const auto b = lightlike_subrigidity_certificate(pn, origin(3), 1.0);
    CHECK(b.step1.kernel_dim == 0);
    CHECK(b.step2.kernel_dim >= 1);
    CHECK(b.verdict == "non-sub-rigid");
    REQUIRE(b.witness.has_value());
    CHECK(b.witness->residual < 1e-8);

    const auto small = gcs::lift_to_lightlike(chart("conformal_flat", json{{"n", 2}}));
    const auto c = lightlike_subrigidity_certificate(small, origin(2), 1.0);
    CHECK(c.verdict == "withheld-by-hypothesis");
    CHECK(c.step1.kernel_dim == 0);

    const auto cone = std::get<gcs::LightlikeChart>(gcs::builtin("lightcone"));
    CHECK(lightlike_subrigidity_certificate(cone, std::vector<double>{0.1, 0.2, -0.3}, 1.2).verdict == "(3,1) sub-rigid");

    // Step 2 is the base braid system with J = g, J' = -g01
    const Eigen::MatrixXd g = gcs::eval_metric(cf, origin(3), 1.0);
    const Eigen::MatrixXd g01 = gcs::eval_partials(cf, origin(3), 1.0, 0, 1).blocks[0];
    const auto direct = braid::generalized_braid_kernel(BilinForm(Eigen::MatrixXd(g.topLeftCorner(3, 3))),
                                                        BilinForm(Eigen::MatrixXd(-g01.topLeftCorner(3, 3))), 3);
    CHECK(direct.singular_values == a.step2.singular_values);
}
