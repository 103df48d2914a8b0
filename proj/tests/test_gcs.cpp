#include "rigidity/errors.hpp"
#include "rigidity/gcs.hpp"
#include "rigidity/polynomial.hpp"
#include "rigidity/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace rigidity;
using namespace rigidity::gcs;
using nlohmann::json;

namespace {

GcsChart gcs_builtin(const std::string& name, const json& p = json::object()) { return std::get<GcsChart>(builtin(name, p)); }

// n = 2, rational in x and polynomial in r:
//   a00 = (1 + x0^2 + r^3) / (1 + x1^2),  a01 = x0 x1 r / 10,  a11 = 2 + x1^2 r
const char* kCurvedChart = R"({
  "kind": "gcs", "name": "curved", "n": 2,
  "domain": [[-0.5, 0.5], [-0.5, 0.5]], "interval": [1, 2],
  "entries": [
    {"i": 0, "j": 0, "num": [["1", [0,0,0]], ["1", [2,0,0]], ["1", [0,0,3]]], "den": [["1", [0,0,0]], ["1", [0,2,0]]]},
    {"i": 0, "j": 1, "num": [["0.1", [1,1,1]]]},
    {"i": 1, "j": 1, "num": [["2", [0,0,0]], ["1", [0,2,1]]]}
  ]
})";

Eigen::MatrixXd metric_at(const GcsChart& c, std::vector<double> x, double r) { return eval_metric(c, x, r).matrix(); }

Eigen::MatrixXd diff_x(const GcsChart& c, const std::vector<double>& x, double r, int i, double h) {
    auto xp = x, xm = x;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    return (metric_at(c, xp, r) - metric_at(c, xm, r)) / (2 * h);
}

Eigen::MatrixXd diff_r(const GcsChart& c, const std::vector<double>& x, double r, double h) {
    return (metric_at(c, x, r + h) - metric_at(c, x, r - h)) / (2 * h);
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()); }

} // namespace

TEST_CASE("exact rational arithmetic") {
    CHECK(parse_rational("3.25") == mpq_class(13, 4));
    CHECK(parse_rational("1e-3") == mpq_class(1, 1000));
    CHECK(parse_rational("-2/6") == mpq_class(-1, 3));
    CHECK(parse_rational("2.5E+2") == mpq_class(250));
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);

    const Polynomial x = Polynomial::variable(2, 0);
    const Polynomial y = Polynomial::variable(2, 1);
    const Polynomial p = x * x * y + y * mpq_class(3);
    CHECK(p.derivative(0) == x * y * mpq_class(2));
    CHECK(p.derivative(1) == x * x + Polynomial::constant(2, 3));
    const std::vector<mpq_class> pt{mpq_class(1, 2), mpq_class(2)};
    CHECK(p.evaluate(pt) == mpq_class(13, 2));

    // d/dx (x / (1 + x^2)) = (1 - x^2) / (1 + x^2)^2
    const RationalField f(x, Polynomial::constant(2, 1) + x * x);
    const RationalField df = f.derivative(0);
    const RationalField expect(Polynomial::constant(2, 1) - x * x, (Polynomial::constant(2, 1) + x * x) * (Polynomial::constant(2, 1) + x * x));
    CHECK(df.equivalent(expect));
    CHECK_THROWS_AS(RationalField(x, Polynomial(2)), InvalidInput);
    CHECK_THROWS_AS(RationalField(x, x).evaluate(std::vector<mpq_class>{0, 1}), InvalidInput);
}

TEST_CASE("built-in metrics") {
    const auto p = gcs_builtin("product_nonrigid");
    const Eigen::MatrixXd m = metric_at(p, {0.3, -0.2, 0.1}, 2.0);
    CHECK(m == Eigen::Vector3d(2, 1, 1).asDiagonal().toDenseMatrix());
    const auto c = gcs_builtin("conformal_flat");
    CHECK(metric_at(c, {0, 0, 0}, 1.0) == Eigen::MatrixXd::Identity(3, 3));
    CHECK(eval_partials(c, std::vector<double>{0, 0, 0}, 1.7, 0, 1).blocks[0] == Eigen::MatrixXd::Identity(3, 3));
    const Eigen::MatrixXd dp = eval_partials(p, std::vector<double>{0, 0, 0}, 1.7, 0, 1).blocks[0];
    CHECK(dp == Eigen::Vector3d(1, 0, 0).asDiagonal().toDenseMatrix());

    CHECK_THROWS_AS(eval_metric(c, std::vector<double>{2, 0, 0}, 1.0), InvalidInput);
    CHECK_THROWS_AS(eval_metric(c, std::vector<double>{0, 0, 0}, 10.0), InvalidInput);
    CHECK_THROWS_AS(eval_partials(c, std::vector<double>{0, 0, 0}, 1.0, 3, 0), InvalidInput);
    CHECK_THROWS_AS(builtin("nope"), InvalidInput);
    CHECK_THROWS_AS(builtin("conformal_flat", json{{"bogus", 1}}), InvalidInput);
    CHECK_THROWS_AS(builtin("linear_hyperbolic", json{{"f", {3, -1}}}), InvalidInput);
    CHECK_THROWS_AS(builtin("linear_hyperbolic", json{{"f", {-5, 1}}}), InvalidInput);
    CHECK_THROWS_AS(builtin("linear_hyperbolic", json{{"n", 4}}), InvalidInput);
    CHECK_NOTHROW(builtin("linear_hyperbolic", json{{"f", {"1/2", 2}}}));
}

TEST_CASE("lightcone agrees with the pulled-back cone") {
    // F(x, s) = s (1, sigma(x)) with sigma the inverse stereographic projection onto S^3,
    // q = -y0^2 + y1^2 + ... + y4^2. The induced metric is D F^T Q D F.
    const auto lc = std::get<LightlikeChart>(builtin("lightcone"));
    CHECK(lc.n() == 4);
    auto embed = [](const Eigen::Vector4d& v) {
        const Eigen::Vector3d x = v.head<3>();
        const double s = v(3);
        const double q = 1.0 + x.squaredNorm();
        Eigen::VectorXd y(5);
        y(0) = s;
        y.segment<3>(1) = s * 2.0 * x / q;
        y(4) = s * (1.0 - x.squaredNorm()) / q;
        return y;
    };
    Eigen::VectorXd qd(5);
    qd << -1, 1, 1, 1, 1;
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Vector4d v(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), rng.uniform(0.6, 1.9));
        Eigen::MatrixXd d(5, 4);
        const double h = 1e-6;
        for (int k = 0; k < 4; ++k) {
            Eigen::Vector4d e = Eigen::Vector4d::Zero();
            e(k) = h;
            d.col(k) = (embed(v + e) - embed(v - e)) / (2 * h);
        }
        const Eigen::MatrixXd g = d.transpose() * qd.asDiagonal() * d;
        const std::vector<double> x{v(0), v(1), v(2)};
        CHECK(rel(eval_metric(lc, x, v(3)), g) < 1e-7);
    }
    const Eigen::MatrixXd origin = eval_metric(lc, std::vector<double>{0, 0, 0}, 1.0);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
    expect.topLeftCorner(3, 3) = 4.0 * Eigen::MatrixXd::Identity(3, 3);
    CHECK(origin == expect);
}

TEST_CASE("exact partials agree with finite differences") {
    const auto c = std::get<GcsChart>(chart_from_json(json::parse(kCurvedChart)));
    Rng rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        const std::vector<double> x{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
        const double r = rng.uniform(1.1, 1.9);
        const auto d1 = eval_partials(c, x, r, 1, 0);
        const auto dr = eval_partials(c, x, r, 0, 1);
        const auto d2 = eval_partials(c, x, r, 2, 0);
        const auto d11 = eval_partials(c, x, r, 1, 1);
        for (int i = 0; i < 2; ++i) {
            const Eigen::MatrixXd exact = d1.at(SymIndex{{i}});
            CHECK(rel(diff_x(c, x, r, i, 1e-4), exact) < 1e-6);
            const double e3 = (diff_x(c, x, r, i, 1e-3) - exact).cwiseAbs().maxCoeff();
            const double e4 = (diff_x(c, x, r, i, 1e-4) - exact).cwiseAbs().maxCoeff();
            if (e3 > 1e-9) CHECK(e3 / e4 == doctest::Approx(100.0).epsilon(0.3));

            // second order: difference the exact first partials
            for (int j = 0; j < 2; ++j) {
                auto xp = x, xm = x;
                xp[static_cast<std::size_t>(j)] += 1e-4;
                xm[static_cast<std::size_t>(j)] -= 1e-4;
                const Eigen::MatrixXd fd =
                    (eval_partials(c, xp, r, 1, 0).at(SymIndex{{i}}) - eval_partials(c, xm, r, 1, 0).at(SymIndex{{i}})) / 2e-4;
                CHECK(rel(fd, d2.at(SymIndex{{std::min(i, j), std::max(i, j)}})) < 1e-6);
            }
            const Eigen::MatrixXd mixed = (eval_partials(c, x, r + 1e-4, 1, 0).at(SymIndex{{i}}) -
                                           eval_partials(c, x, r - 1e-4, 1, 0).at(SymIndex{{i}})) / 2e-4;
            CHECK(rel(mixed, d11.at(SymIndex{{i}})) < 1e-6);
        }
        CHECK(rel(diff_r(c, x, r, 1e-4), dr.blocks[0]) < 1e-6);
        const double e3 = (diff_r(c, x, r, 1e-3) - dr.blocks[0]).cwiseAbs().maxCoeff();
        const double e4 = (diff_r(c, x, r, 1e-4) - dr.blocks[0]).cwiseAbs().maxCoeff();
        CHECK(e3 / e4 == doctest::Approx(100.0).epsilon(0.3));

        // polarization: apply on (w1, w2) equals the bilinear combination of blocks
        const Eigen::VectorXd w1 = rng.normal_vector(2), w2 = rng.normal_vector(2);
        Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) expect += w1(i) * w2(j) * d2.at(SymIndex{{std::min(i, j), std::max(i, j)}});
        const std::vector<Eigen::VectorXd> ws{w1, w2};
        CHECK(rel(d2.apply(ws), expect) < 1e-12);
    }
}

TEST_CASE("genericity profiles") {
    const auto cf = genericity_report(gcs_builtin("conformal_flat"), 3);
    CHECK(cf.nowhere_tr);
    CHECK(cf.generic);
    CHECK(cf.samples == 81);
    const auto pn = genericity_report(gcs_builtin("product_nonrigid"), 3);
    CHECK(pn.nowhere_tr);
    CHECK_FALSE(pn.generic);
    CHECK(pn.first_degenerate.has_value());
    CHECK_FALSE(pn.first_vanishing.has_value());
    CHECK(genericity_report(gcs_builtin("linear_hyperbolic"), 3).generic);
    CHECK(genericity_report(gcs_builtin("product_nonrigid", json{{"epsilon", 0.1}}), 3).generic);
    CHECK_THROWS_AS(genericity_report(gcs_builtin("conformal_flat"), 1), InvalidInput);

    // congruence by a linear change of x keeps the pointwise verdicts
    Rng rng(53);
    const auto c = std::get<GcsChart>(chart_from_json(json::parse(kCurvedChart)));
    for (const auto& pt : sample_grid({{-0.5, 0.5}, {-0.5, 0.5}, {1, 2}}, 3)) {
        const std::vector<double> x{pt[0], pt[1]};
        const Eigen::MatrixXd j = metric_at(c, x, pt[2]);
        const Eigen::MatrixXd j01 = eval_partials(c, x, pt[2], 0, 1).blocks[0];
        const Eigen::MatrixXd m = rng.well_conditioned(2);
        const auto a = point_genericity(j, j01);
        const auto b = point_genericity(m.transpose() * j * m, m.transpose() * j01 * m);
        CHECK(a.nonzero == b.nonzero);
        CHECK(a.nondegenerate == b.nondegenerate);
        CHECK(a.signature == b.signature);
    }
}

TEST_CASE("lift and quotient") {
    for (const std::string name : {"conformal_flat", "product_nonrigid", "linear_hyperbolic"}) {
        const auto c = gcs_builtin(name);
        const auto lc = lift_to_lightlike(c);
        CHECK(lc.n() == c.n() + 1);
        const auto back = quotient_to_gcs(lc);
        CHECK(back.n() == c.n());
        for (int i = 0; i < c.n(); ++i)
            for (int j = 0; j < c.n(); ++j) CHECK(back.entry(i, j) == c.entry(i, j));
        CHECK(back.name() == c.name());
        const auto g = genericity_report(c, 3);
        const auto lg = genericity_report(lc, 3);
        CHECK(g.generic == lg.generic);
        CHECK(g.nowhere_tr == lg.nowhere_tr);
        const std::vector<double> x(static_cast<std::size_t>(c.n()), 0.1);
        const Eigen::MatrixXd full = eval_metric(lc, x, 1.5);
        CHECK(full.topLeftCorner(c.n(), c.n()) == metric_at(c, x, 1.5));
        CHECK(full.row(c.n()).isZero(0.0));
    }
    const auto cone = quotient_to_gcs(std::get<LightlikeChart>(builtin("lightcone")));
    CHECK(genericity_report(cone, 3).generic);

    // b = (1 + x^2) dx^2 does not depend on t: transversally Riemannian
    FieldMatrix flat(2, std::vector<RationalField>(2, RationalField::zero(2)));
    flat[0][0] = RationalField(Polynomial::constant(2, 1) + Polynomial::variable(2, 0) * Polynomial::variable(2, 0));
    const LightlikeChart tr(2, {{-1, 1}}, {0, 1}, flat);
    CHECK_THROWS_AS(quotient_to_gcs(tr), InvalidInput);

    FieldMatrix tilted = flat;
    tilted[0][1] = RationalField(Polynomial::variable(2, 1));
    tilted[1][0] = tilted[0][1];
    CHECK_THROWS_AS(LightlikeChart(2, {{-1, 1}}, {0, 1}, tilted), InvalidInput);
}

TEST_CASE("chart validation") {
    FieldMatrix indefinite(2, std::vector<RationalField>(2, RationalField::zero(3)));
    indefinite[0][0] = RationalField(Polynomial::variable(3, 2));
    indefinite[1][1] = RationalField(Polynomial::constant(3, 1) - Polynomial::variable(3, 2));
    CHECK_THROWS_AS(GcsChart(2, {{-1, 1}, {-1, 1}}, {0.5, 2}, indefinite), InvalidInput);

    FieldMatrix pole(1, std::vector<RationalField>(1, RationalField::zero(2)));
    pole[0][0] = RationalField(Polynomial::constant(2, 1), Polynomial::variable(2, 0));
    CHECK_THROWS_AS(GcsChart(1, {{-1, 1}}, {0.5, 2}, pole), InvalidInput);

    FieldMatrix asym(2, std::vector<RationalField>(2, RationalField::zero(3)));
    asym[0][0] = asym[1][1] = RationalField(Polynomial::variable(3, 2));
    asym[0][1] = RationalField(Polynomial::constant(3, mpq_class(1, 10)));
    CHECK_THROWS_AS(GcsChart(2, {{-1, 1}, {-1, 1}}, {0.5, 2}, asym), InvalidInput);
}

TEST_CASE("chart JSON") {
    const auto c = std::get<GcsChart>(chart_from_json(json::parse(kCurvedChart)));
    const json canon = chart_to_json(c);
    const auto again = std::get<GcsChart>(chart_from_json(canon));
    CHECK(chart_to_json(again) == canon);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(again.entry(i, j) == c.entry(i, j));

    const auto viab = chart_from_json(json{{"builtin", "product_nonrigid"}, {"params", {{"n", 4}}}});
    CHECK(std::get<GcsChart>(viab).n() == 4);

    auto broken = json::parse(kCurvedChart);
    broken["colour"] = "blue";
    CHECK_THROWS_AS(chart_from_json(broken), InvalidInput);
    broken = json::parse(kCurvedChart);
    broken["entries"][0]["num"][0][1] = {0, 0};
    CHECK_THROWS_AS(chart_from_json(broken), InvalidInput);
    broken = json::parse(kCurvedChart);
    broken["entries"].push_back(broken["entries"][0]);
    CHECK_THROWS_AS(chart_from_json(broken), InvalidInput);
    broken = json::parse(kCurvedChart);
    broken["entries"][0]["num"][0][1] = {0, -1, 0};
    CHECK_THROWS_AS(chart_from_json(broken), InvalidInput);
    broken = json::parse(kCurvedChart);
    broken["entries"][0]["den"] = json::array();
    CHECK_THROWS_AS(chart_from_json(broken), InvalidInput);
}
