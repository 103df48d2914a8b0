#include "rigidity/errors.hpp"
#include "rigidity/multilinear.hpp"
#include "rigidity/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace rigidity;

namespace {

SymTensor random_tensor(Rng& rng, int n, int d, Codomain c) {
    SymTensor t(n, d, c);
    std::vector<double> v(t.packed_size() * static_cast<std::size_t>(t.outputs()));
    for (auto& x : v) x = rng.normal();
    return SymTensor(n, d, c, v);
}

std::vector<Eigen::VectorXd> random_args(Rng& rng, int n, int d) {
    std::vector<Eigen::VectorXd> a;
    for (int i = 0; i < d; ++i) a.push_back(rng.normal_vector(n));
    return a;
}

} // namespace

TEST_CASE("enumeration sizes and order") {
    CHECK(enumerate_sym_indices(1, 3).size() == 1);
    CHECK(enumerate_sym_indices(1, 3)[0].entries == std::vector<int>{0, 0, 0});
    const auto six = enumerate_sym_indices(3, 2);
    REQUIRE(six.size() == 6);
    const std::vector<std::vector<int>> expect{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (std::size_t i = 0; i < 6; ++i) CHECK(six[i].entries == expect[i]);

    // brute force: sorted tuples among all n^d tuples
    for (int n = 1; n <= 4; ++n)
        for (int d = 0; d <= 4; ++d) {
            std::set<std::vector<int>> sorted;
            int total = 1;
            for (int k = 0; k < d; ++k) total *= n;
            for (int f = 0; f < total; ++f) {
                std::vector<int> t(static_cast<std::size_t>(d));
                int g = f;
                for (int k = 0; k < d; ++k) {
                    t[static_cast<std::size_t>(k)] = g % n;
                    g /= n;
                }
                std::sort(t.begin(), t.end());
                sorted.insert(t);
            }
            const auto idx = enumerate_sym_indices(n, d);
            CHECK(idx.size() == sorted.size());
            CHECK(idx.size() == binomial(n + d - 1, d));
            CHECK(std::is_sorted(idx.begin(), idx.end()));
            for (std::size_t k = 0; k < idx.size(); ++k) CHECK(sym_index_rank(n, idx[k].entries) == k);
        }
    CHECK(enumerate_sym_indices(4, 3).size() == 20);
}

TEST_CASE("permutation counts") {
    CHECK(permutation_count(SymIndex{{0, 0, 0}}) == 1);
    CHECK(permutation_count(SymIndex{{0, 0, 1}}) == 3);
    CHECK(permutation_count(SymIndex{{0, 1, 2}}) == 6);
    CHECK(permutation_count(SymIndex{{0, 0, 1, 1}}) == 6);
}

TEST_CASE("packed evaluation matches full evaluation") {
    Rng rng(11);
    for (int n : {1, 2, 3, 4})
        for (int d : {1, 2, 3})
            for (Codomain c : {Codomain::scalar, Codomain::vector}) {
                const SymTensor t = random_tensor(rng, n, d, c);
                const FullTensor f = to_full(t);
                for (int trial = 0; trial < 100; ++trial) {
                    const auto args = random_args(rng, n, d);
                    const Eigen::VectorXd a = t.evaluate(args);
                    const Eigen::VectorXd b = evaluate_full(f, args);
                    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
                }
            }
}

TEST_CASE("evaluation is invariant under argument permutation") {
    Rng rng(12);
    const SymTensor t = random_tensor(rng, 3, 3, Codomain::vector);
    auto args = random_args(rng, 3, 3);
    const Eigen::VectorXd ref = t.evaluate(args);
    std::vector<int> p{0, 1, 2};
    while (std::next_permutation(p.begin(), p.end())) {
        std::vector<Eigen::VectorXd> q{args[static_cast<std::size_t>(p[0])], args[static_cast<std::size_t>(p[1])],
                                       args[static_cast<std::size_t>(p[2])]};
        CHECK((t.evaluate(q) - ref).norm() < 1e-12);
    }
}

TEST_CASE("symmetrize") {
    FullTensor f{2, 2, Codomain::scalar, {0.0, 1.0, 0.0, 0.0}};
    const SymTensor s = symmetrize(f);
    CHECK(s.coeff(SymIndex{{0, 1}}) == doctest::Approx(0.5));
    CHECK(s.coeff(SymIndex{{0, 0}}) == 0.0);

    Rng rng(13);
    const SymTensor sym = random_tensor(rng, 3, 3, Codomain::vector);
    const SymTensor again = symmetrize(to_full(sym));
    for (std::size_t i = 0; i < sym.coeffs().size(); ++i) CHECK(again.coeffs()[i] == doctest::Approx(sym.coeffs()[i]).epsilon(1e-14));

    // random full input: direct average over the six orderings
    FullTensor raw{3, 3, Codomain::scalar, {}};
    raw.data.resize(27);
    for (auto& x : raw.data) x = rng.normal();
    const SymTensor avg = symmetrize(raw);
    const auto args = random_args(rng, 3, 3);
    double expect = 0.0;
    std::vector<int> p{0, 1, 2};
    do {
        std::vector<Eigen::VectorXd> q{args[static_cast<std::size_t>(p[0])], args[static_cast<std::size_t>(p[1])],
                                       args[static_cast<std::size_t>(p[2])]};
        expect += evaluate_full(raw, q)(0);
    } while (std::next_permutation(p.begin(), p.end()));
    expect /= 6.0;
    CHECK(avg.evaluate_scalar(args) == doctest::Approx(expect).epsilon(1e-12));

    FullTensor bad{3, 2, Codomain::scalar, {1.0, 2.0}};
    CHECK_THROWS_AS(symmetrize(bad), InvalidInput);
}

TEST_CASE("pushforward laws") {
    Rng rng(14);
    const SymTensor t = random_tensor(rng, 3, 3, Codomain::vector);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    const SymTensor same = pushforward(t, id);
    for (std::size_t i = 0; i < t.coeffs().size(); ++i) CHECK(same.coeffs()[i] == doctest::Approx(t.coeffs()[i]));

    const BilinForm j(rng.symmetric_with_signature(3, 1));
    const SymTensor scaled = pushforward(j.as_tensor(), 3.0 * id);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            std::vector<Eigen::VectorXd> e{Eigen::VectorXd::Unit(3, a), Eigen::VectorXd::Unit(3, b)};
            CHECK(scaled.evaluate_scalar(e) == doctest::Approx(9.0 * j.matrix()(a, b)).epsilon(1e-12));
        }

    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd m = rng.well_conditioned(3);
        const SymTensor back = pushforward(pushforward(t, m), m.inverse());
        CHECK((back.as_vector() - t.as_vector()).cwiseAbs().maxCoeff() < 1e-10);

        // vector-valued: result = M o T o (M^-1, ...)
        const auto args = random_args(rng, 3, 3);
        std::vector<Eigen::VectorXd> pre;
        for (const auto& a : args) pre.push_back(m.inverse() * a);
        CHECK((pushforward(t, m).evaluate(args) - m * t.evaluate(pre)).norm() < 1e-10);

        // functoriality, in the order each convention dictates
        const Eigen::MatrixXd m1 = rng.well_conditioned(3);
        const Eigen::MatrixXd m2 = rng.well_conditioned(3);
        const SymTensor lhs = pushforward(t, m1 * m2);
        const SymTensor rhs = pushforward(pushforward(t, m2), m1);
        CHECK((lhs.as_vector() - rhs.as_vector()).cwiseAbs().maxCoeff() < 1e-10);

        const SymTensor form = random_tensor(rng, 3, 2, Codomain::scalar);
        const SymTensor flhs = pushforward(form, m1 * m2);
        const SymTensor frhs = pushforward(pushforward(form, m1), m2);
        CHECK((flhs.as_vector() - frhs.as_vector()).cwiseAbs().maxCoeff() < 1e-10);
        std::vector<Eigen::VectorXd> two{args[0], args[1]};
        std::vector<Eigen::VectorXd> moved{m1 * args[0], m1 * args[1]};
        CHECK(pushforward(form, m1).evaluate_scalar(two) == doctest::Approx(form.evaluate_scalar(moved)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(pushforward(t, Eigen::MatrixXd::Zero(3, 3)), InvalidInput);
    CHECK_THROWS_AS(pushforward(t, Eigen::MatrixXd::Identity(2, 2)), InvalidInput);
}

TEST_CASE("signatures") {
    CHECK(form_signature(Eigen::MatrixXd::Identity(3, 3)) == Signature{3, 0, 0});
    Eigen::VectorXd mink(4);
    mink << -1, 1, 1, 1;
    const BilinForm m = BilinForm::diagonal(mink);
    CHECK(m.signature() == Signature{3, 1, 0});
    CHECK(m.nondegenerate());
    Eigen::VectorXd deg(3);
    deg << 1, 1, 0;
    CHECK(BilinForm::diagonal(deg).signature() == Signature{2, 0, 1});
    CHECK_FALSE(BilinForm::diagonal(deg).nondegenerate());
    CHECK(form_signature(Eigen::MatrixXd::Zero(3, 3)) == Signature{0, 0, 3});

    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const int neg = trial % 4;
        const Eigen::MatrixXd j = rng.symmetric_with_signature(4, neg);
        const Eigen::MatrixXd q = rng.well_conditioned(4);
        const Signature a = form_signature(j);
        const Eigen::MatrixXd c = q.transpose() * j * q;
        CHECK(form_signature(0.5 * (c + c.transpose())) == a);
        CHECK(a == Signature{4 - neg, neg, 0});
    }
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(BilinForm{asym}, InvalidInput);
}
