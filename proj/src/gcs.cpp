#include "rigidity/gcs.hpp"

#include "rigidity/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rigidity::gcs {

namespace {

void check_box(const std::vector<Interval>& box, const char* what) {
    for (const auto& [lo, hi] : box)
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
            throw InvalidInput(std::string(what) + ": every interval needs finite lo <= hi");
}

bool in_interval(double v, const Interval& iv) {
    const double slack = 1e-12 * (1.0 + std::max(std::abs(iv.first), std::abs(iv.second)));
    return std::isfinite(v) && v >= iv.first - slack && v <= iv.second + slack;
}

void check_fields(const FieldMatrix& m, int dim, int nvars, const char* what) {
    if (static_cast<int>(m.size()) != dim) throw InvalidInput(std::string(what) + ": coefficient matrix has the wrong size");
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != dim)
            throw InvalidInput(std::string(what) + ": coefficient matrix has the wrong size");
        for (const auto& f : row)
            if (f.nvars() != nvars)
                throw InvalidInput(std::string(what) + ": coefficient has " + std::to_string(f.nvars()) +
                                   " variables, expected " + std::to_string(nvars));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (!m[i][j].equivalent(m[j][i])) throw InvalidInput(std::string(what) + ": coefficient matrix is not symmetric");
}

std::vector<mpq_class> point_of(std::span<const double> x, double r) {
    std::vector<mpq_class> p = to_rational(x);
    p.push_back(to_rational(r));
    return p;
}

Eigen::MatrixXd evaluate_block(const FieldMatrix& m, int dim, std::span<const mpq_class> p) {
    Eigen::MatrixXd out(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            out(i, j) = m[i][j].evaluate(p).get_d();
            out(j, i) = out(i, j);
        }
    return out;
}

/// Denominators nonzero with one sign per entry and the leading `dim` block PD at every sample.
void validate_on_grid(const FieldMatrix& m, int dim, const std::vector<Interval>& box, int grid, const char* what) {
    if (grid < 1) throw InvalidInput(std::string(what) + ": validation grid must be >= 1");
    std::vector<std::vector<int>> sign(m.size(), std::vector<int>(m.size(), 0));
    for (const auto& sample : sample_grid(box, grid)) {
        const auto p = to_rational(std::span<const double>(sample));
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i; j < m.size(); ++j) {
                const int s = sgn(m[i][j].denominator_at(p));
                if (s == 0)
                    throw InvalidInput(std::string(what) + ": denominator of entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") vanishes on the domain");
                if (sign[i][j] == 0) sign[i][j] = s;
                if (sign[i][j] != s)
                    throw InvalidInput(std::string(what) + ": denominator of entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") changes sign on the domain");
            }
        const Eigen::MatrixXd a = evaluate_block(m, dim, p);
        const Signature sig = form_signature(a);
        if (sig.positive != dim) {
            std::string where;
            for (double v : sample) where += (where.empty() ? "" : ",") + std::to_string(v);
            throw InvalidInput(std::string(what) + ": metric is not positive-definite at sample (" + where + ")");
        }
    }
}

std::vector<Interval> full_box(const std::vector<Interval>& domain, const Interval& interval) {
    auto box = domain;
    box.push_back(interval);
    return box;
}

std::string point_string(std::span<const double> x, double r) {
    std::string s = "(";
    for (double v : x) s += std::to_string(v) + ",";
    return s + std::to_string(r) + ")";
}

PartialTensor partials_of(const FieldMatrix& m, int dim, int x_dims, std::span<const mpq_class> p, int order_x,
                          int order_r) {
    if (order_x < 0 || order_x > 2 || order_r < 0 || order_r > 1)
        throw InvalidInput("eval_partials: orders must satisfy m <= 2, l <= 1");
    PartialTensor out;
    out.dim = dim;
    out.x_dims = x_dims;
    out.m = order_x;
    out.l = order_r;
    const int r_var = x_dims;
    for (const auto& idx : enumerate_sym_indices(x_dims, order_x)) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                RationalField f = m[i][j];
                for (int axis : idx.entries) f = f.derivative(axis);
                if (order_r == 1) f = f.derivative(r_var);
                block(i, j) = f.evaluate(p).get_d();
                block(j, i) = block(i, j);
            }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

} // namespace

std::vector<std::vector<double>> sample_grid(const std::vector<Interval>& box, int per_axis) {
    if (per_axis < 1) throw InvalidInput("sample_grid: need at least one point per axis");
    std::vector<std::vector<double>> axes;
    for (const auto& [lo, hi] : box) {
        std::vector<double> pts;
        if (lo == hi || per_axis == 1) {
            pts.push_back(lo == hi ? lo : 0.5 * (lo + hi));
        } else {
            for (int k = 0; k < per_axis; ++k) pts.push_back(lo + (hi - lo) * k / (per_axis - 1));
            pts.back() = hi;
        }
        axes.push_back(std::move(pts));
    }
    std::vector<std::vector<double>> out{{}};
    for (const auto& pts : axes) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * pts.size());
        for (const auto& prefix : out)
            for (double v : pts) {
                auto q = prefix;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

GcsChart::GcsChart(int n, std::vector<Interval> domain, Interval interval, FieldMatrix a, std::string name, int grid)
    : n_(n), domain_(std::move(domain)), interval_(interval), a_(std::move(a)), name_(std::move(name)), grid_(grid) {
    if (n_ < 1) throw InvalidInput("GcsChart: n must be >= 1");
    if (static_cast<int>(domain_.size()) != n_) throw InvalidInput("GcsChart: domain must have n intervals");
    check_box(domain_, "GcsChart");
    check_box({interval_}, "GcsChart");
    check_fields(a_, n_, n_ + 1, "GcsChart");
    validate_on_grid(a_, n_, full_box(domain_, interval_), grid_, "GcsChart");
}

bool GcsChart::contains(std::span<const double> x, double r) const {
    if (static_cast<int>(x.size()) != n_) return false;
    for (int i = 0; i < n_; ++i)
        if (!in_interval(x[i], domain_[i])) return false;
    return in_interval(r, interval_);
}

LightlikeChart::LightlikeChart(int n, std::vector<Interval> domain, Interval interval, FieldMatrix b,
                               std::string name, int grid)
    : n_(n), domain_(std::move(domain)), interval_(interval), b_(std::move(b)), name_(std::move(name)), grid_(grid) {
    if (n_ < 2) throw InvalidInput("LightlikeChart: total dimension must be >= 2");
    if (static_cast<int>(domain_.size()) != n_ - 1) throw InvalidInput("LightlikeChart: domain must have n-1 intervals");
    check_box(domain_, "LightlikeChart");
    check_box({interval_}, "LightlikeChart");
    check_fields(b_, n_, n_, "LightlikeChart");
    for (int i = 0; i < n_; ++i)
        if (!b_[i][n_ - 1].is_zero() || !b_[n_ - 1][i].is_zero())
            throw InvalidInput("LightlikeChart: kernel is not chart-aligned (b(., d/dt) must vanish identically)");
    FieldMatrix base(n_ - 1);
    for (int i = 0; i + 1 < n_; ++i) base[i].assign(b_[i].begin(), b_[i].end() - 1);
    validate_on_grid(base, n_ - 1, full_box(domain_, interval_), grid_, "LightlikeChart");
}

bool LightlikeChart::contains(std::span<const double> x, double t) const {
    if (static_cast<int>(x.size()) != n_ - 1) return false;
    for (int i = 0; i + 1 < n_; ++i)
        if (!in_interval(x[i], domain_[i])) return false;
    return in_interval(t, interval_);
}

BilinForm eval_metric(const GcsChart& c, std::span<const double> x, double r) {
    if (!c.contains(x, r)) throw InvalidInput("eval_metric: point " + point_string(x, r) + " is outside the chart");
    const auto p = point_of(x, r);
    const Eigen::MatrixXd a = evaluate_block(c.entries(), c.n(), p);
    BilinForm form(a);
    if (form.signature().positive != c.n())
        throw InvalidInput("eval_metric: metric is not positive-definite at " + point_string(x, r));
    return form;
}

Eigen::MatrixXd eval_metric(const LightlikeChart& c, std::span<const double> x, double t) {
    if (!c.contains(x, t)) throw InvalidInput("eval_metric: point " + point_string(x, t) + " is outside the chart");
    const auto p = point_of(x, t);
    const Eigen::MatrixXd b = evaluate_block(c.entries(), c.n(), p);
    if (form_signature(b.topLeftCorner(c.n() - 1, c.n() - 1)).positive != c.n() - 1)
        throw InvalidInput("eval_metric: base block is not positive-definite at " + point_string(x, t));
    return b;
}

const Eigen::MatrixXd& PartialTensor::at(const SymIndex& idx) const {
    return blocks.at(sym_index_rank(x_dims, idx.entries));
}

Eigen::MatrixXd PartialTensor::apply(std::span<const Eigen::VectorXd> w) const {
    if (static_cast<int>(w.size()) != m) throw InvalidInput("PartialTensor::apply: expected m arguments");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    while (true) {
        double weight = 1.0;
        for (int k = 0; k < m; ++k) weight *= w[k](tuple[k]);
        if (weight != 0.0) out += weight * blocks[sym_index_rank_unsorted(x_dims, tuple)];
        int k = m - 1;
        while (k >= 0 && ++tuple[k] == x_dims) tuple[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

PartialTensor eval_partials(const GcsChart& c, std::span<const double> x, double r, int m, int l) {
    if (!c.contains(x, r)) throw InvalidInput("eval_partials: point " + point_string(x, r) + " is outside the chart");
    return partials_of(c.entries(), c.n(), c.n(), point_of(x, r), m, l);
}

PartialTensor eval_partials(const LightlikeChart& c, std::span<const double> x, double t, int m, int l) {
    if (!c.contains(x, t)) throw InvalidInput("eval_partials: point " + point_string(x, t) + " is outside the chart");
    return partials_of(c.entries(), c.n(), c.n() - 1, point_of(x, t), m, l);
}

PointGenericity point_genericity(const Eigen::MatrixXd& j, const Eigen::MatrixXd& j01, const Tolerances& tol) {
    PointGenericity out;
    const double scale = j.cwiseAbs().maxCoeff();
    out.nonzero = j01.cwiseAbs().maxCoeff() > tol.spectral * scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (j01 + j01.transpose()), Eigen::EigenvaluesOnly);
    out.min_abs_eig = es.eigenvalues().cwiseAbs().minCoeff();
    out.signature = form_signature(j01, tol.spectral);
    out.nondegenerate = out.nonzero && out.signature.nondegenerate();
    return out;
}

namespace {

GenericityReport genericity_over(const FieldMatrix& m, int dim, const std::vector<Interval>& box, int grid,
                                 const Tolerances& tol) {
    if (grid < 2) throw InvalidInput("genericity_report: grid must be >= 2");
    const int r_var = static_cast<int>(box.size()) - 1;
    FieldMatrix dm(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) dm[i].push_back(m[i][j].derivative(r_var));

    GenericityReport rep;
    rep.grid = grid;
    rep.nowhere_tr = true;
    rep.generic = true;
    rep.worst_min_abs_eig = std::numeric_limits<double>::infinity();
    for (const auto& sample : sample_grid(box, grid)) {
        const auto p = to_rational(std::span<const double>(sample));
        const PointGenericity pg = point_genericity(evaluate_block(m, dim, p), evaluate_block(dm, dim, p), tol);
        ++rep.samples;
        if (pg.min_abs_eig < rep.worst_min_abs_eig) {
            rep.worst_min_abs_eig = pg.min_abs_eig;
            rep.worst_point = sample;
        }
        if (!pg.nonzero) {
            rep.nowhere_tr = false;
            if (!rep.first_vanishing) rep.first_vanishing = sample;
        }
        if (!pg.nondegenerate) {
            rep.generic = false;
            if (!rep.first_degenerate) rep.first_degenerate = sample;
        }
    }
    return rep;
}

} // namespace

GenericityReport genericity_report(const GcsChart& c, int grid, const Tolerances& tol) {
    return genericity_over(c.entries(), c.n(), full_box(c.domain(), c.interval()), grid, tol);
}

GenericityReport genericity_report(const LightlikeChart& c, int grid, const Tolerances& tol) {
    return genericity_over(c.entries(), c.n() - 1, full_box(c.domain(), c.interval()), grid, tol);
}

LightlikeChart lift_to_lightlike(const GcsChart& c) {
    const int n = c.n() + 1;
    FieldMatrix b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b[i].push_back(i < n - 1 && j < n - 1 ? c.entry(i, j) : RationalField::zero(n));
    return LightlikeChart(n, c.domain(), c.interval(), std::move(b), "lift(" + c.name() + ")", c.validation_grid());
}

GcsChart quotient_to_gcs(const LightlikeChart& lc) {
    const int n = lc.n() - 1;
    for (int i = 0; i <= n; ++i)
        if (!lc.entry(i, n).is_zero() || !lc.entry(n, i).is_zero())
            throw InvalidInput("quotient_to_gcs: kernel is not chart-aligned");
    bool moving = false;
    FieldMatrix a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[i].push_back(lc.entry(i, j));
            if (!lc.entry(i, j).derivative(n).is_zero()) moving = true;
        }
    if (!moving)
        throw InvalidInput("quotient_to_gcs: d/dt b vanishes identically; the metric is transversally Riemannian and "
                           "its quotient is a degenerate (non-regular) GCS");
    std::string name = lc.name();
    if (name.rfind("lift(", 0) == 0 && name.back() == ')') name = name.substr(5, name.size() - 6);
    return GcsChart(n, lc.domain(), lc.interval(), std::move(a), name, lc.validation_grid());
}

// ---------------------------------------------------------------------------------------------
// Built-ins

namespace {

mpq_class json_rational(const nlohmann::json& v, const std::string& what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return parse_rational(v.dump());
    if (v.is_number_float()) return parse_rational(v.dump());
    throw InvalidInput(what + ": expected a number or a decimal string");
}

struct Params {
    const nlohmann::json& j;
    std::string name;

    void allow(std::initializer_list<const char*> keys) const {
        if (!j.is_object()) throw InvalidInput(name + ": params must be an object");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k)) throw InvalidInput(name + ": unknown parameter \"" + k + "\"");
    }
    int integer(const char* key, int fallback) const {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_integer()) throw InvalidInput(name + ": parameter \"" + key + "\" must be an integer");
        return j[key].get<int>();
    }
    Interval interval(const char* key, Interval fallback) const {
        if (!j.contains(key)) return fallback;
        const auto& v = j[key];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw InvalidInput(name + ": parameter \"" + key + "\" must be [lo, hi]");
        return {v[0].get<double>(), v[1].get<double>()};
    }
    std::vector<Interval> box(const char* key, int dims, Interval fallback) const {
        if (!j.contains(key)) return std::vector<Interval>(static_cast<std::size_t>(dims), fallback);
        const auto& v = j[key];
        if (!v.is_array() || static_cast<int>(v.size()) != dims)
            throw InvalidInput(name + ": parameter \"" + key + "\" must list " + std::to_string(dims) + " intervals");
        std::vector<Interval> out;
        for (const auto& iv : v) {
            if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
                throw InvalidInput(name + ": parameter \"" + key + "\" must list [lo, hi] pairs");
            out.emplace_back(iv[0].get<double>(), iv[1].get<double>());
        }
        return out;
    }
};

FieldMatrix zero_fields(int dim, int nvars) {
    return FieldMatrix(static_cast<std::size_t>(dim), std::vector<RationalField>(dim, RationalField::zero(nvars)));
}

GcsChart make_product_nonrigid(const nlohmann::json& params) {
    Params p{params, "product_nonrigid"};
    p.allow({"n", "domain", "interval", "grid", "epsilon"});
    const int n = p.integer("n", 3);
    if (n < 1) throw InvalidInput("product_nonrigid: n must be >= 1");
    const mpq_class eps = params.contains("epsilon") ? json_rational(params["epsilon"], "epsilon") : mpq_class(0);
    const int nv = n + 1;
    FieldMatrix a = zero_fields(n, nv);
    const Polynomial r = Polynomial::variable(nv, n);
    a[0][0] = RationalField(r);
    for (int i = 1; i < n; ++i) a[i][i] = RationalField(Polynomial::constant(nv, 1) + r * eps);
    return GcsChart(n, p.box("domain", n, {-1.0, 1.0}), p.interval("interval", {0.25, 4.0}), std::move(a),
                    "product_nonrigid", p.integer("grid", kDefaultGrid));
}

GcsChart make_conformal_flat(const nlohmann::json& params) {
    Params p{params, "conformal_flat"};
    p.allow({"n", "domain", "interval", "grid"});
    const int n = p.integer("n", 3);
    if (n < 1) throw InvalidInput("conformal_flat: n must be >= 1");
    FieldMatrix a = zero_fields(n, n + 1);
    for (int i = 0; i < n; ++i) a[i][i] = RationalField(Polynomial::variable(n + 1, n));
    return GcsChart(n, p.box("domain", n, {-1.0, 1.0}), p.interval("interval", {0.25, 4.0}), std::move(a),
                    "conformal_flat", p.integer("grid", kDefaultGrid));
}

GcsChart make_linear_hyperbolic(const nlohmann::json& params) {
    Params p{params, "linear_hyperbolic"};
    p.allow({"n", "domain", "interval", "grid", "f"});
    if (p.integer("n", 3) != 3) throw InvalidInput("linear_hyperbolic: the model is three-dimensional (n = 3)");
    const int nv = 4;
    const Interval iv = p.interval("interval", {1.0, 2.75});
    if (!(iv.first > 0.0)) throw InvalidInput("linear_hyperbolic: the interval must lie in r > 0 (r = e^t)");

    std::vector<mpq_class> coeffs{1, 0, 1};
    if (params.contains("f")) {
        const auto& f = params["f"];
        if (!f.is_array() || f.empty()) throw InvalidInput("linear_hyperbolic: \"f\" must be a coefficient list");
        coeffs.clear();
        for (const auto& c : f) coeffs.push_back(json_rational(c, "linear_hyperbolic f"));
    }
    Polynomial f(nv);
    for (std::size_t k = 0; k < coeffs.size(); ++k) f.add_term({0, 0, 0, static_cast<int>(k)}, coeffs[k]);
    const Polynomial df = f.derivative(3);
    for (const auto& s : sample_grid({iv}, 201)) {
        const std::vector<mpq_class> pt{0, 0, 0, to_rational(s[0])};
        if (f.evaluate(pt) <= 0 || df.evaluate(pt) <= 0)
            throw InvalidInput("linear_hyperbolic: f and its derivative must be positive on the interval (fails at r = " +
                               std::to_string(s[0]) + ")");
    }

    const Polynomial r = Polynomial::variable(nv, 3);
    FieldMatrix a = zero_fields(3, nv);
    a[0][0] = RationalField(Polynomial::constant(nv, 1), r * r);
    a[1][1] = RationalField(r * r);
    a[2][2] = RationalField(Polynomial::constant(nv, 1) + f);
    return GcsChart(3, p.box("domain", 3, {-1.0, 1.0}), iv, std::move(a), "linear_hyperbolic",
                    p.integer("grid", kDefaultGrid));
}

LightlikeChart make_lightcone(const nlohmann::json& params) {
    Params p{params, "lightcone"};
    p.allow({"n", "domain", "interval", "grid"});
    const int n = p.integer("n", 4);
    if (n < 2) throw InvalidInput("lightcone: total dimension n must be >= 2");
    const int m = n - 1;
    const Interval iv = p.interval("interval", {0.5, 2.0});
    if (!(iv.first > 0.0)) throw InvalidInput("lightcone: the interval must lie in s > 0");
    Polynomial q = Polynomial::constant(n, 1);
    for (int i = 0; i < m; ++i) q = q + Polynomial::variable(n, i) * Polynomial::variable(n, i);
    const Polynomial s = Polynomial::variable(n, m);
    FieldMatrix b = zero_fields(n, n);
    for (int i = 0; i < m; ++i) b[i][i] = RationalField(s * s * mpq_class(4), q * q);
    return LightlikeChart(n, p.box("domain", m, {-1.0, 1.0}), iv, std::move(b), "lightcone",
                          p.integer("grid", kDefaultGrid));
}

} // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries{
        {"conformal_flat", "gcs",
         "r (dx1^2 + ... + dxn^2): the flat conformal class as a ray of metrics; generic, 2-rigid for n >= 3",
         "n (default 3), domain, interval (default [0.25, 4]), grid"},
        {"product_nonrigid", "gcs",
         "r (dx1)^2 + (dx2)^2 + ... + (dxn)^2: non-generic (rank-one r-derivative) and not rigid; "
         "epsilon adds epsilon r ((dx2)^2 + ... + (dxn)^2), which restores genericity",
         "n (default 3), epsilon (default 0), domain, interval (default [0.25, 4]), grid"},
        {"linear_hyperbolic", "gcs",
         "Anosov-type GCS phi^t_* g0 + f eta (x) eta for the linear hyperbolic flow diag(e^t, e^-t, 1), "
         "written in r = e^t: diag(r^-2, r^2, 1 + f(r)); generic when f, f' > 0",
         "f (coefficients of a polynomial in r, default 1 + r^2), interval (default [1, 2.75]), domain, grid"},
        {"lightcone", "lightlike",
         "the lightcone of -y0^2 + y1^2 + ... + yn-1^2 in stereographic coordinates: "
         "s^2 4/(1+|x|^2)^2 (dx1^2 + ... + dxn-1^2), kernel d/ds",
         "n (total dimension, default 4), domain, interval (default [0.5, 2]), grid"},
    };
    return entries;
}

AnyChart builtin(const std::string& name, const nlohmann::json& params) {
    const nlohmann::json& p = params.is_null() ? nlohmann::json::object() : params;
    if (name == "product_nonrigid") return make_product_nonrigid(p);
    if (name == "conformal_flat") return make_conformal_flat(p);
    if (name == "linear_hyperbolic") return make_linear_hyperbolic(p);
    if (name == "lightcone") return make_lightcone(p);
    throw InvalidInput("unknown built-in structure \"" + name + "\"");
}

} // namespace rigidity::gcs
