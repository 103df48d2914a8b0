#include "rigidity/errors.hpp"
#include "rigidity/gcs.hpp"

#include <set>

namespace rigidity::gcs {

namespace {

using nlohmann::json;

mpq_class coefficient(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return parse_rational(v.dump());
    throw InvalidInput("chart: coefficients must be decimal strings or numbers");
}

Polynomial polynomial_from(const json& terms, int nvars, const std::string& where) {
    if (!terms.is_array()) throw InvalidInput("chart: " + where + " must be a list of [coef, [exponents]] terms");
    Polynomial p(nvars);
    for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 2 || !t[1].is_array())
            throw InvalidInput("chart: " + where + " terms must be [coef, [exponents]]");
        if (static_cast<int>(t[1].size()) != nvars)
            throw InvalidInput("chart: " + where + " exponent lists must have " + std::to_string(nvars) + " entries");
        Exponents e;
        for (const auto& k : t[1]) {
            if (!k.is_number_integer() || k.get<long long>() < 0)
                throw InvalidInput("chart: exponents must be non-negative integers");
            e.push_back(k.get<int>());
        }
        p.add_term(e, coefficient(t[0]));
    }
    return p;
}

json polynomial_to(const Polynomial& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms()) out.push_back(json::array({c.get_str(), e}));
    return out;
}

std::vector<Interval> intervals_from(const json& v, const std::string& what) {
    if (!v.is_array()) throw InvalidInput("chart: \"" + what + "\" must be a list of [lo, hi]");
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw InvalidInput("chart: \"" + what + "\" entries must be [lo, hi]");
        out.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    return out;
}

json entries_to(const FieldMatrix& m, int dim) {
    json out = json::array();
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            if (m[i][j].is_zero()) continue;
            out.push_back({{"i", i},
                           {"j", j},
                           {"num", polynomial_to(m[i][j].numerator())},
                           {"den", polynomial_to(m[i][j].denominator())}});
        }
    return out;
}

json box_to(const std::vector<Interval>& box) {
    json out = json::array();
    for (const auto& [lo, hi] : box) out.push_back(json::array({lo, hi}));
    return out;
}

} // namespace

AnyChart chart_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("chart: expected a JSON object");
    if (j.contains("builtin")) {
        for (const auto& [k, v] : j.items())
            if (k != "builtin" && k != "params")
                throw InvalidInput("chart: a built-in reference only takes \"builtin\" and \"params\" (found \"" + k + "\")");
        if (!j["builtin"].is_string()) throw InvalidInput("chart: \"builtin\" must be a string");
        return builtin(j["builtin"].get<std::string>(), j.value("params", json::object()));
    }

    static const std::set<std::string> allowed{"kind", "name", "n", "domain", "interval", "entries", "grid"};
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw InvalidInput("chart: unknown field \"" + k + "\"");
    for (const char* k : {"n", "domain", "interval", "entries"})
        if (!j.contains(k)) throw InvalidInput(std::string("chart: missing field \"") + k + "\"");

    const std::string kind = j.value("kind", std::string("gcs"));
    if (kind != "gcs" && kind != "lightlike") throw InvalidInput("chart: \"kind\" must be \"gcs\" or \"lightlike\"");
    if (!j["n"].is_number_integer()) throw InvalidInput("chart: \"n\" must be an integer");
    const int n = j["n"].get<int>();
    if (n < 1 || n > 16) throw InvalidInput("chart: \"n\" out of range");
    const bool lightlike = kind == "lightlike";
    if (lightlike && n < 2) throw InvalidInput("chart: a lightlike chart needs n >= 2");

    const int nvars = lightlike ? n : n + 1;
    const int metric_dims = lightlike ? n - 1 : n;
    const auto domain = intervals_from(j["domain"], "domain");
    const auto& iv = j["interval"];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        throw InvalidInput("chart: \"interval\" must be [lo, hi]");
    const Interval interval{iv[0].get<double>(), iv[1].get<double>()};
    int grid = kDefaultGrid;
    if (j.contains("grid")) {
        if (!j["grid"].is_number_integer()) throw InvalidInput("chart: \"grid\" must be an integer");
        grid = j["grid"].get<int>();
    }
    std::string name = lightlike ? "lightlike_chart" : "chart";
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw InvalidInput("chart: \"name\" must be a string");
        name = j["name"].get<std::string>();
    }

    FieldMatrix m(static_cast<std::size_t>(n), std::vector<RationalField>(n, RationalField::zero(nvars)));
    std::set<std::pair<int, int>> seen;
    if (!j["entries"].is_array()) throw InvalidInput("chart: \"entries\" must be a list");
    for (const auto& e : j["entries"]) {
        if (!e.is_object()) throw InvalidInput("chart: entries must be objects");
        for (const auto& [k, v] : e.items())
            if (k != "i" && k != "j" && k != "num" && k != "den")
                throw InvalidInput("chart: unknown entry field \"" + k + "\"");
        if (!e.contains("i") || !e.contains("j") || !e.contains("num"))
            throw InvalidInput("chart: entries need \"i\", \"j\" and \"num\"");
        if (!e["i"].is_number_integer() || !e["j"].is_number_integer())
            throw InvalidInput("chart: entry indices must be integers");
        int a = e["i"].get<int>(), b = e["j"].get<int>();
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= metric_dims)
            throw InvalidInput("chart: entry index (" + std::to_string(a) + "," + std::to_string(b) + ") out of range" +
                               (lightlike ? " (the last axis is the kernel direction)" : ""));
        if (!seen.insert({a, b}).second)
            throw InvalidInput("chart: entry (" + std::to_string(a) + "," + std::to_string(b) + ") given twice");
        const std::string where = "entry (" + std::to_string(a) + "," + std::to_string(b) + ")";
        Polynomial num = polynomial_from(e["num"], nvars, where + " num");
        Polynomial den = e.contains("den") ? polynomial_from(e["den"], nvars, where + " den")
                                           : Polynomial::constant(nvars, 1);
        RationalField f(std::move(num), std::move(den));
        m[a][b] = f;
        m[b][a] = f;
    }
    if (lightlike) return LightlikeChart(n, domain, interval, std::move(m), name, grid);
    return GcsChart(n, domain, interval, std::move(m), name, grid);
}

json chart_to_json(const GcsChart& c) {
    return {{"kind", "gcs"},          {"name", c.name()},
            {"n", c.n()},             {"domain", box_to(c.domain())},
            {"interval", json::array({c.interval().first, c.interval().second})},
            {"grid", c.validation_grid()}, {"entries", entries_to(c.entries(), c.n())}};
}

json chart_to_json(const LightlikeChart& c) {
    return {{"kind", "lightlike"},    {"name", c.name()},
            {"n", c.n()},             {"domain", box_to(c.domain())},
            {"interval", json::array({c.interval().first, c.interval().second})},
            {"grid", c.validation_grid()}, {"entries", entries_to(c.entries(), c.n() - 1)}};
}

} // namespace rigidity::gcs
