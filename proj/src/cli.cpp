#include "rigidity/cli.hpp"

#include "rigidity/braid.hpp"
#include "rigidity/certifier.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/gcs.hpp"
#include "rigidity/prolongation.hpp"
#include "rigidity/report.hpp"
#include "rigidity/rng.hpp"
#include "rigidity/symspace.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace rigidity::cli {

namespace {

using report::Json;
using nlohmann::json;

struct Options {
    std::string command;
    std::string builtin;
    std::string chart;
    std::string params;
    std::string algebra;
    std::string generators;
    std::string mode = "generalized";
    std::string j = "identity";
    std::string jp = "identity";
    std::string r_matrix;
    std::string curve;
    std::string point;
    std::string r;
    std::string r_samples;
    std::string tol;
    std::string output;
    std::string format = "json";
    std::string action;
    int n = 0;
    bool n_given = false;
    int max_order = 3;
    int grid = gcs::kDefaultGrid;
    int samples = 200;
    int threads = 1;
    std::uint64_t seed = 0;
    bool kernel_basis = false;
};

// ----------------------------------------------------------------------------- parsing helpers

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw InvalidInput(what + ": cannot parse \"" + text + "\" as a number");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        out.push_back(parse_double(item, what));
    }
    if (out.empty()) throw InvalidInput(what + ": empty list");
    return out;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t upto = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw InvalidInput("malformed JSON in " + what + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + e.what());
    }
}

/// Inline JSON when the text starts like JSON, otherwise a file path.
json load_json(const std::string& text, const std::string& what) {
    const auto pos = text.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos && (text[pos] == '{' || text[pos] == '[')) return parse_json_text(text, what);
    std::ifstream in(text);
    if (!in) throw InvalidInput(what + ": cannot open file \"" + text + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), what + " (" + text + ")");
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InvalidInput(what + ": expected a non-empty list of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw InvalidInput(what + ": expected a list of rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InvalidInput(what + ": rows have different lengths");
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& v = j[i][k];
            if (v.is_number())
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v.get<double>();
            else if (v.is_string())
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    parse_double(v.get<std::string>(), what);
            else
                throw InvalidInput(what + ": matrix entries must be numbers");
        }
    }
    return m;
}

Eigen::MatrixXd matrix_arg(const std::string& text, const std::string& what) {
    return matrix_from_json(load_json(text, what), what);
}

/// identity | minkowski | random | random:<negatives> | diag:a,b,... | JSON matrix
BilinForm form_arg(const std::string& spec, int n, Rng& rng, const std::string& what) {
    if (spec == "identity") return BilinForm::identity(n);
    if (spec == "minkowski") {
        Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
        d(0) = -1.0;
        return BilinForm::diagonal(d);
    }
    if (spec == "random") return BilinForm(rng.symmetric_with_signature(n, 0));
    if (spec.rfind("random:", 0) == 0) {
        const int neg = static_cast<int>(parse_double(spec.substr(7), what));
        if (neg < 0 || neg > n) throw InvalidInput(what + ": negative count out of range");
        return BilinForm(rng.symmetric_with_signature(n, neg));
    }
    if (spec.rfind("diag:", 0) == 0) {
        const auto d = parse_list(spec.substr(5), what);
        if (static_cast<int>(d.size()) != n) throw InvalidInput(what + ": diagonal needs n entries");
        return BilinForm::diagonal(Eigen::Map<const Eigen::VectorXd>(d.data(), n));
    }
    const Eigen::MatrixXd m = matrix_arg(spec, what);
    if (m.rows() != n || m.cols() != n) throw InvalidInput(what + ": matrix must be n x n");
    return BilinForm(m);
}

// ----------------------------------------------------------------------------- shared pieces

struct Context {
    Options opt;
    Tolerances tol;
    Json config = Json::object();
    Json input = Json::object();
};

Json header(const Context& ctx) {
    Json input = Json::object();
    input["config"] = ctx.config;
    input["input"] = ctx.input;
    Json j = Json::object();
    j["tool_version"] = report::kToolVersion;
    j["command"] = ctx.opt.command;
    j["input_hash"] = report::sha256_hex(report::serialize(input));
    j["config"] = ctx.config;
    return j;
}

void finish(Json& j, const Context& ctx) {
    j["tolerances"] = report::to_json(ctx.tol);
    j["seed"] = ctx.opt.seed;
}

json builtin_params(const Options& opt) {
    json params = opt.params.empty() ? json::object() : load_json(opt.params, "--params");
    if (!params.is_object()) throw InvalidInput("--params must be a JSON object");
    if (opt.n_given) params["n"] = opt.n;
    return params;
}

gcs::AnyChart load_chart(Context& ctx) {
    const Options& opt = ctx.opt;
    if (opt.builtin.empty() == opt.chart.empty()) throw InvalidInput("give exactly one of --builtin and --chart");
    if (!opt.builtin.empty()) {
        const json params = builtin_params(opt);
        ctx.config["builtin"] = opt.builtin;
        ctx.config["params"] = Json::parse(params.dump());
        return gcs::builtin(opt.builtin, params);
    }
    return gcs::chart_from_json(load_json(opt.chart, "--chart"));
}

std::vector<double> point_arg(const Options& opt, int dims) {
    if (opt.point.empty()) return std::vector<double>(static_cast<std::size_t>(dims), 0.0);
    auto p = parse_list(opt.point, "--point");
    if (static_cast<int>(p.size()) != dims)
        throw InvalidInput("--point needs " + std::to_string(dims) + " coordinates, got " + std::to_string(p.size()));
    return p;
}

Json vec_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

// ----------------------------------------------------------------------------- commands

Json cmd_certify(Context& ctx) {
    const gcs::AnyChart any = load_chart(ctx);
    const auto* chart = std::get_if<gcs::GcsChart>(&any);
    if (!chart) throw InvalidInput("certify needs a GCS chart; use the lightlike command for lightlike charts");
    const auto p = point_arg(ctx.opt, chart->n());
    std::vector<double> rs;
    if (!ctx.opt.r_samples.empty() && !ctx.opt.r.empty()) throw InvalidInput("give at most one of --r and --r-samples");
    if (!ctx.opt.r_samples.empty())
        rs = parse_list(ctx.opt.r_samples, "--r-samples");
    else if (!ctx.opt.r.empty())
        rs = {parse_double(ctx.opt.r, "--r")};
    else
        rs = {0.5 * (chart->interval().first + chart->interval().second)};

    ctx.config["point"] = vec_json(p);
    ctx.config["r_samples"] = vec_json(rs);
    ctx.config["grid"] = ctx.opt.grid;
    ctx.config["kernel_basis"] = ctx.opt.kernel_basis;
    ctx.input = Json::parse(gcs::chart_to_json(*chart).dump());

    const auto cert = certifier::gcs_certificate(*chart, p, rs, ctx.opt.grid, ctx.tol, ctx.opt.threads);
    Json j = header(ctx);
    const Json body = report::to_json(cert, ctx.opt.kernel_basis);
    for (const auto& [k, v] : body.items()) j[k] = v;
    finish(j, ctx);
    return j;
}

Json cmd_lightlike(Context& ctx) {
    const gcs::AnyChart any = load_chart(ctx);
    const gcs::LightlikeChart lc = std::holds_alternative<gcs::LightlikeChart>(any)
                                       ? std::get<gcs::LightlikeChart>(any)
                                       : gcs::lift_to_lightlike(std::get<gcs::GcsChart>(any));
    const auto p = point_arg(ctx.opt, lc.base_dim());
    const double t = ctx.opt.r.empty() ? 0.5 * (lc.interval().first + lc.interval().second)
                                       : parse_double(ctx.opt.r, "--r");
    ctx.config["lifted"] = std::holds_alternative<gcs::GcsChart>(any);
    ctx.config["point"] = vec_json(p);
    ctx.config["t"] = t;
    ctx.config["grid"] = ctx.opt.grid;
    ctx.config["kernel_basis"] = ctx.opt.kernel_basis;
    ctx.input = Json::parse(gcs::chart_to_json(lc).dump());

    const auto cert = certifier::lightlike_subrigidity_certificate(lc, p, t, ctx.opt.grid, ctx.tol);
    Json j = header(ctx);
    const Json body = report::to_json(cert, ctx.opt.kernel_basis);
    for (const auto& [k, v] : body.items()) j[k] = v;
    finish(j, ctx);
    return j;
}

prolongation::MatrixAlgebra algebra_arg(Context& ctx) {
    const Options& opt = ctx.opt;
    std::string spec = opt.algebra;
    if (spec.empty() && !opt.generators.empty()) spec = opt.generators;
    if (spec.empty()) throw InvalidInput("prolong needs --algebra (or --generators)");
    ctx.config["algebra"] = spec;

    const auto pos = spec.find_first_not_of(" \t\r\n");
    const bool looks_json = pos != std::string::npos && (spec[pos] == '{' || spec[pos] == '[');
    if (looks_json || std::filesystem::exists(spec)) {
        const json j = load_json(spec, "--algebra");
        const json& gens = j.is_object() ? j.at("generators") : j;
        if (j.is_object())
            for (const auto& [k, v] : j.items())
                if (k != "generators") throw InvalidInput("--algebra: unknown field \"" + k + "\"");
        if (!gens.is_array() || gens.empty()) throw InvalidInput("--algebra: generators must be a non-empty list");
        std::vector<Eigen::MatrixXd> g;
        for (const auto& m : gens) g.push_back(matrix_from_json(m, "--algebra generator"));
        const int n = static_cast<int>(g.front().rows());
        for (const auto& m : g)
            if (m.rows() != n || m.cols() != n) throw InvalidInput("--algebra: generators must all be n x n");
        return prolongation::MatrixAlgebra(n, g, ctx.tol.rank);
    }

    const int n = opt.n_given ? opt.n : 3;
    if (n < 1) throw InvalidInput("--n must be >= 1");
    if (spec == "so") {
        ctx.config["n"] = n;
        return prolongation::so(n);
    }
    if (spec == "co") {
        ctx.config["n"] = n;
        return prolongation::co(n);
    }
    if (spec == "lightlike_orth") {
        ctx.config["n"] = n;
        return prolongation::lightlike_orth(n);
    }
    if (spec == "one_param") {
        if (opt.r_matrix.empty()) throw InvalidInput("--algebra one_param needs --R");
        const Eigen::MatrixXd r = matrix_arg(opt.r_matrix, "--R");
        ctx.config["R"] = report::to_json(r);
        return prolongation::one_param(r);
    }
    if (spec == "orthogonal") {
        const Eigen::MatrixXd b = matrix_arg(opt.j, "--J");
        ctx.config["J"] = report::to_json(b);
        return prolongation::orthogonal_algebra(b);
    }
    throw InvalidInput("unknown algebra \"" + spec + "\" (so, co, lightlike_orth, one_param, orthogonal, or JSON)");
}

Json cmd_prolong(Context& ctx) {
    const prolongation::MatrixAlgebra h = algebra_arg(ctx);
    ctx.config["max_order"] = ctx.opt.max_order;
    ctx.config["kernel_basis"] = ctx.opt.kernel_basis;
    Json gens = Json::array();
    for (const auto& g : h.generators()) gens.push_back(report::to_json(g));
    ctx.input["generators"] = gens;

    const auto type = prolongation::finite_type(h, ctx.opt.max_order, 16, ctx.opt.seed, ctx.tol);
    Json j = header(ctx);
    const Json body = report::to_json(type, h, ctx.opt.kernel_basis);
    for (const auto& [k, v] : body.items()) j[k] = v;
    finish(j, ctx);
    return j;
}

Json cmd_braid(Context& ctx) {
    const int n = ctx.opt.n_given ? ctx.opt.n : 3;
    if (n < 1) throw InvalidInput("--n must be >= 1");
    Rng rng(ctx.opt.seed);
    ctx.config["mode"] = ctx.opt.mode;
    ctx.config["n"] = n;
    ctx.config["kernel_basis"] = ctx.opt.kernel_basis;

    LinearSystem sys;
    KernelReport rep;
    Json forms = Json::object();
    if (ctx.opt.mode == "classical") {
        const BilinForm j = form_arg(ctx.opt.j, n, rng, "--J");
        ctx.config["J"] = ctx.opt.j;
        forms["J"] = report::to_json(j.matrix());
        sys = braid::classical_braid_system(j);
        rep = braid::classical_braid_kernel(j, n, ctx.tol);
    } else if (ctx.opt.mode == "symskew") {
        sys = braid::trilinear_symskew_system(n);
        rep = braid::trilinear_symskew_kernel(n, ctx.tol);
    } else if (ctx.opt.mode == "generalized") {
        const BilinForm j = form_arg(ctx.opt.j, n, rng, "--J");
        const BilinForm jp = form_arg(ctx.opt.jp, n, rng, "--Jp");
        ctx.config["J"] = ctx.opt.j;
        ctx.config["Jp"] = ctx.opt.jp;
        forms["J"] = report::to_json(j.matrix());
        forms["Jp"] = report::to_json(jp.matrix());
        sys = braid::generalized_braid_system(j, jp, n);
        rep = braid::generalized_braid_kernel(j, jp, n, ctx.tol);
    } else {
        throw InvalidInput("--mode must be generalized, classical or symskew");
    }
    ctx.input = forms;
    Json j = header(ctx);
    j["forms"] = forms;
    j["kernel"] = report::to_json(rep, ctx.opt.kernel_basis, ctx.opt.kernel_basis ? &sys : nullptr);
    if (rep.kernel_dim > 0) j["witness"] = report::to_json(certifier::make_witness(sys, rep));
    finish(j, ctx);
    return j;
}

symspace::SpdCurve builtin_curve(const std::string& name, int n, int samples) {
    if (samples < 3) throw InvalidInput("--samples must be >= 3");
    std::vector<symspace::SpdCurve::Sample> out;
    if (name == "scaling_ray") {
        for (int k = 0; k < samples; ++k) {
            const double t = static_cast<double>(k) / (samples - 1);
            out.push_back({t, symspace::SpdPoint(std::exp(t) * Eigen::MatrixXd::Identity(n, n))});
        }
        return symspace::SpdCurve(std::move(out), false);
    }
    if (name == "rotation_circle") {
        if (n != 2) throw InvalidInput("rotation_circle is a curve in Sym+(R^2); use --n 2");
        const Eigen::Matrix2d d = Eigen::Vector2d(2.0, 0.5).asDiagonal();
        for (int k = 0; k < samples; ++k) {
            const double th = std::numbers::pi * k / (samples - 1);
            Eigen::Matrix2d rot;
            rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            Eigen::MatrixXd b = rot.transpose() * d * rot;
            if (k == samples - 1) b = d;
            out.push_back({th, symspace::SpdPoint(0.5 * (b + b.transpose()))});
        }
        return symspace::SpdCurve(std::move(out), true);
    }
    throw InvalidInput("unknown built-in curve \"" + name + "\" (scaling_ray, rotation_circle)");
}

symspace::SpdCurve curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("samples")) throw InvalidInput("--curve: expected {\"closed\", \"samples\"}");
    for (const auto& [k, v] : j.items())
        if (k != "closed" && k != "samples") throw InvalidInput("--curve: unknown field \"" + k + "\"");
    std::vector<symspace::SpdCurve::Sample> out;
    for (const auto& s : j["samples"]) {
        if (!s.is_object() || !s.contains("t") || !s.contains("matrix") || !s["t"].is_number())
            throw InvalidInput("--curve: samples must be {\"t\": number, \"matrix\": [[...]]}");
        out.push_back({s["t"].get<double>(), symspace::SpdPoint(matrix_from_json(s["matrix"], "--curve matrix"))});
    }
    return symspace::SpdCurve(std::move(out), j.value("closed", false));
}

Json cmd_symspace(Context& ctx) {
    const Options& opt = ctx.opt;
    if (opt.builtin.empty() == opt.curve.empty()) throw InvalidInput("give exactly one of --builtin and --curve");
    const int n = opt.n_given ? opt.n : (opt.builtin == "rotation_circle" ? 2 : 1);
    const symspace::SpdCurve c = opt.builtin.empty() ? curve_from_json(load_json(opt.curve, "--curve"))
                                                     : builtin_curve(opt.builtin, n, opt.samples);
    if (!opt.builtin.empty()) {
        ctx.config["builtin"] = opt.builtin;
        ctx.config["n"] = n;
    }
    ctx.config["samples"] = opt.samples;
    Json samples = Json::array();
    for (const auto& s : c.samples()) {
        Json e = Json::object();
        e["t"] = s.t;
        e["matrix"] = report::to_json(s.point.matrix());
        samples.push_back(e);
    }
    ctx.input["closed"] = c.closed();
    ctx.input["samples"] = samples;

    const auto sp = symspace::speeds(c);
    const symspace::SpdCurve re = symspace::arclength_reparam(c, opt.samples);
    const auto re_sp = symspace::speeds(re);
    Json j = header(ctx);
    j["dim"] = c.dim();
    j["closed"] = c.closed();
    j["input_samples"] = static_cast<int>(c.size());
    j["length"] = symspace::curve_length(c);
    j["speed_min"] = *std::min_element(sp.begin(), sp.end());
    j["speed_max"] = *std::max_element(sp.begin(), sp.end());
    Json rj = Json::object();
    rj["samples"] = opt.samples;
    rj["length"] = symspace::curve_length(re);
    rj["speed_min"] = *std::min_element(re_sp.begin(), re_sp.end());
    rj["speed_max"] = *std::max_element(re_sp.begin(), re_sp.end());
    j["arclength_reparam"] = rj;
    if (c.closed()) j["circle_mean"] = report::to_json(symspace::circle_mean(c).matrix());
    finish(j, ctx);
    return j;
}

Json cmd_examples(Context& ctx) {
    if (ctx.opt.action != "list") throw InvalidInput("usage: examples list");
    Json j = Json::object();
    j["tool_version"] = report::kToolVersion;
    j["command"] = "examples";
    Json list = Json::array();
    for (const auto& e : gcs::catalog()) {
        Json x = Json::object();
        x["name"] = e.name;
        x["kind"] = e.kind;
        x["description"] = e.description;
        x["params"] = e.params;
        list.push_back(x);
    }
    j["builtins"] = list;
    Json curves = Json::array();
    curves.push_back("scaling_ray: e^t Id on [0, 1] (symspace)");
    curves.push_back("rotation_circle: R(th)^T diag(2, 1/2) R(th), th in [0, pi], closed (symspace)");
    j["curves"] = curves;
    return j;
}

} // namespace

RunResult run(const std::vector<std::string>& args, const std::optional<std::string>& env_tol) {
    RunResult result;
    Context ctx;
    Options& opt = ctx.opt;

    CLI::App app{"Rigidity certificates for generalized conformal structures and lightlike metrics", "rigidity_lab"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--tol", opt.tol, "relative rank/spectral tolerance (default 1e-10, or RIGIDITY_LAB_TOL)");
        sub->add_option("--seed", opt.seed, "random seed (default 0)");
        sub->add_option("--output", opt.output, "write the report to this path instead of stdout");
        sub->add_option("--format", opt.format, "json (default) or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_flag("--kernel-basis", opt.kernel_basis, "include kernel basis vectors");
        sub->add_option("--n", opt.n, "dimension")->each([&](const std::string&) { opt.n_given = true; });
    };
    const auto chart_opts = [&](CLI::App* sub) {
        sub->add_option("--builtin", opt.builtin, "built-in structure name");
        sub->add_option("--chart", opt.chart, "chart JSON file or inline JSON");
        sub->add_option("--params", opt.params, "built-in parameters as JSON");
        sub->add_option("--point", opt.point, "comma-separated base point (default origin)");
        sub->add_option("--grid", opt.grid, "genericity sample points per axis (default 5)");
    };

    CLI::App* prolong = app.add_subcommand("prolong", "prolongations and finite type of a matrix algebra");
    common(prolong);
    prolong->add_option("--algebra", opt.algebra, "so | co | lightlike_orth | one_param | orthogonal | JSON");
    prolong->add_option("--generators", opt.generators, "JSON list of generator matrices");
    prolong->add_option("--R", opt.r_matrix, "matrix for one_param (JSON)");
    prolong->add_option("--J", opt.j, "form for orthogonal (JSON)");
    prolong->add_option("--max-order", opt.max_order, "largest prolongation order (default 3)");

    CLI::App* braid_cmd = app.add_subcommand("braid", "braid systems");
    common(braid_cmd);
    braid_cmd->add_option("--mode", opt.mode, "generalized (default) | classical | symskew");
    braid_cmd->add_option("--J", opt.j, "identity | minkowski | random[:neg] | diag:a,b,.. | JSON");
    braid_cmd->add_option("--Jp", opt.jp, "as --J");

    CLI::App* certify = app.add_subcommand("certify", "2-rigidity certificate of a GCS at a point");
    common(certify);
    chart_opts(certify);
    certify->add_option("--r", opt.r, "fiber parameter");
    certify->add_option("--r-samples", opt.r_samples, "comma-separated fiber parameters");
    certify->add_option("--threads", opt.threads, "worker threads for r samples (output does not depend on it)");

    CLI::App* lightlike = app.add_subcommand("lightlike", "(3,1) sub-rigidity certificate of a lightlike metric");
    common(lightlike);
    chart_opts(lightlike);
    lightlike->add_option("--r", opt.r, "fiber parameter t");
    lightlike->add_option("--threads", opt.threads, "accepted for uniformity; the computation is sequential");

    CLI::App* sym = app.add_subcommand("symspace", "length, arc-length reparameterization and mean of SPD curves");
    common(sym);
    sym->add_option("--builtin", opt.builtin, "scaling_ray | rotation_circle");
    sym->add_option("--curve", opt.curve, "curve JSON file or inline JSON");
    sym->add_option("--samples", opt.samples, "sample count (default 200)");

    CLI::App* examples = app.add_subcommand("examples", "catalog of built-in structures");
    examples->add_option("action", opt.action, "list")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        result.report = app.help();
        return result;
    } catch (const CLI::CallForAllHelp&) {
        result.report = app.help("", CLI::AppFormatMode::All);
        return result;
    } catch (const CLI::ParseError& e) {
        result.status = kExitInvalid;
        result.error = e.what();
        return result;
    }
    for (CLI::App* sub : app.get_subcommands()) opt.command = sub->get_name();
    if (opt.threads < 1) {
        result.status = kExitInvalid;
        result.error = "--threads must be >= 1";
        return result;
    }

    try {
        if (!opt.tol.empty())
            ctx.tol = Tolerances::with_relative(parse_double(opt.tol, "--tol"));
        else if (env_tol && !env_tol->empty())
            ctx.tol = Tolerances::with_relative(parse_double(*env_tol, "RIGIDITY_LAB_TOL"));
        if (!(ctx.tol.rank > 0.0) || !(ctx.tol.rank < 1.0)) throw InvalidInput("tolerance must lie in (0, 1)");
        if (opt.grid < 2) throw InvalidInput("--grid must be >= 2");
        if (opt.max_order < 1 || opt.max_order > prolongation::kMaxOrder)
            throw InvalidInput("--max-order must be in [1, " + std::to_string(prolongation::kMaxOrder) + "]");

        Json out;
        if (opt.command == "certify")
            out = cmd_certify(ctx);
        else if (opt.command == "lightlike")
            out = cmd_lightlike(ctx);
        else if (opt.command == "prolong")
            out = cmd_prolong(ctx);
        else if (opt.command == "braid")
            out = cmd_braid(ctx);
        else if (opt.command == "symspace")
            out = cmd_symspace(ctx);
        else
            out = cmd_examples(ctx);

        result.report = opt.format == "text" ? report::serialize_text(out) : report::serialize(out);
        if (!opt.output.empty()) {
            std::ofstream f(opt.output, std::ios::binary);
            if (!f) throw InvalidInput("cannot write --output \"" + opt.output + "\"");
            f << result.report;
            result.wrote_file = true;
        }
    } catch (const InvalidInput& e) {
        result.status = kExitInvalid;
        result.error = e.what();
        result.report.clear();
    } catch (const NumericalFailure& e) {
        result.status = kExitNumerical;
        result.error = e.what();
        result.report.clear();
    } catch (const std::exception& e) {
        result.status = kExitNumerical;
        result.error = std::string("internal failure: ") + e.what();
        result.report.clear();
    }
    return result;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> env;
    if (const char* v = std::getenv("RIGIDITY_LAB_TOL")) env = std::string(v);
    const RunResult r = run(args, env);
    if (r.status != kExitOk) {
        std::cerr << "error: " << r.error << "\n";
        return r.status;
    }
    if (!r.wrote_file) std::cout << r.report;
    return r.status;
}

} // namespace rigidity::cli
