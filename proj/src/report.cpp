#include "rigidity/report.hpp"

#include "rigidity/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rigidity::report {

namespace {

std::string number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

std::string scalar(const Json& j) {
    if (j.is_number_float()) return number(j.get<double>());
    return j.dump();
}

void write(std::ostringstream& os, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(it.key()).dump() << ": ";
            write(os, it.value(), depth + 1);
        }
        os << "\n" << close_pad << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            os << "[]";
            return;
        }
        if (std::all_of(j.begin(), j.end(), [](const Json& e) { return is_scalar(e); })) {
            os << "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) os << ", ";
                first = false;
                os << scalar(e);
            }
            os << "]";
            return;
        }
        os << "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            write(os, e, depth + 1);
        }
        os << "\n" << close_pad << "]";
    } else {
        os << scalar(j);
    }
}

void flatten(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    } else if (j.is_array()) {
        if (std::all_of(j.begin(), j.end(), [](const Json& e) { return is_scalar(e); })) {
            std::string s;
            for (const auto& e : j) s += (s.empty() ? "" : " ") + (e.is_string() ? e.get<std::string>() : scalar(e));
            out.emplace_back(path, s);
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    } else {
        out.emplace_back(path, j.is_string() ? j.get<std::string>() : scalar(j));
    }
}

Json vector_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

} // namespace

std::string serialize(const Json& j) {
    std::ostringstream os;
    write(os, j, 0);
    os << "\n";
    return os.str();
}

std::string serialize_text(const Json& j) {
    std::vector<std::pair<std::string, std::string>> lines;
    flatten(j, "", lines);
    std::size_t width = 0;
    for (const auto& [k, v] : lines) width = std::max(width, k.size());
    std::ostringstream os;
    for (const auto& [k, v] : lines) os << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << "\n";
    return os.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalFailure("sha256: digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

std::string label_string(const UnknownLabel& l) {
    std::string s = l.tensor + "[";
    for (std::size_t i = 0; i < l.axes.size(); ++i) s += (i ? "," : "") + std::to_string(l.axes[i]);
    s += "]";
    if (l.output >= 0) s += "->" + std::to_string(l.output);
    return s;
}

Json to_json(const Tolerances& t) {
    Json j = Json::object();
    j["rank"] = t.rank;
    j["spectral"] = t.spectral;
    j["min_gap_ratio"] = t.min_gap_ratio;
    j["rank_one"] = t.rank_one;
    j["residual"] = t.residual;
    return j;
}

Json to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json to_json(const KernelReport& r, bool include_basis, const LinearSystem* labels_from) {
    Json j = Json::object();
    j["unknowns"] = r.unknowns;
    j["equations"] = r.equations;
    j["rank"] = r.unknowns - r.kernel_dim;
    j["kernel_dim"] = r.kernel_dim;
    j["tol"] = r.tol;
    j["gap_ratio"] = r.gap_ratio;
    j["verdict"] = to_string(r.verdict);
    if (!r.projections.empty()) {
        Json p = Json::object();
        for (const auto& [name, dim] : r.projections) p[name] = dim;
        j["projections"] = p;
    }
    j["singular_values"] = vector_json(r.singular_values);
    if (include_basis) {
        if (labels_from) {
            Json labels = Json::array();
            for (const auto& l : labels_from->unknowns) labels.push_back(label_string(l));
            j["unknown_labels"] = labels;
        }
        Json basis = Json::array();
        for (Eigen::Index c = 0; c < r.kernel_basis.cols(); ++c) basis.push_back(to_json(Eigen::VectorXd(r.kernel_basis.col(c))));
        j["kernel_basis"] = basis;
    }
    return j;
}

Json to_json(const gcs::GenericityReport& g) {
    Json j = Json::object();
    j["grid"] = g.grid;
    j["samples"] = g.samples;
    j["nowhere_tr"] = g.nowhere_tr;
    j["generic"] = g.generic;
    j["worst_min_abs_eig"] = g.worst_min_abs_eig;
    j["worst_point"] = vector_json(g.worst_point);
    j["first_vanishing"] = g.first_vanishing ? vector_json(*g.first_vanishing) : Json(nullptr);
    j["first_degenerate"] = g.first_degenerate ? vector_json(*g.first_degenerate) : Json(nullptr);
    return j;
}

Json to_json(const gcs::PointGenericity& g) {
    Json j = Json::object();
    j["nonzero"] = g.nonzero;
    j["nondegenerate"] = g.nondegenerate;
    j["min_abs_eig"] = g.min_abs_eig;
    j["signature"] = Json::array({g.signature.positive, g.signature.negative, g.signature.zero});
    return j;
}

Json to_json(const certifier::Witness& w) {
    Json j = Json::object();
    j["residual"] = w.residual;
    Json nz = Json::array();
    for (Eigen::Index i = 0; i < w.vector.size(); ++i)
        if (w.vector(i) != 0.0) nz.push_back(Json::array({label_string(w.labels[static_cast<std::size_t>(i)]), w.vector(i)}));
    j["nonzero_coefficients"] = nz;
    return j;
}

Json to_json(const certifier::Certificate& c, bool include_basis) {
    Json j = Json::object();
    j["structure"] = c.structure;
    j["n"] = c.n;
    Json point = Json::object();
    point["x"] = vector_json(c.point);
    Json rs = Json::array();
    for (const auto& s : c.samples) rs.push_back(s.r);
    point["r"] = rs;
    j["point"] = point;
    j["genericity"] = to_json(c.genericity);
    Json samples = Json::array();
    for (const auto& s : c.samples) {
        Json e = Json::object();
        e["r"] = s.r;
        e["genericity"] = to_json(s.genericity);
        if (s.level1) {
            e["level1"] = to_json(*s.level1, include_basis);
        } else {
            e["level1"] = nullptr;
            e["level1_note"] = s.level1_note;
        }
        e["level2"] = to_json(s.level2, include_basis);
        e["verdict"] = s.verdict;
        if (s.witness) e["witness"] = to_json(*s.witness);
        samples.push_back(e);
    }
    j["samples"] = samples;
    j["verdict"] = c.verdict;
    return j;
}

Json to_json(const certifier::LightlikeCertificate& c, bool include_basis) {
    Json j = Json::object();
    j["structure"] = c.structure;
    j["n"] = c.n;
    Json point = Json::object();
    point["x"] = vector_json(c.point);
    point["t"] = c.t;
    j["point"] = point;
    Json gen = Json::object();
    gen["at_point"] = to_json(c.genericity);
    gen["grid"] = to_json(c.grid_genericity);
    j["genericity"] = gen;
    j["step1"] = to_json(c.step1, include_basis);
    j["step2"] = to_json(c.step2, include_basis);
    Json tr = to_json(c.transverse, include_basis);
    tr["informational"] = true;
    j["step2_transverse"] = tr;
    Json un = Json::array();
    for (const auto& s : c.unconstrained) un.push_back(s);
    j["unconstrained"] = un;
    j["verdict"] = c.verdict;
    if (c.witness) j["witness"] = to_json(*c.witness);
    return j;
}

Json to_json(const prolongation::TypeReport& t, const prolongation::MatrixAlgebra& h, bool include_basis) {
    Json j = Json::object();
    Json alg = Json::object();
    alg["n"] = h.n();
    alg["dim"] = h.dim();
    j["algebra"] = alg;
    Json dims = Json::array();
    for (int d : t.dims) dims.push_back(d);
    j["dims"] = dims;
    Json result = Json::object();
    if (const auto* f = std::get_if<prolongation::FiniteType>(&t.result)) {
        result["type"] = "FiniteType";
        result["order"] = f->order;
    } else if (const auto* inf = std::get_if<prolongation::InfiniteType>(&t.result)) {
        result["type"] = "InfiniteType";
        Json w = Json::object();
        w["covector"] = to_json(inf->witness.covector);
        w["vector"] = to_json(inf->witness.vector);
        w["ratio"] = inf->witness.ratio;
        w["matrix"] = to_json(inf->witness.matrix);
        result["witness"] = w;
        result["first_prolongation_membership_residual"] = prolongation::membership_residual(h, inf->first_prolongation);
    } else {
        result["type"] = "UnknownBeyond";
        result["max_order"] = std::get<prolongation::UnknownBeyond>(t.result).max_order;
    }
    j["result"] = result;
    j["indeterminate"] = t.indeterminate;
    Json reps = Json::array();
    for (std::size_t d = 0; d < t.reports.size(); ++d) {
        Json r = to_json(t.reports[d], include_basis);
        reps.push_back(r);
    }
    j["reports"] = reps;
    return j;
}

} // namespace rigidity::report
