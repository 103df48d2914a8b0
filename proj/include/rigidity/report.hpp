#pragma once

// JSON rendering of reports. Key order is fixed by construction (ordered_json) and
// floats are written with 17 significant digits so reports can be compared byte for byte.

#include "rigidity/certifier.hpp"
#include "rigidity/gcs.hpp"
#include "rigidity/kernel.hpp"
#include "rigidity/prolongation.hpp"
#include "rigidity/tolerances.hpp"

#include <json.hpp>

#include <string>

namespace rigidity::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

/// Deterministic text: 2-space indent, %.17g floats, non-finite floats as "inf", "-inf", "nan".
std::string serialize(const Json& j);
/// "key  value" lines for every leaf, keys padded to a common width.
std::string serialize_text(const Json& j);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

Json to_json(const Tolerances& t);
Json to_json(const KernelReport& r, bool include_basis, const LinearSystem* labels_from = nullptr);
Json to_json(const gcs::GenericityReport& g);
Json to_json(const gcs::PointGenericity& g);
Json to_json(const Eigen::MatrixXd& m);
Json to_json(const Eigen::VectorXd& v);
Json to_json(const certifier::Witness& w);
Json to_json(const certifier::Certificate& c, bool include_basis);
Json to_json(const certifier::LightlikeCertificate& c, bool include_basis);
Json to_json(const prolongation::TypeReport& t, const prolongation::MatrixAlgebra& h, bool include_basis);

std::string label_string(const UnknownLabel& l);

} // namespace rigidity::report
