#pragma once

#include <string>

#include "json.hpp"

#include "sica/certify.hpp"
#include "sica/experiment.hpp"
#include "sica/lla.hpp"
#include "sica/sirs.hpp"

namespace sica {

using json = nlohmann::json;

// Non-finite doubles become the strings "inf", "-inf" and "nan".
json number(double v);
// Accepts a JSON number or one of the strings written by number().
double to_double(const json& j);

json to_json(const Eigen::VectorXd& v);
json to_json(const IndexSet& s);  // 1-based, as printed to users
json to_json(const PenaltySpec& pen);
json to_json(const RecoveryResult& r);
json to_json(const SelectionFit& fit);
json to_json(const TuningResult& t);
json to_json(const ZEstimatorCertificate& c);
json to_json(const RecoveryCertificate& c);
json to_json(const AoptResult& a);
json to_json(const LocalMinCertificate& c);
json to_json(const OracleAudit& a);
json to_json(const SimConfig& cfg);

// Starts from the preset named by "study" (custom when absent) and overrides
// any fields present. Throws ParseError on unknown keys or bad values.
SimConfig sim_config_from_json(const json& j);

// Serializes with every floating-point value printed to 17 significant digits.
std::string dump(const json& j, int indent = 2);

}  // namespace sica
