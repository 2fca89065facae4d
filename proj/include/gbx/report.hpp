// JSON forms of every report.  Keys are sorted (nlohmann's default map),
// scalars and elements use the one shared printer.
#pragma once

#include <exception>
#include <vector>

#include <json.hpp>

#include "gbx/monge_ampere.hpp"

namespace gbx {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const GradedElement& u);
nlohmann::json to_json(const ScalarExpr& a, const ScalarSpace& sp);
nlohmann::json to_json(const Matrix& m, const ScalarSpace& sp);
nlohmann::json to_json(const Inertia& i);
nlohmann::json to_json(const StructureReport& r);
nlohmann::json to_json(const GeneralizedReport& r);
nlohmann::json to_json(const MA2Report& r, const MAStructure& S);
nlohmann::json to_json(const MA3Report& r, const MAStructure& S);
nlohmann::json to_json(const Generalized3D& g, const MAStructure& S);
nlohmann::json to_json(const JacobiReport& r, const JacobiSystem& J);
nlohmann::json error_json(const std::exception& e);

// {"schema_version": .., "ok": .., "reports": [..]}
nlohmann::json document_json(const std::vector<nlohmann::json>& reports, bool ok);
// Two-space indentation and a trailing newline.
std::string serialize(const nlohmann::json& j);

} // namespace gbx
