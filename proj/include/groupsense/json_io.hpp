#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "groupsense/chart.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/error.hpp"
#include "groupsense/evaluation.hpp"
#include "groupsense/features.hpp"
#include "groupsense/group.hpp"
#include "groupsense/model.hpp"
#include "groupsense/redesign.hpp"
#include "groupsense/shap.hpp"

namespace groupsense {

using Json = nlohmann::json;

/// Model document format version this build reads and writes.
inline constexpr int kModelFormatVersion = 1;

/// Parses a JSON document; syntax errors become kMalformedDocument.
Json read_json(std::istream& in);
Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);

Json chart_to_json(const Chart& chart);
/// Omitted plot fields take their defaults. Type errors throw
/// kMalformedDocument; broken chart invariants throw kInvariantViolation.
Chart chart_from_json(const Json& doc, const std::string& path = "");

Json group_to_json(const Group& group);
Group group_from_json(const Json& doc, const std::string& path);
Json groups_to_json(const std::vector<Group>& groups);
/// Accepts `[["A","B"], ...]`.
std::vector<Group> groups_from_json(const Json& doc, const std::string& path = "/desired");

Json features_to_json(const FeatureVector& features);
FeatureVector features_from_json(const Json& doc, const std::string& path = "/features");

Json save_model(const GroupingModel& model);
/// Error codes: kMalformedDocument, kUnsupportedVersion, kUnknownFeature,
/// kDepthViolation, kPolicyViolation, kInvariantViolation.
GroupingModel load_model(const Json& doc, const std::string& path = "");

Json report_to_json(const DiagnosisReport& report);
Json score_to_json(const PermutationScore& score, bool include_report = true);
Json landscape_to_json(const LandscapeMatrix& matrix);
Json redesign_to_json(const RedesignResult& result, std::uint64_t total);

Json eval_to_json(const EvalReport& report);
Json shap_to_json(const ShapExplanation& explanation);
Json correlation_to_json(const CorrelationMatrix& matrix);

Json error_to_json(const Error& error);

}  // namespace groupsense
