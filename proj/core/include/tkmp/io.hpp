#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkmp/flatatoms.hpp"
#include "tkmp/moments.hpp"
#include "tkmp/pipeline.hpp"
#include "tkmp/refmeasures.hpp"
#include "tkmp/semialg.hpp"

namespace tkmp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVerdictSchema = "tkmp.verdict/1";
inline constexpr const char* kInstanceSchema = "tkmp.instance/1";

struct Instance {
  int n = 0;
  int d = 0;
  Tms y;
  SemialgebraicSet K;
  std::vector<std::string> inequalities;  // source text, kept for round trips
  std::vector<std::string> equalities;
  std::optional<ReferenceSpec> reference;
  std::string description;
};

// Reads a whole JSON file; syntax errors become ParseError with line/column.
Json read_json_file(const std::string& path);

// Throws ValidationError/ParseError on malformed content.
Instance instance_from_json(const Json& j);
Json instance_to_json(const Instance& inst);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

// Reals may be JSON numbers or strings holding integer, decimal or p/q text.
double parse_real(const Json& v);

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, int n);
Json reference_to_json(const ReferenceSpec& spec);
ReferenceSpec reference_from_json(const Json& j, int n);
Json measure_to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const Json& j, int n);
Json certificate_to_json(const NonexistenceCertificate& c);
NonexistenceCertificate certificate_from_json(const Json& j, int n);
Json tms_values_to_json(const Tms& y);
Tms tms_from_json(const Json& values, int n, int d);

Json verdict_to_json(const MembershipVerdict& v, const Json& echo = Json::object());
Json flat_search_to_json(const FlatSearchResult& r, const Json& echo = Json::object());

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace tkmp
