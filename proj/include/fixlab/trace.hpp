#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fixlab/adn.hpp"
#include "fixlab/arslanov.hpp"
#include "fixlab/fpf.hpp"
#include "fixlab/injury.hpp"

namespace fixlab::trace {

using Json = nlohmann::json;  // std::map objects: keys come out sorted

inline constexpr std::string_view kSchema = "fixlab-trace/1";
inline constexpr std::string_view kToolVersion = "0.1.0";

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64 over the compact dump, as 16 hex digits.
std::string checksum(const Json& payload);

/// {checksum, config, payload, schema, subcommand, tool_version}
Json make_document(std::string_view subcommand, Json config, Json payload);
/// Indented text with a trailing newline; equal documents render equal bytes.
std::string render(const Json& document);

/// Parses and checks the schema tag and checksum; throws TraceError.
Json load_document(std::string_view text);

// Naturals are written as decimal strings so no width is ever lost.
Json nat(const Nat& n);
Nat to_nat(const Json& j);
Json nats(const std::vector<Nat>& v);
Steps to_steps_checked(const Json& j);

Json outcome(const EvalOutcome& out);
Json grid(const std::vector<GridPoint>& g);
Json fixed_point_report(const FixedPointReport& r);
Json param_report(const ParamFixedPointReport& r);

Json certificate(const Certificate& c);
Certificate to_certificate(const Json& j);
Json fpf_plus_result(const FpfPlusResult& r);

Json candidates(const Candidates& c);
Candidates to_candidates(const Json& j);
Json construction_state(const ConstructionState& s);
ConstructionState to_construction_state(const Json& j);
Json audit_violations(const std::vector<AuditViolation>& v);

Json arslanov_run(const ArslanovRun& run);

Json diagonal_state(const DiagonalState& s);
DiagonalState to_diagonal_state(const Json& j);
Json diagonal_violations(const std::vector<DiagonalViolation>& v);
Json adn_verdict(const AdnVerdict& v);

}  // namespace fixlab::trace
