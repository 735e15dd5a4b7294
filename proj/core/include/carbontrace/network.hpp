#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "carbontrace/types.hpp"

namespace carbontrace {

enum class ViolationKind {
  duplicate_bus_id,
  unknown_bus,
  self_loop,
  nonpositive_susceptance,
  negative_resistance,
  bad_generator_limits,
  negative_intensity,
  bad_cei_params,
  bad_turbine_speeds,
  bad_distribution_params,
  duplicate_attachment,
  bad_penetration,
  bad_base_mva,
  missing_slack,
  multiple_slack,
  slack_without_generator,
  disconnected,
  nonradial_feeder,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string subject;  // id of the offending element
  std::string detail;
};

/// Checks every Network invariant. Returns one entry per violation; an
/// empty list means the network is valid. Violations are data, not
/// failures.
std::vector<Violation> validate(const Network& net);

/// Fills bus_index and all element bus indices. Unknown references keep
/// index -1 (validate reports them).
void resolve_references(Network& net);

/// Throws ValidationError listing every violation if the network is
/// invalid.
void require_valid(const Network& net);

/// Parses, resolves, and validates a network file. Throws ParseError on
/// malformed input and ValidationError (listing all violations) on
/// invariant failures.
Network load_network(const std::filesystem::path& path);

Network parse_network(const std::string& json_text);

std::string network_to_json(const Network& net);

void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace carbontrace
