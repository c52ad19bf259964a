#pragma once

#include <stdexcept>
#include <string>

namespace flowsched {

enum class ErrorKind {
  MalformedConfig,
  NonMonotoneCost,
  NonConvexCost,
  InvalidCostModel,
  DegenerateCommodity,
  DisconnectedCommodity,
  UnknownEdge,
  UnknownCommodity,
  LoadOutOfRange,
  UnassignedCommodity,
  InvalidPath,
  NegativeWeight,
  Unreachable,
  EnumerationCapExceeded,
  DegenerateInstance,
  NegativeCoefficient,
  InvalidArgument,
  CheckpointOutOfRange,
  Internal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedConfig: return "malformed_config";
    case ErrorKind::NonMonotoneCost: return "non_monotone_cost";
    case ErrorKind::NonConvexCost: return "non_convex_cost";
    case ErrorKind::InvalidCostModel: return "invalid_cost_model";
    case ErrorKind::DegenerateCommodity: return "degenerate_commodity";
    case ErrorKind::DisconnectedCommodity: return "disconnected_commodity";
    case ErrorKind::UnknownEdge: return "unknown_edge";
    case ErrorKind::UnknownCommodity: return "unknown_commodity";
    case ErrorKind::LoadOutOfRange: return "load_out_of_range";
    case ErrorKind::UnassignedCommodity: return "unassigned_commodity";
    case ErrorKind::InvalidPath: return "invalid_path";
    case ErrorKind::NegativeWeight: return "negative_weight";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::EnumerationCapExceeded: return "enumeration_cap_exceeded";
    case ErrorKind::DegenerateInstance: return "degenerate_instance";
    case ErrorKind::NegativeCoefficient: return "negative_coefficient";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::CheckpointOutOfRange: return "checkpoint_out_of_range";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

// Every failure raised by the library carries a kind so callers can branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace flowsched
