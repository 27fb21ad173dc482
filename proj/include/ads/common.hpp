#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ads {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance for position/offset comparisons along routes.
inline constexpr double kPosTol = 1e-9;

// Absolute slack for dynamics inequalities (braking envelopes, controllability).
inline constexpr double kDynEps = 1e-9;

// A vehicle counts as standing at a stop line when it can come to a full
// halt within this distance of the line.
inline constexpr double kEntryTol = 0.05;

// Speed below which a vehicle is considered not moving.
inline constexpr double kSpeedTol = 1e-6;

// Remaining route length below which a vehicle is retired.
inline constexpr double kRouteEndTol = 1e-6;

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }
inline double mps_to_kmh(double mps) { return mps * 3.6; }

struct MapError : std::runtime_error {
  explicit MapError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a policy calls the speed controller outside its controllability
// domain. In an accepted run this is a bug, never a recoverable condition.
struct PolicyPreconditionError : std::logic_error {
  explicit PolicyPreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ads
