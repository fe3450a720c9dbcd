#pragma once

#include <chrono>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamasp/kb.hpp"
#include "streamasp/lp/atoms.hpp"

namespace streamasp::obs {

using lp::Step;
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// ISO-8601 `YYYY-MM-DDTHH:MM:SS[.fff][Z]`, read as UTC.
Instant parse_instant(std::string_view text);
/// `YYYY-MM-DDTHH:MM:SS`, with `.fff` appended only when non-zero.
std::string format_instant(Instant t);

struct SensorSample {
  Instant timestamp{};
  std::string sensor_id;
  double value = 0;
};

/// An explicit event: `state` observed on (object, attribute) at `step`.
struct Manifestation {
  std::string object;
  std::string attribute;
  std::string state;
  Step step = 1;

  friend auto operator<=>(const Manifestation&, const Manifestation&) = default;
};

/// Solver step of `ts`: max(1, floor((ts - origin) / granularity)).
/// Throws std::invalid_argument when ts precedes origin or granularity <= 0.
Step to_timestep(Instant ts, Instant origin, std::int64_t granularity_seconds);

/// Throws ClassificationError when no range contains `value`.
const std::string& classify(double value, const kb::SensorDecl& sensor);
std::string_view classify(double value, const kb::TargetDecl& target);

/// State reading of one sample, before change detection.
struct Reading {
  std::string object;
  std::string attribute;
  std::string state;
};
/// Throws ValidationError for an undeclared sensor, ClassificationError for
/// a value outside every range.
Reading read(const SensorSample& sample, const kb::KnowledgeBase& kb);

/// Last emitted state per (object, attribute).
class StateTracker {
 public:
  const std::string* last(std::string_view object, std::string_view attribute) const;
  void set(const std::string& object, const std::string& attribute, const std::string& state);
  std::size_t size() const noexcept { return states_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string, std::less<>> states_;
};

/// Change detection: a manifestation iff the sample's state differs from the
/// last one emitted for its (object, attribute), or none was emitted yet.
/// Throws ValidationError for an undeclared sensor.
std::optional<Manifestation> detect(const SensorSample& sample, StateTracker& tracker, const kb::KnowledgeBase& kb,
                                    Instant origin, std::int64_t granularity_seconds);

/// Reads the `timestamp,sensorId,value` CSV. Rows must be sorted by time.
/// Throws ParseError carrying the 1-based line number.
std::vector<SensorSample> parse_samples_csv(std::string_view text);
std::string format_samples_csv(const std::vector<SensorSample>& samples);

}  // namespace streamasp::obs
