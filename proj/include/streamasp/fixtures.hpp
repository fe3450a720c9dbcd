#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streamasp/observation.hpp"

namespace streamasp::fixtures {

/// Parameters of the bundled kitchen-5day.csv stream.
inline constexpr std::size_t kBenchHorizons = 2000;
inline constexpr int kBenchDays = 5;
inline constexpr std::uint64_t kBenchSeed = 2011;

/// Start of the bundled kitchen streams.
obs::Instant kitchen_origin();

/// Synthetic stream for the bundled kitchen knowledge base: every sensor's
/// initial reading at the origin, then `horizons - 1` single-sensor state
/// changes at distinct whole minutes within `days` days. Replayed at a
/// granularity of 60 s or finer, every change is its own horizon.
/// Deterministic in `seed`.
std::vector<obs::SensorSample> synthetic_stream(std::size_t horizons, int days, std::uint64_t seed);

}  // namespace streamasp::fixtures
