#include "streamasp/fixtures.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace streamasp::fixtures {

namespace {

struct Channel {
  const char* sensor;
  double values[2];  // one reading per state
  unsigned weight;
};

// Gas readings change most often so that abnormal episodes are frequent.
constexpr std::array<Channel, 6> kChannels{{
    {"ovenCurrent1", {0, 9.5}, 2},
    {"ovenMotion1", {0, 1}, 2},
    {"trashDoor1", {0, 1}, 2},
    {"trashLight1", {320, 12}, 2},
    {"freezerTemp1", {-18, 6.5}, 1},
    {"gasSensor1", {35, 240}, 4},
}};

}  // namespace

obs::Instant kitchen_origin() { return obs::parse_instant("2011-10-03T07:00:00"); }

std::vector<obs::SensorSample> synthetic_stream(std::size_t horizons, int days, std::uint64_t seed) {
  const std::int64_t minutes = static_cast<std::int64_t>(days) * 1440;
  if (horizons == 0 || days <= 0 || static_cast<std::int64_t>(horizons) > minutes) {
    throw std::invalid_argument("cannot place that many horizons in the given days");
  }
  std::mt19937_64 rng(seed);
  // raw modulo keeps the output identical across standard libraries
  auto below = [&](std::uint64_t n) { return rng() % n; };

  std::set<std::int64_t> at;
  while (at.size() < horizons - 1) at.insert(2 + static_cast<std::int64_t>(below(minutes - 2)));

  unsigned total_weight = 0;
  for (const Channel& c : kChannels) total_weight += c.weight;

  const obs::Instant origin = kitchen_origin();
  std::vector<obs::SensorSample> out;
  std::array<int, kChannels.size()> state{};
  for (std::size_t i = 0; i < kChannels.size(); ++i) out.push_back({origin, kChannels[i].sensor, kChannels[i].values[0]});
  for (std::int64_t minute : at) {
    unsigned pick = static_cast<unsigned>(below(total_weight));
    std::size_t i = 0;
    while (pick >= kChannels[i].weight) pick -= kChannels[i++].weight;
    state[i] ^= 1;
    out.push_back({origin + std::chrono::minutes(minute), kChannels[i].sensor, kChannels[i].values[state[i]]});
  }
  return out;
}

}  // namespace streamasp::fixtures
