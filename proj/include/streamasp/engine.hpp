#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamasp/error.hpp"
#include "streamasp/kb.hpp"
#include "streamasp/lp/atoms.hpp"
#include "streamasp/observation.hpp"

namespace streamasp::engine {

using lp::Step;

enum class Mode { Incremental, Restart };

std::string_view to_string(Mode mode);
/// "incremental" or "restart"
std::optional<Mode> parse_mode(std::string_view text);

/// Projected answer of one solved horizon.
struct Annotation {
  Step step = 0;
  obs::Instant wall_time{};
  std::vector<std::string> answers;  ///< predicate names, sorted
  std::vector<std::string> model;    ///< full answer set, only when requested

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// `{"step":t,"wallTime":"...","answers":[...]}`, plus `"model"` when present.
std::string to_json_line(const Annotation& a);

struct MetricsRow {
  Step step = 0;
  Mode mode = Mode::Incremental;
  std::size_t ground_rules = 0;
  std::size_t ground_atoms = 0;
  double solve_ms = 0;  ///< grounding and solving of this horizon
  double cumulative_ms = 0;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
};

inline constexpr std::string_view kMetricsHeader = "step,mode,groundRules,groundAtoms,solveMs,cumulativeMs";
/// Header line, then one line per row.
std::string metrics_csv(std::span<const MetricsRow> rows);

/// An answer set broke an invariant of compiled programs.
class SelfCheckError : public Error {
 public:
  using Error::Error;
};

struct Options {
  bool full_models = false;
  bool self_check = true;
};

/// Replays manifestations horizon by horizon. The knowledge base must already
/// be expressed in solver steps (see kb::at_granularity).
class Engine {
 public:
  Engine(kb::KnowledgeBase kb, Mode mode, Options options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Grounds steps last+1..t, manifestations belonging to t, and solves
  /// horizon t. Returns nullopt when the horizon is unsatisfiable.
  /// The first call must be at t = 1 with an initial state for every declared
  /// (object, attribute) and the target (ValidationError otherwise).
  std::optional<Annotation> step(Step t, std::span<const obs::Manifestation> manifestations,
                                 obs::Instant wall_time = {});

  Step last_step() const noexcept { return last_; }
  Mode mode() const noexcept { return mode_; }
  const RunMetrics& metrics() const noexcept { return metrics_; }

 private:
  struct Program;

  void check_initial(std::span<const obs::Manifestation> manifestations) const;

  kb::KnowledgeBase kb_;
  Mode mode_;
  Options options_;
  Step last_ = 0;
  std::unique_ptr<Program> program_;
  std::vector<obs::Manifestation> history_;  // restart mode
  RunMetrics metrics_;
};

/// Manifestations of one step after change detection.
struct Horizon {
  Step step = 0;
  obs::Instant wall_time{};  ///< timestamp of the last contributing sample
  std::vector<obs::Manifestation> manifestations;
};

/// Change detection over a sorted sample stream. Step 1 starts at the first
/// sample. Within one step the last reading per (object, attribute) wins and
/// is dropped when it equals the state before the step. Steps without any
/// manifestation are skipped. Errors name the 1-based sample position.
std::vector<Horizon> horizons(const kb::KnowledgeBase& kb, std::span<const obs::SensorSample> samples,
                              std::int64_t granularity_seconds);

struct RunResult {
  std::vector<Annotation> annotations;
  RunMetrics metrics;
};

/// horizons() replayed through an Engine on the knowledge base rescaled to
/// the granularity.
RunResult run(const kb::KnowledgeBase& kb, std::span<const obs::SensorSample> samples, Mode mode,
              std::int64_t granularity_seconds, Options options = {});

}  // namespace streamasp::engine
