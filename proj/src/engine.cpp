#include "streamasp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

#include "streamasp/compiler.hpp"
#include "streamasp/lp/program.hpp"

namespace streamasp::engine {

std::string_view to_string(Mode mode) { return mode == Mode::Incremental ? "incremental" : "restart"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "incremental") return Mode::Incremental;
  if (text == "restart") return Mode::Restart;
  return std::nullopt;
}

std::string to_json_line(const Annotation& a) {
  nlohmann::ordered_json j;
  j["step"] = a.step;
  j["wallTime"] = obs::format_instant(a.wall_time);
  j["answers"] = a.answers;
  if (!a.model.empty()) j["model"] = a.model;
  return j.dump();
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  char buf[160];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%s,%zu,%zu,%.3f,%.3f\n", static_cast<long long>(r.step),
                  std::string(to_string(r.mode)).c_str(), r.ground_rules, r.ground_atoms, r.solve_ms,
                  r.cumulative_ms);
    out += buf;
  }
  return out;
}

struct Engine::Program {
  explicit Program(const kb::KnowledgeBase& kb) : compiler(kb, lp.atoms()) {
    lp.add_base(compiler.compile_base());
    lp.seal_base();
    projection = compiler.projection();
  }

  void add_step(Step t, std::span<const obs::Manifestation> manifestations) {
    compiler.compile_step(t, manifestations, scratch);
    combined.clear();
    for (auto& r : scratch.facts) combined.push_back(std::move(r));
    for (auto& r : scratch.rules) combined.push_back(std::move(r));
    lp.add_step(t, combined);
  }

  lp::IncrementalProgram lp;
  compiler::Compiler compiler;
  std::vector<lp::PredId> projection;
  compiler::StepRules scratch;
  std::vector<lp::GroundRule> combined;
};

Engine::Engine(kb::KnowledgeBase kb, Mode mode, Options options)
    : kb_(std::move(kb)), mode_(mode), options_(options) {}

Engine::~Engine() = default;

void Engine::check_initial(std::span<const obs::Manifestation> manifestations) const {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& m : manifestations) seen.emplace(m.object, m.attribute);
  auto require = [&](const std::string& object, const std::string& attribute) {
    if (!seen.count({object, attribute})) {
      throw ValidationError("missing initial state of " + object + "." + attribute + " at step 1");
    }
  };
  for (const auto& o : kb_.objects) {
    for (const auto& a : o.attributes) require(o.instance, a.name);
  }
  require(kb_.target.instance, kb_.target.attribute);
}

std::optional<Annotation> Engine::step(Step t, std::span<const obs::Manifestation> manifestations,
                                       obs::Instant wall_time) {
  if (t <= last_) {
    throw StepOrderError("step " + std::to_string(t) + " is not after step " + std::to_string(last_));
  }
  if (last_ == 0) {
    if (t != 1) throw ValidationError("the first horizon must be step 1, got " + std::to_string(t));
    check_initial(manifestations);
  }
  for (const auto& m : manifestations) {
    if (m.step != t) {
      throw StepOrderError("manifestation at step " + std::to_string(m.step) + " passed for step " +
                           std::to_string(t));
    }
  }

  const auto started = std::chrono::steady_clock::now();
  if (mode_ == Mode::Incremental) {
    if (!program_) program_ = std::make_unique<Program>(kb_);
    for (Step s = last_ + 1; s < t; ++s) program_->add_step(s, {});
    program_->add_step(t, manifestations);
  } else {
    history_.insert(history_.end(), manifestations.begin(), manifestations.end());
    program_.reset();
    program_ = std::make_unique<Program>(kb_);
    auto next = history_.begin();
    for (Step s = 1; s <= t; ++s) {
      auto first = next;
      while (next != history_.end() && next->step == s) ++next;
      program_->add_step(s, std::span<const obs::Manifestation>(first, next));
    }
  }
  last_ = t;

  Program& p = *program_;
  p.lp.set_volatile(t, p.compiler.compile_volatile(t));
  std::optional<lp::AnswerSet> model = p.lp.solve();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  MetricsRow row;
  row.step = t;
  row.mode = mode_;
  row.ground_rules = p.lp.rule_count() + 1;  // with the volatile constraint
  row.ground_atoms = p.lp.atoms().size();
  row.solve_ms = ms;
  row.cumulative_ms = (metrics_.rows.empty() ? 0.0 : metrics_.rows.back().cumulative_ms) + ms;
  metrics_.rows.push_back(row);

  if (!model) return std::nullopt;

  lp::AtomTable& atoms = p.lp.atoms();
  auto holds = [&](lp::PredId pred) {
    const lp::Term arg = lp::Term::integer(t);
    std::optional<lp::AtomId> a = atoms.find(pred, std::span<const lp::Term>(&arg, 1));
    return a && model->contains(*a);
  };

  Annotation out;
  out.step = t;
  out.wall_time = wall_time;
  for (lp::PredId pred : p.projection) {
    if (holds(pred)) out.answers.emplace_back(atoms.predicate_name(pred));
  }
  std::sort(out.answers.begin(), out.answers.end());

  if (options_.self_check) {
    const std::string at = " at step " + std::to_string(t);
    if (!holds(p.compiler.explained())) throw SelfCheckError("answer set lacks explained" + at);
    const bool normal = holds(p.compiler.target_normal());
    const bool abnormal = holds(p.compiler.target_abnormal());
    if (normal == abnormal) throw SelfCheckError("answer set does not hold exactly one target state" + at);
    if (!abnormal) {
      for (lp::PredId smell : p.compiler.smell_predicates()) {
        if (holds(smell)) throw SelfCheckError("smell without abnormal target state" + at);
      }
    }
  }
  if (options_.full_models) {
    for (lp::AtomId a : model->atoms()) out.model.push_back(atoms.to_string(a));
    std::sort(out.model.begin(), out.model.end());
  }
  return out;
}

std::vector<Horizon> horizons(const kb::KnowledgeBase& kb, std::span<const obs::SensorSample> samples,
                              std::int64_t granularity_seconds) {
  if (granularity_seconds <= 0) throw ValidationError("granularity must be positive");
  std::vector<Horizon> out;
  if (samples.empty()) return out;

  const obs::Instant origin = samples.front().timestamp;
  obs::StateTracker tracker;
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::pair<std::string, obs::Instant>> pending;  // last reading per (object, attribute)
  Step current = 0;

  auto flush = [&] {
    Horizon h;
    h.step = current;
    for (auto& [key, reading] : pending) {
      const std::string* before = tracker.last(key.first, key.second);
      if (before && *before == reading.first) continue;
      tracker.set(key.first, key.second, reading.first);
      h.manifestations.push_back({key.first, key.second, reading.first, current});
      h.wall_time = std::max(h.wall_time, reading.second);
    }
    pending.clear();
    if (!h.manifestations.empty()) out.push_back(std::move(h));
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const obs::SensorSample& s = samples[i];
    const std::string where = "sample " + std::to_string(i + 1) + ": ";
    if (i > 0 && s.timestamp < samples[i - 1].timestamp) {
      throw StepOrderError(where + "stream is not sorted by timestamp");
    }
    obs::Reading r;
    try {
      r = obs::read(s, kb);
    } catch (const ClassificationError& e) {
      throw ClassificationError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    const Step t = obs::to_timestep(s.timestamp, origin, granularity_seconds);
    if (t != current) {
      flush();
      current = t;
    }
    pending[{std::move(r.object), std::move(r.attribute)}] = {std::move(r.state), s.timestamp};
  }
  flush();
  return out;
}

RunResult run(const kb::KnowledgeBase& kb, std::span<const obs::SensorSample> samples, Mode mode,
              std::int64_t granularity_seconds, Options options) {
  if (samples.empty()) throw ValidationError("the sample stream is empty");
  std::vector<Horizon> hs = horizons(kb, samples, granularity_seconds);
  Engine engine(kb::at_granularity(kb, granularity_seconds), mode, options);
  RunResult result;
  for (const Horizon& h : hs) {
    if (auto a = engine.step(h.step, h.manifestations, h.wall_time)) result.annotations.push_back(std::move(*a));
  }
  result.metrics = engine.metrics();
  return result;
}

}  // namespace streamasp::engine
