#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "streamasp/engine.hpp"
#include "streamasp/error.hpp"

namespace streamasp::engine {
namespace {

using obs::Manifestation;
using Answers = std::vector<std::string>;

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

kb::KnowledgeBase kitchen() { return kb::parse_kb(read(STREAMASP_DATA_DIR "/kitchen.kb.json")); }
std::vector<obs::SensorSample> three_day() { return obs::parse_samples_csv(read(STREAMASP_DATA_DIR "/kitchen-3day.csv")); }

const obs::Instant kDay1 = obs::parse_instant("2011-10-03T07:00:00");

std::vector<Manifestation> initial_states() {
  return {{"oven1", "electriccurrent", "off", 1}, {"oven1", "motion", "off", 1},
          {"trashbin1", "door", "closed", 1},     {"trashbin1", "illumination", "bright", 1},
          {"freezer1", "temperature", "cold", 1}, {"kitchenAir1", "smell", "normal", 1}};
}

std::vector<obs::SensorSample> initial_samples() {
  return {{kDay1, "ovenCurrent1", 0}, {kDay1, "ovenMotion1", 0},   {kDay1, "trashDoor1", 0},
          {kDay1, "trashLight1", 300}, {kDay1, "freezerTemp1", -18}, {kDay1, "gasSensor1", 30}};
}

TEST(Engine, TableHorizonsAtFullResolution) {
  Engine e(kitchen(), Mode::Incremental);
  auto first = e.step(1, initial_states());
  ASSERT_TRUE(first);
  EXPECT_EQ(first->answers, Answers{"airSmellNormal"});

  std::vector<Manifestation> oven{{"oven1", "electriccurrent", "on", 16560}, {"oven1", "motion", "on", 16560}};
  auto a = e.step(16560, oven);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->answers, Answers{"airSmellNormal"});

  std::vector<Manifestation> off{{"oven1", "electriccurrent", "off", 21600}, {"oven1", "motion", "off", 21600}};
  e.step(21600, off);
  std::vector<Manifestation> warm{{"freezer1", "temperature", "warm", 30000}};
  e.step(30000, warm);
  std::vector<Manifestation> abnormal{{"kitchenAir1", "smell", "abnormal", 116400}};
  auto b = e.step(116400, abnormal);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->answers, (Answers{"airSmellAbnormal", "smellRotting"}));
  EXPECT_EQ(e.last_step(), 116400);
}

TEST(Engine, RequiresInitialStates) {
  Engine e(kitchen(), Mode::Incremental);
  auto partial = initial_states();
  partial.pop_back();
  EXPECT_THROW(e.step(1, partial), ValidationError);
  Engine late(kitchen(), Mode::Incremental);
  std::vector<Manifestation> at2;
  for (auto m : initial_states()) {
    m.step = 2;
    at2.push_back(m);
  }
  EXPECT_THROW(late.step(2, at2), ValidationError);
}

TEST(Engine, StepOrder) {
  Engine e(kitchen(), Mode::Incremental);
  e.step(1, initial_states());
  std::vector<Manifestation> none;
  EXPECT_THROW(e.step(1, none), StepOrderError);
  std::vector<Manifestation> mismatched{{"oven1", "motion", "on", 9}};
  EXPECT_THROW(e.step(10, mismatched), StepOrderError);
}

TEST(Engine, FullModelsContainExplained) {
  Options o;
  o.full_models = true;
  Engine e(kitchen(), Mode::Incremental, o);
  auto a = e.step(1, initial_states());
  ASSERT_TRUE(a);
  EXPECT_NE(std::find(a->model.begin(), a->model.end(), "explained(1)"), a->model.end());
  EXPECT_NE(std::find(a->model.begin(), a->model.end(), "manifestation(oven1,motion,off,1)"), a->model.end());
  EXPECT_TRUE(std::is_sorted(a->model.begin(), a->model.end()));
}

TEST(Run, EmptyStreamAfterInitialStates) {
  for (Mode mode : {Mode::Incremental, Mode::Restart}) {
    RunResult r = run(kitchen(), initial_samples(), mode, 1);
    ASSERT_EQ(r.annotations.size(), 1u);
    EXPECT_EQ(r.annotations[0].step, 1);
    EXPECT_EQ(r.annotations[0].answers, Answers{"airSmellNormal"});
    EXPECT_EQ(to_json_line(r.annotations[0]),
              R"({"step":1,"wallTime":"2011-10-03T07:00:00","answers":["airSmellNormal"]})");
  }
}

TEST(Run, ScaledTableAndModeEquivalence) {
  auto samples = three_day();
  RunResult inc = run(kitchen(), samples, Mode::Incremental, 60);
  RunResult rst = run(kitchen(), samples, Mode::Restart, 60);
  EXPECT_EQ(inc.annotations, rst.annotations);
  std::map<Step, Answers> by_step;
  for (const auto& a : inc.annotations) by_step[a.step] = a.answers;
  EXPECT_EQ(by_step.at(276), Answers{"airSmellNormal"});
  EXPECT_EQ(by_step.at(336), (Answers{"airSmellAbnormal", "smellCooking"}));
  EXPECT_EQ(by_step.at(1216), Answers{"airSmellAbnormal"});
  EXPECT_EQ(by_step.at(3492), (Answers{"airSmellAbnormal", "smellRotting"}));
  EXPECT_EQ(obs::format_instant(inc.annotations[1].wall_time), "2011-10-03T11:36:00");
}

TEST(Run, MetricsAreCumulative) {
  RunResult r = run(kitchen(), three_day(), Mode::Incremental, 60);
  ASSERT_EQ(r.metrics.rows.size(), r.annotations.size());
  for (std::size_t i = 1; i < r.metrics.rows.size(); ++i) {
    const auto& a = r.metrics.rows[i - 1];
    const auto& b = r.metrics.rows[i];
    EXPECT_LT(a.step, b.step);
    EXPECT_LE(a.ground_rules, b.ground_rules);
    EXPECT_LE(a.ground_atoms, b.ground_atoms);
    EXPECT_LE(a.cumulative_ms, b.cumulative_ms);
  }
  std::string csv = metrics_csv(r.metrics.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,mode,groundRules,groundAtoms,solveMs,cumulativeMs");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 14), "1,incremental,");
}

TEST(Run, LastReadingInStepWins) {
  auto samples = initial_samples();
  // door opens and closes again within one minute: no change at step 2
  samples.push_back({kDay1 + std::chrono::seconds(125), "trashDoor1", 1});
  samples.push_back({kDay1 + std::chrono::seconds(130), "trashDoor1", 0});
  // motion turns on and the gas reading moves within the normal range
  samples.push_back({kDay1 + std::chrono::seconds(190), "ovenMotion1", 1});
  samples.push_back({kDay1 + std::chrono::seconds(200), "gasSensor1", 50});
  auto hs = horizons(kitchen(), samples, 60);
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_EQ(hs[1].step, 3);
  ASSERT_EQ(hs[1].manifestations.size(), 1u);
  EXPECT_EQ(hs[1].manifestations[0], (Manifestation{"oven1", "motion", "on", 3}));
  EXPECT_EQ(hs[1].wall_time, kDay1 + std::chrono::seconds(190));
}

TEST(Run, StreamErrorsNameTheSample) {
  auto samples = initial_samples();
  samples.push_back({kDay1 + std::chrono::seconds(60), "freezerTemp1", 3.2});  // between cold and warm
  try {
    run(kitchen(), samples, Mode::Incremental, 1);
    FAIL();
  } catch (const ClassificationError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 7"), std::string::npos);
  }
  auto unsorted = initial_samples();
  unsorted.push_back({kDay1 - std::chrono::seconds(1), "gasSensor1", 10});
  EXPECT_THROW(run(kitchen(), unsorted, Mode::Incremental, 1), StepOrderError);
  auto unknown = initial_samples();
  unknown.push_back({kDay1, "windowSensor1", 1});
  EXPECT_THROW(run(kitchen(), unknown, Mode::Incremental, 1), ValidationError);
  EXPECT_THROW(run(kitchen(), {}, Mode::Incremental, 1), ValidationError);
}

TEST(Mode, Names) {
  EXPECT_EQ(to_string(Mode::Incremental), "incremental");
  EXPECT_EQ(parse_mode("restart"), Mode::Restart);
  EXPECT_FALSE(parse_mode("batch"));
}

}  // namespace
}  // namespace streamasp::engine
