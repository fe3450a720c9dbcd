#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "streamasp/error.hpp"
#include "streamasp/kb.hpp"

namespace streamasp::kb {
namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string kitchen_text() { return read(STREAMASP_DATA_DIR "/kitchen.kb.json"); }

// Freezer with one temperature sensor and a gas-sensor target.
KnowledgeBase freezer_kb() {
  KnowledgeBase kb;
  kb.objects.push_back({"Freezer", "freezer1", {{"temperature", {"cold", "warm"}}}});
  kb.sensors.push_back({"freezerTemp1", "freezer1", "temperature", {{1, 3, "cold"}, {4, 10, "warm"}}});
  kb.target = {"Air", "kitchenAir1", "smell", "gasSensor1", 0, 100};
  kb.implicit_events.push_back({"Rotting",
                                 0,
                                 {{"freezer1", "temperature", "warm", 5, 5}},
                                 {{"freezer1", "temperature", "cold", 0, 0}}});
  return kb;
}

std::vector<ViolationKind> kinds(const std::vector<Violation>& vs) {
  std::vector<ViolationKind> out;
  for (const auto& v : vs) out.push_back(v.kind);
  return out;
}

TEST(ParseKb, FreezerDocument) {
  const char* doc = R"({
    "objects": [{"class": "Freezer", "instance": "freezer1",
                 "attributes": [{"name": "temperature", "states": ["cold", "warm"]}]}],
    "sensors": [{"id": "freezerTemp1", "object": "freezer1", "attribute": "temperature",
                 "ranges": [{"min": 1, "max": 3, "state": "cold"}]}],
    "target": {"class": "Air", "instance": "kitchenAir1", "attribute": "smell", "sensor": "gasSensor1",
               "normalMin": 0, "normalMax": 100},
    "implicitEvents": []
  })";
  KnowledgeBase kb = parse_kb(doc);
  ASSERT_EQ(kb.objects.size(), 1u);
  ASSERT_EQ(kb.sensors.size(), 1u);
  EXPECT_EQ(kb.objects[0].attributes[0].states.size(), 2u);
  EXPECT_EQ(kb.sensors[0].ranges[0], (MeasuredStateRange{1, 3, "cold"}));
  EXPECT_EQ(*kb.class_of("freezer1"), "Freezer");
  EXPECT_EQ(*kb.class_of("kitchenAir1"), "Air");
  EXPECT_EQ(*kb.states_of("kitchenAir1", "smell"), (std::vector<std::string>{"normal", "abnormal"}));
}

TEST(ParseKb, ZeroSensorsRejected) {
  const char* doc = R"({
    "objects": [{"class": "Freezer", "instance": "freezer1",
                 "attributes": [{"name": "temperature", "states": ["cold"]}]}],
    "sensors": [],
    "target": {"class": "Air", "instance": "kitchenAir1", "attribute": "smell", "sensor": "gasSensor1",
               "normalMin": 0, "normalMax": 100},
    "implicitEvents": []
  })";
  try {
    parse_kb(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no sensors declared"), std::string::npos);
  }
}

TEST(ParseKb, KitchenFixture) {
  KnowledgeBase kb = parse_kb(kitchen_text());
  EXPECT_EQ(kb.implicit_events.size(), 3u);
  EXPECT_EQ(kb.objects.size(), 3u);
  EXPECT_TRUE(validate(kb).empty());
}

TEST(ParseKb, SyntaxErrorPosition) {
  try {
    parse_kb_document("{\n  \"objects\": [\n    }\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 5u);
  }
}

TEST(ParseKb, ShapeErrors) {
  EXPECT_THROW(parse_kb_document("[]"), ParseError);
  EXPECT_THROW(parse_kb_document(R"({"objects": [], "sensors": [], "implicitEvents": []})"), ParseError);
  std::string text = kitchen_text();
  text.insert(text.find("\"objects\""), "\"extra\": 1, ");
  EXPECT_THROW(parse_kb_document(text), ParseError);
  std::string negative = kitchen_text();
  negative.replace(negative.find("\"effectLifeSpan\": 3600"), 22, "\"effectLifeSpan\": 1.5");
  EXPECT_THROW(parse_kb_document(negative), ParseError);
}

TEST(Validate, InclusiveBoundaryOverlap) {
  KnowledgeBase kb = freezer_kb();
  kb.sensors[0].ranges = {{1, 3, "cold"}, {3, 10, "warm"}};
  EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::Overlap});
}

TEST(Validate, UndeclaredConditionState) {
  KnowledgeBase kb = freezer_kb();
  kb.implicit_events[0].starting[0].state = "boiling";
  EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::UnknownReference});
}

TEST(Validate, ViolationKinds) {
  {
    KnowledgeBase kb = freezer_kb();
    kb.objects.push_back(kb.objects[0]);
    auto k = kinds(validate(kb));
    EXPECT_NE(std::find(k.begin(), k.end(), ViolationKind::Duplicate), k.end());
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.sensors[0].object = "fridge1";
    auto k = kinds(validate(kb));
    EXPECT_NE(std::find(k.begin(), k.end(), ViolationKind::UnknownReference), k.end());
    EXPECT_NE(std::find(k.begin(), k.end(), ViolationKind::Coverage), k.end());
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.sensors[0].ranges[1] = {10, 4, "warm"};
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::InvalidRange});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.implicit_events[0].starting[0].upper = 7;  // upper beyond lower
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::InvalidRange});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.objects[0].class_name = "freezer";
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::InvalidIdentifier});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.implicit_events[0].name = "Freezer";  // event predicate 'freezer' is the class predicate
    auto k = kinds(validate(kb));
    EXPECT_EQ(k, std::vector<ViolationKind>{ViolationKind::NameClash});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.sensors.push_back({"freezerTemp2", "freezer1", "temperature", {{1, 3, "cold"}}});
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::Coverage});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.implicit_events[0].ending.clear();
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::Empty});
  }
  {
    KnowledgeBase kb = freezer_kb();
    kb.implicit_events[0].effect_life_span = -1;
    EXPECT_EQ(kinds(validate(kb)), std::vector<ViolationKind>{ViolationKind::InvalidRange});
  }
}

TEST(Validate, SubjectNamesDeclaration) {
  KnowledgeBase kb = freezer_kb();
  kb.sensors[0].ranges = {{1, 3, "cold"}, {3, 10, "warm"}};
  auto vs = validate(kb);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_NE(vs[0].to_string().find("freezerTemp1"), std::string::npos);
}

TEST(Validate, IndependentOfDeclarationOrder) {
  KnowledgeBase kb = parse_kb(kitchen_text());
  kb.sensors[0].ranges[1].min = 0.3;     // overlap
  kb.sensors[3].object = "oven1";        // unknown attribute, coverage gap
  kb.implicit_events[1].ending[0].state = "ajar";
  auto canonical = [](std::vector<Violation> vs) {
    std::vector<std::pair<int, std::string>> out;
    for (const auto& v : vs) {
      // subjects carry list positions, which move with the order
      std::string m = v.message;
      out.emplace_back(static_cast<int>(v.kind), m);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto expected = canonical(validate(kb));
  ASSERT_GE(expected.size(), 3u);
  std::mt19937 rng(5);
  for (int round = 0; round < 20; ++round) {
    KnowledgeBase shuffled = kb;
    std::shuffle(shuffled.objects.begin(), shuffled.objects.end(), rng);
    std::shuffle(shuffled.sensors.begin(), shuffled.sensors.end(), rng);
    std::shuffle(shuffled.implicit_events.begin(), shuffled.implicit_events.end(), rng);
    EXPECT_EQ(canonical(validate(shuffled)), expected);
  }
}

TEST(Serialize, RoundTrip) {
  KnowledgeBase kb = parse_kb(kitchen_text());
  std::string text = serialize(kb);
  EXPECT_EQ(parse_kb(text), kb);
  EXPECT_EQ(serialize(parse_kb(text)), text);
  KnowledgeBase small = freezer_kb();
  EXPECT_EQ(parse_kb(serialize(small)), small);
}

TEST(AtGranularity, Rescales) {
  KnowledgeBase kb = parse_kb(kitchen_text());
  KnowledgeBase g60 = at_granularity(kb, 60);
  const auto& garbage = g60.implicit_events[1];
  EXPECT_EQ(garbage.name, "Garbage");
  EXPECT_EQ(garbage.effect_life_span, 60);
  EXPECT_EQ(garbage.starting[1].lower, 10);
  EXPECT_EQ(garbage.starting[1].upper, 1);
  const auto& rotting = g60.implicit_events[2];
  EXPECT_EQ(rotting.starting[0].lower, 1440);
  EXPECT_EQ(rotting.starting[0].upper, 1440);
  EXPECT_EQ(rotting.effect_life_span, 120);
  EXPECT_EQ(at_granularity(kb, 1), kb);
  EXPECT_TRUE(validate(g60).empty());
  // windows widen outward, life spans round up
  KnowledgeBase odd = freezer_kb();
  odd.implicit_events[0].effect_life_span = 61;
  odd.implicit_events[0].starting[0].lower = 90;
  odd.implicit_events[0].starting[0].upper = 50;
  KnowledgeBase s = at_granularity(odd, 60);
  EXPECT_EQ(s.implicit_events[0].effect_life_span, 2);
  EXPECT_EQ(s.implicit_events[0].starting[0].lower, 2);
  EXPECT_EQ(s.implicit_events[0].starting[0].upper, 0);
}

TEST(Identifier, Shape) {
  EXPECT_TRUE(is_identifier("trashBin1"));
  EXPECT_TRUE(is_identifier("A"));
  EXPECT_FALSE(is_identifier(""));
  EXPECT_FALSE(is_identifier("1oven"));
  EXPECT_FALSE(is_identifier("trash_bin"));
}

}  // namespace
}  // namespace streamasp::kb
