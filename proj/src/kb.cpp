#include "streamasp/kb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "streamasp/compiler.hpp"
#include "streamasp/error.hpp"

namespace streamasp::kb {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const AttributeDecl* ObjectDecl::attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::optional<std::string_view> KnowledgeBase::class_of(std::string_view instance) const {
  if (instance == target.instance) return std::string_view(target.class_name);
  for (const auto& o : objects) {
    if (o.instance == instance) return std::string_view(o.class_name);
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> KnowledgeBase::states_of(std::string_view instance,
                                                                  std::string_view attribute) const {
  if (is_target(instance, attribute)) return std::vector<std::string>{std::string(kNormal), std::string(kAbnormal)};
  for (const auto& o : objects) {
    if (o.instance != instance) continue;
    if (const AttributeDecl* a = o.attribute(attribute)) return a->states;
  }
  return std::nullopt;
}

const SensorDecl* KnowledgeBase::sensor(std::string_view id) const {
  for (const auto& s : sensors) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 0x80;
  });
}

// ---------------------------------------------------------------------------
// Document reading

namespace {

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0, 0);
  }

  static const json& field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
  }

  static void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool known = std::any_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; });
      if (!known) fail(path, "unknown key '" + k + "'");
    }
  }

  static std::string string(const json& obj, const std::string& path, const char* key) {
    const json& v = field(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
  }

  static double number(const json& obj, const std::string& path, const char* key) {
    const json& v = field(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
  }

  static std::int64_t steps(const json& obj, const std::string& path, const char* key) {
    const json& v = field(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer number of steps");
    if (v.is_number_unsigned()) return static_cast<std::int64_t>(v.get<std::uint64_t>());
    return v.get<std::int64_t>();
  }

  static const json& array(const json& obj, const std::string& path, const char* key) {
    const json& v = field(obj, path, key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
  }

  static std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

  static std::vector<TemporalCondition> conditions(const json& list, const std::string& path) {
    std::vector<TemporalCondition> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& c = list[i];
      std::string p = at(path, i);
      only_keys(c, p, {"object", "attribute", "state", "lower", "upper"});
      out.push_back({string(c, p, "object"), string(c, p, "attribute"), string(c, p, "state"), steps(c, p, "lower"),
                     steps(c, p, "upper")});
    }
    return out;
  }

  static KnowledgeBase read(const json& doc) {
    KnowledgeBase kb;
    only_keys(doc, "document", {"objects", "sensors", "target", "implicitEvents"});

    const json& objects = array(doc, "document", "objects");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const json& o = objects[i];
      std::string p = at("objects", i);
      only_keys(o, p, {"class", "instance", "attributes"});
      ObjectDecl obj{string(o, p, "class"), string(o, p, "instance"), {}};
      const json& attrs = array(o, p, "attributes");
      for (std::size_t j = 0; j < attrs.size(); ++j) {
        const json& a = attrs[j];
        std::string pa = at(p + ".attributes", j);
        only_keys(a, pa, {"name", "states"});
        AttributeDecl attr{string(a, pa, "name"), {}};
        const json& states = array(a, pa, "states");
        for (std::size_t k = 0; k < states.size(); ++k) {
          if (!states[k].is_string()) fail(at(pa + ".states", k), "expected a string");
          attr.states.push_back(states[k].get<std::string>());
        }
        obj.attributes.push_back(std::move(attr));
      }
      kb.objects.push_back(std::move(obj));
    }

    const json& sensors = array(doc, "document", "sensors");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
      const json& s = sensors[i];
      std::string p = at("sensors", i);
      only_keys(s, p, {"id", "object", "attribute", "ranges"});
      SensorDecl sensor{string(s, p, "id"), string(s, p, "object"), string(s, p, "attribute"), {}};
      const json& ranges = array(s, p, "ranges");
      for (std::size_t j = 0; j < ranges.size(); ++j) {
        const json& r = ranges[j];
        std::string pr = at(p + ".ranges", j);
        only_keys(r, pr, {"min", "max", "state"});
        sensor.ranges.push_back({number(r, pr, "min"), number(r, pr, "max"), string(r, pr, "state")});
      }
      kb.sensors.push_back(std::move(sensor));
    }

    const json& t = field(doc, "document", "target");
    only_keys(t, "target", {"class", "instance", "attribute", "sensor", "normalMin", "normalMax"});
    kb.target = {string(t, "target", "class"),     string(t, "target", "instance"),
                 string(t, "target", "attribute"), string(t, "target", "sensor"),
                 number(t, "target", "normalMin"), number(t, "target", "normalMax")};

    const json& events = array(doc, "document", "implicitEvents");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const json& e = events[i];
      std::string p = at("implicitEvents", i);
      only_keys(e, p, {"name", "effectLifeSpan", "starting", "ending"});
      kb.implicit_events.push_back({string(e, p, "name"), steps(e, p, "effectLifeSpan"),
                                    conditions(array(e, p, "starting"), p + ".starting"),
                                    conditions(array(e, p, "ending"), p + ".ending")});
    }
    return kb;
  }
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

KnowledgeBase parse_kb_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte);
    std::string what = e.what();
    // drop the library's "[json.exception.parse_error.101] parse error at line x, column y: " prefix
    if (auto colon = what.find(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw ParseError("syntax error: " + what, line, column);
  }
  return Reader::read(doc);
}

KnowledgeBase parse_kb(std::string_view text) {
  KnowledgeBase kb = parse_kb_document(text);
  auto violations = validate(kb);
  if (!violations.empty()) {
    std::string what = violations.front().message;
    for (const auto& v : violations) what += "\n  " + v.to_string();
    throw ValidationError(what);
  }
  return kb;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(const KnowledgeBase& kb) : kb_(kb) {}

  std::vector<Violation> run() {
    if (kb_.objects.empty()) add(ViolationKind::Empty, "objects", "no objects declared");
    if (kb_.sensors.empty()) add(ViolationKind::Empty, "sensors", "no sensors declared");
    objects();
    target();
    sensors();
    coverage();
    events();
    names();
    return std::move(out_);
  }

 private:
  void add(ViolationKind kind, std::string subject, std::string message) {
    out_.push_back({kind, std::move(subject), std::move(message)});
  }

  static std::string label(const std::string& path, const std::string& id) { return path + " (" + id + ")"; }

  void identifier(const std::string& subject, const std::string& id, bool capitalized) {
    if (!is_identifier(id)) {
      add(ViolationKind::InvalidIdentifier, subject, "'" + id + "' is not an identifier");
      return;
    }
    bool upper = std::isupper(static_cast<unsigned char>(id[0])) != 0;
    if (upper != capitalized) {
      add(ViolationKind::InvalidIdentifier, subject,
          "'" + id + "' must start with " + (capitalized ? "an upper-case" : "a lower-case") + " letter");
    }
  }

  void objects() {
    std::set<std::string> instances;
    for (std::size_t i = 0; i < kb_.objects.size(); ++i) {
      const ObjectDecl& o = kb_.objects[i];
      std::string subject = label("objects[" + std::to_string(i) + "]", o.instance);
      identifier(subject, o.class_name, true);
      identifier(subject, o.instance, false);
      if (!instances.insert(o.instance).second) {
        add(ViolationKind::Duplicate, subject, "duplicate object instance '" + o.instance + "'");
      }
      if (o.attributes.empty()) add(ViolationKind::Empty, subject, "object declares no attributes");
      std::set<std::string> names;
      for (const AttributeDecl& a : o.attributes) {
        std::string sub = subject + "." + a.name;
        identifier(sub, a.name, false);
        if (!names.insert(a.name).second) add(ViolationKind::Duplicate, sub, "duplicate attribute '" + a.name + "'");
        if (a.states.empty()) add(ViolationKind::Empty, sub, "attribute declares no states");
        std::set<std::string> states;
        for (const std::string& s : a.states) {
          identifier(sub, s, false);
          if (!states.insert(s).second) add(ViolationKind::Duplicate, sub, "duplicate state '" + s + "'");
        }
      }
    }
  }

  void target() {
    const TargetDecl& t = kb_.target;
    std::string subject = label("target", t.instance);
    identifier(subject, t.class_name, true);
    identifier(subject, t.instance, false);
    identifier(subject, t.attribute, false);
    identifier(subject, t.sensor, false);
    for (const ObjectDecl& o : kb_.objects) {
      if (o.instance == t.instance) {
        add(ViolationKind::Duplicate, subject, "target instance '" + t.instance + "' is also declared as an object");
      }
    }
    if (!(t.normal_min <= t.normal_max)) add(ViolationKind::InvalidRange, subject, "normalMin exceeds normalMax");
  }

  void sensors() {
    std::set<std::string> ids{kb_.target.sensor};
    for (std::size_t i = 0; i < kb_.sensors.size(); ++i) {
      const SensorDecl& s = kb_.sensors[i];
      std::string subject = label("sensors[" + std::to_string(i) + "]", s.id);
      identifier(subject, s.id, false);
      if (!ids.insert(s.id).second) add(ViolationKind::Duplicate, subject, "duplicate sensor id '" + s.id + "'");

      const ObjectDecl* object = nullptr;
      for (const ObjectDecl& o : kb_.objects) {
        if (o.instance == s.object) object = &o;
      }
      const AttributeDecl* attribute = object ? object->attribute(s.attribute) : nullptr;
      if (!object) {
        add(ViolationKind::UnknownReference, subject, "unknown object '" + s.object + "'");
      } else if (!attribute) {
        add(ViolationKind::UnknownReference, subject,
            "object '" + s.object + "' has no attribute '" + s.attribute + "'");
      }

      if (s.ranges.empty()) add(ViolationKind::Empty, subject, "sensor declares no ranges");
      for (const MeasuredStateRange& r : s.ranges) {
        if (!(r.min <= r.max)) add(ViolationKind::InvalidRange, subject, "range for '" + r.state + "' has min > max");
        if (attribute && std::find(attribute->states.begin(), attribute->states.end(), r.state) ==
                             attribute->states.end()) {
          add(ViolationKind::UnknownReference, subject,
              "state '" + r.state + "' is not declared on " + s.object + "." + s.attribute);
        }
      }
      for (std::size_t a = 0; a < s.ranges.size(); ++a) {
        for (std::size_t b = a + 1; b < s.ranges.size(); ++b) {
          const auto& x = s.ranges[a];
          const auto& y = s.ranges[b];
          if (x.min <= y.max && y.min <= x.max) {
            add(ViolationKind::Overlap, subject, "ranges for '" + x.state + "' and '" + y.state + "' overlap");
          }
        }
      }
    }
  }

  // exactly one sensor per declared (object, attribute)
  void coverage() {
    std::map<std::pair<std::string, std::string>, int> count;
    for (const SensorDecl& s : kb_.sensors) ++count[{s.object, s.attribute}];
    for (const ObjectDecl& o : kb_.objects) {
      for (const AttributeDecl& a : o.attributes) {
        int n = count[{o.instance, a.name}];
        if (n == 0) {
          add(ViolationKind::Coverage, o.instance + "." + a.name, "no sensor observes this attribute");
        } else if (n > 1) {
          add(ViolationKind::Coverage, o.instance + "." + a.name, "observed by " + std::to_string(n) + " sensors");
        }
      }
    }
  }

  void conditions(const std::string& subject, const std::vector<TemporalCondition>& list, const char* which) {
    if (list.empty()) add(ViolationKind::Empty, subject, std::string("no ") + which + " conditions");
    int windows = 0;
    for (const TemporalCondition& c : list) {
      std::string triple = c.object + "." + c.attribute + "=" + c.state;
      auto states = kb_.states_of(c.object, c.attribute);
      if (!states || std::find(states->begin(), states->end(), c.state) == states->end()) {
        add(ViolationKind::UnknownReference, subject, std::string(which) + " condition references undeclared " + triple);
      }
      if (c.upper < 0 || c.lower < c.upper) {
        add(ViolationKind::InvalidRange, subject,
            std::string(which) + " condition on " + triple + " needs 0 <= upper <= lower");
      }
      if (c.lower != c.upper) ++windows;
    }
    if (windows > 1) {
      add(ViolationKind::InvalidRange, subject,
          std::string("at most one ") + which + " condition may span more than one step");
    }
  }

  void events() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < kb_.implicit_events.size(); ++i) {
      const ImplicitEventDecl& e = kb_.implicit_events[i];
      std::string subject = label("implicitEvents[" + std::to_string(i) + "]", e.name);
      identifier(subject, e.name, true);
      if (!names.insert(e.name).second) add(ViolationKind::Duplicate, subject, "duplicate implicit event '" + e.name + "'");
      if (e.effect_life_span < 0) add(ViolationKind::InvalidRange, subject, "effectLifeSpan is negative");
      conditions(subject, e.starting, "starting");
      conditions(subject, e.ending, "ending");
    }
  }

  // Every synthesized predicate name must denote exactly one thing.
  void names() {
    std::map<std::string, std::string> owner;
    auto claim = [&](const std::string& name, const std::string& meaning) {
      auto [it, inserted] = owner.emplace(name, meaning);
      if (!inserted && it->second != meaning) {
        add(ViolationKind::NameClash, name, "predicate name used for both " + it->second + " and " + meaning);
      }
    };
    for (const char* fixed : {"manifestation", "explained", "attribute", "state"}) claim(fixed, "a built-in predicate");
    auto object = [&](const std::string& cls, const std::string& attr, const std::vector<std::string>& states) {
      if (!is_identifier(cls) || !is_identifier(attr)) return;
      claim(compiler::class_predicate(cls), "class " + cls);
      for (const std::string& s : states) {
        if (!is_identifier(s)) continue;
        claim(compiler::predicate_name(cls, attr, s), cls + "." + attr + "=" + s);
      }
    };
    for (const ObjectDecl& o : kb_.objects) {
      for (const AttributeDecl& a : o.attributes) object(o.class_name, a.name, a.states);
    }
    const TargetDecl& t = kb_.target;
    object(t.class_name, t.attribute, {std::string(kNormal), std::string(kAbnormal)});
    if (is_identifier(t.class_name)) claim(compiler::observation_marker(t.class_name), "the observation marker");
    for (const ImplicitEventDecl& e : kb_.implicit_events) {
      if (!is_identifier(e.name)) continue;
      auto names = compiler::event_predicates(e.name);
      claim(names.event, "event " + e.name);
      claim(names.end, "end of event " + e.name);
      claim(names.smell, "smell of event " + e.name);
    }
  }

  const KnowledgeBase& kb_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const KnowledgeBase& kb) { return Validator(kb).run(); }

// ---------------------------------------------------------------------------

std::string serialize(const KnowledgeBase& kb) {
  auto conditions = [](const std::vector<TemporalCondition>& list) {
    ordered_json out = ordered_json::array();
    for (const auto& c : list) {
      out.push_back({{"object", c.object},
                     {"attribute", c.attribute},
                     {"state", c.state},
                     {"lower", c.lower},
                     {"upper", c.upper}});
    }
    return out;
  };

  ordered_json doc;
  doc["objects"] = ordered_json::array();
  for (const auto& o : kb.objects) {
    ordered_json attrs = ordered_json::array();
    for (const auto& a : o.attributes) attrs.push_back({{"name", a.name}, {"states", a.states}});
    doc["objects"].push_back({{"class", o.class_name}, {"instance", o.instance}, {"attributes", attrs}});
  }
  doc["sensors"] = ordered_json::array();
  for (const auto& s : kb.sensors) {
    ordered_json ranges = ordered_json::array();
    for (const auto& r : s.ranges) ranges.push_back({{"min", r.min}, {"max", r.max}, {"state", r.state}});
    doc["sensors"].push_back({{"id", s.id}, {"object", s.object}, {"attribute", s.attribute}, {"ranges", ranges}});
  }
  const TargetDecl& t = kb.target;
  doc["target"] = {{"class", t.class_name}, {"instance", t.instance},   {"attribute", t.attribute},
                   {"sensor", t.sensor},    {"normalMin", t.normal_min}, {"normalMax", t.normal_max}};
  doc["implicitEvents"] = ordered_json::array();
  for (const auto& e : kb.implicit_events) {
    doc["implicitEvents"].push_back({{"name", e.name},
                                     {"effectLifeSpan", e.effect_life_span},
                                     {"starting", conditions(e.starting)},
                                     {"ending", conditions(e.ending)}});
  }
  return doc.dump(2) + "\n";
}

KnowledgeBase at_granularity(const KnowledgeBase& kb, std::int64_t granularity_seconds) {
  if (granularity_seconds <= 0) throw std::invalid_argument("granularity must be positive");
  const std::int64_t g = granularity_seconds;
  auto floor_div = [g](std::int64_t v) { return v / g; };
  auto ceil_div = [g](std::int64_t v) { return (v + g - 1) / g; };
  KnowledgeBase out = kb;
  for (auto& e : out.implicit_events) {
    e.effect_life_span = ceil_div(e.effect_life_span);
    for (auto* list : {&e.starting, &e.ending}) {
      for (auto& c : *list) {
        if (c.lower == c.upper) {
          // a single-step offset stays a single step
          c.lower = c.upper = (c.lower + g / 2) / g;
        } else {
          c.lower = ceil_div(c.lower);
          c.upper = floor_div(c.upper);
        }
      }
    }
  }
  return out;
}

}  // namespace streamasp::kb
