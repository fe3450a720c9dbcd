#include "streamasp/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "streamasp/error.hpp"
#include "streamasp/lp/text.hpp"

namespace streamasp::compiler {

namespace {

std::string lower_first(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

std::string upper_first(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string triple_key(std::string_view object, std::string_view attribute, std::string_view state) {
  std::string key;
  key.reserve(object.size() + attribute.size() + state.size() + 2);
  key.append(object).push_back('\0');
  key.append(attribute).push_back('\0');
  key.append(state);
  return key;
}

}  // namespace

std::string predicate_name(std::string_view class_name, std::string_view attribute, std::string_view state) {
  return lower_first(class_name) + upper_first(attribute) + upper_first(state);
}

std::string class_predicate(std::string_view class_name) { return lower_first(class_name); }

std::string observation_marker(std::string_view target_class) { return "obs" + upper_first(target_class); }

EventPredicates event_predicates(std::string_view event_name) {
  std::string base = lower_first(event_name);
  return {base, base + "End", "smell" + upper_first(event_name)};
}

std::vector<lp::GroundRule> StepRules::all() const {
  std::vector<lp::GroundRule> out;
  out.reserve(facts.size() + rules.size());
  out.insert(out.end(), facts.begin(), facts.end());
  out.insert(out.end(), rules.begin(), rules.end());
  return out;
}

Compiler::Compiler(const kb::KnowledgeBase& kb, lp::AtomTable& atoms) : kb_(kb), atoms_(atoms) {
  manifestation_ = atoms_.predicate(kManifestation);
  explained_ = atoms_.predicate(kExplained);
  marker_ = atoms_.predicate(observation_marker(kb.target.class_name));

  auto declare = [&](const std::string& cls, const std::string& instance, const std::string& attribute,
                     const std::vector<std::string>& states) {
    for (const std::string& s : states) {
      Triple t{atoms_.predicate(predicate_name(cls, attribute, s)), atoms_.symbol(instance), atoms_.symbol(attribute),
               atoms_.symbol(s), atoms_.predicate(class_predicate(cls))};
      triples_.emplace(triple_key(instance, attribute, s), t);
    }
  };
  for (const kb::ObjectDecl& o : kb.objects) {
    for (const kb::AttributeDecl& a : o.attributes) declare(o.class_name, o.instance, a.name, a.states);
  }
  const kb::TargetDecl& target = kb.target;
  declare(target.class_name, target.instance, target.attribute,
          {std::string(kb::kNormal), std::string(kb::kAbnormal)});
  target_normal_ = atoms_.predicate(predicate_name(target.class_name, target.attribute, kb::kNormal));
  target_abnormal_ = atoms_.predicate(predicate_name(target.class_name, target.attribute, kb::kAbnormal));

  auto conditions = [&](const std::vector<kb::TemporalCondition>& list) {
    std::vector<Condition> out;
    for (const kb::TemporalCondition& c : list) {
      auto it = triples_.find(triple_key(c.object, c.attribute, c.state));
      if (it == triples_.end()) {
        throw ValidationError("temporal condition on undeclared " + c.object + "." + c.attribute + "=" + c.state);
      }
      out.push_back({it->second.pred, c.lower, c.upper});
    }
    return out;
  };
  for (const kb::ImplicitEventDecl& e : kb.implicit_events) {
    EventPredicates names = event_predicates(e.name);
    Event ev{atoms_.predicate(names.event), atoms_.predicate(names.end), atoms_.predicate(names.smell),
             e.effect_life_span, conditions(e.starting), conditions(e.ending)};
    smell_.push_back(ev.smell);
    events_.push_back(std::move(ev));
  }
}

std::vector<lp::GroundRule> Compiler::compile_base() const {
  std::vector<lp::GroundRule> out;
  std::set<lp::AtomId> seen;
  auto fact = [&](lp::AtomId a) {
    if (seen.insert(a).second) out.push_back(lp::GroundRule{a, {}, {}, std::nullopt});
  };
  const lp::PredId attribute = atoms_.predicate("attribute");
  const lp::PredId state = atoms_.predicate("state");
  auto object = [&](const std::string& cls, const std::string& instance) {
    fact(atoms_.atom(atoms_.predicate(class_predicate(cls)), {atoms_.symbol(instance)}));
  };
  for (const kb::ObjectDecl& o : kb_.objects) object(o.class_name, o.instance);
  object(kb_.target.class_name, kb_.target.instance);
  for (const kb::ObjectDecl& o : kb_.objects) {
    for (const kb::AttributeDecl& a : o.attributes) fact(atoms_.atom(attribute, {atoms_.symbol(a.name)}));
  }
  fact(atoms_.atom(attribute, {atoms_.symbol(kb_.target.attribute)}));
  for (const kb::ObjectDecl& o : kb_.objects) {
    for (const kb::AttributeDecl& a : o.attributes) {
      for (const std::string& s : a.states) fact(atoms_.atom(state, {atoms_.symbol(s)}));
    }
  }
  fact(atoms_.atom(state, {atoms_.symbol(kb::kNormal)}));
  fact(atoms_.atom(state, {atoms_.symbol(kb::kAbnormal)}));
  return out;
}

const Compiler::Triple& Compiler::triple(const obs::Manifestation& m) const {
  auto it = triples_.find(triple_key(m.object, m.attribute, m.state));
  if (it == triples_.end()) {
    throw ValidationError("manifestation of undeclared " + m.object + "." + m.attribute + "=" + m.state);
  }
  return it->second;
}

// False when some condition lies entirely before step 1, so the rule can never fire.
bool Compiler::add_conditions(lp::GroundRule& rule, const std::vector<Condition>& conditions, Step t) {
  for (const Condition& c : conditions) {
    if (c.lower == c.upper) {
      if (t - c.lower < 1) return false;
      rule.pos.push_back(atoms_.atom(c.pred, t - c.lower));
      continue;
    }
    const Step to = t - c.upper;
    if (to < 1) return false;
    if (rule.card) throw std::logic_error("more than one windowed condition in a rule");
    rule.card = lp::Interval{c.pred, std::max<Step>(1, t - c.lower), to};
  }
  return true;
}

StepRules Compiler::compile_step(Step t, std::span<const obs::Manifestation> manifestations) {
  StepRules out;
  compile_step(t, manifestations, out);
  return out;
}

void Compiler::compile_step(Step t, std::span<const obs::Manifestation> manifestations, StepRules& out) {
  if (t < 1) throw StepOrderError("step " + std::to_string(t) + " is before step 1");
  out.step = t;
  out.facts.clear();
  out.rules.clear();
  const lp::Term step_term = lp::Term::integer(t);
  auto rule = [](lp::AtomId head) { return lp::GroundRule{head, {}, {}, std::nullopt}; };

  // (a) manifestations and r1
  for (const obs::Manifestation& m : manifestations) {
    if (m.step != t) {
      throw StepOrderError("manifestation " + m.object + "." + m.attribute + "=" + m.state + " at step " +
                           std::to_string(m.step) + " compiled into step " + std::to_string(t));
    }
    const Triple& tr = triple(m);
    const lp::AtomId fact = atoms_.atom(manifestation_, {tr.object, tr.attribute, tr.state, step_term});
    out.facts.push_back(rule(fact));
    lp::GroundRule r1 = rule(atoms_.atom(tr.pred, t));
    r1.pos = {fact, atoms_.atom(tr.class_pred, {tr.object})};
    out.rules.push_back(std::move(r1));
    if (kb_.is_target(m.object, m.attribute)) out.facts.push_back(rule(atoms_.atom(marker_, t)));
  }

  const lp::AtomId abnormal = atoms_.atom(target_abnormal_, t);
  const lp::AtomId normal = atoms_.atom(target_normal_, t);

  // (b) start, end, progression
  for (const Event& e : events_) {
    const lp::AtomId event = atoms_.atom(e.event, t);
    lp::GroundRule start = rule(event);
    if (add_conditions(start, e.starting, t)) out.rules.push_back(std::move(start));
    if (t > 1) {
      const lp::AtomId before = atoms_.atom(e.event, t - 1);
      lp::GroundRule end = rule(atoms_.atom(e.end, t));
      end.pos.push_back(before);
      if (add_conditions(end, e.ending, t)) out.rules.push_back(std::move(end));
      lp::GroundRule progression = rule(event);
      progression.pos.push_back(before);
      progression.neg.push_back(atoms_.atom(e.end, t));
      out.rules.push_back(std::move(progression));
    }
  }

  // (c) smell
  for (const Event& e : events_) {
    const lp::AtomId smell = atoms_.atom(e.smell, t);
    lp::GroundRule r5 = rule(smell);
    r5.pos = {abnormal, atoms_.atom(e.event, t)};
    out.rules.push_back(std::move(r5));
    if (t > 1) {
      lp::GroundRule r6 = rule(smell);
      r6.pos = {abnormal, atoms_.atom(e.smell, t - 1)};
      r6.card = lp::Interval{e.end, std::max<Step>(1, t - e.life_span), t};
      out.rules.push_back(std::move(r6));
    }
  }

  // (d) explanation
  const lp::AtomId explained = atoms_.atom(explained_, t);
  for (const Event& e : events_) {
    lp::GroundRule r7 = rule(explained);
    r7.pos.push_back(atoms_.atom(e.smell, t));
    out.rules.push_back(std::move(r7));
  }
  lp::GroundRule r8 = rule(explained);
  r8.pos.push_back(abnormal);
  out.rules.push_back(std::move(r8));
  lp::GroundRule r9 = rule(explained);
  r9.pos.push_back(normal);
  out.rules.push_back(std::move(r9));

  // (e) target inertia
  if (t > 1) {
    const lp::AtomId marker = atoms_.atom(marker_, t);
    for (lp::PredId p : {target_normal_, target_abnormal_}) {
      lp::GroundRule r = rule(atoms_.atom(p, t));
      r.pos.push_back(atoms_.atom(p, t - 1));
      r.neg.push_back(marker);
      out.rules.push_back(std::move(r));
    }
  }
}

lp::GroundRule Compiler::compile_volatile(Step t) {
  return lp::GroundRule{std::nullopt, {}, {atoms_.atom(explained_, t)}, std::nullopt};
}

std::vector<lp::PredId> Compiler::projection() const {
  std::vector<lp::PredId> out{target_normal_, target_abnormal_};
  out.insert(out.end(), smell_.begin(), smell_.end());
  return out;
}

std::vector<lp::GroundRule> compile_base(const kb::KnowledgeBase& kb, lp::AtomTable& atoms) {
  return Compiler(kb, atoms).compile_base();
}

StepRules compile_step(const kb::KnowledgeBase& kb, Step t, std::span<const obs::Manifestation> manifestations,
                       lp::AtomTable& atoms) {
  return Compiler(kb, atoms).compile_step(t, manifestations);
}

lp::GroundRule compile_volatile(Step t, lp::AtomTable& atoms) {
  if (t < 1) throw StepOrderError("volatile step must be at least 1");
  return lp::GroundRule{std::nullopt, {}, {atoms.atom(atoms.predicate(kExplained), t)}, std::nullopt};
}

std::string program_text(const kb::KnowledgeBase& kb, Step n, std::span<const obs::Manifestation> manifestations) {
  lp::AtomTable atoms;
  Compiler compiler(kb, atoms);
  std::string out = "% base\n" + lp::format_rules(compiler.compile_base(), atoms);
  std::vector<obs::Manifestation> sorted(manifestations.begin(), manifestations.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.step < b.step; });
  if (!sorted.empty() && sorted.front().step < 1) throw StepOrderError("manifestation before step 1");
  auto next = sorted.begin();
  StepRules step;
  for (Step t = 1; t <= n; ++t) {
    auto first = next;
    while (next != sorted.end() && next->step == t) ++next;
    compiler.compile_step(t, std::span<const obs::Manifestation>(first, next), step);
    out += "% cumulative(" + std::to_string(t) + ")\n";
    out += lp::format_rules(step.facts, atoms);
    out += lp::format_rules(step.rules, atoms);
  }
  if (n >= 1) {
    out += "% volatile(" + std::to_string(n) + ")\n";
    out += lp::format_rule(compiler.compile_volatile(n), atoms) + "\n";
  }
  return out;
}

}  // namespace streamasp::compiler
