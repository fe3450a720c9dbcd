#include "streamasp/lp/rule.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace streamasp::lp {

std::vector<GroundRule> expand_cardinality(const GroundRule& rule, AtomTable& atoms) {
  if (!rule.card) return {rule};
  const Interval& card = *rule.card;
  std::vector<GroundRule> out;
  // no step precedes the origin
  for (Step i = std::max<Step>(1, card.from); i <= card.to; ++i) {
    GroundRule r{rule.head, rule.pos, rule.neg, std::nullopt};
    r.pos.push_back(atoms.atom(card.predicate, i));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GroundRule> expand_all(std::span<const GroundRule> rules, AtomTable& atoms) {
  std::vector<GroundRule> out;
  out.reserve(rules.size());
  for (const GroundRule& r : rules) {
    if (!r.card) {
      out.push_back(r);
      continue;
    }
    auto expanded = expand_cardinality(r, atoms);
    out.insert(out.end(), std::make_move_iterator(expanded.begin()),
               std::make_move_iterator(expanded.end()));
  }
  return out;
}

std::vector<GroundRule> gl_reduct(std::span<const GroundRule> rules, const AtomSet& candidate) {
  std::vector<GroundRule> out;
  for (const GroundRule& r : rules) {
    if (r.card) throw std::invalid_argument("gl_reduct: interval element must be expanded first");
    bool blocked = std::any_of(r.neg.begin(), r.neg.end(),
                               [&](AtomId a) { return candidate.count(a) != 0; });
    if (blocked) continue;
    out.push_back(GroundRule{r.head, r.pos, {}, std::nullopt});
  }
  return out;
}

LeastModel least_model(std::span<const GroundRule> positive_rules) {
  // Dowling-Gallier style counting: each rule fires once all its positive
  // body atoms are derived.
  std::unordered_map<AtomId, std::vector<std::size_t>> watchers;
  std::vector<std::size_t> missing(positive_rules.size());
  std::vector<AtomId> queue;
  AtomSet derived;
  LeastModel result;

  auto fire = [&](std::size_t i) {
    const GroundRule& r = positive_rules[i];
    if (!r.head) {
      result.consistent = false;
      return;
    }
    if (derived.insert(*r.head).second) queue.push_back(*r.head);
  };

  for (std::size_t i = 0; i < positive_rules.size(); ++i) {
    const GroundRule& r = positive_rules[i];
    if (!r.neg.empty() || r.card) {
      throw std::invalid_argument("least_model: rule is not positive");
    }
    std::vector<AtomId> body = r.pos;
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    missing[i] = body.size();
    for (AtomId a : body) watchers[a].push_back(i);
    if (body.empty()) fire(i);
  }
  while (!queue.empty()) {
    AtomId a = queue.back();
    queue.pop_back();
    auto it = watchers.find(a);
    if (it == watchers.end()) continue;
    for (std::size_t i : it->second) {
      if (--missing[i] == 0) fire(i);
    }
  }
  result.atoms = std::move(derived);
  return result;
}

bool is_stable(std::span<const GroundRule> rules, const AtomSet& candidate) {
  auto reduct = gl_reduct(rules, candidate);
  LeastModel m = least_model(reduct);
  return m.consistent && m.atoms == candidate;
}

}  // namespace streamasp::lp
