#include "streamasp/lp/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "streamasp/error.hpp"

namespace streamasp::lp {

Simplified simplify(std::span<const GroundRule> rules) {
  Simplified out;
  std::vector<GroundRule> work(rules.begin(), rules.end());
  for (const GroundRule& r : work) {
    if (r.card) throw std::invalid_argument("simplify: interval element must be expanded first");
  }

  for (bool changed = true; changed;) {
    changed = false;
    AtomSet defined;
    for (const GroundRule& r : work) {
      if (r.head) defined.insert(*r.head);
    }
    for (const GroundRule& r : work) {
      if (r.is_fact() && out.facts.insert(*r.head).second) changed = true;
    }

    std::vector<GroundRule> next;
    next.reserve(work.size());
    for (GroundRule& r : work) {
      if (r.is_fact()) continue;  // recorded in facts
      if (r.head && out.facts.count(*r.head)) {
        changed = true;  // head already true; rule is redundant
        continue;
      }
      bool dead = std::any_of(r.pos.begin(), r.pos.end(),
                              [&](AtomId a) { return !defined.count(a) && !out.facts.count(a); }) ||
                  std::any_of(r.neg.begin(), r.neg.end(), [&](AtomId a) { return out.facts.count(a) != 0; });
      if (dead) {
        changed = true;
        continue;
      }
      auto pos_end = std::remove_if(r.pos.begin(), r.pos.end(), [&](AtomId a) { return out.facts.count(a) != 0; });
      auto neg_end = std::remove_if(r.neg.begin(), r.neg.end(), [&](AtomId a) { return !defined.count(a); });
      if (pos_end != r.pos.end() || neg_end != r.neg.end()) changed = true;
      r.pos.erase(pos_end, r.pos.end());
      r.neg.erase(neg_end, r.neg.end());
      if (!r.head && r.pos.empty() && r.neg.empty()) {
        out.inconsistent = true;
        return out;
      }
      next.push_back(std::move(r));
    }
    work.swap(next);
  }

  for (const GroundRule& r : work) {
    if (r.head && !out.facts.count(*r.head)) out.open.insert(*r.head);
  }
  out.rules = std::move(work);
  return out;
}

std::vector<AtomSet> enumerate_stable(std::span<const GroundRule> rules, AtomTable& atoms,
                                      std::size_t max_open_atoms) {
  max_open_atoms = std::min(max_open_atoms, kOracleAtomLimit);
  std::vector<GroundRule> expanded = expand_all(rules, atoms);
  Simplified s = simplify(expanded);
  if (s.inconsistent) return {};
  if (s.open.size() > max_open_atoms) {
    throw AtomBudgetExceeded("oracle: " + std::to_string(s.open.size()) + " open atoms exceed the limit of " +
                             std::to_string(max_open_atoms));
  }

  std::vector<AtomId> open(s.open.begin(), s.open.end());
  std::vector<AtomSet> models;
  const std::uint32_t subsets = 1u << open.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    AtomSet candidate = s.facts;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (mask & (1u << i)) candidate.insert(open[i]);
    }
    if (is_stable(expanded, candidate)) models.push_back(std::move(candidate));
  }
  std::sort(models.begin(), models.end());
  return models;
}

}  // namespace streamasp::lp
