#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "streamasp/lp/atoms.hpp"

namespace streamasp::lp {

/// Interval cardinality element `1{pred(from..to)}`: satisfied when at least
/// one `pred(i)` with from <= i <= to is true.
struct Interval {
  PredId predicate = 0;
  Step from = 0;
  Step to = 0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A ground normal rule. No head means integrity constraint. Body literal
/// order is kept as given so that serialized output is stable.
struct GroundRule {
  std::optional<AtomId> head;
  std::vector<AtomId> pos;
  std::vector<AtomId> neg;
  std::optional<Interval> card;

  bool is_fact() const { return head && pos.empty() && neg.empty() && !card; }
  bool is_constraint() const { return !head; }

  friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

using AtomSet = std::set<AtomId>;

struct LeastModel {
  AtomSet atoms;
  bool consistent = true;
};

/// Replaces the interval element by one rule per step in [max(1, from), to],
/// each with `pred(i)` appended to the positive body. A rule without an
/// interval is returned unchanged; an empty range yields no rules.
std::vector<GroundRule> expand_cardinality(const GroundRule& rule, AtomTable& atoms);
std::vector<GroundRule> expand_all(std::span<const GroundRule> rules, AtomTable& atoms);

/// Gelfond-Lifschitz reduct. Rules must be cardinality-free.
std::vector<GroundRule> gl_reduct(std::span<const GroundRule> rules, const AtomSet& candidate);

/// Least fixpoint of a positive program. A constraint whose body is contained
/// in the fixpoint clears `consistent`.
LeastModel least_model(std::span<const GroundRule> positive_rules);

bool is_stable(std::span<const GroundRule> rules, const AtomSet& candidate);

}  // namespace streamasp::lp
