#pragma once

#include <span>
#include <vector>

#include "streamasp/lp/atoms.hpp"
#include "streamasp/lp/rule.hpp"

namespace streamasp::lp {

inline constexpr std::size_t kOracleAtomLimit = 20;

/// Result of the stable-model preserving simplification run before enumeration.
struct Simplified {
  std::vector<GroundRule> rules;  ///< remaining non-fact rules
  AtomSet facts;                  ///< atoms true in every stable model
  AtomSet open;                   ///< atoms left for exhaustive search
  bool inconsistent = false;      ///< a constraint with an empty body survived
};

/// Applies the success, failure, positive- and negative-reduction
/// transformations to a fixpoint. Rules must be cardinality-free.
Simplified simplify(std::span<const GroundRule> rules);

/// Every stable model of `rules`, found by checking each subset of the atoms
/// the simplification leaves open with is_stable against the full expanded
/// program. Models come back sorted lexicographically by atom id.
///
/// Throws AtomBudgetExceeded when more than `max_open_atoms` atoms stay open.
std::vector<AtomSet> enumerate_stable(std::span<const GroundRule> rules, AtomTable& atoms,
                                      std::size_t max_open_atoms = kOracleAtomLimit);

}  // namespace streamasp::lp
