#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamasp/lp/atoms.hpp"
#include "streamasp/lp/rule.hpp"

namespace streamasp::lp {

// Textual rule format, one rule per line:
//
//   head :- pos, ..., not neg, ..., 1{pred(a..b)}.
//   head.
//   :- body.
//   % comment
//
// Atoms are `name` or `name(arg,...)` with integer or lower-case symbol args.

std::string format_rule(const GroundRule& rule, const AtomTable& atoms);
std::string format_interval(const Interval& card, const AtomTable& atoms);

/// One rule per line, each terminated by '\n'.
std::string format_rules(std::span<const GroundRule> rules, const AtomTable& atoms);

/// Parses a whole program. Comments and blank lines are skipped. Throws
/// ParseError with the line and column of the first offending character.
std::vector<GroundRule> parse_program(std::string_view text, AtomTable& atoms);

}  // namespace streamasp::lp
