#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "streamasp/lp/atoms.hpp"
#include "streamasp/lp/rule.hpp"

namespace streamasp::testing_support {

struct RandomProgramOptions {
  int max_atoms = 12;
  int max_rules = 25;
  double negation = 0.35;      // chance per body literal of being negative
  double interval = 0.15;      // chance per rule of an interval element
  double constraint = 0.08;    // chance per rule of having no head
  bool stratified = false;     // negative literals only on atoms ordered before the head
};

// Random ground programs over propositional atoms a0.. and step atoms p(1..4).
// Atom order (used for the stratified mode) is creation order.
inline std::vector<lp::GroundRule> random_program(std::mt19937& rng, lp::AtomTable& atoms,
                                                  const RandomProgramOptions& opt) {
  std::uniform_int_distribution<int> natoms_dist(2, opt.max_atoms);
  const int natoms = natoms_dist(rng);
  const int nsteps = std::min(4, natoms / 2);
  const int nprop = natoms - nsteps;

  lp::PredId p = atoms.predicate("p");
  std::vector<lp::AtomId> pool;
  for (int i = 0; i < nprop; ++i) {
    pool.push_back(atoms.atom(atoms.predicate("a" + std::to_string(i)), std::span<const lp::Term>{}));
  }
  for (int i = 1; i <= nsteps; ++i) pool.push_back(atoms.atom(p, i));

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> nrules_dist(1, opt.max_rules);
  std::uniform_int_distribution<int> body_len(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

  std::vector<lp::GroundRule> rules;
  const int nrules = nrules_dist(rng);
  for (int r = 0; r < nrules; ++r) {
    lp::GroundRule rule;
    std::size_t head_index = pick(rng);
    if (coin(rng) >= opt.constraint) rule.head = pool[head_index];
    const int len = body_len(rng);
    for (int k = 0; k < len; ++k) {
      std::size_t b = pick(rng);
      bool negative = coin(rng) < opt.negation;
      if (negative && opt.stratified) {
        if (rule.head && b >= head_index) continue;
      }
      (negative ? rule.neg : rule.pos).push_back(pool[b]);
    }
    if (nsteps > 0 && coin(rng) < opt.interval) {
      std::uniform_int_distribution<int> from_dist(-1, nsteps);
      int from = from_dist(rng);
      std::uniform_int_distribution<int> len_dist(0, 2);
      rule.card = lp::Interval{p, from, from + len_dist(rng)};
    }
    if (rule.head) {
      // keep `head :- not head` style self-blocking out of the stratified mode
      auto& neg = rule.neg;
      if (opt.stratified) neg.erase(std::remove(neg.begin(), neg.end(), *rule.head), neg.end());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace streamasp::testing_support
