#include "streamasp/lp/program.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "streamasp/error.hpp"

namespace streamasp::lp {

namespace {

constexpr std::uint8_t kHeaded = 1;
constexpr std::uint8_t kUsed = 2;
constexpr std::uint32_t kNone = ~std::uint32_t{0};
constexpr Step kNoReach = std::numeric_limits<Step>::min();

}  // namespace

// Buffers reused across evaluate() calls so that a small increment costs
// time proportional to its size, not to the program's.
struct IncrementalProgram::Scratch {
  std::vector<std::uint32_t> local_of;  // atom -> local node, kNone if not a head in the unit
  std::vector<AtomId> heads;            // local node -> atom
  std::vector<std::uint32_t> rule_offsets;
  std::vector<std::uint32_t> rule_index;

  // interval elements are routed through a segment tree per predicate so that
  // a wide interval adds O(log n) edges instead of one per step
  struct Tree {
    PredId pred;
    std::vector<std::pair<Step, std::uint32_t>> leaves;  // (step, local node), sorted
    std::uint32_t size = 0;                               // power of two >= leaves
    std::uint32_t base = 0;                               // first node id
  };
  std::vector<std::int32_t> tree_of_pred;
  std::vector<Tree> trees;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> adj_offsets;
  std::vector<std::uint32_t> adj;

  // Tarjan
  std::vector<std::uint32_t> index;
  std::vector<std::uint32_t> low;
  std::vector<std::uint32_t> component;
  std::vector<std::uint8_t> on_stack;
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> calls;
  std::vector<std::uint32_t> members;

  // per-component fixpoint
  struct Pending {
    std::uint32_t rule;
    std::uint32_t missing;
    bool card_open;
  };
  std::vector<Pending> pending;
  std::vector<std::pair<AtomId, std::uint32_t>> watches;  // (atom, pending << 1 | is_card)
  std::vector<AtomId> queue;
};

IncrementalProgram::IncrementalProgram() : scratch_(std::make_unique<Scratch>()) {}
IncrementalProgram::~IncrementalProgram() = default;
IncrementalProgram::IncrementalProgram(IncrementalProgram&&) noexcept = default;
IncrementalProgram& IncrementalProgram::operator=(IncrementalProgram&&) noexcept = default;

void IncrementalProgram::store(const GroundRule& rule) {
  StoredRule r;
  r.head = rule.head.value_or(kNoAtom);
  r.lit_begin = static_cast<std::uint32_t>(lits_.size());
  r.npos = static_cast<std::uint32_t>(rule.pos.size());
  r.nneg = static_cast<std::uint32_t>(rule.neg.size());
  lits_.insert(lits_.end(), rule.pos.begin(), rule.pos.end());
  lits_.insert(lits_.end(), rule.neg.begin(), rule.neg.end());
  if (rule.card) {
    r.card_pred = rule.card->predicate;
    r.card_from = rule.card->from;
    r.card_to = rule.card->to;
  }
  rules_.push_back(r);
}

GroundRule IncrementalProgram::load(const StoredRule& r) const {
  GroundRule out;
  if (r.head != kNoAtom) out.head = r.head;
  auto pos = pos_of(r);
  auto neg = neg_of(r);
  out.pos.assign(pos.begin(), pos.end());
  out.neg.assign(neg.begin(), neg.end());
  if (r.card_pred != kNoPred) out.card = Interval{r.card_pred, r.card_from, r.card_to};
  return out;
}

void IncrementalProgram::add_base(const GroundRule& rule) { add_base(std::span<const GroundRule>(&rule, 1)); }

void IncrementalProgram::add_base(std::span<const GroundRule> rules) {
  if (sealed_) throw std::logic_error("base program is sealed");
  if (batches_.empty()) batches_.push_back({true, 0, 0, 0});
  for (const GroundRule& r : rules) store(r);
  batches_.back().end = rules_.size();
}

void IncrementalProgram::add_step(Step t, std::span<const GroundRule> rules) {
  if (auto last = last_step(); last && t <= *last) {
    throw StepOrderError("step " + std::to_string(t) + " does not follow step " + std::to_string(*last));
  }
  sealed_ = true;
  std::size_t begin = rules_.size();
  for (const GroundRule& r : rules) store(r);
  batches_.push_back({false, t, begin, rules_.size()});
}

std::optional<Step> IncrementalProgram::last_step() const noexcept {
  if (batches_.empty() || batches_.back().base) return std::nullopt;
  return batches_.back().step;
}

void IncrementalProgram::set_volatile(Step t, const GroundRule& constraint) {
  if (constraint.head) throw std::invalid_argument("volatile part must be an integrity constraint");
  volatile_.emplace(t, constraint);
}

std::optional<Step> IncrementalProgram::volatile_step() const noexcept {
  if (!volatile_) return std::nullopt;
  return volatile_->first;
}

std::vector<GroundRule> IncrementalProgram::base_rules() const {
  std::vector<GroundRule> out;
  if (!batches_.empty() && batches_.front().base) {
    for (std::size_t i = batches_.front().begin; i < batches_.front().end; ++i) out.push_back(load(rules_[i]));
  }
  return out;
}

std::vector<GroundRule> IncrementalProgram::step_rules(Step t) const {
  auto it = std::lower_bound(batches_.begin(), batches_.end(), t, [](const Batch& b, Step s) {
    return b.base || b.step < s;
  });
  std::vector<GroundRule> out;
  if (it == batches_.end() || it->base || it->step != t) return out;
  for (std::size_t i = it->begin; i < it->end; ++i) out.push_back(load(rules_[i]));
  return out;
}

std::vector<Step> IncrementalProgram::steps() const {
  std::vector<Step> out;
  for (const Batch& b : batches_) {
    if (!b.base) out.push_back(b.step);
  }
  return out;
}

std::vector<GroundRule> IncrementalProgram::all_rules(bool with_volatile) const {
  std::vector<GroundRule> out;
  out.reserve(rules_.size() + 1);
  for (const StoredRule& r : rules_) out.push_back(load(r));
  if (with_volatile && volatile_) out.push_back(volatile_->second);
  return out;
}

bool IncrementalProgram::card_true(PredId pred, Step from, Step to) const {
  if (pred >= true_steps_.size()) return false;
  const auto& steps = true_steps_[pred];
  auto it = std::lower_bound(steps.begin(), steps.end(), from);
  return it != steps.end() && *it <= to;
}

bool IncrementalProgram::body_true(const StoredRule& r) const {
  for (AtomId a : pos_of(r)) {
    if (!is_true(a)) return false;
  }
  for (AtomId a : neg_of(r)) {
    if (is_true(a)) return false;
  }
  return r.card_pred == kNoPred || card_true(r.card_pred, r.card_from, r.card_to);
}

bool IncrementalProgram::body_true(const GroundRule& r) const {
  for (AtomId a : r.pos) {
    if (!is_true(a)) return false;
  }
  for (AtomId a : r.neg) {
    if (is_true(a)) return false;
  }
  return !r.card || card_true(r.card->predicate, r.card->from, r.card->to);
}

void IncrementalProgram::make_true(AtomId a) {
  position_[a] = static_cast<std::uint32_t>(true_atoms_.size());
  true_atoms_.push_back(a);
  if (auto step = atoms_.unary_step(a)) {
    auto& steps = true_steps_[atoms_.predicate_of(a)];
    if (steps.empty() || steps.back() < *step) {
      steps.push_back(*step);
    } else {
      steps.insert(std::upper_bound(steps.begin(), steps.end(), *step), *step);
    }
  }
}

void IncrementalProgram::reset_model() {
  evaluated_ = 0;
  std::fill(position_.begin(), position_.end(), kFalse);
  true_atoms_.clear();
  for (auto& v : true_steps_) v.clear();
  std::fill(usage_.begin(), usage_.end(), std::uint8_t{0});
  std::fill(card_reach_.begin(), card_reach_.end(), kNoReach);
  violated_ = 0;
}

bool IncrementalProgram::pending_is_fresh() const {
  for (std::size_t i = evaluated_; i < rules_.size(); ++i) {
    AtomId h = rules_[i].head;
    if (h == kNoAtom) continue;
    if (h < usage_.size() && usage_[h] != 0) return false;
    if (auto step = atoms_.unary_step(h)) {
      PredId p = atoms_.predicate_of(h);
      if (p < card_reach_.size() && card_reach_[p] >= *step) return false;
    }
  }
  return true;
}

void IncrementalProgram::record_usage(std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    const StoredRule& r = rules_[i];
    if (r.head != kNoAtom) usage_[r.head] |= kHeaded;
    for (AtomId a : pos_of(r)) usage_[a] |= kUsed;
    for (AtomId a : neg_of(r)) usage_[a] |= kUsed;
    if (r.card_pred != kNoPred) card_reach_[r.card_pred] = std::max(card_reach_[r.card_pred], r.card_to);
  }
}

void IncrementalProgram::evaluate(std::size_t begin, std::size_t end) {
  Scratch& s = *scratch_;
  const std::size_t natoms = atoms_.size();
  const std::size_t npreds = atoms_.predicate_count();
  if (position_.size() < natoms) position_.resize(natoms, kFalse);
  if (usage_.size() < natoms) usage_.resize(natoms, 0);
  if (s.local_of.size() < natoms) s.local_of.resize(natoms, kNone);
  if (true_steps_.size() < npreds) true_steps_.resize(npreds);
  if (card_reach_.size() < npreds) card_reach_.resize(npreds, kNoReach);
  if (s.tree_of_pred.size() < npreds) s.tree_of_pred.resize(npreds, -1);

  // Local nodes for the atoms defined in this unit.
  s.heads.clear();
  for (std::size_t i = begin; i < end; ++i) {
    AtomId h = rules_[i].head;
    if (h != kNoAtom && s.local_of[h] == kNone) {
      s.local_of[h] = static_cast<std::uint32_t>(s.heads.size());
      s.heads.push_back(h);
    }
  }
  const auto nlocal = static_cast<std::uint32_t>(s.heads.size());

  s.rule_offsets.assign(nlocal + 1, 0);
  for (std::size_t i = begin; i < end; ++i) {
    if (rules_[i].head != kNoAtom) ++s.rule_offsets[s.local_of[rules_[i].head] + 1];
  }
  for (std::uint32_t v = 0; v < nlocal; ++v) s.rule_offsets[v + 1] += s.rule_offsets[v];
  s.rule_index.resize(s.rule_offsets[nlocal]);
  {
    std::vector<std::uint32_t> fill(s.rule_offsets.begin(), s.rule_offsets.end() - 1);
    for (std::size_t i = begin; i < end; ++i) {
      if (rules_[i].head != kNoAtom) s.rule_index[fill[s.local_of[rules_[i].head]]++] = static_cast<std::uint32_t>(i);
    }
  }

  // Segment trees over the unit's atoms of each predicate used in an interval.
  s.trees.clear();
  for (std::size_t i = begin; i < end; ++i) {
    const StoredRule& r = rules_[i];
    if (r.head == kNoAtom || r.card_pred == kNoPred || s.tree_of_pred[r.card_pred] >= 0) continue;
    s.tree_of_pred[r.card_pred] = static_cast<std::int32_t>(s.trees.size());
    s.trees.push_back({r.card_pred, {}, 0, 0});
  }
  std::uint32_t nnodes = nlocal;
  if (!s.trees.empty()) {
    for (std::uint32_t v = 0; v < nlocal; ++v) {
      AtomId h = s.heads[v];
      std::int32_t t = s.tree_of_pred[atoms_.predicate_of(h)];
      if (t < 0) continue;
      if (auto step = atoms_.unary_step(h)) s.trees[t].leaves.emplace_back(*step, v);
    }
    for (auto& tree : s.trees) {
      std::sort(tree.leaves.begin(), tree.leaves.end());
      tree.size = 1;
      while (tree.size < tree.leaves.size()) tree.size <<= 1;
      tree.base = nnodes;
      nnodes += 2 * tree.size;
    }
  }

  // Dependency edges: defined atom -> body atom defined in this unit.
  s.edges.clear();
  for (std::uint32_t v = 0; v < nlocal; ++v) {
    for (std::uint32_t k = s.rule_offsets[v]; k < s.rule_offsets[v + 1]; ++k) {
      const StoredRule& r = rules_[s.rule_index[k]];
      for (AtomId a : pos_of(r)) {
        if (s.local_of[a] != kNone) s.edges.emplace_back(v, s.local_of[a]);
      }
      for (AtomId a : neg_of(r)) {
        if (s.local_of[a] != kNone) s.edges.emplace_back(v, s.local_of[a]);
      }
      if (r.card_pred != kNoPred) {
        const auto& tree = s.trees[s.tree_of_pred[r.card_pred]];
        auto lo = std::lower_bound(tree.leaves.begin(), tree.leaves.end(), std::make_pair(r.card_from, std::uint32_t{0}));
        auto hi = std::upper_bound(tree.leaves.begin(), tree.leaves.end(), std::make_pair(r.card_to, kNone));
        auto l = static_cast<std::uint32_t>(lo - tree.leaves.begin()) + tree.size;
        auto h = static_cast<std::uint32_t>(hi - tree.leaves.begin()) + tree.size;
        for (; l < h; l >>= 1, h >>= 1) {
          if (l & 1) s.edges.emplace_back(v, tree.base + l++);
          if (h & 1) s.edges.emplace_back(v, tree.base + --h);
        }
      }
    }
  }
  for (const auto& tree : s.trees) {
    for (std::uint32_t k = 1; k < tree.size; ++k) {
      s.edges.emplace_back(tree.base + k, tree.base + 2 * k);
      s.edges.emplace_back(tree.base + k, tree.base + 2 * k + 1);
    }
    for (std::uint32_t i = 0; i < tree.leaves.size(); ++i) {
      s.edges.emplace_back(tree.base + tree.size + i, tree.leaves[i].second);
    }
  }
  s.adj_offsets.assign(nnodes + 1, 0);
  for (const auto& e : s.edges) ++s.adj_offsets[e.first + 1];
  for (std::uint32_t v = 0; v < nnodes; ++v) s.adj_offsets[v + 1] += s.adj_offsets[v];
  s.adj.resize(s.edges.size());
  {
    std::vector<std::uint32_t> fill(s.adj_offsets.begin(), s.adj_offsets.end() - 1);
    for (const auto& e : s.edges) s.adj[fill[e.first]++] = e.second;
  }

  // Evaluates one strongly connected component. Every body atom outside it
  // already has its final value.
  auto evaluate_component = [&](std::uint32_t comp) {
    s.pending.clear();
    s.watches.clear();
    s.queue.clear();
    auto in_component = [&](AtomId a) {
      std::uint32_t v = s.local_of[a];
      return v != kNone && s.component[v] == comp;
    };
    auto fire = [&](AtomId h) {
      if (is_true(h)) return;
      make_true(h);
      s.queue.push_back(h);
    };

    for (std::uint32_t v : s.members) {
      for (std::uint32_t k = s.rule_offsets[v]; k < s.rule_offsets[v + 1]; ++k) {
        const std::uint32_t ri = s.rule_index[k];
        const StoredRule& r = rules_[ri];
        bool dead = false;
        for (AtomId a : neg_of(r)) {
          if (in_component(a)) {
            throw UnsupportedProgram("program is not locally stratified: " + atoms_.to_string(r.head) +
                                     " depends negatively on " + atoms_.to_string(a) + " within a cycle");
          }
          if (is_true(a)) dead = true;
        }
        if (dead) continue;
        const auto p = static_cast<std::uint32_t>(s.pending.size());
        std::uint32_t missing = 0;
        std::size_t watch_mark = s.watches.size();
        for (AtomId a : pos_of(r)) {
          if (is_true(a)) continue;
          if (!in_component(a)) {
            dead = true;
            break;
          }
          ++missing;
          s.watches.emplace_back(a, p << 1);
        }
        bool card_open = false;
        if (!dead && r.card_pred != kNoPred && !card_true(r.card_pred, r.card_from, r.card_to)) {
          for (std::uint32_t m : s.members) {
            AtomId a = s.heads[m];
            if (atoms_.predicate_of(a) != r.card_pred) continue;
            auto step = atoms_.unary_step(a);
            if (step && *step >= r.card_from && *step <= r.card_to) {
              s.watches.emplace_back(a, (p << 1) | 1u);
              card_open = true;
            }
          }
          if (card_open) {
            ++missing;
          } else {
            dead = true;
          }
        }
        if (dead) {
          s.watches.resize(watch_mark);
          continue;
        }
        if (missing == 0) {
          fire(r.head);
        } else {
          s.pending.push_back({ri, missing, card_open});
        }
      }
    }
    if (s.watches.empty()) return;
    std::sort(s.watches.begin(), s.watches.end());
    while (!s.queue.empty()) {
      AtomId a = s.queue.back();
      s.queue.pop_back();
      auto it = std::lower_bound(s.watches.begin(), s.watches.end(), std::make_pair(a, std::uint32_t{0}));
      for (; it != s.watches.end() && it->first == a; ++it) {
        Scratch::Pending& pr = s.pending[it->second >> 1];
        if (it->second & 1u) {
          if (!pr.card_open) continue;
          pr.card_open = false;
        }
        if (--pr.missing == 0) fire(rules_[pr.rule].head);
      }
    }
  };

  struct Cleanup {
    Scratch& s;
    ~Cleanup() {
      for (AtomId h : s.heads) s.local_of[h] = kNone;
      for (const auto& tree : s.trees) s.tree_of_pred[tree.pred] = -1;
    }
  } cleanup{s};

  // Iterative Tarjan; components come out dependencies first.
  s.index.assign(nnodes, kNone);
  s.low.assign(nnodes, 0);
  s.component.assign(nnodes, kNone);
  s.on_stack.assign(nnodes, 0);
  s.stack.clear();
  std::uint32_t counter = 0;
  std::uint32_t ncomp = 0;
  for (std::uint32_t root = 0; root < nnodes; ++root) {
    if (s.index[root] != kNone) continue;
    s.calls.clear();
    s.calls.emplace_back(root, s.adj_offsets[root]);
    s.index[root] = s.low[root] = counter++;
    s.stack.push_back(root);
    s.on_stack[root] = 1;
    while (!s.calls.empty()) {
      auto& [v, next] = s.calls.back();
      if (next < s.adj_offsets[v + 1]) {
        std::uint32_t w = s.adj[next++];
        if (s.index[w] == kNone) {
          s.index[w] = s.low[w] = counter++;
          s.stack.push_back(w);
          s.on_stack[w] = 1;
          s.calls.emplace_back(w, s.adj_offsets[w]);
        } else if (s.on_stack[w]) {
          s.low[v] = std::min(s.low[v], s.index[w]);
        }
        continue;
      }
      std::uint32_t done = v;
      s.calls.pop_back();
      if (!s.calls.empty()) {
        std::uint32_t parent = s.calls.back().first;
        s.low[parent] = std::min(s.low[parent], s.low[done]);
      }
      if (s.low[done] != s.index[done]) continue;
      s.members.clear();
      std::uint32_t w;
      do {
        w = s.stack.back();
        s.stack.pop_back();
        s.on_stack[w] = 0;
        s.component[w] = ncomp;
        if (w < nlocal) s.members.push_back(w);
      } while (w != done);
      if (!s.members.empty()) evaluate_component(ncomp);
      ++ncomp;
    }
  }
}

std::optional<AnswerSet> IncrementalProgram::solve() {
  last_evaluated_ = 0;
  if (evaluated_ < rules_.size()) {
    if (evaluated_ > 0 && !pending_is_fresh()) {
      reset_model();
      ++full_evaluations_;
    }
    const std::size_t begin = evaluated_;
    const std::size_t end = rules_.size();
    try {
      evaluate(begin, end);
    } catch (...) {
      reset_model();
      throw;
    }
    record_usage(begin, end);
    for (std::size_t i = begin; i < end; ++i) {
      if (rules_[i].head == kNoAtom && body_true(rules_[i])) ++violated_;
    }
    evaluated_ = end;
    last_evaluated_ = end - begin;
  }
  if (violated_ > 0) return std::nullopt;
  if (volatile_ && body_true(volatile_->second)) return std::nullopt;

  Step horizon = 0;
  if (volatile_) {
    horizon = volatile_->first;
  } else if (auto last = last_step()) {
    horizon = *last;
  }
  return AnswerSet(position_, true_atoms_, true_atoms_.size(), horizon);
}

}  // namespace streamasp::lp
