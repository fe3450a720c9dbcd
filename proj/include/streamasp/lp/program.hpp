#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "streamasp/lp/atoms.hpp"
#include "streamasp/lp/rule.hpp"

namespace streamasp::lp {

/// Read-only view of a model computed by IncrementalProgram::solve. The view
/// stays valid until the program is next modified or solved.
class AnswerSet {
 public:
  Step horizon() const noexcept { return horizon_; }
  bool contains(AtomId atom) const noexcept {
    return atom < position_->size() && (*position_)[atom] < count_;
  }
  std::size_t size() const noexcept { return count_; }
  /// Materializes the model; linear in its size.
  AtomSet atoms() const { return AtomSet(true_atoms_->begin(), true_atoms_->begin() + count_); }

 private:
  friend class IncrementalProgram;
  AnswerSet(const std::vector<std::uint32_t>& position, const std::vector<AtomId>& true_atoms, std::size_t count,
            Step horizon)
      : position_(&position), true_atoms_(&true_atoms), count_(count), horizon_(horizon) {}

  const std::vector<std::uint32_t>* position_;
  const std::vector<AtomId>* true_atoms_;
  std::size_t count_;
  Step horizon_;
};

/// A ground program split into an immutable base, append-only cumulative
/// steps and one replaceable volatile constraint.
///
/// solve() evaluates locally stratified programs by computing strongly
/// connected components of the atom dependency graph and running a positive
/// fixpoint per component in dependency order. Work done for earlier solve()
/// calls is kept: as long as new rules only define atoms that no evaluated
/// rule mentions, only the rules added since the last call are evaluated.
/// Otherwise the whole program is re-evaluated.
class IncrementalProgram {
 public:
  IncrementalProgram();
  ~IncrementalProgram();
  IncrementalProgram(const IncrementalProgram&) = delete;
  IncrementalProgram& operator=(const IncrementalProgram&) = delete;
  IncrementalProgram(IncrementalProgram&&) noexcept;
  IncrementalProgram& operator=(IncrementalProgram&&) noexcept;

  AtomTable& atoms() noexcept { return atoms_; }
  const AtomTable& atoms() const noexcept { return atoms_; }

  /// Throws std::logic_error once the base is sealed.
  void add_base(const GroundRule& rule);
  void add_base(std::span<const GroundRule> rules);
  void seal_base() noexcept { sealed_ = true; }
  bool sealed() const noexcept { return sealed_; }

  /// Appends the rules of step `t`, sealing the base. Throws StepOrderError
  /// unless `t` exceeds every existing step.
  void add_step(Step t, std::span<const GroundRule> rules);
  std::optional<Step> last_step() const noexcept;

  /// Replaces the volatile part. `constraint` must have no head.
  void set_volatile(Step t, const GroundRule& constraint);
  void clear_volatile() noexcept { volatile_.reset(); }
  std::optional<Step> volatile_step() const noexcept;

  std::size_t rule_count() const noexcept { return rules_.size(); }
  std::vector<GroundRule> base_rules() const;
  std::vector<GroundRule> step_rules(Step t) const;
  std::vector<Step> steps() const;
  /// Base, then every cumulative step, then the volatile constraint if
  /// `with_volatile` is set and one exists.
  std::vector<GroundRule> all_rules(bool with_volatile = true) const;

  /// The stable model of base, cumulative and volatile parts, or nullopt if
  /// a constraint is violated. Throws UnsupportedProgram when the program is
  /// not locally stratified.
  std::optional<AnswerSet> solve();

  /// Number of rules evaluated by the most recent solve() call.
  std::size_t last_evaluated() const noexcept { return last_evaluated_; }
  /// Number of solve() calls that had to start from scratch.
  std::size_t full_evaluations() const noexcept { return full_evaluations_; }

 private:
  static constexpr AtomId kNoAtom = ~AtomId{0};
  static constexpr PredId kNoPred = ~PredId{0};
  static constexpr std::uint32_t kFalse = ~std::uint32_t{0};

  struct StoredRule {
    AtomId head = kNoAtom;
    std::uint32_t lit_begin = 0;
    std::uint32_t npos = 0;
    std::uint32_t nneg = 0;
    PredId card_pred = kNoPred;
    Step card_from = 0;
    Step card_to = 0;
  };

  struct Batch {
    bool base;
    Step step;
    std::size_t begin;
    std::size_t end;
  };

  void store(const GroundRule& rule);
  GroundRule load(const StoredRule& rule) const;
  std::span<const AtomId> pos_of(const StoredRule& r) const { return {lits_.data() + r.lit_begin, r.npos}; }
  std::span<const AtomId> neg_of(const StoredRule& r) const {
    return {lits_.data() + r.lit_begin + r.npos, r.nneg};
  }

  // evaluation
  bool is_true(AtomId a) const noexcept { return a < position_.size() && position_[a] != kFalse; }
  bool card_true(PredId pred, Step from, Step to) const;
  bool body_true(const StoredRule& r) const;
  bool body_true(const GroundRule& r) const;
  void make_true(AtomId a);
  void reset_model();
  bool pending_is_fresh() const;
  void evaluate(std::size_t begin, std::size_t end);
  void record_usage(std::size_t begin, std::size_t end);

  struct Scratch;

  AtomTable atoms_;
  std::vector<StoredRule> rules_;
  std::vector<AtomId> lits_;
  std::vector<Batch> batches_;
  std::optional<std::pair<Step, GroundRule>> volatile_;
  bool sealed_ = false;

  // model state; monotone between full evaluations
  std::size_t evaluated_ = 0;
  std::vector<std::uint32_t> position_;
  std::vector<AtomId> true_atoms_;
  std::vector<std::vector<Step>> true_steps_;  // by predicate, sorted
  std::vector<std::uint8_t> usage_;           // kHeaded | kUsed per atom
  std::vector<Step> card_reach_;              // by predicate: largest evaluated interval end
  std::size_t violated_ = 0;
  std::size_t last_evaluated_ = 0;
  std::size_t full_evaluations_ = 0;
  std::unique_ptr<Scratch> scratch_;
};

inline std::optional<AnswerSet> solve(IncrementalProgram& program) { return program.solve(); }

}  // namespace streamasp::lp
