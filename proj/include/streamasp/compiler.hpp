#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamasp/kb.hpp"
#include "streamasp/lp/atoms.hpp"
#include "streamasp/lp/rule.hpp"
#include "streamasp/observation.hpp"

namespace streamasp::compiler {

using lp::Step;

/// lowercase-first(class) + Capitalized(attribute) + Capitalized(state),
/// e.g. (TrashBin, door, open) -> trashBinDoorOpen.
std::string predicate_name(std::string_view class_name, std::string_view attribute, std::string_view state);
/// Class membership predicate, e.g. Freezer -> freezer.
std::string class_predicate(std::string_view class_name);
/// Fact marking a target observation at a step, e.g. Air -> obsAir.
std::string observation_marker(std::string_view target_class);

struct EventPredicates {
  std::string event;  ///< garbage
  std::string end;    ///< garbageEnd
  std::string smell;  ///< smellGarbage
};
EventPredicates event_predicates(std::string_view event_name);

inline constexpr std::string_view kManifestation = "manifestation";
inline constexpr std::string_view kExplained = "explained";

/// Cumulative part of one step. Every head carries step `step`.
struct StepRules {
  Step step = 0;
  std::vector<lp::GroundRule> facts;  ///< manifestation facts and observation markers
  std::vector<lp::GroundRule> rules;

  /// facts followed by rules
  std::vector<lp::GroundRule> all() const;
};

/// Translates a validated knowledge base into ground rules over `atoms`.
/// Predicate and symbol ids are resolved once at construction; `atoms` must
/// outlive the compiler.
class Compiler {
 public:
  Compiler(const kb::KnowledgeBase& kb, lp::AtomTable& atoms);

  /// Class, attribute and state facts; duplicates are emitted once.
  std::vector<lp::GroundRule> compile_base() const;

  /// Rules of step t for the given manifestations, which must all be at t
  /// (StepOrderError otherwise) and name declared triples (ValidationError).
  StepRules compile_step(Step t, std::span<const obs::Manifestation> manifestations);
  /// Same, reusing `out`'s storage.
  void compile_step(Step t, std::span<const obs::Manifestation> manifestations, StepRules& out);

  /// `:- not explained(t).`
  lp::GroundRule compile_volatile(Step t);

  lp::PredId explained() const { return explained_; }
  lp::PredId target_normal() const { return target_normal_; }
  lp::PredId target_abnormal() const { return target_abnormal_; }
  /// smell<E> per implicit event, in declaration order.
  const std::vector<lp::PredId>& smell_predicates() const { return smell_; }
  /// Answer predicates: target normal, target abnormal, then every smell<E>.
  std::vector<lp::PredId> projection() const;

 private:
  struct Triple {
    lp::PredId pred;
    lp::Term object;
    lp::Term attribute;
    lp::Term state;
    lp::PredId class_pred;
  };
  struct Condition {
    lp::PredId pred;
    Step lower;
    Step upper;
  };
  struct Event {
    lp::PredId event;
    lp::PredId end;
    lp::PredId smell;
    Step life_span;
    std::vector<Condition> starting;
    std::vector<Condition> ending;
  };

  const Triple& triple(const obs::Manifestation& m) const;
  bool add_conditions(lp::GroundRule& rule, const std::vector<Condition>& conditions, Step t);

  kb::KnowledgeBase kb_;
  lp::AtomTable& atoms_;
  std::map<std::string, Triple, std::less<>> triples_;  // key object '\0' attribute '\0' state
  std::vector<Event> events_;
  lp::PredId manifestation_;
  lp::PredId explained_;
  lp::PredId marker_;
  lp::PredId target_normal_;
  lp::PredId target_abnormal_;
  std::vector<lp::PredId> smell_;
};

std::vector<lp::GroundRule> compile_base(const kb::KnowledgeBase& kb, lp::AtomTable& atoms);
StepRules compile_step(const kb::KnowledgeBase& kb, Step t, std::span<const obs::Manifestation> manifestations,
                       lp::AtomTable& atoms);
lp::GroundRule compile_volatile(Step t, lp::AtomTable& atoms);

/// Text of base, cumulative steps 1..n and volatile(n), with `% base`,
/// `% cumulative(t)` and `% volatile(t)` section comments. `manifestations`
/// may hold any steps; those beyond n are ignored.
std::string program_text(const kb::KnowledgeBase& kb, Step n, std::span<const obs::Manifestation> manifestations);

}  // namespace streamasp::compiler
