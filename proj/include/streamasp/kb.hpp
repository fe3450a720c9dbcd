#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamasp::kb {

struct AttributeDecl {
  std::string name;
  std::vector<std::string> states;

  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

struct ObjectDecl {
  std::string class_name;
  std::string instance;
  std::vector<AttributeDecl> attributes;

  const AttributeDecl* attribute(std::string_view name) const;
  friend bool operator==(const ObjectDecl&, const ObjectDecl&) = default;
};

/// Inclusive value range [min, max] in sensor units that maps to `state`.
struct MeasuredStateRange {
  double min = 0;
  double max = 0;
  std::string state;

  bool contains(double v) const noexcept { return min <= v && v <= max; }
  friend bool operator==(const MeasuredStateRange&, const MeasuredStateRange&) = default;
};

struct SensorDecl {
  std::string id;
  std::string object;
  std::string attribute;
  std::vector<MeasuredStateRange> ranges;

  friend bool operator==(const SensorDecl&, const SensorDecl&) = default;
};

inline constexpr std::string_view kNormal = "normal";
inline constexpr std::string_view kAbnormal = "abnormal";

/// The observed quantity to be explained (the kitchen air). Its attribute
/// has exactly the states `normal` and `abnormal`; values inside
/// [normal_min, normal_max] are normal.
struct TargetDecl {
  std::string class_name;
  std::string instance;
  std::string attribute;
  std::string sensor;
  double normal_min = 0;
  double normal_max = 0;

  friend bool operator==(const TargetDecl&, const TargetDecl&) = default;
};

/// Manifestation (object, attribute, state) required within the step window
/// [t - lower, t - upper] of the event step t. lower = upper = 0 means "at t".
struct TemporalCondition {
  std::string object;
  std::string attribute;
  std::string state;
  std::int64_t lower = 0;
  std::int64_t upper = 0;

  bool coincident() const noexcept { return lower == 0 && upper == 0; }
  friend bool operator==(const TemporalCondition&, const TemporalCondition&) = default;
};

struct ImplicitEventDecl {
  std::string name;
  std::int64_t effect_life_span = 0;
  std::vector<TemporalCondition> starting;
  std::vector<TemporalCondition> ending;

  friend bool operator==(const ImplicitEventDecl&, const ImplicitEventDecl&) = default;
};

struct KnowledgeBase {
  std::vector<ObjectDecl> objects;
  std::vector<SensorDecl> sensors;
  TargetDecl target;
  std::vector<ImplicitEventDecl> implicit_events;

  /// Class of an object instance, the target included.
  std::optional<std::string_view> class_of(std::string_view instance) const;
  /// Declared states of (instance, attribute); the target yields {normal, abnormal}.
  std::optional<std::vector<std::string>> states_of(std::string_view instance, std::string_view attribute) const;
  const SensorDecl* sensor(std::string_view id) const;
  bool is_target(std::string_view instance, std::string_view attribute) const {
    return instance == target.instance && attribute == target.attribute;
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

enum class ViolationKind { Empty, Duplicate, UnknownReference, Overlap, InvalidRange, InvalidIdentifier, Coverage, NameClash };

struct Violation {
  ViolationKind kind;
  std::string subject;  ///< the offending declaration, e.g. `sensors[1] (freezerTemp1)`
  std::string message;

  std::string to_string() const { return subject + ": " + message; }
};

/// Reads the document shape only: JSON syntax, required keys and value types.
/// Throws ParseError.
KnowledgeBase parse_kb_document(std::string_view text);

/// parse_kb_document followed by validate. Throws ParseError, or
/// ValidationError naming every violation.
KnowledgeBase parse_kb(std::string_view text);

/// Empty iff the knowledge base satisfies every declaration invariant.
/// Independent of declaration order up to the order of the returned list.
std::vector<Violation> validate(const KnowledgeBase& kb);

/// Document text accepted by parse_kb_document; round-trips exactly.
std::string serialize(const KnowledgeBase& kb);

/// Temporal values in a knowledge base are written in one-second steps.
/// Returns a copy whose windows and life spans are expressed in steps of
/// `granularity_seconds`, rounding windows outward and life spans up.
KnowledgeBase at_granularity(const KnowledgeBase& kb, std::int64_t granularity_seconds);

/// [A-Za-z][A-Za-z0-9]*
bool is_identifier(std::string_view s);

}  // namespace streamasp::kb
