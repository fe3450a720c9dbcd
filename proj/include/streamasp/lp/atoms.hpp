#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace streamasp::lp {

using AtomId = std::uint32_t;
using PredId = std::uint32_t;
using SymbolId = std::uint32_t;
using Step = std::int64_t;

/// A ground argument: either an interned symbol or an integer.
class Term {
 public:
  static Term integer(std::int64_t value) { return Term(static_cast<std::uint64_t>(value) << 1); }
  static Term symbol(SymbolId id) { return Term((static_cast<std::uint64_t>(id) << 1) | 1u); }

  bool is_symbol() const noexcept { return (bits_ & 1u) != 0; }
  bool is_integer() const noexcept { return !is_symbol(); }
  std::int64_t as_integer() const noexcept { return static_cast<std::int64_t>(bits_) >> 1; }
  SymbolId as_symbol() const noexcept { return static_cast<SymbolId>(bits_ >> 1); }
  std::uint64_t bits() const noexcept { return bits_; }

  friend bool operator==(Term a, Term b) noexcept { return a.bits_ == b.bits_; }

 private:
  explicit Term(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_;
};

/// Interns predicates, symbols and ground atoms. Equal atoms share one AtomId;
/// ids are dense and assigned in creation order.
class AtomTable {
 public:
  AtomTable();

  PredId predicate(std::string_view name);
  std::optional<PredId> find_predicate(std::string_view name) const;
  std::string_view predicate_name(PredId id) const { return predicates_[id]; }
  std::size_t predicate_count() const noexcept { return predicates_.size(); }

  Term symbol(std::string_view name);
  std::string_view symbol_name(SymbolId id) const { return symbols_[id]; }

  AtomId atom(PredId pred, std::span<const Term> args);
  AtomId atom(PredId pred, std::initializer_list<Term> args) {
    return atom(pred, std::span<const Term>(args.begin(), args.size()));
  }
  /// Shorthand for the common `pred(step)` shape.
  AtomId atom(PredId pred, Step step) { return atom(pred, {Term::integer(step)}); }
  std::optional<AtomId> find(PredId pred, std::span<const Term> args) const;

  PredId predicate_of(AtomId id) const { return records_[id].pred; }
  std::span<const Term> args(AtomId id) const {
    const Record& r = records_[id];
    return {terms_.data() + r.offset, r.arity};
  }
  /// Step of a `pred(i)` atom with one integer argument, if the atom has that shape.
  std::optional<Step> unary_step(AtomId id) const;

  std::size_t size() const noexcept { return records_.size(); }

  std::string to_string(AtomId id) const;

 private:
  struct Record {
    PredId pred;
    std::uint32_t arity;
    std::size_t offset;
  };

  std::uint64_t hash(PredId pred, std::span<const Term> args) const;
  bool equal(AtomId id, PredId pred, std::span<const Term> args) const;
  void grow();

  std::vector<std::string> predicates_;
  std::unordered_map<std::string, PredId> predicate_index_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, SymbolId> symbol_index_;

  std::vector<Record> records_;
  std::vector<Term> terms_;
  // open addressing over atom ids; kEmpty marks a free slot
  std::vector<AtomId> slots_;
  static constexpr AtomId kEmpty = ~AtomId{0};
};

}  // namespace streamasp::lp
