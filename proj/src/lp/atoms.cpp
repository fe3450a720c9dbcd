#include "streamasp/lp/atoms.hpp"

namespace streamasp::lp {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

AtomTable::AtomTable() : slots_(1024, kEmpty) {}

PredId AtomTable::predicate(std::string_view name) {
  auto it = predicate_index_.find(std::string(name));
  if (it != predicate_index_.end()) return it->second;
  auto id = static_cast<PredId>(predicates_.size());
  predicates_.emplace_back(name);
  predicate_index_.emplace(std::string(name), id);
  return id;
}

std::optional<PredId> AtomTable::find_predicate(std::string_view name) const {
  auto it = predicate_index_.find(std::string(name));
  if (it == predicate_index_.end()) return std::nullopt;
  return it->second;
}

Term AtomTable::symbol(std::string_view name) {
  auto it = symbol_index_.find(std::string(name));
  if (it != symbol_index_.end()) return Term::symbol(it->second);
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.emplace_back(name);
  symbol_index_.emplace(std::string(name), id);
  return Term::symbol(id);
}

std::uint64_t AtomTable::hash(PredId pred, std::span<const Term> args) const {
  std::uint64_t h = mix(0, pred);
  for (Term t : args) h = mix(h, t.bits());
  // murmur3 finalizer; slots are picked from the low bits
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

bool AtomTable::equal(AtomId id, PredId pred, std::span<const Term> args) const {
  const Record& r = records_[id];
  if (r.pred != pred || r.arity != args.size()) return false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(terms_[r.offset + i] == args[i])) return false;
  }
  return true;
}

std::optional<AtomId> AtomTable::find(PredId pred, std::span<const Term> args) const {
  std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash(pred, args) & mask;; i = (i + 1) & mask) {
    AtomId id = slots_[i];
    if (id == kEmpty) return std::nullopt;
    if (equal(id, pred, args)) return id;
  }
}

AtomId AtomTable::atom(PredId pred, std::span<const Term> args) {
  std::size_t mask = slots_.size() - 1;
  std::size_t i = hash(pred, args) & mask;
  for (;; i = (i + 1) & mask) {
    AtomId id = slots_[i];
    if (id == kEmpty) break;
    if (equal(id, pred, args)) return id;
  }
  auto id = static_cast<AtomId>(records_.size());
  records_.push_back({pred, static_cast<std::uint32_t>(args.size()), terms_.size()});
  terms_.insert(terms_.end(), args.begin(), args.end());
  slots_[i] = id;
  // keep load factor below one half
  if (records_.size() * 2 > slots_.size()) grow();
  return id;
}

void AtomTable::grow() {
  std::vector<AtomId> next(slots_.size() * 2, kEmpty);
  std::size_t mask = next.size() - 1;
  for (AtomId id = 0; id < records_.size(); ++id) {
    std::size_t i = hash(records_[id].pred, args(id)) & mask;
    while (next[i] != kEmpty) i = (i + 1) & mask;
    next[i] = id;
  }
  slots_.swap(next);
}

std::optional<Step> AtomTable::unary_step(AtomId id) const {
  const Record& r = records_[id];
  if (r.arity != 1) return std::nullopt;
  Term t = terms_[r.offset];
  if (!t.is_integer()) return std::nullopt;
  return t.as_integer();
}

std::string AtomTable::to_string(AtomId id) const {
  std::string out(predicate_name(predicate_of(id)));
  auto a = args(id);
  if (a.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) out += ',';
    if (a[i].is_integer()) {
      out += std::to_string(a[i].as_integer());
    } else {
      out += symbol_name(a[i].as_symbol());
    }
  }
  out += ')';
  return out;
}

}  // namespace streamasp::lp
