#include "bdipt/belief_base.hpp"

#include <algorithm>
#include <set>

namespace bdipt {

NonGroundBelief::NonGroundBelief(const Literal& l)
    : std::invalid_argument("belief must be ground: " + l.to_string()) {}

BeliefBase::Key BeliefBase::key_of(const Literal& l) { return {{l.negated(), l.functor()}, l.arity()}; }

std::vector<BeliefEvent> BeliefBase::add(const Literal& l) {
  if (!l.is_ground()) throw NonGroundBelief(l);
  auto& bucket = index_[key_of(l)];
  for (auto& e : bucket.entries) {
    if (e.term() == l.term()) {
      e = e.with_annotations(l.annotations());
      return {};
    }
  }
  bucket.entries.push_back(l);
  ++size_;
  return {BeliefEvent{BeliefOp::Addition, l}};
}

std::vector<BeliefEvent> BeliefBase::remove(const Literal& l) {
  auto it = index_.find(key_of(l));
  if (it == index_.end()) return {};
  auto& entries = it->second.entries;
  auto pos = std::find_if(entries.begin(), entries.end(), [&](const Literal& e) { return e.term() == l.term(); });
  if (pos == entries.end()) return {};
  BeliefEvent ev{BeliefOp::Deletion, *pos};
  entries.erase(pos);
  if (entries.empty()) index_.erase(it);
  --size_;
  return {std::move(ev)};
}

std::vector<BeliefEvent> BeliefBase::update_from_percepts(const PerceptBatch& batch) {
  std::vector<BeliefEvent> events;
  for (const auto& p : batch) {
    auto ev = add(p);
    events.insert(events.end(), ev.begin(), ev.end());
  }
  return events;
}

std::vector<Substitution> BeliefBase::query(const Literal& pattern, const Substitution& s) const {
  std::vector<Substitution> out;
  auto it = index_.find(key_of(pattern));
  if (it == index_.end()) return out;
  for (const auto& e : it->second.entries) {
    auto sols = match_literal(pattern, e, s);
    out.insert(out.end(), sols.begin(), sols.end());
  }
  return out;
}

bool BeliefBase::contains(const Literal& l) const {
  auto it = index_.find(key_of(l));
  if (it == index_.end()) return false;
  const auto& entries = it->second.entries;
  return std::any_of(entries.begin(), entries.end(), [&](const Literal& e) { return e.term() == l.term(); });
}

std::vector<Literal> BeliefBase::literals() const {
  std::vector<Literal> out;
  out.reserve(size_);
  for (const auto& [key, bucket] : index_) out.insert(out.end(), bucket.entries.begin(), bucket.entries.end());
  return out;
}

std::vector<std::string> BeliefBase::dump() const {
  std::vector<std::string> lines;
  for (const auto& l : literals()) lines.push_back(l.to_string());
  std::sort(lines.begin(), lines.end());
  return lines;
}

bool operator==(const BeliefBase& a, const BeliefBase& b) {
  if (a.size_ != b.size_) return false;
  auto sa = a.literals();
  auto sb = b.literals();
  auto cmp = [](const Literal& x, const Literal& y) { return x.to_string() < y.to_string(); };
  std::sort(sa.begin(), sa.end(), cmp);
  std::sort(sb.begin(), sb.end(), cmp);
  return sa == sb;
}

}  // namespace bdipt
