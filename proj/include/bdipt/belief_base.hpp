#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bdipt/term.hpp"

namespace bdipt {

enum class BeliefOp : unsigned char { Addition, Deletion };

struct BeliefEvent {
  BeliefOp op;
  Literal literal;
  friend bool operator==(const BeliefEvent&, const BeliefEvent&) = default;
};

class NonGroundBelief : public std::invalid_argument {
 public:
  explicit NonGroundBelief(const Literal& l);
};

/// Percepts observed in one batch; each carries exactly one source(...) annotation.
using PerceptBatch = std::vector<Literal>;

/// Ground literals indexed by (polarity, functor, arity), insertion ordered.
/// Identity ignores annotations: re-adding a known literal merges its
/// annotations without emitting an event.
class BeliefBase {
 public:
  std::vector<BeliefEvent> add(const Literal& l);
  /// Removes the stored literal with the same term and polarity, if any.
  std::vector<BeliefEvent> remove(const Literal& l);
  /// Set-union of the batch; never deletes.
  std::vector<BeliefEvent> update_from_percepts(const PerceptBatch& batch);

  /// One substitution per stored literal matching `pattern` (annotations of
  /// the pattern must be a subset), in insertion order.
  std::vector<Substitution> query(const Literal& pattern, const Substitution& s = {}) const;
  bool contains(const Literal& l) const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  /// All literals, grouped by key then insertion order.
  std::vector<Literal> literals() const;
  /// `literal[annotations]` lines, sorted lexicographically.
  std::vector<std::string> dump() const;

  friend bool operator==(const BeliefBase& a, const BeliefBase& b);

 private:
  using Key = std::pair<std::pair<bool, std::string>, std::size_t>;
  static Key key_of(const Literal& l);

  struct Bucket {
    std::vector<Literal> entries;
  };

  std::map<Key, Bucket> index_;
  std::size_t size_ = 0;
};

}  // namespace bdipt
