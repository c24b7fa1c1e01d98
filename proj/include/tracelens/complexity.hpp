#pragma once

#include <cstddef>
#include <map>

#include "tracelens/graph.hpp"

namespace tracelens {

// Node simplicity: an explanation with fewer causes is simpler. Rule nodes
// are inferential connectives, counted separately and not as causes.
struct ComplexityScore {
  std::size_t cause_count = 0;
  std::size_t rule_count = 0;
  std::map<NodeKind, std::size_t> by_kind;

  bool operator==(const ComplexityScore&) const = default;
};

ComplexityScore node_simplicity(const ExplanationGraph& g);

enum class Abstraction { kMoreAbstract, kEqual, kLessAbstract };

const char* to_string(Abstraction a);

// How abstract `a` is relative to `b`: fewer causes wins, then fewer rules.
Abstraction compare_layers(const ExplanationGraph& a, const ExplanationGraph& b);
Abstraction compare_scores(const ComplexityScore& a, const ComplexityScore& b);

}  // namespace tracelens
