#include "tracelens/complexity.hpp"

namespace tracelens {

ComplexityScore node_simplicity(const ExplanationGraph& g) {
  ComplexityScore score;
  for (auto kind : {NodeKind::kTold, NodeKind::kBackground, NodeKind::kInferred,
                    NodeKind::kRule}) {
    score.by_kind[kind] = 0;
  }
  for (const auto& [_, node] : g.nodes()) ++score.by_kind[node.kind];
  score.rule_count = score.by_kind[NodeKind::kRule];
  score.cause_count = score.by_kind[NodeKind::kTold] +
                      score.by_kind[NodeKind::kBackground] +
                      score.by_kind[NodeKind::kInferred];
  return score;
}

const char* to_string(Abstraction a) {
  switch (a) {
    case Abstraction::kMoreAbstract:
      return "MoreAbstract";
    case Abstraction::kEqual:
      return "Equal";
    case Abstraction::kLessAbstract:
      return "LessAbstract";
  }
  return "Equal";
}

Abstraction compare_scores(const ComplexityScore& a, const ComplexityScore& b) {
  if (a.cause_count != b.cause_count) {
    return a.cause_count < b.cause_count ? Abstraction::kMoreAbstract
                                         : Abstraction::kLessAbstract;
  }
  if (a.rule_count != b.rule_count) {
    return a.rule_count < b.rule_count ? Abstraction::kMoreAbstract
                                       : Abstraction::kLessAbstract;
  }
  return Abstraction::kEqual;
}

Abstraction compare_layers(const ExplanationGraph& a, const ExplanationGraph& b) {
  return compare_scores(node_simplicity(a), node_simplicity(b));
}

}  // namespace tracelens
