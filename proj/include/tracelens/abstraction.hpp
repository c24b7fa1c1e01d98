#pragma once

// Simplifying rewrites over explanation graphs and their ordered
// combinations. Every rewrite is a pure graph-in/graph-out function.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/error.hpp"
#include "tracelens/graph.hpp"

namespace tracelens {

enum class AbstractionRule { kFlattenLogic, kFlattenRules, kFilterKnowledge };

std::string_view to_string(AbstractionRule rule);

class InvalidCombo : public Error {
 public:
  using Error::Error;
};

// Ordered list of rules, e.g. FL-FR. Only the five combinations compared in
// the study are valid: none, FL, FL-FR, FL-FR-FK and FL-FK.
class RuleCombo {
 public:
  RuleCombo() = default;
  // Throws InvalidCombo for sequences outside the valid set.
  explicit RuleCombo(std::vector<AbstractionRule> rules);

  static RuleCombo none() { return RuleCombo(); }
  static RuleCombo fl();
  static RuleCombo fl_fr();
  static RuleCombo fl_fr_fk();
  static RuleCombo fl_fk();
  static const std::vector<RuleCombo>& all();

  // Accepts "none", "[]", or dash-separated rule names ("FL-FR-FK").
  static RuleCombo parse(std::string_view text);

  const std::vector<AbstractionRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }
  bool contains(AbstractionRule rule) const;

  // "FL-FR"; the empty combo is "none".
  std::string label() const;
  // Study wording; the empty combo is "no abstraction".
  std::string display_name() const;
  // ["FL","FR"]
  std::vector<std::string> codes() const;

  bool operator==(const RuleCombo&) const = default;
  auto operator<=>(const RuleCombo&) const = default;

 private:
  std::vector<AbstractionRule> rules_;
};

bool is_valid_combo(const std::vector<AbstractionRule>& rules);

struct FlattenLogicConfig {
  std::set<std::string> logic_rules{"conjunction-introduction",
                                    "conjunction-elimination"};
};

// Nodes matching `kinds` or listed in `ids` are removable. Told nodes, rule
// nodes and the conclusion are never removed.
struct FilterPolicy {
  std::set<NodeKind> kinds{NodeKind::kBackground};
  std::set<std::string> ids;
};

struct AbstractionOptions {
  FlattenLogicConfig logic;
  FilterPolicy filter;
};

struct RemovedRule {
  std::string rule_name;
  std::string rule_text;
  std::string conclusion;

  bool operator==(const RemovedRule&) const = default;
};

struct FlattenRulesResult {
  ExplanationGraph graph;
  // One entry per removed rule node, in node id order.
  std::vector<RemovedRule> footnote_candidates;
};

struct FilterResult {
  ExplanationGraph graph;
  std::vector<std::string> removed;
  // Overrides and side effects: policy matches that were kept, rule nodes
  // dropped because they lost every premise, inferred nodes left orphaned.
  std::vector<std::string> audit;
};

ExplanationGraph flatten_logic(const ExplanationGraph& g,
                               const FlattenLogicConfig& config = {});
FlattenRulesResult flatten_rules(const ExplanationGraph& g);
FilterResult filter_knowledge(const ExplanationGraph& g,
                              const FilterPolicy& policy = {});

ExplanationGraph apply_rule(const ExplanationGraph& g, AbstractionRule rule,
                            const AbstractionOptions& options = {});
ExplanationGraph apply_combo(const ExplanationGraph& g, const RuleCombo& combo,
                             const AbstractionOptions& options = {});

struct Layer {
  RuleCombo combo;
  ExplanationGraph graph;
};

struct LayeredExplanation {
  std::string conclusion;
  std::vector<Layer> layers;
  Provenance provenance;
};

// [[], [FL], [FL,FR], [FL,FR,FK]]
std::vector<RuleCombo> default_chain();
// [[], [FL], [FL,FK]]
std::vector<RuleCombo> nofr_chain();

// Each layer is computed from `g` by its full combo, so branching chains are
// well defined. Throws InvalidCombo unless the chain starts with none.
LayeredExplanation generate_layers(const ExplanationGraph& g,
                                   const std::vector<RuleCombo>& chain,
                                   const AbstractionOptions& options = {});

struct PreservationReport {
  bool conclusion_reachable = false;
  bool reachability_preserved = false;
  // "new path created u -> v" / "path lost u -> v"
  std::vector<std::string> failures;
  // Inferred nodes that had parents in g but have none in g'.
  std::vector<std::string> orphaned;

  bool ok() const { return conclusion_reachable && reachability_preserved; }
};

PreservationReport preserves_conclusion(const ExplanationGraph& g,
                                        const ExplanationGraph& g_prime);

}  // namespace tracelens
