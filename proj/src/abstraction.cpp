#include "tracelens/abstraction.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace tracelens {

std::string_view to_string(AbstractionRule rule) {
  switch (rule) {
    case AbstractionRule::kFlattenLogic:
      return "FL";
    case AbstractionRule::kFlattenRules:
      return "FR";
    case AbstractionRule::kFilterKnowledge:
      return "FK";
  }
  return "FL";
}

bool is_valid_combo(const std::vector<AbstractionRule>& rules) {
  using R = AbstractionRule;
  static const std::vector<std::vector<R>> kValid = {
      {},
      {R::kFlattenLogic},
      {R::kFlattenLogic, R::kFlattenRules},
      {R::kFlattenLogic, R::kFlattenRules, R::kFilterKnowledge},
      {R::kFlattenLogic, R::kFilterKnowledge},
  };
  return std::find(kValid.begin(), kValid.end(), rules) != kValid.end();
}

RuleCombo::RuleCombo(std::vector<AbstractionRule> rules)
    : rules_(std::move(rules)) {
  if (!is_valid_combo(rules_)) {
    throw InvalidCombo("invalid rule combination: " + label());
  }
}

RuleCombo RuleCombo::fl() {
  return RuleCombo({AbstractionRule::kFlattenLogic});
}
RuleCombo RuleCombo::fl_fr() {
  return RuleCombo(
      {AbstractionRule::kFlattenLogic, AbstractionRule::kFlattenRules});
}
RuleCombo RuleCombo::fl_fr_fk() {
  return RuleCombo({AbstractionRule::kFlattenLogic,
                    AbstractionRule::kFlattenRules,
                    AbstractionRule::kFilterKnowledge});
}
RuleCombo RuleCombo::fl_fk() {
  return RuleCombo(
      {AbstractionRule::kFlattenLogic, AbstractionRule::kFilterKnowledge});
}

const std::vector<RuleCombo>& RuleCombo::all() {
  static const std::vector<RuleCombo> kAll = {none(), fl(), fl_fr(),
                                              fl_fr_fk(), fl_fk()};
  return kAll;
}

RuleCombo RuleCombo::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (s.empty() || s == "NONE" || s == "[]") return none();
  std::vector<AbstractionRule> rules;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('-', start);
    if (end == std::string::npos) end = s.size();
    std::string token = s.substr(start, end - start);
    if (token == "FL") {
      rules.push_back(AbstractionRule::kFlattenLogic);
    } else if (token == "FR") {
      rules.push_back(AbstractionRule::kFlattenRules);
    } else if (token == "FK") {
      rules.push_back(AbstractionRule::kFilterKnowledge);
    } else {
      throw InvalidCombo("unknown abstraction rule \"" + token + "\" in " +
                         std::string(text));
    }
    start = end + 1;
  }
  return RuleCombo(std::move(rules));
}

bool RuleCombo::contains(AbstractionRule rule) const {
  return std::find(rules_.begin(), rules_.end(), rule) != rules_.end();
}

std::string RuleCombo::label() const {
  if (rules_.empty()) return "none";
  std::string out;
  for (auto r : rules_) {
    if (!out.empty()) out += '-';
    out += to_string(r);
  }
  return out;
}

std::string RuleCombo::display_name() const {
  return rules_.empty() ? "no abstraction" : label();
}

std::vector<std::string> RuleCombo::codes() const {
  std::vector<std::string> out;
  for (auto r : rules_) out.emplace_back(to_string(r));
  return out;
}

namespace {

// Removes `id` and joins each of its parents to each of its children.
void splice_out(ExplanationGraph& g, const std::string& id) {
  const std::set<std::string> parents = g.parents(id);
  const std::set<std::string> children = g.children(id);
  g.remove_node(id);
  for (const auto& p : parents) {
    for (const auto& c : children) g.add_edge(p, c);
  }
}

std::vector<std::string> rule_ids(const ExplanationGraph& g) {
  std::vector<std::string> ids;
  for (const auto& [id, node] : g.nodes()) {
    if (node.is_rule()) ids.push_back(id);
  }
  return ids;
}

bool is_root_knowledge(const Node& n) {
  return n.kind == NodeKind::kTold || n.kind == NodeKind::kBackground;
}

// T -> R(restatement) -> I where I restates T and nothing else feeds I.
bool collapsible_restatement(const ExplanationGraph& g, const Node& rule) {
  if (rule.rule_name != kRestatementRule) return false;
  const auto& premises = g.parents(rule.id);
  const auto& outs = g.children(rule.id);
  if (premises.size() != 1 || outs.size() != 1) return false;
  const Node& told = g.node(*premises.begin());
  const Node& restated = g.node(*outs.begin());
  if (!is_root_knowledge(told) || restated.kind != NodeKind::kInferred) {
    return false;
  }
  if (restated.id == g.conclusion()) return false;
  if (g.parents(restated.id).size() != 1) return false;
  if (!told.predicate || !restated.predicate) return false;
  return canonicalize(*told.predicate) == canonicalize(*restated.predicate);
}

}  // namespace

ExplanationGraph flatten_logic(const ExplanationGraph& g,
                               const FlattenLogicConfig& config) {
  ExplanationGraph out = g;
  for (const auto& id : rule_ids(g)) {
    if (config.logic_rules.count(g.node(id).rule_name)) splice_out(out, id);
  }

  // Collapsing one restatement can expose another further down a chain.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& id : rule_ids(out)) {
      if (!collapsible_restatement(out, out.node(id))) continue;
      const std::string told = *out.parents(id).begin();
      const std::string restated = *out.children(id).begin();
      const std::set<std::string> children = out.children(restated);
      out.remove_node(restated);
      out.remove_node(id);
      for (const auto& c : children) out.add_edge(told, c);
      changed = true;
    }
  }
  return out;
}

FlattenRulesResult flatten_rules(const ExplanationGraph& g) {
  FlattenRulesResult result{g, {}};
  for (const auto& id : rule_ids(g)) {
    const Node& rule = g.node(id);
    const auto& outs = g.children(id);
    result.footnote_candidates.push_back(
        {rule.rule_name, rule.rule_text, outs.empty() ? "" : *outs.begin()});
    splice_out(result.graph, id);
  }
  return result;
}

FilterResult filter_knowledge(const ExplanationGraph& g,
                              const FilterPolicy& policy) {
  FilterResult result{g, {}, {}};
  ExplanationGraph& out = result.graph;

  for (const auto& [id, node] : g.nodes()) {
    if (!policy.kinds.count(node.kind) && !policy.ids.count(id)) continue;
    if (id == g.conclusion()) {
      result.audit.push_back("kept conclusion " + id + " despite filter policy");
      continue;
    }
    if (node.kind == NodeKind::kTold) {
      result.audit.push_back("kept told knowledge " + id);
      continue;
    }
    if (node.kind == NodeKind::kRule) {
      result.audit.push_back("kept rule node " + id);
      continue;
    }
    if (node.kind == NodeKind::kInferred) {
      auto rule_adjacent = [&](const std::set<std::string>& ids) {
        return std::any_of(ids.begin(), ids.end(), [&](const std::string& n) {
          return out.node(n).is_rule();
        });
      };
      if (rule_adjacent(out.parents(id)) || rule_adjacent(out.children(id))) {
        result.audit.push_back("kept inferred " + id +
                               " adjacent to a rule application");
        continue;
      }
    }
    splice_out(out, id);
    result.removed.push_back(id);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& id : rule_ids(out)) {
      if (!out.parents(id).empty()) continue;
      result.audit.push_back("dropped rule " + id + ": no remaining premises");
      out.remove_node(id);
      changed = true;
    }
  }

  for (const auto& [id, node] : out.nodes()) {
    if (node.kind == NodeKind::kInferred && out.parents(id).empty() &&
        !g.parents(id).empty()) {
      result.audit.push_back("orphaned inferred " + id);
    }
  }
  return result;
}

ExplanationGraph apply_rule(const ExplanationGraph& g, AbstractionRule rule,
                            const AbstractionOptions& options) {
  switch (rule) {
    case AbstractionRule::kFlattenLogic:
      return flatten_logic(g, options.logic);
    case AbstractionRule::kFlattenRules:
      return flatten_rules(g).graph;
    case AbstractionRule::kFilterKnowledge:
      return filter_knowledge(g, options.filter).graph;
  }
  return g;
}

ExplanationGraph apply_combo(const ExplanationGraph& g, const RuleCombo& combo,
                             const AbstractionOptions& options) {
  if (!is_valid_combo(combo.rules())) {
    throw InvalidCombo("invalid rule combination: " + combo.label());
  }
  ExplanationGraph out = g;
  for (auto rule : combo.rules()) out = apply_rule(out, rule, options);
  return out;
}

std::vector<RuleCombo> default_chain() {
  return {RuleCombo::none(), RuleCombo::fl(), RuleCombo::fl_fr(),
          RuleCombo::fl_fr_fk()};
}

std::vector<RuleCombo> nofr_chain() {
  return {RuleCombo::none(), RuleCombo::fl(), RuleCombo::fl_fk()};
}

LayeredExplanation generate_layers(const ExplanationGraph& g,
                                   const std::vector<RuleCombo>& chain,
                                   const AbstractionOptions& options) {
  if (chain.empty() || !chain.front().empty()) {
    throw InvalidCombo("a layer chain must start with no abstraction");
  }
  LayeredExplanation le{g.conclusion(), {}, g.provenance()};
  le.layers.reserve(chain.size());
  for (const auto& combo : chain) {
    le.layers.push_back({combo, apply_combo(g, combo, options)});
  }
  return le;
}

PreservationReport preserves_conclusion(const ExplanationGraph& g,
                                        const ExplanationGraph& g_prime) {
  PreservationReport report;

  const std::string& c = g_prime.conclusion();
  if (g_prime.contains(c)) {
    for (const auto& root : root_causes(g_prime)) {
      if (is_root_knowledge(g_prime.node(root)) && reaches(g_prime, root, c)) {
        report.conclusion_reachable = true;
        break;
      }
    }
  }
  if (!report.conclusion_reachable) {
    report.failures.push_back("conclusion " + c +
                              " is not reachable from a root cause");
  }

  std::vector<std::string> retained;
  for (const auto& [id, node] : g_prime.nodes()) {
    if (!node.is_rule() && g.contains(id) && !g.node(id).is_rule()) {
      retained.push_back(id);
    }
  }
  std::map<std::string, std::set<std::string>> before, after;
  for (const auto& id : retained) {
    before[id] = descendants(g, id);
    after[id] = descendants(g_prime, id);
  }
  report.reachability_preserved = true;
  for (const auto& u : retained) {
    for (const auto& v : retained) {
      if (u == v) continue;
      const bool was = before[u].count(v) > 0;
      const bool is = after[u].count(v) > 0;
      if (was == is) continue;
      report.reachability_preserved = false;
      report.failures.push_back(std::string(is ? "new path created " : "path lost ") +
                                u + " -> " + v);
    }
  }

  for (const auto& [id, node] : g_prime.nodes()) {
    if (node.kind == NodeKind::kInferred && g_prime.parents(id).empty() &&
        g.contains(id) && !g.parents(id).empty()) {
      report.orphaned.push_back(id);
    }
  }
  return report;
}

}  // namespace tracelens
