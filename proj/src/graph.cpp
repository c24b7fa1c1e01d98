#include "tracelens/graph.hpp"

#include <deque>
#include <queue>

namespace tracelens {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kTold:
      return "told";
    case NodeKind::kBackground:
      return "background";
    case NodeKind::kInferred:
      return "inferred";
    case NodeKind::kRule:
      return "rule";
  }
  return "rule";
}

NodeKind node_kind_of(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::kTold:
      return NodeKind::kTold;
    case KnowledgeKind::kBackground:
      return NodeKind::kBackground;
    case KnowledgeKind::kInferred:
      return NodeKind::kInferred;
  }
  return NodeKind::kInferred;
}

namespace {
const std::set<std::string> kNoNeighbours;
}

void ExplanationGraph::add_node(Node node) {
  std::string id = node.id;
  if (!nodes_.emplace(id, std::move(node)).second) {
    throw InvalidGraph("duplicate node id: " + id);
  }
}

void ExplanationGraph::remove_node(const std::string& id) {
  if (!contains(id)) throw UnknownNode(id);
  if (auto it = out_.find(id); it != out_.end()) {
    for (const auto& child : it->second) in_[child].erase(id);
    out_.erase(it);
  }
  if (auto it = in_.find(id); it != in_.end()) {
    for (const auto& parent : it->second) out_[parent].erase(id);
    in_.erase(it);
  }
  nodes_.erase(nodes_.find(id));
  // Keep the adjacency maps free of empty sets so equality is structural.
  std::erase_if(out_, [](const auto& kv) { return kv.second.empty(); });
  std::erase_if(in_, [](const auto& kv) { return kv.second.empty(); });
}

void ExplanationGraph::add_edge(const std::string& from, const std::string& to) {
  if (!contains(from)) throw UnknownNode(from);
  if (!contains(to)) throw UnknownNode(to);
  out_[from].insert(to);
  in_[to].insert(from);
}

void ExplanationGraph::remove_edge(const std::string& from,
                                   const std::string& to) {
  if (auto it = out_.find(from); it != out_.end()) {
    it->second.erase(to);
    if (it->second.empty()) out_.erase(it);
  }
  if (auto it = in_.find(to); it != in_.end()) {
    it->second.erase(from);
    if (it->second.empty()) in_.erase(it);
  }
}

bool ExplanationGraph::contains(std::string_view id) const {
  return nodes_.find(id) != nodes_.end();
}

const Node& ExplanationGraph::node(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode(std::string(id));
  return it->second;
}

const std::set<std::string>& ExplanationGraph::children(
    std::string_view id) const {
  auto it = out_.find(id);
  return it == out_.end() ? kNoNeighbours : it->second;
}

const std::set<std::string>& ExplanationGraph::parents(
    std::string_view id) const {
  auto it = in_.find(id);
  return it == in_.end() ? kNoNeighbours : it->second;
}

bool ExplanationGraph::has_edge(std::string_view from,
                                std::string_view to) const {
  auto it = out_.find(from);
  return it != out_.end() && it->second.count(std::string(to)) > 0;
}

std::vector<std::pair<std::string, std::string>> ExplanationGraph::edges()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [from, tos] : out_) {
    for (const auto& to : tos) out.emplace_back(from, to);
  }
  return out;
}

std::size_t ExplanationGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, tos] : out_) n += tos.size();
  return n;
}

void ExplanationGraph::set_conclusion(std::string id) {
  if (!contains(id)) throw UnknownNode(id);
  conclusion_ = std::move(id);
}

std::size_t ExplanationGraph::count(NodeKind kind) const {
  std::size_t n = 0;
  for (const auto& [_, node] : nodes_) n += node.kind == kind;
  return n;
}

std::vector<std::string> topological_order(const ExplanationGraph& g) {
  std::map<std::string, std::size_t> indegree;
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
      ready;
  for (const auto& [id, _] : g.nodes()) {
    indegree[id] = g.parents(id).size();
    if (indegree[id] == 0) ready.push(id);
  }
  std::vector<std::string> order;
  order.reserve(g.size());
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    for (const auto& child : g.children(id)) {
      if (--indegree[child] == 0) ready.push(child);
    }
    order.push_back(std::move(id));
  }
  if (order.size() != g.size()) throw InvalidGraph("graph contains a cycle");
  return order;
}

bool is_acyclic(const ExplanationGraph& g) {
  try {
    topological_order(g);
    return true;
  } catch (const InvalidGraph&) {
    return false;
  }
}

std::set<std::string> descendants(const ExplanationGraph& g,
                                  std::string_view from) {
  if (!g.contains(from)) throw UnknownNode(std::string(from));
  std::set<std::string> seen{std::string(from)};
  std::deque<std::string> queue{std::string(from)};
  while (!queue.empty()) {
    std::string id = std::move(queue.front());
    queue.pop_front();
    for (const auto& child : g.children(id)) {
      if (seen.insert(child).second) queue.push_back(child);
    }
  }
  return seen;
}

bool reaches(const ExplanationGraph& g, std::string_view from,
             std::string_view to) {
  if (!g.contains(to)) throw UnknownNode(std::string(to));
  return descendants(g, from).count(std::string(to)) > 0;
}

std::vector<std::string> root_causes(const ExplanationGraph& g) {
  std::vector<std::string> roots;
  for (const auto& [id, _] : g.nodes()) {
    if (g.parents(id).empty()) roots.push_back(id);
  }
  return roots;
}

std::vector<std::string> check_graph(const ExplanationGraph& g) {
  std::vector<std::string> issues;
  if (!is_acyclic(g)) issues.push_back("graph is not acyclic");
  if (g.conclusion().empty() || !g.contains(g.conclusion())) {
    issues.push_back("conclusion node is missing");
    return issues;
  }
  if (g.node(g.conclusion()).kind != NodeKind::kInferred) {
    issues.push_back("conclusion " + g.conclusion() + " is not inferred");
  }
  for (const auto& [id, node] : g.nodes()) {
    switch (node.kind) {
      case NodeKind::kRule:
        if (g.parents(id).empty()) {
          issues.push_back("rule node " + id + " has no premises");
        }
        if (g.children(id).size() != 1) {
          issues.push_back("rule node " + id + " must have exactly one conclusion");
        }
        break;
      case NodeKind::kTold:
      case NodeKind::kBackground:
        if (!g.parents(id).empty()) {
          issues.push_back("root knowledge " + id + " has a parent");
        }
        break;
      case NodeKind::kInferred:
        break;
    }
  }
  bool reachable = false;
  for (const auto& root : root_causes(g)) {
    const NodeKind kind = g.node(root).kind;
    if (kind != NodeKind::kTold && kind != NodeKind::kBackground) continue;
    if (reaches(g, root, g.conclusion())) {
      reachable = true;
      break;
    }
  }
  if (!reachable) {
    issues.push_back("conclusion is not reachable from any root cause");
  }
  return issues;
}

ExplanationGraph build_graph(const ProofTrace& trace) {
  ValidationReport report = validate_trace(trace);
  if (!report.ok()) {
    throw InvalidGraph("cannot build graph from invalid trace: " +
                       report.violations.front().message);
  }
  ExplanationGraph g;
  for (const auto& s : trace.statements) {
    g.add_node(Node{.id = s.id,
                    .kind = node_kind_of(s.kind),
                    .text = s.text,
                    .predicate = s.predicate});
  }
  for (const auto& r : trace.rules) {
    g.add_node(Node{.id = r.id,
                    .kind = NodeKind::kRule,
                    .rule_name = r.rule_name,
                    .rule_text = r.rule_text});
    for (const auto& p : r.premise_ids) g.add_edge(p, r.id);
    g.add_edge(r.id, r.conclusion_id);
  }
  g.set_conclusion(trace.conclusion_id);
  g.set_provenance({trace.scenario, trace.domain});
  return g;
}

}  // namespace tracelens
