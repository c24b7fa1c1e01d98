#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/error.hpp"
#include "tracelens/trace.hpp"

namespace tracelens {

enum class NodeKind { kTold, kBackground, kInferred, kRule };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_of(KnowledgeKind kind);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kTold;
  // Statement text for knowledge nodes, empty for rule nodes.
  std::string text;
  // Set for knowledge nodes only.
  std::optional<Predicate> predicate;
  // Set for rule nodes only.
  std::string rule_name;
  std::string rule_text;

  bool is_rule() const { return kind == NodeKind::kRule; }
  bool operator==(const Node&) const = default;
};

struct Provenance {
  std::string scenario;
  Domain domain = Domain::kOther;

  bool operator==(const Provenance&) const = default;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& id) : Error("unknown node: " + id) {}
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

// Directed graph of knowledge and rule-application nodes with a
// distinguished conclusion. The container itself enforces only referential
// integrity; the structural invariants are checked by check_graph().
class ExplanationGraph {
 public:
  using Adjacency = std::map<std::string, std::set<std::string>>;

  ExplanationGraph() = default;

  void add_node(Node node);
  // Removes the node and every incident edge.
  void remove_node(const std::string& id);
  void add_edge(const std::string& from, const std::string& to);
  void remove_edge(const std::string& from, const std::string& to);

  bool contains(std::string_view id) const;
  const Node& node(std::string_view id) const;
  const std::map<std::string, Node, std::less<>>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  const std::set<std::string>& children(std::string_view id) const;
  const std::set<std::string>& parents(std::string_view id) const;
  bool has_edge(std::string_view from, std::string_view to) const;
  std::vector<std::pair<std::string, std::string>> edges() const;
  std::size_t edge_count() const;

  const std::string& conclusion() const { return conclusion_; }
  void set_conclusion(std::string id);

  const Provenance& provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

  std::size_t count(NodeKind kind) const;

  bool operator==(const ExplanationGraph& other) const {
    return nodes_ == other.nodes_ && out_ == other.out_ &&
           conclusion_ == other.conclusion_;
  }

 private:
  std::map<std::string, Node, std::less<>> nodes_;
  std::map<std::string, std::set<std::string>, std::less<>> out_;
  std::map<std::string, std::set<std::string>, std::less<>> in_;
  std::string conclusion_;
  Provenance provenance_;
};

// Structural invariants of a well-formed explanation graph. Empty result
// means the graph is valid.
std::vector<std::string> check_graph(const ExplanationGraph& g);

// One node per statement and per rule application; premise -> rule ->
// conclusion edges. Throws InvalidGraph when the trace fails validation.
ExplanationGraph build_graph(const ProofTrace& trace);

// Nodes with in-degree zero, in id order.
std::vector<std::string> root_causes(const ExplanationGraph& g);

bool reaches(const ExplanationGraph& g, std::string_view from,
             std::string_view to);

// All nodes reachable from `from`, including itself.
std::set<std::string> descendants(const ExplanationGraph& g,
                                  std::string_view from);

// Kahn order with lexicographic id tie-break. Throws InvalidGraph on a cycle.
std::vector<std::string> topological_order(const ExplanationGraph& g);

bool is_acyclic(const ExplanationGraph& g);

}  // namespace tracelens
