#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracelens/abstraction.hpp"
#include "tracelens/complexity.hpp"
#include "tracelens/error.hpp"
#include "tracelens/graph.hpp"

namespace tracelens {

class TemplateArity : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

// Sentence templates keyed by (case-folded) predicate name. Slots are written
// {0}, {1}, ... and literal braces as {{ and }}. A node whose predicate has no
// template falls back to its stored text.
struct TemplateSet {
  std::map<std::string, std::string> templates;
  std::string because = "Because:";
  std::string therefore = "Therefore:";

  // {"templates": {name: template}, "because": str, "therefore": str}
  static TemplateSet parse(std::string_view document);
  static TemplateSet load(const std::string& path);

  // Throws TemplateArity when the template's slots do not match the
  // predicate's arguments.
  std::string realize(const Node& node) const;
};

struct Sentence {
  std::string node;
  NodeKind kind = NodeKind::kInferred;
  std::string text;
  std::vector<int> markers;

  // Text followed by " [n]" for each footnote marker.
  std::string marked_text() const;
};

struct Footnote {
  int marker = 0;
  std::string rule_name;
  std::string rule_text;
};

struct RenderedExplanation {
  RuleCombo combo;
  std::vector<Sentence> body;
  std::vector<Footnote> footnotes;
  ComplexityScore complexity;
};

// Sentences in topological order (id tie-break) with the conclusion last.
// Each rule node becomes a footnote referenced from its conclusion's
// sentence; identical rules share one marker.
RenderedExplanation render_layer(const ExplanationGraph& g,
                                 const TemplateSet& templates,
                                 const RuleCombo& combo);

// {"combo", "cause_count", "rule_count", "sentences", "footnotes"}
nlohmann::ordered_json to_json(const RenderedExplanation& r);

// Markdown-flavoured plain text for one rendered layer.
std::string format_text(const RenderedExplanation& r,
                        const TemplateSet& templates);

// Byte-stable JSON export of every layer.
std::string export_layers(const LayeredExplanation& le,
                          const TemplateSet& templates);

// Plain-text rendering of every layer.
std::string export_text(const LayeredExplanation& le,
                        const TemplateSet& templates);

}  // namespace tracelens
