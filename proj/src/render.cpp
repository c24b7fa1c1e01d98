#include "tracelens/render.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tracelens {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Piece {
  bool slot = false;
  std::string literal;
  std::size_t index = 0;
};

std::vector<Piece> split_template(const std::string& tmpl) {
  std::vector<Piece> pieces;
  std::string literal;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    char c = tmpl[i];
    if ((c == '{' || c == '}') && i + 1 < tmpl.size() && tmpl[i + 1] == c) {
      literal.push_back(c);
      ++i;
      continue;
    }
    if (c == '}') throw TemplateError("unbalanced '}' in template: " + tmpl);
    if (c != '{') {
      literal.push_back(c);
      continue;
    }
    std::size_t close = tmpl.find('}', i);
    if (close == std::string::npos || close == i + 1) {
      throw TemplateError("malformed slot in template: " + tmpl);
    }
    std::string digits = tmpl.substr(i + 1, close - i - 1);
    if (!std::all_of(digits.begin(), digits.end(),
                     [](unsigned char d) { return std::isdigit(d); })) {
      throw TemplateError("slot must be a number: {" + digits + "}");
    }
    if (!literal.empty()) pieces.push_back({false, std::move(literal), 0});
    literal.clear();
    pieces.push_back({true, {}, std::stoul(digits)});
    i = close;
  }
  if (!literal.empty()) pieces.push_back({false, std::move(literal), 0});
  return pieces;
}

std::string fold_name(const std::string& name) {
  return canonicalize(Predicate{name, {}}).name;
}

}  // namespace

TemplateSet TemplateSet::parse(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw TemplateError(std::string("template file: ") + e.what());
  }
  if (!doc.is_object()) throw TemplateError("template file must be an object");
  TemplateSet set;
  if (doc.contains("templates")) {
    for (const auto& [name, tmpl] : doc.at("templates").items()) {
      if (!tmpl.is_string()) {
        throw TemplateError("template for " + name + " must be a string");
      }
      split_template(tmpl.get<std::string>());
      set.templates[fold_name(name)] = tmpl.get<std::string>();
    }
  }
  if (doc.contains("because")) set.because = doc.at("because").get<std::string>();
  if (doc.contains("therefore")) {
    set.therefore = doc.at("therefore").get<std::string>();
  }
  return set;
}

TemplateSet TemplateSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("cannot open template file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string TemplateSet::realize(const Node& node) const {
  if (!node.predicate) return node.text;
  auto it = templates.find(fold_name(node.predicate->name));
  if (it == templates.end()) return node.text;

  const auto& args = node.predicate->args;
  const auto pieces = split_template(it->second);
  std::set<std::size_t> used;
  for (const auto& p : pieces) {
    if (p.slot) used.insert(p.index);
  }
  const bool dense = used.empty() || *used.rbegin() + 1 == used.size();
  if (used.size() != args.size() || !dense) {
    throw TemplateArity("template for " + node.predicate->name + " has " +
                        std::to_string(used.size()) + " slots but the predicate has " +
                        std::to_string(args.size()) + " arguments");
  }
  std::string out;
  for (const auto& p : pieces) out += p.slot ? args[p.index] : p.literal;
  return out;
}

std::string Sentence::marked_text() const {
  std::string out = text;
  for (int m : markers) out += " [" + std::to_string(m) + "]";
  return out;
}

RenderedExplanation render_layer(const ExplanationGraph& g,
                                 const TemplateSet& templates,
                                 const RuleCombo& combo) {
  RenderedExplanation r;
  r.combo = combo;
  r.complexity = node_simplicity(g);

  std::vector<std::string> order;
  for (auto& id : topological_order(g)) {
    if (!g.node(id).is_rule() && id != g.conclusion()) order.push_back(id);
  }
  if (g.contains(g.conclusion())) order.push_back(g.conclusion());

  std::map<std::pair<std::string, std::string>, int> markers;
  for (const auto& id : order) {
    const Node& node = g.node(id);
    Sentence s{id, node.kind, templates.realize(node), {}};
    for (const auto& parent : g.parents(id)) {
      const Node& rule = g.node(parent);
      if (!rule.is_rule()) continue;
      auto key = std::make_pair(rule.rule_name, rule.rule_text);
      auto [it, fresh] = markers.emplace(key, static_cast<int>(markers.size()) + 1);
      if (fresh) r.footnotes.push_back({it->second, rule.rule_name, rule.rule_text});
      if (std::find(s.markers.begin(), s.markers.end(), it->second) ==
          s.markers.end()) {
        s.markers.push_back(it->second);
      }
    }
    r.body.push_back(std::move(s));
  }
  return r;
}

std::string format_text(const RenderedExplanation& r,
                        const TemplateSet& templates) {
  std::ostringstream out;
  out << "## " << r.combo.display_name() << "\n\n";
  out << "Causes: " << r.complexity.cause_count
      << ", rules: " << r.complexity.rule_count << "\n\n";
  if (r.body.size() > 1) {
    out << templates.because << "\n";
    for (std::size_t i = 0; i + 1 < r.body.size(); ++i) {
      out << "- " << r.body[i].marked_text() << "\n";
    }
    out << "\n";
  }
  if (!r.body.empty()) {
    out << templates.therefore << " " << r.body.back().marked_text() << "\n";
  }
  if (!r.footnotes.empty()) {
    out << "\n";
    for (const auto& f : r.footnotes) {
      out << "[" << f.marker << "] " << f.rule_name << ": " << f.rule_text << "\n";
    }
  }
  return out.str();
}

ordered_json to_json(const RenderedExplanation& r) {
  ordered_json layer;
  layer["combo"] = r.combo.codes();
  layer["cause_count"] = r.complexity.cause_count;
  layer["rule_count"] = r.complexity.rule_count;
  layer["sentences"] = ordered_json::array();
  for (const auto& s : r.body) {
    ordered_json sentence;
    sentence["node"] = s.node;
    sentence["kind"] = to_string(s.kind);
    sentence["text"] = s.marked_text();
    layer["sentences"].push_back(std::move(sentence));
  }
  layer["footnotes"] = ordered_json::array();
  for (const auto& f : r.footnotes) {
    ordered_json footnote;
    footnote["marker"] = f.marker;
    footnote["rule"] = f.rule_name;
    footnote["definition"] = f.rule_text;
    layer["footnotes"].push_back(std::move(footnote));
  }
  return layer;
}

std::string export_layers(const LayeredExplanation& le,
                          const TemplateSet& templates) {
  ordered_json doc;
  doc["scenario"] = le.provenance.scenario;
  doc["domain"] = to_string(le.provenance.domain);
  std::string conclusion_text;
  if (!le.layers.empty()) {
    const auto& g = le.layers.front().graph;
    if (g.contains(le.conclusion)) {
      conclusion_text = templates.realize(g.node(le.conclusion));
    }
  }
  doc["conclusion_text"] = conclusion_text;
  doc["layers"] = ordered_json::array();
  for (const auto& layer : le.layers) {
    doc["layers"].push_back(
        to_json(render_layer(layer.graph, templates, layer.combo)));
  }
  return doc.dump(2) + "\n";
}

std::string export_text(const LayeredExplanation& le,
                        const TemplateSet& templates) {
  std::ostringstream out;
  out << "# " << le.provenance.scenario << "\n\n";
  bool first = true;
  for (const auto& layer : le.layers) {
    if (!first) out << "\n";
    first = false;
    out << format_text(render_layer(layer.graph, templates, layer.combo),
                       templates);
  }
  return out.str();
}

}  // namespace tracelens
