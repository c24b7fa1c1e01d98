#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "tracelens/render.hpp"

namespace tracelens {
namespace {

using nlohmann::json;

ExplanationGraph fixture(const std::string& stem) {
  return build_graph(support::load_fixture(stem));
}

ExplanationGraph restatement_graph() {
  ProofTrace t;
  t.conclusion_id = "I1";
  t.statements = {{"T1", "It rains.", {"rains", {}}, KnowledgeKind::kTold},
                  {"I1", "It rains.", {"rains", {}}, KnowledgeKind::kInferred}};
  t.rules = {{"R1", "restatement", "Told facts hold.", {"T1"}, "I1"}};
  return build_graph(t);
}

TEST(RenderLayer, RestatementGraph) {
  const auto r = render_layer(restatement_graph(), {}, RuleCombo::none());
  ASSERT_EQ(r.body.size(), 2u);
  EXPECT_EQ(r.body[0].node, "T1");
  EXPECT_EQ(r.body[1].node, "I1");
  ASSERT_EQ(r.footnotes.size(), 1u);
  EXPECT_EQ(r.footnotes[0].marker, 1);
  EXPECT_EQ(r.footnotes[0].rule_name, "restatement");
  EXPECT_EQ(r.footnotes[0].rule_text, "Told facts hold.");
  EXPECT_EQ(r.body[1].marked_text(), "It rains. [1]");
}

TEST(RenderLayer, FlattenRulesLayersHaveNoFootnotes) {
  for (const auto& path : support::fixture_paths()) {
    const auto g = build_graph(load_trace(path));
    for (const auto& combo : {RuleCombo::fl_fr(), RuleCombo::fl_fr_fk()}) {
      EXPECT_TRUE(render_layer(apply_combo(g, combo), {}, combo).footnotes.empty());
    }
  }
}

TEST(RenderLayer, FogFlFkAgainstAbstractionNodeSets) {
  const auto g = fixture("fog");
  const auto layer = apply_combo(g, RuleCombo::fl_fk());
  const auto r = render_layer(layer, {}, RuleCombo::fl_fk());

  std::set<std::string> expected_nodes;
  std::vector<std::string> rules_in_order;
  for (const auto& [id, n] : layer.nodes()) {
    if (!n.is_rule()) expected_nodes.insert(id);
  }
  std::set<std::string> rendered;
  for (const auto& s : r.body) {
    rendered.insert(s.node);
    EXPECT_NE(s.kind, NodeKind::kBackground);
    for (const auto& p : layer.parents(s.node)) {
      const Node& rule = layer.node(p);
      if (rule.is_rule() &&
          std::find(rules_in_order.begin(), rules_in_order.end(), rule.rule_name) ==
              rules_in_order.end()) {
        rules_in_order.push_back(rule.rule_name);
      }
    }
  }
  EXPECT_EQ(rendered, expected_nodes);
  std::vector<std::string> footnote_rules;
  for (const auto& f : r.footnotes) footnote_rules.push_back(f.rule_name);
  EXPECT_EQ(footnote_rules, rules_in_order);
  EXPECT_FALSE(footnote_rules.empty());
}

TEST(RenderLayer, OrderAndInvariantsOnEveryLayer) {
  for (const auto& path : support::fixture_paths()) {
    const ProofTrace trace = load_trace(path);
    const auto g = build_graph(trace);
    for (const auto& combo : RuleCombo::all()) {
      const auto layer = apply_combo(g, combo);
      const auto r = render_layer(layer, {}, combo);
      EXPECT_EQ(r.body.size(), r.complexity.cause_count);
      EXPECT_EQ(r.body.back().node, g.conclusion());

      std::map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < r.body.size(); ++i) pos[r.body[i].node] = i;
      const support::Closure closure(layer);
      for (const auto& [u, pu] : pos) {
        for (const auto& [v, pv] : pos) {
          if (u != v && closure.reaches(u, v)) {
            EXPECT_LT(pu, pv) << path;
          }
        }
      }

      int expected_marker = 1;
      std::set<int> referenced;
      for (const auto& s : r.body) {
        for (int m : s.markers) {
          if (!referenced.count(m)) {
            EXPECT_EQ(m, expected_marker++);
            referenced.insert(m);
          }
        }
      }
      EXPECT_EQ(referenced.size(), r.footnotes.size());
      for (std::size_t i = 0; i < r.footnotes.size(); ++i) {
        EXPECT_EQ(r.footnotes[i].marker, static_cast<int>(i + 1));
        const bool from_trace = std::any_of(trace.rules.begin(), trace.rules.end(), [&](const auto& ra) {
          return ra.rule_name == r.footnotes[i].rule_name && ra.rule_text == r.footnotes[i].rule_text;
        });
        EXPECT_TRUE(from_trace);
      }
    }
  }
}

TEST(RenderLayer, IdenticalRulesShareOneMarker) {
  const auto r = render_layer(fixture("heatwave"), {}, RuleCombo::none());
  std::size_t restatement_notes = 0;
  for (const auto& f : r.footnotes) restatement_notes += f.rule_name == "restatement";
  EXPECT_EQ(restatement_notes, 1u);
}

TEST(Templates, RealizeSlotsAndEscapes) {
  TemplateSet t = TemplateSet::parse(R"({"templates": {"At": "{0} is at {{{1}}}"},
                                        "because": "Since:", "therefore": "Hence:"})");
  Node n{"x", NodeKind::kTold, "fallback", Predicate{"at", {"Sea Witch", "EEZ"}}, "", ""};
  EXPECT_EQ(t.realize(n), "Sea Witch is at {EEZ}");
  EXPECT_EQ(t.because, "Since:");
  n.predicate = Predicate{"other", {}};
  EXPECT_EQ(t.realize(n), "fallback");
}

TEST(Templates, ArityMismatch) {
  TemplateSet t = TemplateSet::parse(R"({"templates": {"at": "{0} at {1}"}})");
  Node n{"x", NodeKind::kTold, "f", Predicate{"at", {"one"}}, "", ""};
  EXPECT_THROW(t.realize(n), TemplateArity);
  TemplateSet gap = TemplateSet::parse(R"({"templates": {"at": "{0} at {2}"}})");
  n.predicate = Predicate{"at", {"a", "b"}};
  EXPECT_THROW(gap.realize(n), TemplateArity);
}

TEST(Templates, MalformedDocuments) {
  EXPECT_THROW(TemplateSet::parse("nope"), TemplateError);
  EXPECT_THROW(TemplateSet::parse(R"({"templates": {"a": "{x}"}})"), TemplateError);
  EXPECT_THROW(TemplateSet::parse(R"({"templates": {"a": "oops }"}})"), TemplateError);
  EXPECT_THROW(TemplateSet::load("/nonexistent/templates.json"), TemplateError);
}

TEST(ExportLayers, SingleLayer) {
  const auto g = fixture("sea_witch");
  const auto doc = json::parse(export_layers(generate_layers(g, {RuleCombo::none()}), {}));
  EXPECT_EQ(doc["layers"].size(), 1u);
  EXPECT_EQ(doc["layers"][0]["combo"], json::array());
  EXPECT_EQ(support::schema_violation(doc, "explanation.schema.json"), "");
}

TEST(ExportLayers, DefaultChainShapeAndCounts) {
  for (const auto& path : support::fixture_paths()) {
    const auto g = build_graph(load_trace(path));
    const auto le = generate_layers(g, default_chain());
    const std::string text = export_layers(le, {});
    const auto doc = json::parse(text);
    ASSERT_EQ(support::schema_violation(doc, "explanation.schema.json"), "") << path;
    EXPECT_EQ(text.find("\"scenario\""), text.find('"'));
    const auto& layers = doc["layers"];
    ASSERT_EQ(layers.size(), 4u);
    EXPECT_EQ(layers[1]["combo"], json({"FL"}));
    EXPECT_EQ(layers[3]["combo"], json({"FL", "FR", "FK"}));
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto expected = node_simplicity(le.layers[i].graph);
      EXPECT_EQ(layers[i]["cause_count"], expected.cause_count);
      EXPECT_EQ(layers[i]["rule_count"], expected.rule_count);
      EXPECT_EQ(layers[i]["sentences"].size(), expected.cause_count);
      if (i > 0) {
        EXPECT_LE(layers[i]["cause_count"], layers[i - 1]["cause_count"]);
      }
    }
    EXPECT_EQ(doc["conclusion_text"], g.node(g.conclusion()).text);
  }
}

TEST(ExportLayers, ByteIdenticalAcrossRuns) {
  const auto g = fixture("heatwave");
  EXPECT_EQ(export_layers(generate_layers(g, default_chain()), {}),
            export_layers(generate_layers(g, default_chain()), {}));
  EXPECT_EQ(export_text(generate_layers(g, nofr_chain()), {}),
            export_text(generate_layers(g, nofr_chain()), {}));
}

TEST(ExportLayers, HeatwaveComparisonSentence) {
  const auto le = generate_layers(fixture("heatwave"), nofr_chain());
  const auto fl = render_layer(le.layers[1].graph, {}, le.layers[1].combo);
  const auto fk = render_layer(le.layers[2].graph, {}, le.layers[2].combo);
  const std::string quote = "35 degrees Celsius is greater than 24 and 25 degrees Celsius";
  EXPECT_NE(format_text(fl, {}).find(quote), std::string::npos);
  EXPECT_EQ(format_text(fk, {}).find(quote), std::string::npos);
}

TEST(FormatText, UsesConnectives) {
  TemplateSet t;
  t.because = "Given:";
  t.therefore = "So:";
  const auto r = render_layer(restatement_graph(), t, RuleCombo::none());
  const std::string text = format_text(r, t);
  EXPECT_NE(text.find("Given:"), std::string::npos);
  EXPECT_NE(text.find("So: It rains. [1]"), std::string::npos);
  EXPECT_NE(text.find("[1] restatement: Told facts hold."), std::string::npos);
}

}  // namespace
}  // namespace tracelens
