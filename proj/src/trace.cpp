#include "tracelens/trace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tracelens {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::kTold:
      return "told";
    case KnowledgeKind::kBackground:
      return "background";
    case KnowledgeKind::kInferred:
      return "inferred";
  }
  return "inferred";
}

std::string_view to_string(Domain domain) {
  switch (domain) {
    case Domain::kMaritime:
      return "maritime";
    case Domain::kWeather:
      return "weather";
    case Domain::kOther:
      return "other";
  }
  return "other";
}

std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s) {
  if (s == "told") return KnowledgeKind::kTold;
  if (s == "background") return KnowledgeKind::kBackground;
  if (s == "inferred") return KnowledgeKind::kInferred;
  return std::nullopt;
}

std::optional<Domain> parse_domain(std::string_view s) {
  if (s == "maritime") return Domain::kMaritime;
  if (s == "weather") return Domain::kWeather;
  if (s == "other") return Domain::kOther;
  return std::nullopt;
}

namespace {

std::string fold(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

CanonicalForm canonicalize(const Predicate& predicate) {
  CanonicalForm form{fold(predicate.name), {}};
  form.args.reserve(predicate.args.size());
  for (const auto& arg : predicate.args) form.args.push_back(fold(arg));
  return form;
}

const Statement* ProofTrace::find_statement(std::string_view id) const {
  for (const auto& s : statements) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

InvalidTrace::InvalidTrace(ValidationReport report)
    : TraceError([&] {
        std::string msg = "invalid trace";
        for (const auto& v : report.violations) {
          msg += "; " + v.invariant + " (" + v.id + "): " + v.message;
        }
        return msg;
      }()),
      report_(std::move(report)) {}

ValidationReport validate_trace(const ProofTrace& trace) {
  ValidationReport report;
  auto add = [&](std::string invariant, std::string id, std::string message) {
    report.violations.push_back(
        {std::move(invariant), std::move(id), std::move(message)});
  };

  std::map<std::string, const Statement*> by_id;
  std::set<std::string> rule_ids;
  for (const auto& s : trace.statements) {
    if (!by_id.emplace(s.id, &s).second) {
      add("duplicate-id", s.id, "statement id declared more than once");
    }
    if (s.predicate.name.empty()) {
      add("empty-predicate", s.id, "predicate name is empty");
    }
  }
  for (const auto& r : trace.rules) {
    if (by_id.count(r.id) || !rule_ids.insert(r.id).second) {
      add("duplicate-id", r.id, "rule id collides with another id");
    }
  }

  if (trace.conclusion_id.empty() || !by_id.count(trace.conclusion_id)) {
    add("missing-conclusion", trace.conclusion_id,
        "conclusion is not a declared statement");
  } else if (by_id.at(trace.conclusion_id)->kind != KnowledgeKind::kInferred) {
    add("conclusion-not-inferred", trace.conclusion_id,
        "conclusion must be inferred knowledge");
  }

  std::set<std::string> derived;
  // statement -> statements derived from it
  std::map<std::string, std::set<std::string>> next;
  for (const auto& r : trace.rules) {
    if (r.premise_ids.empty()) {
      add("empty-premises", r.id, "rule application has no premises");
    }
    for (const auto& p : r.premise_ids) {
      if (!by_id.count(p)) add("dangling-reference", p, "premise of " + r.id);
    }
    auto it = by_id.find(r.conclusion_id);
    if (it == by_id.end()) {
      add("dangling-reference", r.conclusion_id, "conclusion of " + r.id);
      continue;
    }
    if (it->second->kind != KnowledgeKind::kInferred) {
      add("rule-concludes-non-inferred", r.id,
          "rule concludes non-inferred statement " + r.conclusion_id);
    }
    derived.insert(r.conclusion_id);
    for (const auto& p : r.premise_ids) {
      if (by_id.count(p)) next[p].insert(r.conclusion_id);
    }
  }

  for (const auto& s : trace.statements) {
    if (s.kind == KnowledgeKind::kInferred && !derived.count(s.id)) {
      add("underived-inferred", s.id, "inferred statement has no deriving rule");
    }
  }

  // Colour DFS; one violation per back edge.
  enum class Mark { kWhite, kGrey, kBlack };
  std::map<std::string, Mark> mark;
  for (const auto& [id, _] : by_id) mark[id] = Mark::kWhite;
  for (const auto& s : trace.statements) {
    if (mark[s.id] != Mark::kWhite) continue;
    std::vector<std::pair<std::string, std::vector<std::string>>> stack;
    auto push = [&](const std::string& id) {
      mark[id] = Mark::kGrey;
      std::vector<std::string> succ;
      if (auto it = next.find(id); it != next.end()) {
        succ.assign(it->second.rbegin(), it->second.rend());
      }
      stack.emplace_back(id, std::move(succ));
    };
    push(s.id);
    while (!stack.empty()) {
      auto& [id, succ] = stack.back();
      if (succ.empty()) {
        mark[id] = Mark::kBlack;
        stack.pop_back();
        continue;
      }
      std::string to = std::move(succ.back());
      succ.pop_back();
      if (mark[to] == Mark::kGrey) {
        add("cycle", to, "derivation cycle through " + to);
      } else if (mark[to] == Mark::kWhite) {
        push(to);
      }
    }
  }

  return report;
}

namespace {

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SyntaxError(std::string("missing key \"") + key + "\"");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) {
    throw SyntaxError(std::string("key \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::vector<std::string> require_string_list(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_array()) {
    throw SyntaxError(std::string("key \"") + key + "\" must be an array");
  }
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw SyntaxError(std::string("\"") + key + "\" entries must be strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

ProofTrace parse_trace(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end(), nullptr, true,
                      /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw SyntaxError(e.what());
  }
  if (!doc.is_object()) throw SyntaxError("trace document must be an object");

  ProofTrace trace;
  trace.scenario = require_string(doc, "scenario");
  auto domain = parse_domain(require_string(doc, "domain"));
  if (!domain) throw SyntaxError("unknown domain");
  trace.domain = *domain;
  trace.conclusion_id = require_string(doc, "conclusion");

  const json& statements = require(doc, "statements");
  if (!statements.is_array()) throw SyntaxError("\"statements\" must be an array");
  for (const auto& s : statements) {
    Statement st;
    st.id = require_string(s, "id");
    st.text = require_string(s, "text");
    const json& pred = require(s, "predicate");
    st.predicate.name = require_string(pred, "name");
    st.predicate.args = require_string_list(pred, "args");
    auto kind = parse_knowledge_kind(require_string(s, "kind"));
    if (!kind) throw SyntaxError("unknown kind for statement " + st.id);
    st.kind = *kind;
    trace.statements.push_back(std::move(st));
  }

  const json& rules = require(doc, "rules");
  if (!rules.is_array()) throw SyntaxError("\"rules\" must be an array");
  for (const auto& r : rules) {
    RuleApplication ra;
    ra.id = require_string(r, "id");
    ra.rule_name = require_string(r, "name");
    ra.rule_text = require_string(r, "definition");
    ra.premise_ids = require_string_list(r, "premises");
    ra.conclusion_id = require_string(r, "conclusion");
    trace.rules.push_back(std::move(ra));
  }

  ValidationReport report = validate_trace(trace);
  if (report.ok()) return trace;

  auto first = [&](std::string_view code) -> const Violation* {
    for (const auto& v : report.violations) {
      if (v.invariant == code) return &v;
    }
    return nullptr;
  };
  if (auto* v = first("missing-conclusion")) {
    throw MissingConclusion("conclusion \"" + v->id + "\" is not declared");
  }
  if (auto* v = first("dangling-reference")) throw DanglingReference(v->id);
  if (auto* v = first("cycle")) throw CycleError(v->id);
  throw InvalidTrace(std::move(report));
}

ProofTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

std::string serialize_trace(const ProofTrace& trace) {
  ordered_json doc;
  doc["scenario"] = trace.scenario;
  doc["domain"] = to_string(trace.domain);
  doc["conclusion"] = trace.conclusion_id;
  doc["statements"] = ordered_json::array();
  for (const auto& s : trace.statements) {
    ordered_json st;
    st["id"] = s.id;
    st["text"] = s.text;
    st["predicate"] = {{"name", s.predicate.name}, {"args", s.predicate.args}};
    st["kind"] = to_string(s.kind);
    doc["statements"].push_back(std::move(st));
  }
  doc["rules"] = ordered_json::array();
  for (const auto& r : trace.rules) {
    ordered_json ra;
    ra["id"] = r.id;
    ra["name"] = r.rule_name;
    ra["definition"] = r.rule_text;
    ra["premises"] = r.premise_ids;
    ra["conclusion"] = r.conclusion_id;
    doc["rules"].push_back(std::move(ra));
  }
  return doc.dump(2) + "\n";
}

}  // namespace tracelens
