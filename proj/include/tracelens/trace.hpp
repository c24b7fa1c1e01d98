#pragma once

// Proof-trace input model. A trace follows the PROV vocabulary: statements
// are entities, rule applications are activities, premises are "used" and
// conclusions are "wasGeneratedBy" their rule application.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/error.hpp"

namespace tracelens {

enum class KnowledgeKind { kTold, kBackground, kInferred };

enum class Domain { kMaritime, kWeather, kOther };

std::string_view to_string(KnowledgeKind kind);
std::string_view to_string(Domain domain);
std::optional<KnowledgeKind> parse_knowledge_kind(std::string_view s);
std::optional<Domain> parse_domain(std::string_view s);

struct Predicate {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const Predicate&) const = default;
};

// Case-folded, whitespace-trimmed predicate. Two predicates state the same
// fact iff their canonical forms compare equal.
struct CanonicalForm {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const CanonicalForm&) const = default;
};

CanonicalForm canonicalize(const Predicate& predicate);

struct Statement {
  std::string id;
  std::string text;
  Predicate predicate;
  KnowledgeKind kind = KnowledgeKind::kTold;

  bool operator==(const Statement&) const = default;
};

inline constexpr std::string_view kRestatementRule = "restatement";

struct RuleApplication {
  std::string id;
  std::string rule_name;
  // Human-readable definition, used verbatim as footnote text.
  std::string rule_text;
  std::vector<std::string> premise_ids;
  std::string conclusion_id;

  bool operator==(const RuleApplication&) const = default;
};

struct ProofTrace {
  std::string scenario;
  Domain domain = Domain::kOther;
  std::string conclusion_id;
  std::vector<Statement> statements;
  std::vector<RuleApplication> rules;

  const Statement* find_statement(std::string_view id) const;

  bool operator==(const ProofTrace&) const = default;
};

struct Violation {
  // Short stable code naming the broken invariant, e.g. "cycle".
  std::string invariant;
  // Offending statement or rule id.
  std::string id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_trace(const ProofTrace& trace);

class TraceError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public TraceError {
 public:
  using TraceError::TraceError;
};

class DanglingReference : public TraceError {
 public:
  explicit DanglingReference(std::string id)
      : TraceError("dangling reference: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class CycleError : public TraceError {
 public:
  explicit CycleError(std::string id)
      : TraceError("derivation cycle through " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class MissingConclusion : public TraceError {
 public:
  using TraceError::TraceError;
};

// Any other invariant violation; carries the full report.
class InvalidTrace : public TraceError {
 public:
  explicit InvalidTrace(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

ProofTrace parse_trace(std::string_view document);
ProofTrace load_trace(const std::string& path);

// Inverse of parse_trace. Output is deterministic (two-space indented JSON).
std::string serialize_trace(const ProofTrace& trace);

}  // namespace tracelens
