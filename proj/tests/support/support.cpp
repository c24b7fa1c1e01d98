#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace support {

namespace fs = std::filesystem;
using nlohmann::json;
using tracelens::KnowledgeKind;
using tracelens::ProofTrace;

std::string fixture_dir() { return TRACELENS_FIXTURE_DIR; }
std::string schema_dir() { return TRACELENS_SCHEMA_DIR; }

std::vector<std::string> fixture_paths() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(fixture_dir())) {
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fixture_path(const std::string& stem) {
  for (const auto& p : fixture_paths()) {
    if (fs::path(p).stem().string().find(stem) != std::string::npos) return p;
  }
  throw std::runtime_error("no fixture matching " + stem);
}

ProofTrace load_fixture(const std::string& stem) {
  return tracelens::load_trace(fixture_path(stem));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("tracelens-" + tag + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

// ---------------------------------------------------------------------------

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<std::string> pick(std::mt19937_64& rng,
                              const std::vector<std::string>& pool,
                              std::size_t n) {
  std::vector<std::string> copy = pool;
  std::shuffle(copy.begin(), copy.end(), rng);
  copy.resize(std::min(n, copy.size()));
  return copy;
}

}  // namespace

ProofTrace random_trace(std::mt19937_64& rng, std::size_t max_nodes) {
  ProofTrace t;
  t.scenario = "random";
  t.domain = tracelens::Domain::kOther;

  const std::size_t told = uniform(rng, 1, 3);
  const std::size_t background = uniform(rng, 0, 3);
  std::vector<std::string> pool, roots;
  for (std::size_t i = 1; i <= told; ++i) {
    std::string id = "T" + std::to_string(i);
    t.statements.push_back({id, "told " + id, {"fact" + id, {"a"}}, KnowledgeKind::kTold});
    pool.push_back(id);
    roots.push_back(id);
  }
  for (std::size_t i = 1; i <= background; ++i) {
    std::string id = "B" + std::to_string(i);
    t.statements.push_back(
        {id, "background " + id, {"fact" + id, {"b"}}, KnowledgeKind::kBackground});
    pool.push_back(id);
    roots.push_back(id);
  }

  const std::size_t budget = (max_nodes - told - background) / 2;
  const std::size_t steps = uniform(rng, 1, std::max<std::size_t>(1, budget));
  static const std::vector<std::string> kRules = {
      "restatement", "conjunction-introduction", "modus-ponens", "transitivity"};
  for (std::size_t s = 1; s <= steps; ++s) {
    std::string id = "I" + std::to_string(s);
    std::string rid = "R" + std::to_string(s);
    const std::string& name = kRules[uniform(rng, 0, kRules.size() - 1)];
    tracelens::Predicate pred{"derived" + std::to_string(s), {"x"}};
    std::vector<std::string> premises;
    if (name == "restatement") {
      premises = pick(rng, roots, 1);
      const auto* src = t.find_statement(premises.front());
      // Mostly a faithful restatement, occasionally case-varied or a
      // mislabelled rule whose predicate differs.
      switch (uniform(rng, 0, 3)) {
        case 0:
          pred = {"derived" + std::to_string(s), {"x"}};
          break;
        case 1: {
          pred = src->predicate;
          for (auto& c : pred.name) c = static_cast<char>(std::toupper(c));
          break;
        }
        default:
          pred = src->predicate;
      }
    } else {
      premises = pick(rng, pool, uniform(rng, 1, 3));
    }
    t.statements.push_back({id, "inferred " + id, pred, KnowledgeKind::kInferred});
    t.rules.push_back({rid, name, "definition of " + name, premises, id});
    pool.push_back(id);
  }
  t.conclusion_id = "I" + std::to_string(steps);
  return t;
}

// ---------------------------------------------------------------------------

Closure::Closure(const tracelens::ExplanationGraph& g) {
  for (const auto& [id, _] : g.nodes()) index_.emplace(id, index_.size());
  const std::size_t n = index_.size();
  reach_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach_[i][i] = true;
  for (const auto& [from, to] : g.edges()) reach_[index_.at(from)][index_.at(to)] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach_[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach_[k][j]) reach_[i][j] = true;
      }
    }
  }
}

bool Closure::reaches(const std::string& from, const std::string& to) const {
  return reach_[index_.at(from)][index_.at(to)];
}

std::set<std::string> parentless(const tracelens::ExplanationGraph& g) {
  std::set<std::string> out;
  for (const auto& [id, _] : g.nodes()) out.insert(id);
  for (const auto& [from, to] : g.edges()) out.erase(to);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// rank = 1 + #smaller + (#equal - 1) / 2
std::vector<double> counted_ranks(const std::vector<double>& row) {
  std::vector<double> r(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : row) {
      if (v < row[i]) ++less;
      if (v == row[i]) ++equal;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

}  // namespace

double friedman_oracle(const std::vector<std::vector<double>>& m) {
  const double n = static_cast<double>(m.size());
  const std::size_t k = m.front().size();
  const double kd = static_cast<double>(k);
  std::vector<double> sums(k, 0.0);
  double a = 0.0;
  for (const auto& row : m) {
    const auto r = counted_ranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      sums[j] += r[j];
      a += r[j] * r[j];
    }
  }
  const double c = n * kd * (kd + 1.0) * (kd + 1.0) / 4.0;
  const double expected = n * (kd + 1.0) / 2.0;
  double spread = 0.0;
  for (double s : sums) spread += (s - expected) * (s - expected);
  if (a - c == 0.0) return 0.0;
  return (kd - 1.0) * spread / (a - c);
}

double kendall_oracle(const std::vector<std::vector<double>>& m) {
  const double n = static_cast<double>(m.size());
  const std::size_t k = m.front().size();
  const double kd = static_cast<double>(k);
  std::vector<double> sums(k, 0.0);
  double ties = 0.0;
  for (const auto& row : m) {
    const auto r = counted_ranks(row);
    for (std::size_t j = 0; j < k; ++j) sums[j] += r[j];
    std::map<double, double> groups;
    for (double v : row) groups[v] += 1.0;
    for (const auto& [_, t] : groups) ties += t * t * t - t;
  }
  double sum_sq = 0.0;
  for (double s : sums) sum_sq += s * s;
  const double num = 12.0 * sum_sq - 3.0 * n * n * kd * (kd + 1.0) * (kd + 1.0);
  const double den = n * n * kd * (kd * kd - 1.0) - n * ties;
  if (den == 0.0) return 0.0;
  return num / den;
}

// ---------------------------------------------------------------------------

namespace {

bool type_matches(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::string check(const json& v, const json& schema, const json& root,
                  const std::string& path) {
  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"];
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) return path + ": unsupported $ref " + ref;
    return check(v, root["$defs"][ref.substr(prefix.size())], root, path);
  }
  if (schema.contains("type") && !type_matches(v, schema["type"])) {
    return path + ": expected " + schema["type"].get<std::string>();
  }
  if (schema.contains("enum")) {
    const auto& options = schema["enum"];
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      return path + ": value " + v.dump() + " not allowed";
    }
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && v.get<double>() < schema["minimum"].get<double>()) {
      return path + ": below minimum";
    }
    if (schema.contains("maximum") && v.get<double>() > schema["maximum"].get<double>()) {
      return path + ": above maximum";
    }
  }
  if (v.is_string() && schema.contains("minLength") &&
      v.get<std::string>().size() < schema["minLength"].get<std::size_t>()) {
    return path + ": string too short";
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) {
      return path + ": too few items";
    }
    if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>()) {
      return path + ": too many items";
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto e = check(v[i], schema["items"], root, path + "/" + std::to_string(i));
        if (!e.empty()) return e;
      }
    }
  }
  if (v.is_object()) {
    for (const auto& key : schema.value("required", json::array())) {
      if (!v.contains(key.get<std::string>())) {
        return path + ": missing " + key.get<std::string>();
      }
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key)) {
        auto e = check(value, props[key], root, path + "/" + key);
        if (!e.empty()) return e;
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"] == false) {
        return path + ": unexpected key " + key;
      }
    }
  }
  return "";
}

}  // namespace

std::string schema_violation(const json& doc, const std::string& schema_file) {
  const json schema = json::parse(read_file(schema_dir() + "/" + schema_file));
  return check(doc, schema, schema, "");
}

}  // namespace support
