#include "tracelens/study.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "tracelens/graph.hpp"

namespace tracelens::study {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(PairSet set) {
  switch (set) {
    case PairSet::kSet1FR:
      return "Set1_FR";
    case PairSet::kSet2NoFR:
      return "Set2_NoFR";
    case PairSet::kSet3FRvsNoFR:
      return "Set3_FRvsNoFR";
  }
  return "Set1_FR";
}

std::optional<PairSet> parse_pair_set(std::string_view s) {
  if (s == "Set1_FR") return PairSet::kSet1FR;
  if (s == "Set2_NoFR") return PairSet::kSet2NoFR;
  if (s == "Set3_FRvsNoFR") return PairSet::kSet3FRvsNoFR;
  return std::nullopt;
}

std::string PairType::label() const {
  return left.display_name() + " vs " + right.display_name();
}

const std::vector<PairType>& enumerate_pair_types() {
  using C = RuleCombo;
  static const std::vector<PairType> kPairs = {
      {C::fl(), C::none(), PairSet::kSet1FR},
      {C::fl_fr(), C::none(), PairSet::kSet1FR},
      {C::fl_fr(), C::fl(), PairSet::kSet1FR},
      {C::fl_fr_fk(), C::fl(), PairSet::kSet1FR},
      {C::fl_fr_fk(), C::fl_fr(), PairSet::kSet1FR},
      {C::fl_fk(), C::none(), PairSet::kSet2NoFR},
      {C::fl_fk(), C::fl(), PairSet::kSet2NoFR},
      {C::fl_fr_fk(), C::fl_fk(), PairSet::kSet3FRvsNoFR},
      {C::fl_fr(), C::fl_fk(), PairSet::kSet3FRvsNoFR},
  };
  return kPairs;
}

std::optional<PairType> find_pair_type(const RuleCombo& left,
                                       const RuleCombo& right) {
  for (const auto& p : enumerate_pair_types()) {
    if (p.left == left && p.right == right) return p;
  }
  return std::nullopt;
}

std::size_t pair_index(const PairType& pair) {
  const auto& all = enumerate_pair_types();
  return static_cast<std::size_t>(
      std::find(all.begin(), all.end(), pair) - all.begin());
}

const std::vector<Question>& page_questions() {
  static const std::vector<Question> kQuestions = {
      {"q1", "likert",
       "From the explanation, I understand why the prediction has been made.", {}},
      {"q2", "likert",
       "The explanation of why the prediction was made provides sufficient "
       "detail.",
       {}},
      {"q3", "likert",
       "The explanation of why the prediction was made is satisfying.", {}},
      {"q4", "likert",
       "The explanation of why the prediction was made is complete.", {}},
      {"q5", "likert",
       "The explanation of why the prediction was made is trustworthy.", {}},
      {"feedback", "text",
       "Do you have any additional feedback regarding the ratings?", {}},
      {"more_info", "choice",
       "Explanation 2 contains information, not present in Explanation 1, that "
       "is helpful for understanding why the prediction was made.",
       {"yes", "no", "idk"}},
      {"justification", "text",
       "Please justify your answer to the previous question.", {}},
  };
  return kQuestions;
}

const std::string& likert_question_text(std::size_t number) {
  if (number < 1 || number > kLikertItems) {
    throw Error("no Likert question " + std::to_string(number));
  }
  return page_questions()[number - 1].text;
}

std::vector<StudyPage> build_pages(std::span<const Scenario> scenarios,
                                   std::span<const PairType> pairs) {
  if (scenarios.size() < 2) {
    throw InsufficientScenarios(
        "each pair type needs pages from two different scenarios; got " +
        std::to_string(scenarios.size()) + " scenario(s)");
  }
  std::vector<ExplanationGraph> graphs;
  graphs.reserve(scenarios.size());
  for (const auto& s : scenarios) graphs.push_back(build_graph(s.trace));

  std::vector<StudyPage> pages;
  std::size_t next = 0;
  for (const auto& pair : pairs) {
    for (int group = 1; group <= 2; ++group) {
      const std::size_t si = next++ % scenarios.size();
      const Scenario& scenario = scenarios[si];
      const ExplanationGraph& g = graphs[si];
      StudyPage page;
      char id[16];
      std::snprintf(id, sizeof id, "P%02zu", pages.size() + 1);
      page.id = id;
      page.group = group;
      page.scenario = scenario.trace.scenario;
      page.domain = scenario.trace.domain;
      page.conclusion_text = scenario.templates.realize(g.node(g.conclusion()));
      page.pair = pair;
      page.left = render_layer(apply_combo(g, pair.left), scenario.templates,
                               pair.left);
      page.right = render_layer(apply_combo(g, pair.right), scenario.templates,
                                pair.right);
      page.questions = page_questions();
      pages.push_back(std::move(page));
    }
  }
  return pages;
}

ordered_json to_json(const StudyPage& page) {
  ordered_json doc;
  doc["id"] = page.id;
  doc["group"] = page.group;
  doc["scenario"] = page.scenario;
  doc["domain"] = to_string(page.domain);
  doc["conclusion_text"] = page.conclusion_text;
  doc["pair"] = {{"label", page.pair.label()},
                 {"set", to_string(page.pair.set)},
                 {"left", page.pair.left.codes()},
                 {"right", page.pair.right.codes()}};
  doc["left"] = to_json(page.left);
  doc["right"] = to_json(page.right);
  doc["questions"] = ordered_json::array();
  for (const auto& q : page.questions) {
    ordered_json question;
    question["id"] = q.id;
    question["type"] = q.type;
    question["text"] = q.text;
    if (!q.options.empty()) question["options"] = q.options;
    doc["questions"].push_back(std::move(question));
  }
  return doc;
}

std::string export_pages(std::span<const StudyPage> pages) {
  ordered_json doc;
  doc["pages"] = ordered_json::array();
  for (const auto& p : pages) doc["pages"].push_back(to_json(p));
  return doc.dump(2) + "\n";
}

PageRef page_ref(const StudyPage& page) {
  return {page.id, page.scenario, page.pair};
}

namespace {

RuleCombo combo_from_codes(const json& codes) {
  if (!codes.is_array()) throw PagesFormatError("combo must be an array");
  std::string text;
  for (const auto& c : codes) {
    if (!c.is_string()) throw PagesFormatError("combo entries must be strings");
    if (!text.empty()) text += '-';
    text += c.get<std::string>();
  }
  try {
    return RuleCombo::parse(text);
  } catch (const InvalidCombo& e) {
    throw PagesFormatError(e.what());
  }
}

}  // namespace

std::vector<PageRef> parse_pages(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw PagesFormatError(std::string("pages file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pages") || !doc["pages"].is_array()) {
    throw PagesFormatError("pages file must contain a \"pages\" array");
  }
  std::vector<PageRef> refs;
  std::set<std::string> seen;
  for (const auto& p : doc["pages"]) {
    if (!p.is_object() || !p.contains("id") || !p.contains("scenario") ||
        !p.contains("pair")) {
      throw PagesFormatError("page entries need id, scenario and pair");
    }
    PageRef ref;
    ref.id = p["id"].get<std::string>();
    ref.scenario = p["scenario"].get<std::string>();
    const json& pair = p["pair"];
    if (!pair.contains("left") || !pair.contains("right")) {
      throw PagesFormatError("pair of page " + ref.id + " needs left and right");
    }
    auto found = find_pair_type(combo_from_codes(pair["left"]),
                                combo_from_codes(pair["right"]));
    if (!found) {
      throw PagesFormatError("page " + ref.id + " compares an unknown pair type");
    }
    ref.pair = *found;
    if (!seen.insert(ref.id).second) {
      throw PagesFormatError("duplicate page id " + ref.id);
    }
    refs.push_back(std::move(ref));
  }
  return refs;
}

namespace {

struct Search {
  std::span<const PageRef> pages;
  std::vector<std::size_t> candidates;
  std::size_t target = 0;
  std::vector<std::size_t> chosen;
  std::set<std::string> scenarios;
  std::set<std::size_t> pair_types;

  bool run(std::size_t from) {
    if (chosen.size() == target) return true;
    for (std::size_t i = from; i < candidates.size(); ++i) {
      if (candidates.size() - i < target - chosen.size()) return false;
      const PageRef& page = pages[candidates[i]];
      const std::size_t pair = pair_index(page.pair);
      if (scenarios.count(page.scenario) || pair_types.count(pair)) continue;
      chosen.push_back(candidates[i]);
      scenarios.insert(page.scenario);
      pair_types.insert(pair);
      if (run(i + 1)) return true;
      chosen.pop_back();
      scenarios.erase(page.scenario);
      pair_types.erase(pair);
    }
    return false;
  }
};

}  // namespace

Assignment assign_pages(std::span<const PageRef> pages,
                        std::size_t participant_count, std::uint64_t seed,
                        std::size_t per_participant) {
  if (participant_count < 1) {
    throw InfeasibleAssignment("at least one participant is required");
  }
  std::set<std::string> scenarios;
  std::set<std::size_t> pair_types;
  for (const auto& p : pages) {
    scenarios.insert(p.scenario);
    pair_types.insert(pair_index(p.pair));
  }
  if (scenarios.size() < per_participant || pair_types.size() < per_participant) {
    throw InfeasibleAssignment(
        "cannot give " + std::to_string(per_participant) + " pages with distinct "
        "scenarios and pair types: pages cover " +
        std::to_string(scenarios.size()) + " scenario(s) and " +
        std::to_string(pair_types.size()) + " pair type(s)");
  }

  // Raw engine output only: distributions are implementation-defined, the
  // mt19937_64 sequence is not.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> exposure(pages.size(), 0);
  const int width = participant_count > 999
                        ? static_cast<int>(std::to_string(participant_count).size())
                        : 3;

  Assignment out{seed, per_participant, {}};
  for (std::size_t n = 0; n < participant_count; ++n) {
    std::vector<std::pair<std::pair<std::size_t, std::uint64_t>, std::size_t>>
        keyed;
    for (std::size_t i = 0; i < pages.size(); ++i) {
      keyed.push_back({{exposure[i], rng()}, i});
    }
    std::sort(keyed.begin(), keyed.end());
    Search search{pages, {}, per_participant, {}, {}, {}};
    for (const auto& [_, i] : keyed) search.candidates.push_back(i);
    if (!search.run(0)) {
      throw InfeasibleAssignment("no page set satisfies the distinctness constraints");
    }
    std::string id = std::to_string(n + 1);
    id = "U" + std::string(width - std::min<int>(width, id.size()), '0') + id;
    ParticipantPages pp{id, {}};
    for (auto i : search.chosen) {
      ++exposure[i];
      pp.pages.push_back(pages[i].id);
    }
    out.participants.push_back(std::move(pp));
  }
  return out;
}

std::string export_assignment(const Assignment& assignment) {
  ordered_json doc;
  doc["seed"] = assignment.seed;
  doc["pages_per_participant"] = assignment.pages_per_participant;
  doc["participants"] = ordered_json::array();
  for (const auto& p : assignment.participants) {
    doc["participants"].push_back({{"participant", p.participant}, {"pages", p.pages}});
  }
  return doc.dump(2) + "\n";
}

std::string_view to_string(MoreInfo m) {
  switch (m) {
    case MoreInfo::kYes:
      return "yes";
    case MoreInfo::kNo:
      return "no";
    case MoreInfo::kIDontKnow:
      return "idk";
  }
  return "idk";
}

std::optional<MoreInfo> parse_more_info(std::string_view s) {
  if (s == "yes") return MoreInfo::kYes;
  if (s == "no") return MoreInfo::kNo;
  if (s == "idk") return MoreInfo::kIDontKnow;
  return std::nullopt;
}

std::vector<std::string> check_rating(const RatingRecord& record) {
  std::vector<std::string> issues;
  if (record.participant.empty()) issues.push_back("participant id is empty");
  if (record.page.empty()) issues.push_back("page id is empty");
  for (std::size_t q = 0; q < kLikertItems; ++q) {
    for (int v : {record.likert[q].exp1, record.likert[q].exp2}) {
      if (v < kLikertMin || v > kLikertMax) {
        issues.push_back("q" + std::to_string(q + 1) + " rating " +
                         std::to_string(v) + " is outside 1..7");
      }
    }
  }
  return issues;
}

const std::string& ratings_csv_header() {
  static const std::string kHeader =
      "participant,page,q1,q2,q3,q4,q5,more_info,feedback,justification";
  return kHeader;
}

std::string csv_quote(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  return csv_quote(field);
}

}  // namespace

std::string to_csv_row(const RatingRecord& r) {
  std::string row = csv_field(r.participant) + "," + csv_field(r.page);
  for (const auto& l : r.likert) {
    row += "," + std::to_string(l.exp1) + "/" + std::to_string(l.exp2);
  }
  row += ",";
  row += to_string(r.more_info);
  row += "," + csv_quote(r.feedback) + "," + csv_quote(r.justification) + "\n";
  return row;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view doc) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    char c = doc[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < doc.size() && doc[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < doc.size() && doc[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw RatingFormatError("unterminated quoted CSV field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

int parse_rating_value(const std::string& s, const std::string& where) {
  if (s.empty() || s.size() > 2 ||
      !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw RatingFormatError("bad rating \"" + s + "\" in " + where);
  }
  return std::stoi(s);
}

LikertPair parse_likert_cell(const std::string& cell, const std::string& where) {
  auto slash = cell.find('/');
  if (slash == std::string::npos) {
    throw RatingFormatError("rating cell \"" + cell + "\" in " + where +
                            " must be exp1/exp2");
  }
  return {parse_rating_value(cell.substr(0, slash), where),
          parse_rating_value(cell.substr(slash + 1), where)};
}

}  // namespace

std::vector<RatingRecord> parse_ratings_csv(std::string_view document) {
  auto rows = parse_csv(document);
  if (rows.empty()) throw RatingFormatError("ratings file is empty");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    header += (i ? "," : "") + rows[0][i];
  }
  if (header != ratings_csv_header()) {
    throw RatingFormatError("unexpected ratings header: " + header);
  }
  std::vector<RatingRecord> out;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& row = rows[n];
    if (row.size() == 1 && row[0].empty()) continue;
    const std::string where = "line " + std::to_string(n + 1);
    if (row.size() != 10) {
      throw RatingFormatError(where + " has " + std::to_string(row.size()) +
                              " fields, expected 10");
    }
    RatingRecord r;
    r.participant = row[0];
    r.page = row[1];
    for (std::size_t q = 0; q < kLikertItems; ++q) {
      r.likert[q] = parse_likert_cell(row[2 + q], where);
    }
    auto more = parse_more_info(row[7]);
    if (!more) throw RatingFormatError("bad more_info \"" + row[7] + "\" in " + where);
    r.more_info = *more;
    r.feedback = row[8];
    r.justification = row[9];
    if (auto issues = check_rating(r); !issues.empty()) {
      throw RatingFormatError(where + ": " + issues.front());
    }
    out.push_back(std::move(r));
  }
  return out;
}

ordered_json to_json(const RatingRecord& r) {
  ordered_json doc;
  doc["participant"] = r.participant;
  doc["page"] = r.page;
  doc["likert"] = ordered_json::array();
  for (const auto& l : r.likert) doc["likert"].push_back({l.exp1, l.exp2});
  doc["more_info"] = to_string(r.more_info);
  doc["feedback"] = r.feedback;
  doc["justification"] = r.justification;
  return doc;
}

RatingRecord rating_from_json(const json& doc) {
  auto str = [&](const char* key, bool required) -> std::string {
    if (!doc.contains(key)) {
      if (required) throw RatingFormatError(std::string("missing \"") + key + "\"");
      return {};
    }
    if (!doc[key].is_string()) {
      throw RatingFormatError(std::string("\"") + key + "\" must be a string");
    }
    return doc[key].get<std::string>();
  };
  if (!doc.is_object()) throw RatingFormatError("rating must be a JSON object");
  RatingRecord r;
  r.participant = str("participant", true);
  r.page = str("page", true);
  if (!doc.contains("likert") || !doc["likert"].is_array() ||
      doc["likert"].size() != kLikertItems) {
    throw RatingFormatError("\"likert\" must hold five [exp1, exp2] pairs");
  }
  for (std::size_t q = 0; q < kLikertItems; ++q) {
    const json& pair = doc["likert"][q];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw RatingFormatError("likert item " + std::to_string(q + 1) +
                              " must be [exp1, exp2] integers");
    }
    r.likert[q] = {pair[0].get<int>(), pair[1].get<int>()};
  }
  auto more = parse_more_info(str("more_info", true));
  if (!more) throw RatingFormatError("\"more_info\" must be yes, no or idk");
  r.more_info = *more;
  r.feedback = str("feedback", false);
  r.justification = str("justification", false);
  return r;
}

}  // namespace tracelens::study
