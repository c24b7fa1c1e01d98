#pragma once

// Pairwise-comparison study harness: pair types, page construction,
// constrained random page assignment and the ratings wire format.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tracelens/abstraction.hpp"
#include "tracelens/error.hpp"
#include "tracelens/render.hpp"
#include "tracelens/trace.hpp"

namespace tracelens::study {

enum class PairSet { kSet1FR, kSet2NoFR, kSet3FRvsNoFR };

std::string_view to_string(PairSet set);
std::optional<PairSet> parse_pair_set(std::string_view s);

// Explanation 1 (left) is the more abstract combination, Explanation 2
// (right) the more detailed one.
struct PairType {
  RuleCombo left;
  RuleCombo right;
  PairSet set = PairSet::kSet1FR;

  // "FL-FR vs no abstraction"
  std::string label() const;
  bool operator==(const PairType&) const = default;
};

// The nine compared pairs in presentation order: five in Set 1, two in
// Set 2, two in Set 3.
const std::vector<PairType>& enumerate_pair_types();
std::optional<PairType> find_pair_type(const RuleCombo& left,
                                       const RuleCombo& right);
// Position within enumerate_pair_types().
std::size_t pair_index(const PairType& pair);

inline constexpr std::size_t kLikertItems = 5;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 7;

struct Question {
  std::string id;
  // "likert", "choice" or "text"
  std::string type;
  std::string text;
  std::vector<std::string> options;
};

// Five Likert items, the feedback prompt, the more-information choice and
// the justification prompt.
const std::vector<Question>& page_questions();
const std::string& likert_question_text(std::size_t number);

struct Scenario {
  ProofTrace trace;
  TemplateSet templates;
};

struct StudyPage {
  std::string id;
  // 1 or 2: which of the two instances of its pair type this page is.
  int group = 1;
  std::string scenario;
  Domain domain = Domain::kOther;
  std::string conclusion_text;
  PairType pair;
  RenderedExplanation left;
  RenderedExplanation right;
  std::vector<Question> questions;
};

class InsufficientScenarios : public Error {
 public:
  using Error::Error;
};

class InfeasibleAssignment : public Error {
 public:
  using Error::Error;
};

class PagesFormatError : public Error {
 public:
  using Error::Error;
};

// Two pages per pair type, drawn from two different scenarios. Scenarios
// are consumed round-robin so 18 scenarios and 9 pair types use every
// scenario exactly once.
std::vector<StudyPage> build_pages(std::span<const Scenario> scenarios,
                                   std::span<const PairType> pairs);

nlohmann::ordered_json to_json(const StudyPage& page);
std::string export_pages(std::span<const StudyPage> pages);

// The subset of a page that assignment and analysis need.
struct PageRef {
  std::string id;
  std::string scenario;
  PairType pair;
};

PageRef page_ref(const StudyPage& page);
std::vector<PageRef> parse_pages(std::string_view document);

struct ParticipantPages {
  std::string participant;
  // Presentation order.
  std::vector<std::string> pages;
};

struct Assignment {
  std::uint64_t seed = 0;
  std::size_t pages_per_participant = 0;
  std::vector<ParticipantPages> participants;
};

inline constexpr std::size_t kPagesPerParticipant = 6;

// Every participant receives `per_participant` pages with pairwise-distinct
// scenarios and pairwise-distinct pair types. Pages with the least exposure
// so far are preferred; remaining ties are broken by the seeded generator.
Assignment assign_pages(std::span<const PageRef> pages,
                        std::size_t participant_count, std::uint64_t seed,
                        std::size_t per_participant = kPagesPerParticipant);

std::string export_assignment(const Assignment& assignment);

enum class MoreInfo { kYes, kNo, kIDontKnow };

std::string_view to_string(MoreInfo m);
std::optional<MoreInfo> parse_more_info(std::string_view s);

// Ratings of one Likert item for Explanation 1 and Explanation 2.
struct LikertPair {
  int exp1 = 0;
  int exp2 = 0;

  bool operator==(const LikertPair&) const = default;
};

struct RatingRecord {
  std::string participant;
  std::string page;
  std::array<LikertPair, kLikertItems> likert{};
  MoreInfo more_info = MoreInfo::kIDontKnow;
  std::string feedback;
  std::string justification;

  bool operator==(const RatingRecord&) const = default;
};

class RatingFormatError : public Error {
 public:
  using Error::Error;
};

// Empty when the record satisfies its invariants.
std::vector<std::string> check_rating(const RatingRecord& record);

// participant,page,q1,q2,q3,q4,q5,more_info,feedback,justification
const std::string& ratings_csv_header();
// One CSV line including the trailing newline. Likert cells are "e1/e2";
// free text is always double-quoted.
std::string to_csv_row(const RatingRecord& record);
std::vector<RatingRecord> parse_ratings_csv(std::string_view document);

// {"participant", "page", "likert": [[e1, e2] x 5], "more_info",
//  "feedback", "justification"}
nlohmann::ordered_json to_json(const RatingRecord& record);
RatingRecord rating_from_json(const nlohmann::json& doc);

// RFC 4180 field splitting shared by the CSV readers.
std::vector<std::vector<std::string>> parse_csv(std::string_view document);
std::string csv_quote(std::string_view field);

}  // namespace tracelens::study
