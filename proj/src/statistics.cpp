#include "tracelens/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace tracelens::study {

std::vector<double> mid_ranks(std::span<const double> row) {
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  std::vector<double> ranks(row.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && row[order[j + 1]] == row[order[i]]) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

void check_shape(const RatingMatrix& m) {
  if (m.size() < 2) throw DegenerateInput("need at least two subjects");
  const std::size_t k = m.front().size();
  if (k < 2) throw DegenerateInput("need at least two conditions");
  for (const auto& row : m) {
    if (row.size() != k) throw DegenerateInput("ragged rating matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw DegenerateInput("non-finite rating");
    }
  }
}

// Sum of t^3 - t over the tie groups of one row.
double tie_term(std::span<const double> row) {
  std::vector<double> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    total += t * t * t - t;
    i = j;
  }
  return total;
}

}  // namespace

double chi_squared_upper_tail(double statistic, int degrees_of_freedom) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

FriedmanResult friedman_test(const RatingMatrix& ratings) {
  check_shape(ratings);
  const double n = static_cast<double>(ratings.size());
  const std::size_t k = ratings.front().size();
  const double kd = static_cast<double>(k);

  std::vector<double> rank_sums(k, 0.0);
  double ties = 0.0;
  for (const auto& row : ratings) {
    const auto ranks = mid_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    ties += tie_term(row);
  }

  const double expected = n * (kd + 1.0) / 2.0;
  double spread = 0.0;
  for (double r : rank_sums) spread += (r - expected) * (r - expected);

  FriedmanResult result;
  result.degrees_of_freedom = static_cast<int>(k) - 1;
  const double denominator = n * kd * (kd + 1.0) - ties / (kd - 1.0);
  // Every row fully tied: no rank information at all.
  if (denominator <= 1e-9 * n * kd * (kd + 1.0)) return result;
  result.chi_squared = 12.0 * spread / denominator;
  result.p_value = chi_squared_upper_tail(result.chi_squared,
                                          result.degrees_of_freedom);
  return result;
}

double kendalls_w(const RatingMatrix& ratings) {
  const FriedmanResult f = friedman_test(ratings);
  const double n = static_cast<double>(ratings.size());
  const double k = static_cast<double>(ratings.front().size());
  return std::clamp(f.chi_squared / (n * (k - 1.0)), 0.0, 1.0);
}

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// Sample standard deviation (n - 1 denominator).
MeanSd describe(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / (xs.size() - 1));
  return out;
}

}  // namespace

std::vector<AnalysisRow> analyze(std::span<const PageRef> pages,
                                 std::span<const RatingRecord> ratings,
                                 double alpha) {
  std::map<std::string, std::size_t> page_pair;
  std::set<std::size_t> present;
  for (const auto& p : pages) {
    const std::size_t idx = pair_index(p.pair);
    page_pair[p.id] = idx;
    present.insert(idx);
  }

  // Sorted per cell so the result does not depend on input order.
  std::map<std::size_t, std::vector<const RatingRecord*>> by_pair;
  for (const auto& r : ratings) {
    auto it = page_pair.find(r.page);
    if (it == page_pair.end()) throw UnknownPage("rating references unknown page " + r.page);
    by_pair[it->second].push_back(&r);
  }
  for (auto& [_, records] : by_pair) {
    std::sort(records.begin(), records.end(), [](const auto* a, const auto* b) {
      return std::tie(a->participant, a->page) < std::tie(b->participant, b->page);
    });
  }

  const auto& pair_types = enumerate_pair_types();
  std::vector<AnalysisRow> rows;
  for (std::size_t idx : present) {
    const auto& records = by_pair[idx];
    const std::string label = pair_types[idx].label();
    if (records.size() < 2) {
      throw EmptyCell("pair " + label + " has " + std::to_string(records.size()) +
                      " rater(s); at least 2 are needed");
    }
    for (std::size_t q = 0; q < kLikertItems; ++q) {
      RatingMatrix m;
      std::vector<double> e1, e2;
      for (const auto* r : records) {
        e1.push_back(r->likert[q].exp1);
        e2.push_back(r->likert[q].exp2);
        m.push_back({e1.back(), e2.back()});
      }
      const FriedmanResult f = friedman_test(m);
      const MeanSd d1 = describe(e1);
      const MeanSd d2 = describe(e2);
      AnalysisRow row;
      row.pair = label;
      row.question_number = static_cast<int>(q + 1);
      row.question_text = likert_question_text(q + 1);
      row.avg_exp1 = d1.mean;
      row.sd_exp1 = d1.sd;
      row.avg_exp2 = d2.mean;
      row.sd_exp2 = d2.sd;
      row.p = f.p_value;
      row.chi_squared = f.chi_squared;
      row.kendalls_w = kendalls_w(m);
      row.raters = records.size();
      row.significant = f.p_value < alpha;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const std::string& analysis_csv_header() {
  static const std::string kHeader =
      "pair,question_number,question_text,avg_exp1,sd_exp1,avg_exp2,sd_exp2,"
      "p,chi_squared,kendalls_w,significant_at_alpha";
  return kHeader;
}

std::string analysis_csv(std::span<const AnalysisRow> rows) {
  std::string out = analysis_csv_header() + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{}\n",
                       r.pair, r.question_number, csv_quote(r.question_text),
                       r.avg_exp1, r.sd_exp1, r.avg_exp2, r.sd_exp2, r.p,
                       r.chi_squared, r.kendalls_w, r.significant ? "true" : "false");
  }
  return out;
}

}  // namespace tracelens::study
