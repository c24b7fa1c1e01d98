#pragma once

#include <span>
#include <string>
#include <vector>

#include "tracelens/error.hpp"
#include "tracelens/study.hpp"

namespace tracelens::study {

// N subjects (rows) x k conditions (columns).
using RatingMatrix = std::vector<std::vector<double>>;

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

struct FriedmanResult {
  double chi_squared = 0.0;
  double p_value = 1.0;
  int degrees_of_freedom = 0;
};

// Mid-ranks of one row (1-based; tied values share their average rank).
std::vector<double> mid_ranks(std::span<const double> row);

// Friedman rank test with the tie-corrected statistic; p from the upper tail
// of chi-squared with k - 1 degrees of freedom. A matrix with every row fully
// tied gives chi-squared 0 and p 1.
FriedmanResult friedman_test(const RatingMatrix& ratings);

// Kendall's coefficient of concordance, chi-squared / (N (k - 1)).
double kendalls_w(const RatingMatrix& ratings);

double chi_squared_upper_tail(double statistic, int degrees_of_freedom);

struct AnalysisRow {
  std::string pair;
  int question_number = 0;
  std::string question_text;
  double avg_exp1 = 0.0;
  double sd_exp1 = 0.0;
  double avg_exp2 = 0.0;
  double sd_exp2 = 0.0;
  double p = 1.0;
  double chi_squared = 0.0;
  double kendalls_w = 0.0;
  std::size_t raters = 0;
  bool significant = false;
};

class UnknownPage : public Error {
 public:
  using Error::Error;
};

class EmptyCell : public Error {
 public:
  using Error::Error;
};

inline constexpr double kDefaultAlpha = 0.1;

// One row per (pair type present in `pages`, question), ordered by pair type
// then question number. Ratings of both pages of a pair type are pooled.
std::vector<AnalysisRow> analyze(std::span<const PageRef> pages,
                                 std::span<const RatingRecord> ratings,
                                 double alpha = kDefaultAlpha);

const std::string& analysis_csv_header();
std::string analysis_csv(std::span<const AnalysisRow> rows);

}  // namespace tracelens::study
