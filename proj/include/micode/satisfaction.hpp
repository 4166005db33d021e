// Copyright 2026 The micode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/labels.hpp"

namespace micode {

// Every code except Other enters the model; with the canonical enumeration
// these are exactly indices 0..15.
inline constexpr std::size_t kNumCovariateCodes = kNumCodes - 1;

struct DesignRow {
  std::string conversation_id;
  std::array<int, kNumCovariateCodes> counts{};  // indexed by index_of(MiCode)
  double member_age = 0.0;
  double listener_age = 0.0;
  double member_past_avg_rating = 0.0;
  SatisfactionClass outcome = SatisfactionClass::Unsatisfactory;
};

enum class PastRatingMode : std::uint8_t {
  LeaveCurrentOut,  // all of the member's other rated conversations
  Temporal,         // only those that started strictly earlier
};

struct DesignResult {
  std::vector<DesignRow> rows;
  std::size_t conversations = 0;
  std::size_t rated = 0;
  std::size_t excluded_unrated = 0;
  std::size_t excluded_missing_age = 0;
  double global_mean_rating = 0.0;
};

// One row per rated conversation with both ages. Throws
// DataError("missing_labels") if a listener utterance of such a
// conversation has no entry in `labels`.
DesignResult build_design(const Corpus& corpus, const LabelMap& labels,
                          PastRatingMode mode = PastRatingMode::LeaveCurrentOut);

struct WeightVector {
  double satisfactory = 1.0;
  double unsatisfactory = 1.0;
};

// w_c = N / (2 N_c). Throws DataError("single_class") if a class is empty.
WeightVector class_weights(std::size_t n_satisfactory, std::size_t n_unsatisfactory);
WeightVector class_weights(std::span<const DesignRow> rows);

// Dense logistic-regression problem, row-major n x p.
struct LogisticData {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;
  std::vector<double> y;  // 0/1
  std::vector<double> w;  // observation weights
  std::vector<std::string> names;
};

struct RegressionFit {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> z_scores;
  std::vector<double> p_values;
  std::vector<double> odds_ratios;
  std::vector<std::string> dropped;  // constant covariates left out
  double log_likelihood = 0.0;       // weighted
  double aic = 0.0;                  // 2k - 2 * weighted log-likelihood
  WeightVector weights;
  int iterations = 0;
  bool converged = false;
  bool ridge_applied = false;
  std::size_t observations = 0;

  // Index of a named coefficient, or names.size() when absent.
  std::size_t index_of_name(std::string_view name) const;
};

inline constexpr std::string_view kInterceptName = "(Intercept)";

struct FitOptions {
  double tolerance = 1e-8;  // on max |delta beta|
  int max_iterations = 100;
  double separation_ridge = 1e-6;
};

// Weighted maximum likelihood by iteratively reweighted least squares.
// Standard errors from the inverse information at the optimum, two-sided
// Wald p-values. Constant non-intercept columns are dropped. On detected
// separation the fit is retried with a small ridge; if that fails too,
// ModelError("separation") names the offending covariate.
RegressionFit fit_weighted_logistic(const LogisticData& data, const FitOptions& options = {});

// Table-4 layout: intercept, the 16 codes, member age, listener age, member
// past average rating.
LogisticData design_to_problem(std::span<const DesignRow> rows, const WeightVector& weights);
RegressionFit fit_weighted_logistic(std::span<const DesignRow> rows, const WeightVector& weights,
                                    const FitOptions& options = {});

double odds_ratio(double coefficient);
std::string significance_stars(double p);

inline constexpr std::string_view kStarLegend = "***p < 0.001; **p<0.01; *p<0.05 ⊙p<0.1";

std::string satisfaction_table(const RegressionFit& fit, const DesignResult* cohort = nullptr);
std::string satisfaction_tsv(const RegressionFit& fit, const DesignResult* cohort = nullptr);

}  // namespace micode
