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

#include "micode/satisfaction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "micode/error.hpp"

namespace micode {

namespace {

// Display order and grouping of the regression table.
constexpr std::array<MiCode, kNumCovariateCodes> kTableOrder = {
    MiCode::Affirm,           MiCode::EmphasizingAutonomy, MiCode::OpenQuestion,       MiCode::ClosedQuestion,
    MiCode::Persuade,         MiCode::Reflection,          MiCode::SeekingCollaboration, MiCode::Direct,
    MiCode::Inappropriate,    MiCode::Grounding,           MiCode::GivingInformation,  MiCode::Support,
    MiCode::PersonalDisclosure, MiCode::Introduction,      MiCode::Conclusion,         MiCode::ChitChat,
};

constexpr std::string_view kMemberAge = "MemberAge";
constexpr std::string_view kListenerAge = "ListenerAge";
constexpr std::string_view kPastRating = "MemberPastAverageRating";

double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

DesignResult build_design(const Corpus& corpus, const LabelMap& labels, PastRatingMode mode) {
  DesignResult out;
  out.conversations = corpus.size();

  struct MemberRating {
    Instant start;
    int rating;
    std::size_t conversation;
  };
  std::map<std::string, std::vector<MemberRating>> by_member;
  double rating_sum = 0.0;
  const auto& convs = corpus.conversations();
  for (std::size_t i = 0; i < convs.size(); ++i) {
    if (!convs[i].rating) continue;
    ++out.rated;
    rating_sum += *convs[i].rating;
    by_member[convs[i].member_id].push_back({convs[i].start_time(), *convs[i].rating, i});
  }
  out.excluded_unrated = out.conversations - out.rated;
  out.global_mean_rating = out.rated ? rating_sum / static_cast<double>(out.rated) : 0.0;

  std::size_t missing_labels = 0;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    const auto& c = convs[i];
    if (!c.rating) continue;
    if (!c.member_age || !c.listener_age) {
      ++out.excluded_missing_age;
      continue;
    }
    DesignRow row;
    row.conversation_id = c.conversation_id;
    row.member_age = *c.member_age;
    row.listener_age = *c.listener_age;
    row.outcome = binarize_rating(*c.rating);
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = labels.find(u.utterance_id);
      if (it == labels.end()) {
        ++missing_labels;
        continue;
      }
      for (auto code : it->second.to_vector())
        if (code != MiCode::Other) ++row.counts[index_of(code)];
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& other : by_member[c.member_id]) {
      if (other.conversation == i) continue;
      if (mode == PastRatingMode::Temporal && !(other.start < c.start_time())) continue;
      sum += other.rating;
      ++count;
    }
    row.member_past_avg_rating = count ? sum / static_cast<double>(count) : out.global_mean_rating;
    out.rows.push_back(std::move(row));
  }
  if (missing_labels)
    throw DataError("missing_labels",
                    fmt::format("{} listener utterances of rated conversations have no labels", missing_labels));
  return out;
}

WeightVector class_weights(std::size_t n_satisfactory, std::size_t n_unsatisfactory) {
  if (n_satisfactory == 0 || n_unsatisfactory == 0)
    throw DataError("single_class", "class weights need both satisfactory and unsatisfactory conversations");
  const double n = static_cast<double>(n_satisfactory + n_unsatisfactory);
  return {n / (2.0 * static_cast<double>(n_satisfactory)), n / (2.0 * static_cast<double>(n_unsatisfactory))};
}

WeightVector class_weights(std::span<const DesignRow> rows) {
  const auto sat = static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const DesignRow& r) { return r.outcome == SatisfactionClass::Satisfactory; }));
  return class_weights(sat, rows.size() - sat);
}

std::size_t RegressionFit::index_of_name(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

struct IrlsResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverging = false;
};

double weighted_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    ll += w[i] * (y[i] * log_sigmoid(eta[i]) + (1.0 - y[i]) * log_sigmoid(-eta[i]));
  return ll;
}

IrlsResult irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double ridge,
                const FitOptions& opt) {
  const Eigen::Index p = X.cols();
  IrlsResult r;
  r.beta = Eigen::VectorXd::Zero(p);
  double ll = weighted_loglik(X, y, w, r.beta) - 0.5 * ridge * r.beta.squaredNorm();
  Eigen::MatrixXd H(p, p);
  for (int it = 0; it < opt.max_iterations; ++it) {
    r.iterations = it + 1;
    const Eigen::VectorXd eta = X * r.beta;
    Eigen::VectorXd mu(X.rows()), curv(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      mu[i] = sigmoid(eta[i]);
      curv[i] = w[i] * mu[i] * (1.0 - mu[i]);
    }
    const Eigen::VectorXd grad = X.transpose() * (w.cwiseProduct(y - mu)) - ridge * r.beta;
    H.noalias() = X.transpose() * curv.asDiagonal() * X;
    H.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      r.diverging = true;
      break;
    }
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) {
      r.diverging = true;
      break;
    }
    // Step halving keeps the penalized likelihood non-decreasing.
    double t = 1.0;
    Eigen::VectorXd next = r.beta + step;
    double next_ll = weighted_loglik(X, y, w, next) - 0.5 * ridge * next.squaredNorm();
    while (next_ll < ll - 1e-12 * std::abs(ll) && t > 1e-6) {
      t *= 0.5;
      next = r.beta + t * step;
      next_ll = weighted_loglik(X, y, w, next) - 0.5 * ridge * next.squaredNorm();
    }
    const double max_delta = (next - r.beta).cwiseAbs().maxCoeff();
    r.beta = next;
    ll = next_ll;
    if (r.beta.cwiseAbs().maxCoeff() > 40.0) r.diverging = true;
    if (max_delta < opt.tolerance) {
      r.converged = true;
      break;
    }
  }

  const Eigen::VectorXd eta = X * r.beta;
  Eigen::VectorXd curv(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double m = sigmoid(eta[i]);
    curv[i] = w[i] * m * (1.0 - m);
  }
  H.noalias() = X.transpose() * curv.asDiagonal() * X;
  H.diagonal().array() += ridge;
  r.covariance = H.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  r.loglik = weighted_loglik(X, y, w, r.beta);
  return r;
}

}  // namespace

RegressionFit fit_weighted_logistic(const LogisticData& data, const FitOptions& options) {
  if (data.x.size() != data.n * data.p || data.y.size() != data.n || data.w.size() != data.n ||
      data.names.size() != data.p)
    throw UsageError("bad_shape", "logistic problem has inconsistent dimensions");
  std::size_t positives = 0;
  for (double v : data.y) {
    if (v != 0.0 && v != 1.0) throw DataError("bad_outcome", "outcomes must be 0 or 1");
    positives += v == 1.0;
  }
  if (positives < 2 || data.n - positives < 2)
    throw DataError("too_few_rows", "logistic fit needs at least 2 rows per class");
  for (double v : data.w)
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError("bad_weight", "observation weights must be positive");

  RegressionFit fit;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < data.p; ++j) {
    bool constant = true;
    for (std::size_t i = 1; i < data.n && constant; ++i) constant = data.x[i * data.p + j] == data.x[j];
    if (constant && data.names[j] != kInterceptName)
      fit.dropped.push_back(data.names[j]);
    else
      keep.push_back(j);
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.n), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data.x[i * data.p + keep[j]];
  const Eigen::Map<const Eigen::VectorXd> y(data.y.data(), static_cast<Eigen::Index>(data.n));
  const Eigen::Map<const Eigen::VectorXd> w(data.w.data(), static_cast<Eigen::Index>(data.n));

  IrlsResult r = irls(X, y, w, 0.0, options);
  if (r.diverging || !r.converged) {
    IrlsResult ridged = irls(X, y, w, options.separation_ridge, options);
    fit.ridge_applied = true;
    if (ridged.diverging || !ridged.converged) {
      Eigen::Index worst = 0;
      const Eigen::VectorXd& b = ridged.beta.allFinite() ? ridged.beta : r.beta;
      for (Eigen::Index j = 1; j < b.size(); ++j)
        if (std::abs(b[j]) > std::abs(b[worst]) || (worst == 0 && keep.size() > 1)) worst = j;
      if (ridged.diverging)
        throw ModelError("separation", fmt::format("perfect separation detected on covariate '{}'",
                                                   data.names[keep[static_cast<std::size_t>(worst)]]));
    }
    r = std::move(ridged);
  }

  fit.converged = r.converged;
  fit.iterations = r.iterations;
  fit.observations = data.n;
  fit.log_likelihood = r.loglik;
  fit.aic = 2.0 * static_cast<double>(keep.size()) - 2.0 * r.loglik;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double b = r.beta[jj];
    const double se = std::sqrt(std::max(r.covariance(jj, jj), 0.0));
    const double z = se > 0 ? b / se : 0.0;
    fit.names.push_back(data.names[keep[j]]);
    fit.coefficients.push_back(b);
    fit.standard_errors.push_back(se);
    fit.z_scores.push_back(z);
    fit.p_values.push_back(std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0));
    fit.odds_ratios.push_back(odds_ratio(b));
  }
  return fit;
}

LogisticData design_to_problem(std::span<const DesignRow> rows, const WeightVector& weights) {
  LogisticData d;
  d.n = rows.size();
  d.names.emplace_back(kInterceptName);
  for (auto c : kTableOrder) d.names.emplace_back(code_name(c));
  d.names.emplace_back(kMemberAge);
  d.names.emplace_back(kListenerAge);
  d.names.emplace_back(kPastRating);
  d.p = d.names.size();
  d.x.reserve(d.n * d.p);
  for (const auto& r : rows) {
    d.x.push_back(1.0);
    for (auto c : kTableOrder) d.x.push_back(r.counts[index_of(c)]);
    d.x.push_back(r.member_age);
    d.x.push_back(r.listener_age);
    d.x.push_back(r.member_past_avg_rating);
    const bool sat = r.outcome == SatisfactionClass::Satisfactory;
    d.y.push_back(sat ? 1.0 : 0.0);
    d.w.push_back(sat ? weights.satisfactory : weights.unsatisfactory);
  }
  return d;
}

RegressionFit fit_weighted_logistic(std::span<const DesignRow> rows, const WeightVector& weights,
                                    const FitOptions& options) {
  auto fit = fit_weighted_logistic(design_to_problem(rows, weights), options);
  fit.weights = weights;
  return fit;
}

double odds_ratio(double coefficient) { return std::exp(coefficient); }

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return "⊙";
  return "";
}

namespace {

std::string fixed3(double v) {
  std::string s = fmt::format("{:.3f}", v);
  return s == "-0.000" ? "0.000" : s;
}

std::string covariate_label(std::string_view name) {
  if (name == kInterceptName) return "Intercept";
  if (name == kMemberAge) return "Member Age";
  if (name == kListenerAge) return "Listener Age";
  if (name == kPastRating) return "Member Past Average Rating";
  if (auto c = parse_code(name)) return std::string(display_name(*c));
  return std::string(name);
}

}  // namespace

std::string satisfaction_table(const RegressionFit& fit, const DesignResult* cohort) {
  std::string out = "Associations between MI codes and satisfactory conversations\n";
  if (cohort)
    out += fmt::format("cohort: conversations={} rated={} used={} excluded_unrated={} excluded_missing_age={}\n",
                       cohort->conversations, cohort->rated, cohort->rows.size(), cohort->excluded_unrated,
                       cohort->excluded_missing_age);
  out += fmt::format("class weights: satisfactory={:.4f} unsatisfactory={:.4f}\n", fit.weights.satisfactory,
                     fit.weights.unsatisfactory);
  if (!fit.converged) out += "PROVISIONAL: fit did not converge\n";
  if (fit.ridge_applied) out += "note: ridge penalty applied after detected separation\n";
  out += fmt::format("{:<30} {:>14} {:>12}\n", "MI Code", "Coefficient", "Odds Ratio");

  auto row = [&](std::string_view name) {
    const std::size_t j = fit.index_of_name(name);
    if (j == fit.names.size())
      return fmt::format("{:<30} {:>14} {:>12}\n", covariate_label(name), "dropped", "");
    return fmt::format("{:<30} {:>14} {:>12}\n", covariate_label(name),
                       fixed3(fit.coefficients[j]) + significance_stars(fit.p_values[j]), fixed3(fit.odds_ratios[j]));
  };
  MiCategory current = MiCategory::MiConsistent;
  out += std::string(category_name(current)) + "\n";
  for (auto c : kTableOrder) {
    if (category_of(c) != current) {
      current = category_of(c);
      out += std::string(category_name(current)) + "\n";
    }
    out += row(code_name(c));
  }
  out += "Control Variables\n";
  for (auto name : {kMemberAge, kListenerAge, kPastRating}) out += row(name);
  out += row(kInterceptName);
  out += fmt::format("AIC of Model {:.1f}\n", fit.aic);
  out += fmt::format("weighted log-likelihood {:.4f}; observations {}; iterations {}\n", fit.log_likelihood,
                     fit.observations, fit.iterations);
  out += std::string(kStarLegend) + "\n";
  return out;
}

std::string satisfaction_tsv(const RegressionFit& fit, const DesignResult* cohort) {
  std::string out;
  out += fmt::format("# aic\t{:.17g}\n# log_likelihood\t{:.17g}\n# converged\t{}\n# observations\t{}\n", fit.aic,
                     fit.log_likelihood, fit.converged ? "true" : "false", fit.observations);
  out += fmt::format("# weight_satisfactory\t{:.17g}\n# weight_unsatisfactory\t{:.17g}\n", fit.weights.satisfactory,
                     fit.weights.unsatisfactory);
  if (cohort)
    out += fmt::format("# conversations\t{}\n# rated\t{}\n# excluded_unrated\t{}\n# excluded_missing_age\t{}\n",
                       cohort->conversations, cohort->rated, cohort->excluded_unrated, cohort->excluded_missing_age);
  for (const auto& d : fit.dropped) out += fmt::format("# dropped\t{}\n", d);
  out += "covariate\tcoefficient\tse\tz\tp\tstars\todds_ratio\n";
  for (std::size_t j = 0; j < fit.names.size(); ++j)
    out += fmt::format("{}\t{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\t{}\t{:.17g}\n", fit.names[j], fit.coefficients[j],
                       fit.standard_errors[j], fit.z_scores[j], fit.p_values[j], significance_stars(fit.p_values[j]),
                       fit.odds_ratios[j]);
  return out;
}

}  // namespace micode
