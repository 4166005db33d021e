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

// Reference implementations written independently of the library code, used
// to freeze expected values.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

// Nominal alpha straight from the pairwise definition: observed disagreement
// averages over ordered within-unit pairs with weight 1/(m_u - 1); expected
// disagreement over all ordered pairs of pairable values.
// rows[u][o] is the value of observer o on unit u, or nullopt.
inline std::optional<double> alpha_pairwise(const std::vector<std::vector<std::optional<int>>>& rows) {
  std::vector<std::vector<int>> units;
  for (const auto& r : rows) {
    std::vector<int> vals;
    for (const auto& v : r)
      if (v) vals.push_back(*v);
    if (vals.size() >= 2) units.push_back(vals);
  }
  double n = 0;
  for (const auto& u : units) n += static_cast<double>(u.size());
  if (n < 2) return std::nullopt;

  double observed = 0;
  for (const auto& u : units) {
    double d = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j && u[i] != u[j]) d += 1;
    observed += d / (static_cast<double>(u.size()) - 1.0);
  }
  observed /= n;

  std::vector<int> all;
  for (const auto& u : units) all.insert(all.end(), u.begin(), u.end());
  double expected = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      if (i != j && all[i] != all[j]) expected += 1;
  expected /= n * (n - 1.0);
  if (expected == 0) return std::nullopt;
  return 1.0 - observed / expected;
}

// Textbook two-pass Pearson correlation; nullopt on zero variance.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// Weighted Bernoulli log-likelihood of a linear predictor.
inline double weighted_loglik(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                              const std::vector<double>& w, const std::vector<double>& beta) {
  double ll = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double eta = 0;
    for (std::size_t j = 0; j < beta.size(); ++j) eta += beta[j] * x[i][j];
    const double log_p = -std::log1p(std::exp(-eta));
    const double log_q = -std::log1p(std::exp(eta));
    ll += w[i] * (y[i] * log_p + (1 - y[i]) * log_q);
  }
  return ll;
}

// Coarse-to-fine grid maximization: a 21-point grid per coordinate around
// the current best, halving the window each round.
inline std::vector<double> grid_argmax(const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
                                       double half_width = 4.0, int rounds = 34) {
  std::vector<double> best(dim, 0.0);
  double best_val = f(best);
  constexpr int kPoints = 21;
  std::vector<int> idx(dim);
  for (int round = 0; round < rounds; ++round) {
    const std::vector<double> centre = best;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d) p[d] = centre[d] + half_width * (2.0 * idx[d] / (kPoints - 1) - 1.0);
      const double v = f(p);
      if (v > best_val) {
        best_val = v;
        best = p;
      }
      std::size_t d = 0;
      while (d < dim && ++idx[d] == kPoints) idx[d++] = 0;
      if (d == dim) break;
    }
    half_width /= 2.0;
  }
  return best;
}

// Wilson interval with z for 95% written out.
inline std::pair<double, double> wilson95(double successes, double n) {
  const double z = 1.959963984540054;
  const double p = successes / n;
  const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {centre - half, centre + half};
}

}  // namespace oracle
