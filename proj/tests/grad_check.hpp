#pragma once

// Central finite differences against the analytic anchored-loss gradients.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "openuas/embedding.hpp"

namespace testutil {

struct GradCheck {
  double relative = 0.0;
  double worst_absolute = 0.0;
  int checked = 0;
};

inline openuas::Frequency random_distribution(std::mt19937_64& rng, double sparsity = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  openuas::Frequency f{};
  double total = 0.0;
  for (auto& x : f) {
    x = u(rng) < sparsity ? 0.0 : u(rng);
    total += x;
  }
  if (total == 0.0) f[0] = total = 1.0;
  for (auto& x : f) x /= total;
  return f;
}

// Random model with `rows` rows; every weight in [-scale, scale].
inline openuas::EmbeddingModel random_model(std::mt19937_64& rng, std::size_t rows, double scale) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows; ++i) ids.push_back("r" + std::to_string(i));
  openuas::EmbeddingModel m(ids);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto& w : m.row(i)) w = u(rng);
  for (auto& out_row : m.output())
    for (auto& w : out_row) w = u(rng);
  return m;
}

// Compares every partial derivative (touched rows and all output weights) at
// the model's current point. The per-point error is the relative error of the
// whole gradient vector, ||analytic - numeric|| / max(||analytic||, ||numeric||),
// so that near-zero coordinates do not turn rounding noise into a failure; the
// worst single-coordinate absolute error is reported alongside.
inline GradCheck check_anchored_gradients(openuas::EmbeddingModel model,
                                          const std::vector<openuas::BatchItem>& data,
                                          const std::vector<openuas::BatchItem>& anchors, double p) {
  using namespace openuas;
  const Gradients g = anchored_loss_and_gradients(model, data, anchors, p);
  auto loss = [&] { return anchored_loss_and_gradients(model, data, anchors, p).loss; };
  const double h = 1e-5;

  std::vector<std::pair<double*, double>> coords;  // (weight, analytic partial)
  std::vector<std::size_t> seen;
  for (const auto& [row, grad] : g.rows) {
    if (std::find(seen.begin(), seen.end(), row) != seen.end()) continue;
    seen.push_back(row);
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
      double sum = 0.0;  // the same row may appear more than once in a batch
      for (const auto& [r, gr] : g.rows) sum += r == row ? gr[d] : 0.0;
      coords.emplace_back(&model.row(row)[d], sum);
    }
  }
  for (std::size_t d = 0; d < kEmbeddingDim; ++d)
    for (std::size_t k = 0; k < kStayClasses; ++k) coords.emplace_back(&model.output()[d][k], g.output[d][k]);

  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  GradCheck result;
  for (auto& [w, analytic] : coords) {
    const double saved = *w;
    *w = saved + h;
    const double up = loss();
    *w = saved - h;
    const double down = loss();
    *w = saved;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (analytic - numeric) * (analytic - numeric);
    a2 += analytic * analytic;
    n2 += numeric * numeric;
    result.worst_absolute = std::max(result.worst_absolute, std::abs(analytic - numeric));
    ++result.checked;
  }
  result.relative = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-300});
  return result;
}

}  // namespace testutil
