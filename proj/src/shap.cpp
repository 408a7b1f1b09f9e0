#include "groupsense/shap.hpp"

#include <bit>
#include <cmath>

#include "groupsense/error.hpp"

namespace groupsense {

std::vector<double> shapley_values(std::size_t players, const CoalitionValue& value) {
  if (players > kMaxShapPlayers)
    throw Error(ErrorCode::kInvalidArgument,
                "exact Shapley enumeration supports at most " + std::to_string(kMaxShapPlayers) + " players");
  const std::uint32_t coalitions = std::uint32_t{1} << players;
  std::vector<double> v(coalitions);
  for (std::uint32_t s = 0; s < coalitions; ++s) v[s] = value(s);

  // weight[k] = k! (p - k - 1)! / p!
  std::vector<double> weight(players, 0.0);
  for (std::size_t k = 0; k < players; ++k) {
    weight[k] = std::exp(std::lgamma(static_cast<double>(k) + 1.0) +
                         std::lgamma(static_cast<double>(players - k)) -
                         std::lgamma(static_cast<double>(players) + 1.0));
  }

  std::vector<double> phi(players, 0.0);
  for (std::size_t i = 0; i < players; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (std::uint32_t s = 0; s < coalitions; ++s) {
      if (s & bit) continue;
      phi[i] += weight[static_cast<std::size_t>(std::popcount(s))] * (v[s | bit] - v[s]);
    }
  }
  return phi;
}

ShapExplanation shap_exact(const ScoreFunction& f, const FeatureVector& instance,
                           std::span<const FeatureVector> background) {
  if (background.empty()) throw Error(ErrorCode::kInvalidArgument, "SHAP background set is empty");
  const double inv = 1.0 / static_cast<double>(background.size());
  auto value = [&](std::uint32_t coalition) {
    double sum = 0.0;
    FeatureVector row;
    for (const auto& b : background) {
      for (std::size_t j = 0; j < kNumFeatures; ++j) {
        row.values[j] = (coalition >> j) & 1U ? instance.values[j] : b.values[j];
      }
      sum += f(row);
    }
    return sum * inv;
  };

  const auto phi = shapley_values(kNumFeatures, value);
  ShapExplanation out;
  std::copy(phi.begin(), phi.end(), out.phi.begin());
  out.base_value = value(0);
  out.prediction = f(instance);
  return out;
}

ShapExplanation shap_exact(const GroupingModel& model, const FeatureVector& instance,
                           std::size_t group_size, std::size_t chart_size,
                           std::span<const FeatureVector> background) {
  return shap_exact(
      [&](const FeatureVector& x) { return model.predict(x, group_size, chart_size); }, instance,
      background);
}

}  // namespace groupsense
