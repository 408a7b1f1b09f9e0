#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "groupsense/features.hpp"
#include "groupsense/model.hpp"

namespace groupsense {

/// Largest player count exact enumeration accepts (2^12 coalitions).
inline constexpr std::size_t kMaxShapPlayers = 12;

/// Value of a coalition given as a bitmask over players.
using CoalitionValue = std::function<double(std::uint32_t coalition)>;

/// Exact Shapley values by enumerating all 2^players coalitions:
///   phi_i = sum_{S not containing i} |S|! (p - |S| - 1)! / p! * (v(S + i) - v(S)).
/// Throws kInvalidArgument above kMaxShapPlayers.
std::vector<double> shapley_values(std::size_t players, const CoalitionValue& value);

struct ShapExplanation {
  std::array<double, kNumFeatures> phi{};
  /// Mean model output over the background rows.
  double base_value = 0.0;
  /// Model output on the explained instance.
  double prediction = 0.0;

  double operator[](Feature f) const { return phi[index_of(f)]; }
};

using ScoreFunction = std::function<double(const FeatureVector&)>;

/// Interventional SHAP over the eight features: a coalition's value is the
/// mean of f over background rows whose coalition features are replaced by
/// the instance's values. Throws kInvalidArgument for an empty background.
ShapExplanation shap_exact(const ScoreFunction& f, const FeatureVector& instance,
                           std::span<const FeatureVector> background);

/// Same, for a grouping model evaluated at a fixed group and chart size.
ShapExplanation shap_exact(const GroupingModel& model, const FeatureVector& instance,
                           std::size_t group_size, std::size_t chart_size,
                           std::span<const FeatureVector> background);

}  // namespace groupsense
