#pragma once

#include <cstdint>
#include <string_view>

#include "groupsense/model.hpp"
#include "groupsense/training.hpp"

namespace groupsense {

inline constexpr std::string_view kDefaultModelId = "default-v1";

/// Recipe the shipped model was trained with: every candidate group of
/// `charts` random 6-point charts labeled by the synthetic oracle, fitted as
/// size-routed depth-3 trees without the slope feature.
struct DefaultModelRecipe {
  std::size_t charts = 400;
  std::uint64_t seed = 20240601;
  ModelSpec spec{ModelKind::kSizeRouted, kDefaultMaxDepth, slope_free_features(), 5.0};
};

/// Trains a model from `recipe`, tagged with kDefaultModelId and a provenance
/// note stating it was fitted to synthetic labels.
GroupingModel train_default_model(const DefaultModelRecipe& recipe = {});

/// The model document compiled into the library (models/default-v1.json).
std::string_view default_model_document();

/// Parsed once on first use.
const GroupingModel& default_model();

}  // namespace groupsense
