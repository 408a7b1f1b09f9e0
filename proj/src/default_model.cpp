#include "groupsense/default_model.hpp"

#include "groupsense/dataset.hpp"
#include "groupsense/json_io.hpp"

namespace groupsense {

namespace detail {
extern const std::string_view kEmbeddedDefaultModel;
}

GroupingModel train_default_model(const DefaultModelRecipe& recipe) {
  const auto examples = oracle_dataset(recipe.charts, recipe.seed);
  return fit_model(recipe.spec, examples,
                   {{"model_id", std::string(kDefaultModelId)},
                    {"provenance",
                     "synthetic oracle labels (" + std::to_string(recipe.charts) + " random 6-point charts, seed " +
                         std::to_string(recipe.seed) + "); not fitted to human study data"}});
}

std::string_view default_model_document() { return detail::kEmbeddedDefaultModel; }

const GroupingModel& default_model() {
  static const GroupingModel model = load_model(parse_json(default_model_document()));
  return model;
}

}  // namespace groupsense
