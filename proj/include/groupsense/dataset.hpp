#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "groupsense/chart.hpp"
#include "groupsense/features.hpp"
#include "groupsense/group.hpp"

namespace groupsense {

enum class ExampleSource { kParticipant, kSyntheticNegative, kOracle };

std::string_view to_string(ExampleSource source);
ExampleSource example_source_from_string(std::string_view text);

struct LabeledExample {
  std::string chart_id;
  Group group;
  std::size_t chart_size = 0;
  FeatureVector features;
  bool label = false;
  ExampleSource source = ExampleSource::kOracle;

  std::size_t group_size() const { return group.size(); }
};

/// Thresholds of the rule-based stand-in for human labels.
struct OracleThresholds {
  double line_error_px = 4.0;
  double centroid_ratio = 3.0;
  double y_sep_px = 30.0;
};

/// Positive iff the group is a tight line of >= 3 points, a well separated
/// cluster with disjoint hulls, or vertically isolated.
bool oracle_label(const FeatureVector& features, std::size_t group_size,
                  const OracleThresholds& thresholds = {});

/// Every candidate group of `chart_count` random charts, labeled by the
/// oracle. Chart i is generate_random_chart(chart_size, seed + i).
std::vector<LabeledExample> oracle_dataset(std::size_t chart_count, std::uint64_t seed,
                                           int chart_size = 6,
                                           const OracleThresholds& thresholds = {});

/// The first `count` examples of an oracle dataset over as many charts as
/// needed.
std::vector<LabeledExample> oracle_examples(std::size_t count, std::uint64_t seed,
                                            int chart_size = 6,
                                            const OracleThresholds& thresholds = {});

using ChartsById = std::map<std::string, Chart>;
/// Groups selected by participants, per chart id. Repeats (several
/// participants picking the same group) are allowed.
using SelectionsByChart = std::map<std::string, std::vector<Group>>;

/// One positive example per distinct selected group.
std::vector<LabeledExample> participant_examples(const ChartsById& charts,
                                                 const SelectionsByChart& selections);

/// Candidate groups that were never selected, fit a line worse than the mean
/// error of the chart's selected groups, and whose hull does not overlap the
/// rest. Charts without selections compare against the mean over all
/// selected groups. Throws kInvalidArgument if nothing was selected at all.
std::vector<LabeledExample> synthesize_negatives(const ChartsById& charts,
                                                 const SelectionsByChart& selections);

/// Parses `chart_id,participant_id,member_labels` rows (members joined by
/// ';'). A header row is skipped.
SelectionsByChart read_selections_csv(std::istream& in);

/// Loads <dir>/<chart_id>.json for every id in `selections`.
ChartsById load_charts_dir(const std::string& dir, const SelectionsByChart& selections);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  std::vector<LabeledExample> holdout;
};

/// Stratified 70/20/10 split. Sizes are floor(0.7 N), floor(0.2 N) and the
/// remainder; each label class is spread proportionally. Throws
/// kInvalidArgument below 10 examples.
DatasetSplit split_dataset(std::span<const LabeledExample> examples, std::uint64_t seed);

/// Stratified assignment of examples to k folds: result[i] is the fold of
/// example i. Fold sizes differ by at most one.
std::vector<std::size_t> stratified_folds(std::span<const LabeledExample> examples, std::size_t k,
                                          std::uint64_t seed);

/// CSV with columns chart_id,members,chart_size,<features>,label,source.
void write_examples_csv(std::ostream& out, std::span<const LabeledExample> examples);
std::vector<LabeledExample> read_examples_csv(std::istream& in);

}  // namespace groupsense
