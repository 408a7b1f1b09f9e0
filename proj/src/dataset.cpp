#include "groupsense/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "groupsense/error.hpp"
#include "groupsense/json_io.hpp"

namespace groupsense {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kMalformedDocument, "not a number: '" + s + "'", where);
  }
  return v;
}

// Keys that order examples reproducibly regardless of the platform's
// shuffle implementation.
std::vector<std::uint64_t> random_keys(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> keys(n);
  for (auto& k : keys) k = rng();
  return keys;
}

// Interleaves the label classes so that any prefix holds both classes in
// proportion: each example is keyed by its fractional rank within its class.
std::vector<std::size_t> stratified_order(std::span<const LabeledExample> examples,
                                          std::uint64_t seed) {
  const auto keys = random_keys(examples.size(), seed);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].label ? 1 : 0].push_back(i);

  struct Ranked {
    double rank;
    int cls;
    std::size_t index;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(examples.size());
  for (int cls = 0; cls < 2; ++cls) {
    auto& members = by_class[static_cast<std::size_t>(cls)];
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
    });
    const double m = static_cast<double>(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
      ranked.push_back({(static_cast<double>(j) + 0.5) / m, cls, members[j]});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.cls < b.cls;
  });
  std::vector<std::size_t> order;
  order.reserve(ranked.size());
  for (const auto& r : ranked) order.push_back(r.index);
  return order;
}

}  // namespace

std::string_view to_string(ExampleSource source) {
  switch (source) {
    case ExampleSource::kParticipant: return "participant";
    case ExampleSource::kSyntheticNegative: return "synthetic_negative";
    case ExampleSource::kOracle: return "oracle";
  }
  return "unknown";
}

ExampleSource example_source_from_string(std::string_view text) {
  if (text == "participant") return ExampleSource::kParticipant;
  if (text == "synthetic_negative") return ExampleSource::kSyntheticNegative;
  if (text == "oracle") return ExampleSource::kOracle;
  throw Error(ErrorCode::kMalformedDocument, "unknown example source '" + std::string(text) + "'");
}

bool oracle_label(const FeatureVector& f, std::size_t group_size, const OracleThresholds& t) {
  const bool tight_line = f[Feature::kError] <= t.line_error_px && group_size >= 3;
  const bool separated_cluster =
      f[Feature::kCentroidRatio] >= t.centroid_ratio && f[Feature::kCvxOverlap] == 0.0;
  const bool isolated = f[Feature::kYSep] >= t.y_sep_px;
  return tight_line || separated_cluster || isolated;
}

std::vector<LabeledExample> oracle_dataset(std::size_t chart_count, std::uint64_t seed,
                                           int chart_size, const OracleThresholds& thresholds) {
  std::vector<LabeledExample> out;
  const auto masks = candidate_masks(static_cast<std::size_t>(std::max(chart_size, 0)));
  out.reserve(chart_count * masks.size());
  for (std::size_t c = 0; c < chart_count; ++c) {
    const Chart chart = generate_random_chart(chart_size, seed + c);
    const PixelLayout px = layout(chart);
    const std::string id = "oracle-" + std::to_string(seed) + "-" + std::to_string(c);
    for (GroupMask mask : masks) {
      LabeledExample ex;
      ex.chart_id = id;
      ex.group = group_of(chart, mask);
      ex.chart_size = chart.size();
      ex.features = feature_vector(px, mask, chart.plot);
      ex.label = oracle_label(ex.features, ex.group.size(), thresholds);
      ex.source = ExampleSource::kOracle;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<LabeledExample> oracle_examples(std::size_t count, std::uint64_t seed, int chart_size,
                                            const OracleThresholds& thresholds) {
  const std::size_t per_chart = candidate_masks(static_cast<std::size_t>(std::max(chart_size, 0))).size();
  if (per_chart == 0) throw Error(ErrorCode::kInvalidArgument, "chart_size must be >= 3");
  auto out = oracle_dataset((count + per_chart - 1) / per_chart, seed, chart_size, thresholds);
  out.resize(count);
  return out;
}

std::vector<LabeledExample> participant_examples(const ChartsById& charts,
                                                 const SelectionsByChart& selections) {
  std::vector<LabeledExample> out;
  for (const auto& [id, groups] : selections) {
    auto it = charts.find(id);
    if (it == charts.end()) throw Error(ErrorCode::kNotFound, "no chart with id '" + id + "'");
    const Chart& chart = it->second;
    const PixelLayout px = layout(chart);
    std::set<Group> distinct(groups.begin(), groups.end());
    for (const Group& g : distinct) {
      validate_group(chart, g, "/selections/" + id);
      LabeledExample ex;
      ex.chart_id = id;
      ex.group = g;
      ex.chart_size = chart.size();
      ex.features = feature_vector(px, mask_of(chart, g), chart.plot);
      ex.label = true;
      ex.source = ExampleSource::kParticipant;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<LabeledExample> synthesize_negatives(const ChartsById& charts,
                                                 const SelectionsByChart& selections) {
  // Mean selected-group error, per chart and overall.
  std::map<std::string, double> chart_mean;
  double global_sum = 0.0;
  std::size_t global_count = 0;
  for (const auto& [id, groups] : selections) {
    auto it = charts.find(id);
    if (it == charts.end()) throw Error(ErrorCode::kNotFound, "no chart with id '" + id + "'");
    const std::set<Group> distinct(groups.begin(), groups.end());
    if (distinct.empty()) continue;
    const PixelLayout px = layout(it->second);
    double sum = 0.0;
    for (const Group& g : distinct) {
      validate_group(it->second, g, "/selections/" + id);
      sum += feature_vector(px, mask_of(it->second, g), it->second.plot)[Feature::kError];
    }
    chart_mean[id] = sum / static_cast<double>(distinct.size());
    global_sum += sum;
    global_count += distinct.size();
  }
  if (global_count == 0)
    throw Error(ErrorCode::kInvalidArgument, "synthesize_negatives: no selected groups at all");
  const double global_mean = global_sum / static_cast<double>(global_count);

  std::vector<LabeledExample> out;
  for (const auto& [id, chart] : charts) {
    const PixelLayout px = layout(chart);
    std::set<GroupMask> selected;
    if (auto it = selections.find(id); it != selections.end()) {
      for (const Group& g : it->second) selected.insert(mask_of(chart, g));
    }
    const auto mean_it = chart_mean.find(id);
    const double mean_error = mean_it != chart_mean.end() ? mean_it->second : global_mean;

    for (GroupMask mask : candidate_masks(chart.size())) {
      if (selected.contains(mask)) continue;
      const FeatureVector fv = feature_vector(px, mask, chart.plot);
      if (!(fv[Feature::kError] > mean_error)) continue;
      if (fv[Feature::kCvxOverlap] != 0.0) continue;
      LabeledExample ex;
      ex.chart_id = id;
      ex.group = group_of(chart, mask);
      ex.chart_size = chart.size();
      ex.features = fv;
      ex.label = false;
      ex.source = ExampleSource::kSyntheticNegative;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

SelectionsByChart read_selections_csv(std::istream& in) {
  SelectionsByChart out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 3)
      throw Error(ErrorCode::kMalformedDocument, "expected 3 columns", "row " + std::to_string(row));
    if (row == 1 && trim(cols[0]) == "chart_id") continue;
    std::vector<std::string> members;
    for (const auto& m : split(cols[2], ';')) {
      if (auto t = trim(m); !t.empty()) members.push_back(t);
    }
    out[trim(cols[0])].emplace_back(std::move(members));
  }
  return out;
}

ChartsById load_charts_dir(const std::string& dir, const SelectionsByChart& selections) {
  ChartsById out;
  for (const auto& [id, groups] : selections) {
    const std::string path = dir + "/" + id + ".json";
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::kNotFound, "cannot open chart file " + path);
    out.emplace(id, chart_from_json(read_json(f)));
  }
  return out;
}

DatasetSplit split_dataset(std::span<const LabeledExample> examples, std::uint64_t seed) {
  if (examples.size() < 10)
    throw Error(ErrorCode::kInvalidArgument, "split_dataset needs at least 10 examples");
  const auto order = stratified_order(examples, seed);
  const std::size_t n = examples.size();
  const std::size_t n_train = n * 7 / 10;
  const std::size_t n_test = n * 2 / 10;
  DatasetSplit out;
  for (std::size_t i = 0; i < n; ++i) {
    auto& part = i < n_train ? out.train : (i < n_train + n_test ? out.test : out.holdout);
    part.push_back(examples[order[i]]);
  }
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const LabeledExample> examples, std::size_t k,
                                          std::uint64_t seed) {
  if (k < 2 || examples.size() < k)
    throw Error(ErrorCode::kInvalidArgument, "need k >= 2 and at least k examples");
  const auto order = stratified_order(examples, seed);
  std::vector<std::size_t> fold(examples.size());
  // Round-robin over the interleaved order keeps each fold stratified.
  for (std::size_t i = 0; i < order.size(); ++i) fold[order[i]] = i % k;
  return fold;
}

void write_examples_csv(std::ostream& out, std::span<const LabeledExample> examples) {
  out << "chart_id,members,chart_size";
  for (Feature f : kAllFeatures) out << ',' << feature_name(f);
  out << ",label,source\n";
  for (const auto& ex : examples) {
    out << ex.chart_id << ',';
    for (std::size_t i = 0; i < ex.group.size(); ++i) out << (i ? ";" : "") << ex.group.members()[i];
    out << ',' << ex.chart_size;
    for (Feature f : kAllFeatures) out << ',' << format_double(ex.features[f]);
    out << ',' << (ex.label ? 1 : 0) << ',' << to_string(ex.source) << '\n';
  }
}

std::vector<LabeledExample> read_examples_csv(std::istream& in) {
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t row = 0;
  constexpr std::size_t kCols = 3 + kNumFeatures + 2;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    const std::string where = "row " + std::to_string(row);
    if (cols.size() != kCols) throw Error(ErrorCode::kMalformedDocument, "expected " + std::to_string(kCols) + " columns", where);
    if (row == 1 && trim(cols[0]) == "chart_id") continue;
    LabeledExample ex;
    ex.chart_id = trim(cols[0]);
    ex.group = Group(split(cols[1], ';'));
    ex.chart_size = static_cast<std::size_t>(parse_double(trim(cols[2]), where));
    for (std::size_t i = 0; i < kNumFeatures; ++i) ex.features.values[i] = parse_double(trim(cols[3 + i]), where);
    const std::string label = trim(cols[3 + kNumFeatures]);
    if (label != "0" && label != "1") throw Error(ErrorCode::kMalformedDocument, "label must be 0 or 1", where);
    ex.label = label == "1";
    ex.source = example_source_from_string(trim(cols[4 + kNumFeatures]));
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace groupsense
