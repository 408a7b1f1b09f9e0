#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "groupsense/dataset.hpp"
#include "groupsense/error.hpp"
#include "groupsense/shap.hpp"
#include "groupsense/training.hpp"

using namespace groupsense;

namespace {

std::vector<FeatureVector> random_rows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<FeatureVector> rows(n);
  for (auto& r : rows) {
    for (double& v : r.values) v = u(rng);
  }
  return rows;
}

// Shapley values as the mean marginal contribution over all 8! orderings.
std::array<double, kNumFeatures> by_orderings(const ScoreFunction& f, const FeatureVector& x,
                                              const std::vector<FeatureVector>& bg) {
  auto value = [&](const std::array<bool, kNumFeatures>& in) {
    double s = 0;
    for (const auto& b : bg) {
      FeatureVector row = b;
      for (std::size_t j = 0; j < kNumFeatures; ++j) {
        if (in[j]) row.values[j] = x.values[j];
      }
      s += f(row);
    }
    return s / static_cast<double>(bg.size());
  };
  std::array<int, kNumFeatures> order;
  std::iota(order.begin(), order.end(), 0);
  std::array<double, kNumFeatures> phi{};
  double count = 0;
  do {
    std::array<bool, kNumFeatures> in{};
    double prev = value(in);
    for (int j : order) {
      in[static_cast<std::size_t>(j)] = true;
      const double cur = value(in);
      phi[static_cast<std::size_t>(j)] += cur - prev;
      prev = cur;
    }
    count += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

}  // namespace

TEST_CASE("a constant model attributes nothing") {
  const auto bg = random_rows(10, 1);
  const auto e = shap_exact([](const FeatureVector&) { return 0.7; }, bg[0], bg);
  for (double p : e.phi) CHECK(p == doctest::Approx(0.0));
  CHECK(e.base_value == doctest::Approx(0.7));
  CHECK(e.prediction == doctest::Approx(0.7));
}

TEST_CASE("a single-feature model puts the whole difference on that feature") {
  const auto bg = random_rows(25, 2);
  const auto x = random_rows(1, 3)[0];
  const ScoreFunction f = [](const FeatureVector& v) { return std::tanh(v[Feature::kYSep] / 5); };
  const auto e = shap_exact(f, x, bg);
  CHECK(e[Feature::kYSep] == doctest::Approx(e.prediction - e.base_value).epsilon(1e-12));
  for (Feature g : kAllFeatures) {
    if (g != Feature::kYSep) CHECK(e[g] == 0.0);
  }
}

TEST_CASE("a linear model has closed-form attributions") {
  const auto bg = random_rows(30, 4);
  const auto x = random_rows(1, 5)[0];
  const std::array<double, kNumFeatures> w = {0.5, -1, 2, 0, 0.25, 3, -0.5, 1};
  const ScoreFunction f = [&](const FeatureVector& v) {
    double s = 0;
    for (std::size_t j = 0; j < kNumFeatures; ++j) s += w[j] * v.values[j];
    return s;
  };
  const auto e = shap_exact(f, x, bg);
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    double mean = 0;
    for (const auto& b : bg) mean += b.values[j] / static_cast<double>(bg.size());
    CHECK(e.phi[j] == doctest::Approx(w[j] * (x.values[j] - mean)).epsilon(1e-9));
  }
}

TEST_CASE("exact enumeration agrees with the ordering average") {
  const auto bg = random_rows(6, 8);
  const ScoreFunction f = [](const FeatureVector& v) {
    return v[Feature::kError] < 5 ? v[Feature::kXSep] * v[Feature::kYSep] : std::sqrt(v[Feature::kCentroidRatio]);
  };
  for (std::uint64_t s = 0; s < 2; ++s) {
    const auto x = random_rows(1, 100 + s)[0];
    const auto ours = shap_exact(f, x, bg);
    const auto ref = by_orderings(f, x, bg);
    for (std::size_t j = 0; j < kNumFeatures; ++j) CHECK(ours.phi[j] == doctest::Approx(ref[j]).epsilon(1e-9));
  }
}

TEST_CASE("symmetric features receive equal attributions") {
  const auto bg = random_rows(20, 9);
  auto x = random_rows(1, 10)[0];
  x[Feature::kXSep] = x[Feature::kYSep];
  auto sym_bg = bg;
  for (auto& b : sym_bg) b[Feature::kXSep] = b[Feature::kYSep];
  const ScoreFunction f = [](const FeatureVector& v) {
    return std::max(v[Feature::kXSep], v[Feature::kYSep]) + v[Feature::kXSep] * v[Feature::kYSep];
  };
  // The function is symmetric in the two features, and they match in every row.
  const auto e = shap_exact(f, x, sym_bg);
  CHECK(e[Feature::kXSep] == doctest::Approx(e[Feature::kYSep]).epsilon(1e-12));
}

TEST_CASE("efficiency holds for trained models of every kind") {
  const auto ex = oracle_examples(1500, 40);
  std::vector<FeatureVector> bg;
  for (std::size_t i = 0; i < 30; ++i) bg.push_back(ex[i * 7].features);
  for (ModelKind kind : {ModelKind::kTree, ModelKind::kLogistic, ModelKind::kCascade, ModelKind::kSizeRouted}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.policy = slope_free_features();
    const GroupingModel m = fit_model(spec, ex);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& e = ex[i * 31];
      const auto s = shap_exact(m, e.features, e.group_size(), e.chart_size, bg);
      const double sum = std::accumulate(s.phi.begin(), s.phi.end(), 0.0);
      CHECK(s.base_value + sum == doctest::Approx(s.prediction).epsilon(1e-9));
      // Features the model never reads get nothing.
      for (Feature f : kAllFeatures) {
        if (!m.features_read().contains(f)) CHECK(std::abs(s[f]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("invalid inputs") {
  const std::vector<FeatureVector> empty;
  CHECK_THROWS_AS(shap_exact([](const FeatureVector&) { return 0.0; }, FeatureVector{}, empty), Error);
  CHECK_THROWS_AS(shapley_values(13, [](std::uint32_t) { return 0.0; }), Error);
  const auto phi = shapley_values(3, [](std::uint32_t s) { return s == 7 ? 1.0 : 0.0; });
  for (double p : phi) CHECK(p == doctest::Approx(1.0 / 3.0));
}
