#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hfm/dataset.hpp"
#include "hfm/rng.hpp"

namespace hfm {

/// Knobs for random synthetic datasets used by the benchmark and
/// validation harnesses.
struct SynthSpec {
  std::size_t n = 100;
  std::size_t n_x = 4;
  std::size_t n_a = 2;
  std::vector<int> cardinalities;  // per attribute; binary when empty
  int n_classes = 2;
  bool with_predictions = false;
  double prediction_flip_rate = 0.1;
};

/// Uniform random dataset: features in [0,1], every attribute code in
/// 1..card present at least once, labels uniform over classes, optional
/// predictions that flip a fraction of the labels. Deterministic in the
/// seed.
inline Dataset random_dataset(const SynthSpec& spec, std::uint64_t seed) {
  auto gen = make_stream(seed, 0x53594e54u, 0);  // dedicated synth stream

  std::vector<int> cards = spec.cardinalities;
  cards.resize(spec.n_a, 2);

  std::vector<std::vector<double>> features(spec.n, std::vector<double>(spec.n_x));
  std::vector<std::vector<int>> sensitive(spec.n, std::vector<int>(spec.n_a));
  std::vector<int> labels(spec.n);

  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t k = 0; k < spec.n_x; ++k) features[i][k] = uniform01(gen);
    for (std::size_t a = 0; a < spec.n_a; ++a) {
      const int card = cards[a];
      // First `card` rows pin one occurrence of every code.
      if (i < static_cast<std::size_t>(card))
        sensitive[i][a] = static_cast<int>(i) + 1;
      else
        sensitive[i][a] = 1 + static_cast<int>(uniform01(gen) * card);
      if (sensitive[i][a] > card) sensitive[i][a] = card;
    }
    labels[i] = static_cast<int>(uniform01(gen) * spec.n_classes);
    if (labels[i] >= spec.n_classes) labels[i] = spec.n_classes - 1;
  }
  // Pin both label classes so n_classes is inferred as requested.
  if (spec.n >= 2 && spec.n_classes >= 2) {
    labels[0] = 0;
    labels[1] = spec.n_classes - 1;
  }

  std::optional<std::vector<int>> predictions;
  if (spec.with_predictions) {
    std::vector<int> preds = labels;
    for (std::size_t i = 0; i < spec.n; ++i) {
      if (uniform01(gen) < spec.prediction_flip_rate) {
        const int shift = 1 + static_cast<int>(uniform01(gen) * (spec.n_classes - 1));
        preds[i] = (labels[i] + shift) % spec.n_classes;
      }
    }
    predictions = std::move(preds);
  }
  return build_dataset(features, sensitive, labels, predictions);
}

}  // namespace hfm
