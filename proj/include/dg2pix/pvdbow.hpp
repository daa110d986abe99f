#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dg2pix/common.hpp"

namespace dg2pix {

struct WlDocument;

struct PvDbowOptions {
  std::size_t dimensions = 128;
  int epochs = 1000;
  double learning_rate = 0.02;
  int negatives = 5;
  // Frequent-word downsampling threshold t: an occurrence of a word with
  // corpus share f is kept with probability (sqrt(f/t) + 1) t / f. 0 disables.
  double sample = 0.0;
  std::uint64_t seed = 42;
  // serial is bit-reproducible; parallel shards documents across threads
  // with lock-free (Hogwild) updates of shared word vectors and is not.
  Exec exec = Exec::serial;
  // Records the expected negative-sampling loss after every epoch. Costs
  // docs x vocabulary x dimensions per epoch.
  bool track_loss = false;
};

/// Document vectors and output word vectors, row-major.
class PvDbowModel {
 public:
  PvDbowModel() = default;
  /// Both tables uniform in [-0.5/d, 0.5/d].
  PvDbowModel(std::size_t docs, std::size_t words, std::size_t dimensions, std::uint64_t seed);

  std::size_t dimensions() const { return dims_; }
  std::size_t doc_count() const { return dims_ ? docs_.size() / dims_ : 0; }
  std::size_t word_count() const { return dims_ ? words_.size() / dims_ : 0; }

  std::span<double> doc(std::size_t i) { return {docs_.data() + i * dims_, dims_}; }
  std::span<const double> doc(std::size_t i) const { return {docs_.data() + i * dims_, dims_}; }
  std::span<double> word(std::size_t i) { return {words_.data() + i * dims_, dims_}; }
  std::span<const double> word(std::size_t i) const { return {words_.data() + i * dims_, dims_}; }

  std::vector<double>& doc_table() { return docs_; }
  const std::vector<double>& doc_table() const { return docs_; }
  std::vector<double>& word_table() { return words_; }
  const std::vector<double>& word_table() const { return words_; }

 private:
  std::size_t dims_ = 0;
  std::vector<double> docs_;
  std::vector<double> words_;
};

/// Draws noise words proportional to frequency^0.75.
class NoiseDistribution {
 public:
  explicit NoiseDistribution(std::span<const std::uint64_t> frequencies);
  std::uint32_t sample(Rng& rng) const;
  double probability(std::uint32_t word) const { return probability_[word]; }
  std::size_t size() const { return probability_.size(); }

 private:
  std::vector<double> probability_;
  std::vector<double> cumulative_;
};

/// One (document, word) training pair with its drawn noise words.
struct NegativeSample {
  std::uint32_t doc = 0;
  std::uint32_t word = 0;
  std::vector<std::uint32_t> noise;
};

/// Sum over samples of -log s(v.u_w) - sum_noise log s(-v.u_n).
double negative_sampling_loss(const PvDbowModel& model, std::span<const NegativeSample> samples);

struct PvDbowGradient {
  std::vector<double> doc;   // same layout as the doc table
  std::vector<double> word;  // same layout as the word table
};

/// Analytic gradient of negative_sampling_loss.
PvDbowGradient negative_sampling_gradient(const PvDbowModel& model, std::span<const NegativeSample> samples);

/// Loss with the noise term replaced by its expectation under `noise`
/// (noise draws equal to the target word are skipped, as in training).
double expected_negative_sampling_loss(const PvDbowModel& model, const std::vector<std::vector<std::uint32_t>>& docs,
                                       const NoiseDistribution& noise, int negatives);

struct PvDbowResult {
  PvDbowModel model;
  std::vector<double> epoch_loss;  // empty unless track_loss
};

/// PV-DBOW with negative sampling: per epoch, one SGD step per (doc, word)
/// occurrence; the learning rate falls linearly to lr/100 at the last epoch.
PvDbowResult train_pvdbow(const std::vector<std::vector<std::uint32_t>>& docs,
                          std::span<const std::uint64_t> word_frequencies, const PvDbowOptions& options);

/// Builds a vocabulary over `docs` and trains on it.
PvDbowResult train_pvdbow(std::span<const WlDocument> docs, const PvDbowOptions& options);

}  // namespace dg2pix
