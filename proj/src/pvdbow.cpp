#include "dg2pix/pvdbow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <omp.h>

#include "dg2pix/embed.hpp"

namespace dg2pix {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double dot_raw(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

// One SGD step for a (doc, word) pair. Word vectors are updated with the
// pre-step doc vector; the doc vector receives the accumulated gradient last.
void sgd_step(double* doc, PvDbowModel& model, std::uint32_t word, const NoiseDistribution& noise, int negatives,
              double alpha, Rng& rng, std::vector<double>& accum) {
  const std::size_t d = model.dimensions();
  std::fill(accum.begin(), accum.end(), 0.0);
  for (int k = 0; k <= negatives; ++k) {
    std::uint32_t target;
    double label;
    if (k == 0) {
      target = word;
      label = 1.0;
    } else {
      target = noise.sample(rng);
      if (target == word) continue;
      label = 0.0;
    }
    double* u = model.word(target).data();
    const double g = (label - sigmoid(dot_raw(doc, u, d))) * alpha;
    for (std::size_t i = 0; i < d; ++i) accum[i] += g * u[i];
    for (std::size_t i = 0; i < d; ++i) u[i] += g * doc[i];
  }
  for (std::size_t i = 0; i < d; ++i) doc[i] += accum[i];
}

}  // namespace

PvDbowModel::PvDbowModel(std::size_t docs, std::size_t words, std::size_t dimensions, std::uint64_t seed)
    : dims_(dimensions), docs_(docs * dimensions), words_(words * dimensions) {
  Rng rng(seed);
  const double half = 0.5 / static_cast<double>(dimensions);
  for (auto& x : docs_) x = rng.uniform(-half, half);
}

NoiseDistribution::NoiseDistribution(std::span<const std::uint64_t> frequencies) {
  if (frequencies.empty()) throw Error("noise distribution needs a non-empty vocabulary");
  probability_.resize(frequencies.size());
  double total = 0.0;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    probability_[i] = std::pow(static_cast<double>(frequencies[i]), 0.75);
    total += probability_[i];
  }
  cumulative_.resize(frequencies.size());
  double run = 0.0;
  for (std::size_t i = 0; i < probability_.size(); ++i) {
    probability_[i] /= total;
    run += probability_[i];
    cumulative_[i] = run;
  }
  cumulative_.back() = 1.0;
}

std::uint32_t NoiseDistribution::sample(Rng& rng) const {
  const double r = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  return static_cast<std::uint32_t>(it - cumulative_.begin());
}

double negative_sampling_loss(const PvDbowModel& model, std::span<const NegativeSample> samples) {
  const std::size_t d = model.dimensions();
  double loss = 0.0;
  for (const auto& s : samples) {
    const double* v = model.doc(s.doc).data();
    loss -= log_sigmoid(dot_raw(v, model.word(s.word).data(), d));
    for (auto n : s.noise) loss -= log_sigmoid(-dot_raw(v, model.word(n).data(), d));
  }
  return loss;
}

PvDbowGradient negative_sampling_gradient(const PvDbowModel& model, std::span<const NegativeSample> samples) {
  const std::size_t d = model.dimensions();
  PvDbowGradient grad{std::vector<double>(model.doc_table().size(), 0.0),
                      std::vector<double>(model.word_table().size(), 0.0)};
  for (const auto& s : samples) {
    const double* v = model.doc(s.doc).data();
    double* gv = grad.doc.data() + s.doc * d;
    auto add_term = [&](std::uint32_t w, double coeff) {
      const double* u = model.word(w).data();
      double* gu = grad.word.data() + w * d;
      for (std::size_t i = 0; i < d; ++i) {
        gv[i] += coeff * u[i];
        gu[i] += coeff * v[i];
      }
    };
    // d/dx [-log s(x)] = s(x) - 1 ; d/dx [-log s(-x)] = s(x)
    add_term(s.word, sigmoid(dot_raw(v, model.word(s.word).data(), d)) - 1.0);
    for (auto n : s.noise) add_term(n, sigmoid(dot_raw(v, model.word(n).data(), d)));
  }
  return grad;
}

double expected_negative_sampling_loss(const PvDbowModel& model, const std::vector<std::vector<std::uint32_t>>& docs,
                                       const NoiseDistribution& noise, int negatives) {
  const std::size_t d = model.dimensions();
  const std::size_t vocab = model.word_count();
  std::vector<double> neg_term(vocab);
  double loss = 0.0;
  for (std::size_t doc = 0; doc < docs.size(); ++doc) {
    const double* v = model.doc(doc).data();
    double all = 0.0;
    for (std::size_t w = 0; w < vocab; ++w) {
      neg_term[w] = noise.probability(static_cast<std::uint32_t>(w)) * log_sigmoid(-dot_raw(v, model.word(w).data(), d));
      all += neg_term[w];
    }
    for (auto w : docs[doc]) {
      loss -= log_sigmoid(dot_raw(v, model.word(w).data(), d));
      loss -= negatives * (all - neg_term[w]);
    }
  }
  return loss;
}

PvDbowResult train_pvdbow(const std::vector<std::vector<std::uint32_t>>& docs,
                          std::span<const std::uint64_t> word_frequencies, const PvDbowOptions& options) {
  if (options.dimensions == 0) throw Error("embedding dimension must be at least 1");
  if (options.epochs < 0) throw Error("epochs must be non-negative");
  if (options.negatives < 0) throw Error("negatives must be non-negative");
  if (docs.empty()) throw Error("no documents to train on");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].empty()) throw Error("document " + std::to_string(i) + " is empty");
    for (auto w : docs[i])
      if (w >= word_frequencies.size()) throw Error("word id out of vocabulary range");
  }

  PvDbowResult result{PvDbowModel(docs.size(), word_frequencies.size(), options.dimensions, options.seed), {}};
  PvDbowModel& model = result.model;
  const NoiseDistribution noise(word_frequencies);
  const double lr_end = options.learning_rate / 100.0;
  const std::size_t d = options.dimensions;

  // Occurrences of word w survive with probability (sqrt(f/t) + 1) t / f,
  // t = sample * total occurrences.
  std::vector<double> keep(word_frequencies.size(), 1.0);
  if (options.sample > 0) {
    const double total = std::accumulate(word_frequencies.begin(), word_frequencies.end(), 0.0);
    const double t = options.sample * total;
    for (std::size_t w = 0; w < keep.size(); ++w) {
      const double f = static_cast<double>(word_frequencies[w]);
      if (f > 0) keep[w] = std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
    }
  }

  std::vector<std::uint32_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(mix_seed(options.seed, 1));

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double progress = options.epochs > 1 ? static_cast<double>(epoch) / (options.epochs - 1) : 0.0;
    const double alpha = options.learning_rate + (lr_end - options.learning_rate) * progress;

    if (options.exec == Exec::serial) {
      rng.shuffle(order.begin(), order.end());
      std::vector<double> accum(d);
      for (auto doc : order)
        for (auto w : docs[doc])
          if (keep[w] >= 1.0 || rng.uniform() < keep[w])
            sgd_step(model.doc(doc).data(), model, w, noise, options.negatives, alpha, rng, accum);
    } else {
      rng.shuffle(order.begin(), order.end());
      const std::uint64_t epoch_seed = rng.next();
      const auto n = static_cast<std::int64_t>(order.size());
#pragma omp parallel
      {
        Rng local(mix_seed(epoch_seed, static_cast<std::uint64_t>(omp_get_thread_num())));
        std::vector<double> accum(d);
#pragma omp for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < n; ++i) {
          const auto doc = order[i];
          for (auto w : docs[doc])
            if (keep[w] >= 1.0 || local.uniform() < keep[w])
              sgd_step(model.doc(doc).data(), model, w, noise, options.negatives, alpha, local, accum);
        }
      }
    }

    if (options.track_loss)
      result.epoch_loss.push_back(expected_negative_sampling_loss(model, docs, noise, options.negatives));
  }
  return result;
}

PvDbowResult train_pvdbow(std::span<const WlDocument> docs, const PvDbowOptions& options) {
  const Vocabulary vocab = Vocabulary::build(docs);
  std::vector<std::vector<std::uint32_t>> encoded;
  encoded.reserve(docs.size());
  for (const auto& doc : docs) encoded.push_back(vocab.encode(doc));
  return train_pvdbow(encoded, vocab.frequencies(), options);
}

}  // namespace dg2pix
