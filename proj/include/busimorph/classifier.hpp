#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "busimorph/errors.hpp"
#include "busimorph/rng.hpp"

namespace busimorph {

/// Row-major dense matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class Optimizer { SGD, Adam };
enum class RunMode { Train, Infer };

struct TrainConfig {
  int epochs = 5;
  int batch_size = 32;
  double learning_rate = 0.001;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 42;
};

struct EpochStats {
  double train_loss = 0;
  double train_acc = 0;
  double val_loss = 0;
  double val_acc = 0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.99;
inline constexpr double kVarFloor = 1e-8;
inline constexpr double kProbClamp = 1e-12;

/// Batch-normalization front end followed by a 128-unit ReLU layer and a
/// 3-way softmax output.
struct ClassifierModel {
  int input_dim = 0;
  int hidden = 128;
  int classes = 3;

  std::vector<double> bn_gamma, bn_beta;
  std::vector<double> bn_running_mean, bn_running_var;
  std::vector<double> w1, b1;  // w1 is input_dim x hidden
  std::vector<double> w2, b2;  // w2 is hidden x classes

  std::uint64_t seed = 0;
  int epochs_trained = 0;

  /// Total stored parameters, counting the BN running statistics the same
  /// way the dense weights are counted.
  std::size_t parameter_count() const {
    return bn_gamma.size() + bn_beta.size() + bn_running_mean.size() +
           bn_running_var.size() + w1.size() + b1.size() + w2.size() +
           b2.size();
  }
};

/// Fan-in-scaled uniform weight init, biases zero, BN at identity. The BN
/// running statistics are folded to the training data by train().
inline ClassifierModel init_model(int input_dim, std::uint64_t seed,
                                  int hidden = 128, int classes = 3) {
  if (input_dim <= 0) throw InternalError("init_model: input_dim must be positive");
  ClassifierModel m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.classes = classes;
  m.seed = seed;
  m.bn_gamma.assign(input_dim, 1.0);
  m.bn_beta.assign(input_dim, 0.0);
  m.bn_running_mean.assign(input_dim, 0.0);
  m.bn_running_var.assign(input_dim, 1.0);

  SplitMix64 rng(mix_seed(seed, 1));
  const double s1 = std::sqrt(1.0 / input_dim);
  m.w1.resize(static_cast<std::size_t>(input_dim) * hidden);
  for (double& w : m.w1) w = rng.next_in(-s1, s1);
  m.b1.assign(hidden, 0.0);
  const double s2 = std::sqrt(1.0 / hidden);
  m.w2.resize(static_cast<std::size_t>(hidden) * classes);
  for (double& w : m.w2) w = rng.next_in(-s2, s2);
  m.b2.assign(classes, 0.0);
  return m;
}

namespace detail {

/// Intermediates captured by a forward pass, reused by the backward pass.
struct ForwardCache {
  std::vector<double> mean, invstd;  // statistics actually used to normalize
  Matrix xhat;                       // normalized input
  Matrix z1;                         // pre-ReLU hidden
  Matrix h;                          // post-ReLU hidden
  Matrix probs;
};

inline void check_finite_inputs(const Matrix& x) {
  for (double v : x.data) {
    if (!std::isfinite(v)) {
      throw DataError("non-finite feature value in classifier input");
    }
  }
}

/// Forward pass. `batch_stats` selects normalization by the batch's own
/// moments (training) versus the stored running moments (inference); the
/// running moments themselves are never touched here.
inline ForwardCache forward_cache(const ClassifierModel& m, const Matrix& x,
                                  bool batch_stats) {
  if (x.cols != m.input_dim) {
    throw SchemaMismatch("feature width " + std::to_string(x.cols) +
                         " does not match model input " +
                         std::to_string(m.input_dim));
  }
  if (batch_stats && x.rows < 2) {
    throw BatchTooSmall("training batch needs at least 2 rows");
  }
  check_finite_inputs(x);

  const int n = x.rows, d = m.input_dim;
  ForwardCache c;
  c.mean.assign(d, 0.0);
  c.invstd.assign(d, 0.0);
  if (batch_stats) {
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += x.at(i, j);
      c.mean[j] = s / n;
    }
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int i = 0; i < n; ++i) {
        const double dv = x.at(i, j) - c.mean[j];
        s += dv * dv;
      }
      c.invstd[j] = 1.0 / std::sqrt(s / n + kBnEpsilon);
    }
  } else {
    for (int j = 0; j < d; ++j) {
      c.mean[j] = m.bn_running_mean[j];
      c.invstd[j] = 1.0 / std::sqrt(m.bn_running_var[j] + kBnEpsilon);
    }
  }

  c.xhat = Matrix(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      c.xhat.at(i, j) = (x.at(i, j) - c.mean[j]) * c.invstd[j];
    }
  }

  c.z1 = Matrix(n, m.hidden);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m.hidden; ++k) {
      double s = m.b1[k];
      for (int j = 0; j < d; ++j) {
        const double y = m.bn_gamma[j] * c.xhat.at(i, j) + m.bn_beta[j];
        s += y * m.w1[static_cast<std::size_t>(j) * m.hidden + k];
      }
      c.z1.at(i, k) = s;
    }
  }
  c.h = c.z1;
  for (double& v : c.h.data) v = v > 0 ? v : 0.0;

  c.probs = Matrix(n, m.classes);
  for (int i = 0; i < n; ++i) {
    double mx = -1e300;
    std::vector<double> logits(m.classes);
    for (int o = 0; o < m.classes; ++o) {
      double s = m.b2[o];
      for (int k = 0; k < m.hidden; ++k) {
        s += c.h.at(i, k) * m.w2[static_cast<std::size_t>(k) * m.classes + o];
      }
      logits[o] = s;
      mx = std::max(mx, s);
    }
    double z = 0;
    for (int o = 0; o < m.classes; ++o) {
      const double e = std::exp(logits[o] - mx);
      c.probs.at(i, o) = e;
      z += e;
    }
    for (int o = 0; o < m.classes; ++o) c.probs.at(i, o) /= z;
  }
  return c;
}

inline void update_running_stats(ClassifierModel& m, const ForwardCache& c,
                                 int batch_rows) {
  const int d = m.input_dim;
  for (int j = 0; j < d; ++j) {
    const double var = 1.0 / (c.invstd[j] * c.invstd[j]) - kBnEpsilon;
    m.bn_running_mean[j] =
        kBnMomentum * m.bn_running_mean[j] + (1.0 - kBnMomentum) * c.mean[j];
    m.bn_running_var[j] = std::max(
        kVarFloor,
        kBnMomentum * m.bn_running_var[j] + (1.0 - kBnMomentum) * var);
  }
  (void)batch_rows;
}

}  // namespace detail

/// Class probabilities for a batch. Train mode normalizes by batch moments
/// and updates the model's running statistics; Infer mode is pure.
inline Matrix forward(ClassifierModel& m, const Matrix& x, RunMode mode) {
  detail::ForwardCache c = detail::forward_cache(m, x, mode == RunMode::Train);
  if (mode == RunMode::Train) detail::update_running_stats(m, c, x.rows);
  return std::move(c.probs);
}

inline Matrix forward_infer(const ClassifierModel& m, const Matrix& x) {
  return std::move(detail::forward_cache(m, x, false).probs);
}

/// Mean categorical cross-entropy, probabilities clamped at 1e-12.
inline double loss(const Matrix& probs, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(probs.rows) != labels.size()) {
    throw LengthMismatch("probability rows != label count");
  }
  double s = 0;
  for (int i = 0; i < probs.rows; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= probs.cols) throw UnknownClass("label out of range");
    s += -std::log(std::max(probs.at(i, y), kProbClamp));
  }
  return s / probs.rows;
}

inline std::vector<int> predict(const ClassifierModel& m, const Matrix& x) {
  const Matrix p = forward_infer(m, x);
  std::vector<int> out(p.rows);
  for (int i = 0; i < p.rows; ++i) {
    int best = 0;
    for (int o = 1; o < p.cols; ++o) {
      if (p.at(i, o) > p.at(i, best)) best = o;
    }
    out[i] = best;
  }
  return out;
}

namespace detail {

/// Gradients for every trainable tensor, laid out like the model.
struct Gradients {
  std::vector<double> bn_gamma, bn_beta, w1, b1, w2, b2;
};

inline Gradients backward(const ClassifierModel& m, const Matrix& x,
                          const std::vector<int>& labels,
                          const ForwardCache& c) {
  const int n = x.rows, d = m.input_dim, hd = m.hidden, k = m.classes;
  Gradients g;
  g.bn_gamma.assign(d, 0.0);
  g.bn_beta.assign(d, 0.0);
  g.w1.assign(m.w1.size(), 0.0);
  g.b1.assign(hd, 0.0);
  g.w2.assign(m.w2.size(), 0.0);
  g.b2.assign(k, 0.0);

  // Softmax + cross-entropy: dL/dlogits = (p - onehot) / n
  Matrix dlogits = c.probs;
  for (int i = 0; i < n; ++i) {
    dlogits.at(i, labels[i]) -= 1.0;
    for (int o = 0; o < k; ++o) dlogits.at(i, o) /= n;
  }

  for (int kk = 0; kk < hd; ++kk) {
    for (int o = 0; o < k; ++o) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += c.h.at(i, kk) * dlogits.at(i, o);
      g.w2[static_cast<std::size_t>(kk) * k + o] = s;
    }
  }
  for (int o = 0; o < k; ++o) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += dlogits.at(i, o);
    g.b2[o] = s;
  }

  Matrix dz1(n, hd);
  for (int i = 0; i < n; ++i) {
    for (int kk = 0; kk < hd; ++kk) {
      if (c.z1.at(i, kk) <= 0) continue;
      double s = 0;
      for (int o = 0; o < k; ++o) {
        s += dlogits.at(i, o) * m.w2[static_cast<std::size_t>(kk) * k + o];
      }
      dz1.at(i, kk) = s;
    }
  }

  // The BN output y = gamma * xhat + beta feeds the first dense layer.
  for (int j = 0; j < d; ++j) {
    for (int kk = 0; kk < hd; ++kk) {
      double s = 0;
      for (int i = 0; i < n; ++i) {
        const double y = m.bn_gamma[j] * c.xhat.at(i, j) + m.bn_beta[j];
        s += y * dz1.at(i, kk);
      }
      g.w1[static_cast<std::size_t>(j) * hd + kk] = s;
    }
  }
  for (int kk = 0; kk < hd; ++kk) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += dz1.at(i, kk);
    g.b1[kk] = s;
  }

  for (int j = 0; j < d; ++j) {
    double dg = 0, db = 0;
    for (int i = 0; i < n; ++i) {
      double dy = 0;
      for (int kk = 0; kk < hd; ++kk) {
        dy += dz1.at(i, kk) * m.w1[static_cast<std::size_t>(j) * hd + kk];
      }
      dg += dy * c.xhat.at(i, j);
      db += dy;
    }
    g.bn_gamma[j] = dg;
    g.bn_beta[j] = db;
  }
  return g;
}

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
};

inline void apply_update(std::vector<double>& p, const std::vector<double>& g,
                         const TrainConfig& cfg, AdamState* adam) {
  if (cfg.optimizer == Optimizer::SGD) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * g[i];
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (adam->m.empty()) {
    adam->m.assign(p.size(), 0.0);
    adam->v.assign(p.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam->t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam->t));
  for (std::size_t i = 0; i < p.size(); ++i) {
    adam->m[i] = b1 * adam->m[i] + (1.0 - b1) * g[i];
    adam->v[i] = b2 * adam->v[i] + (1.0 - b2) * g[i] * g[i];
    const double mh = adam->m[i] / bc1;
    const double vh = adam->v[i] / bc2;
    p[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + eps);
  }
}

}  // namespace detail

/// Fits `model` in place. Features/labels are raw (unstandardized); the
/// training-set mean/variance are folded into the BN running statistics
/// before the first step. Deterministic for a fixed (data, config) pair.
inline TrainReport train(ClassifierModel& model, const Matrix& xtrain,
                         const std::vector<int>& ytrain, const Matrix& xval,
                         const std::vector<int>& yval, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw DataError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw DataError("batch size must be >= 1");
  if (cfg.batch_size < 2) {
    throw BatchTooSmall("batch size 1 leaves batch variance undefined");
  }
  if (!(cfg.learning_rate >= 0)) throw DataError("learning rate must be >= 0");
  if (static_cast<std::size_t>(xtrain.rows) != ytrain.size()) {
    throw LengthMismatch("training rows != training labels");
  }
  if (static_cast<std::size_t>(xval.rows) != yval.size()) {
    throw LengthMismatch("validation rows != validation labels");
  }

  std::vector<int> per_class(model.classes, 0);
  for (int y : ytrain) {
    if (y < 0 || y >= model.classes) throw UnknownClass("training label out of range");
    per_class[y] += 1;
  }
  for (int c = 0; c < model.classes; ++c) {
    if (per_class[c] == 1) {
      throw ClassTooSmall("class " + std::to_string(c) +
                          " has a single training sample");
    }
  }
  if (xtrain.rows < 2) throw ClassTooSmall("need at least 2 training samples");

  // Fold training-set standardization into the BN running statistics.
  const int n = xtrain.rows, d = model.input_dim;
  detail::check_finite_inputs(xtrain);
  for (int j = 0; j < d; ++j) {
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += xtrain.at(i, j);
    mean /= n;
    double var = 0;
    for (int i = 0; i < n; ++i) {
      const double dv = xtrain.at(i, j) - mean;
      var += dv * dv;
    }
    var /= n;
    model.bn_running_mean[j] = mean;
    model.bn_running_var[j] = std::max(var, kVarFloor);
  }

  detail::AdamState adam_g, adam_b, adam_w1, adam_b1, adam_w2, adam_b2;
  TrainReport report;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    SplitMix64 rng(mix_seed(cfg.seed, 2, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    // Batch boundaries; a trailing single row is folded into the previous
    // batch because train-mode normalization needs at least 2 rows.
    std::vector<std::pair<int, int>> batches;
    for (int at = 0; at < n; at += cfg.batch_size) {
      batches.emplace_back(at, std::min(at + cfg.batch_size, n));
    }
    if (batches.size() > 1 && batches.back().second - batches.back().first < 2) {
      batches[batches.size() - 2].second = batches.back().second;
      batches.pop_back();
    }

    double loss_sum = 0;
    int correct = 0;
    for (const auto& [b0, b1] : batches) {
      const int bs = b1 - b0;
      Matrix xb(bs, d);
      std::vector<int> yb(bs);
      for (int i = 0; i < bs; ++i) {
        for (int j = 0; j < d; ++j) xb.at(i, j) = xtrain.at(order[b0 + i], j);
        yb[i] = ytrain[order[b0 + i]];
      }

      detail::ForwardCache cache = detail::forward_cache(model, xb, true);
      const double batch_loss = loss(cache.probs, yb);
      if (!std::isfinite(batch_loss)) {
        throw NonFiniteLoss("training diverged at epoch " +
                            std::to_string(epoch + 1));
      }
      loss_sum += batch_loss * bs;
      for (int i = 0; i < bs; ++i) {
        int best = 0;
        for (int o = 1; o < model.classes; ++o) {
          if (cache.probs.at(i, o) > cache.probs.at(i, best)) best = o;
        }
        if (best == yb[i]) ++correct;
      }

      detail::Gradients g = detail::backward(model, xb, yb, cache);
      detail::update_running_stats(model, cache, bs);
      ++adam_g.t; ++adam_b.t; ++adam_w1.t; ++adam_b1.t; ++adam_w2.t; ++adam_b2.t;
      detail::apply_update(model.bn_gamma, g.bn_gamma, cfg, &adam_g);
      detail::apply_update(model.bn_beta, g.bn_beta, cfg, &adam_b);
      detail::apply_update(model.w1, g.w1, cfg, &adam_w1);
      detail::apply_update(model.b1, g.b1, cfg, &adam_b1);
      detail::apply_update(model.w2, g.w2, cfg, &adam_w2);
      detail::apply_update(model.b2, g.b2, cfg, &adam_b2);
    }

    EpochStats stats;
    stats.train_loss = loss_sum / n;
    stats.train_acc = static_cast<double>(correct) / n;
    if (xval.rows > 0) {
      const Matrix pv = forward_infer(model, xval);
      stats.val_loss = loss(pv, yval);
      if (!std::isfinite(stats.val_loss)) {
        throw NonFiniteLoss("validation loss diverged at epoch " +
                            std::to_string(epoch + 1));
      }
      int vc = 0;
      for (int i = 0; i < pv.rows; ++i) {
        int best = 0;
        for (int o = 1; o < pv.cols; ++o) {
          if (pv.at(i, o) > pv.at(i, best)) best = o;
        }
        if (best == yval[i]) ++vc;
      }
      stats.val_acc = static_cast<double>(vc) / pv.rows;
    }
    report.epochs.push_back(stats);
    model.epochs_trained += 1;
  }
  return report;
}

/// Central-difference check of the analytic gradients on a random parameter
/// subset; returns the maximum relative error observed.
inline double gradient_check(const ClassifierModel& model, const Matrix& x,
                             const std::vector<int>& labels,
                             std::uint64_t seed, int probes = 40) {
  ClassifierModel m = model;
  const detail::ForwardCache cache = detail::forward_cache(m, x, true);
  const detail::Gradients g = detail::backward(m, x, labels, cache);

  std::vector<std::pair<std::vector<double>*, const std::vector<double>*>> tensors = {
      {&m.bn_gamma, &g.bn_gamma}, {&m.bn_beta, &g.bn_beta}, {&m.w1, &g.w1},
      {&m.b1, &g.b1},             {&m.w2, &g.w2},           {&m.b2, &g.b2}};

  std::size_t total = 0;
  for (const auto& [p, gp] : tensors) total += p->size();

  SplitMix64 rng(seed);
  const double h = 1e-5;
  double max_rel = 0;
  for (int probe = 0; probe < probes; ++probe) {
    std::size_t pick = static_cast<std::size_t>(rng.next_below(total));
    std::vector<double>* params = nullptr;
    const std::vector<double>* grads = nullptr;
    for (const auto& [p, gp] : tensors) {
      if (pick < p->size()) {
        params = p;
        grads = gp;
        break;
      }
      pick -= p->size();
    }

    const double orig = (*params)[pick];
    (*params)[pick] = orig + h;
    const double lp = loss(detail::forward_cache(m, x, true).probs, labels);
    (*params)[pick] = orig - h;
    const double lm = loss(detail::forward_cache(m, x, true).probs, labels);
    (*params)[pick] = orig;

    const double numeric = (lp - lm) / (2 * h);
    const double analytic = (*grads)[pick];
    const double denom = std::max(1e-8, std::abs(numeric) + std::abs(analytic));
    max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
  }
  return max_rel;
}

// ---------------------------------------------------------------------------
// Model file: JSON with magic, dims, full-precision parameters, checksum.

inline constexpr const char* kModelMagic = "busimorph-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline nlohmann::json model_body(const ClassifierModel& m) {
  nlohmann::json j;
  j["magic"] = kModelMagic;
  j["version"] = kModelVersion;
  j["input_dim"] = m.input_dim;
  j["hidden"] = m.hidden;
  j["classes"] = m.classes;
  j["seed"] = m.seed;
  j["epochs_trained"] = m.epochs_trained;
  j["bn_gamma"] = m.bn_gamma;
  j["bn_beta"] = m.bn_beta;
  j["bn_running_mean"] = m.bn_running_mean;
  j["bn_running_var"] = m.bn_running_var;
  j["w1"] = m.w1;
  j["b1"] = m.b1;
  j["w2"] = m.w2;
  j["b2"] = m.b2;
  return j;
}

}  // namespace detail

inline void save_model(const ClassifierModel& m, const std::string& path) {
  nlohmann::json j = detail::model_body(m);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(j.dump())));
  j["checksum"] = buf;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModelFile("unparsable model file " + path + ": " + e.what());
  }

  try {
    if (j.at("magic").get<std::string>() != kModelMagic ||
        j.at("version").get<int>() != kModelVersion) {
      throw CorruptModelFile("wrong magic/version in " + path);
    }
    const std::string stored = j.at("checksum").get<std::string>();
    j.erase("checksum");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(j.dump())));
    if (stored != buf) {
      throw CorruptModelFile("checksum mismatch in " + path);
    }

    ClassifierModel m;
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden = j.at("hidden").get<int>();
    m.classes = j.at("classes").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.epochs_trained = j.at("epochs_trained").get<int>();
    m.bn_gamma = j.at("bn_gamma").get<std::vector<double>>();
    m.bn_beta = j.at("bn_beta").get<std::vector<double>>();
    m.bn_running_mean = j.at("bn_running_mean").get<std::vector<double>>();
    m.bn_running_var = j.at("bn_running_var").get<std::vector<double>>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();

    const auto d = static_cast<std::size_t>(m.input_dim);
    const auto hd = static_cast<std::size_t>(m.hidden);
    const auto k = static_cast<std::size_t>(m.classes);
    if (m.input_dim <= 0 || m.hidden <= 0 || m.classes <= 0 ||
        m.bn_gamma.size() != d || m.bn_beta.size() != d ||
        m.bn_running_mean.size() != d || m.bn_running_var.size() != d ||
        m.w1.size() != d * hd || m.b1.size() != hd || m.w2.size() != hd * k ||
        m.b2.size() != k) {
      throw CorruptModelFile("inconsistent tensor sizes in " + path);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModelFile("malformed model file " + path + ": " + e.what());
  }
}

}  // namespace busimorph
