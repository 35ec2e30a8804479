#include "age/gcn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace age {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kProbFloor = 1e-12;

std::vector<std::uint8_t> draw_keep_mask(SeededRng& rng, std::size_t count,
                                         double keep_prob) {
  // Entry kept iff next_u32() < keep_prob * 2^32; one draw per entry in
  // row-major order.
  const auto threshold =
      static_cast<std::uint32_t>(keep_prob * 4294967296.0);
  std::vector<std::uint8_t> mask(count);
  for (std::size_t i = 0; i < count; ++i) {
    mask[i] = rng.next_u32() < threshold ? 1 : 0;
  }
  return mask;
}

/// (x (.) mask / keep) * w, skipping zero and dropped entries.
DenseMatrix masked_matmul(const DenseMatrix& x,
                          const std::vector<std::uint8_t>& mask,
                          double inv_keep, const DenseMatrix& w) {
  if (mask.empty()) return matmul(x, w);
  DenseMatrix out(x.rows(), w.cols());
  const int f = x.cols();
  const int h = w.cols();
  for (int i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    const std::uint8_t* mi = mask.data() + static_cast<std::size_t>(i) * f;
    double* oi = out.row(i);
    for (int k = 0; k < f; ++k) {
      double xv = xi[k];
      if (xv == 0.0 || !mi[k]) continue;
      xv *= inv_keep;
      const double* wk = w.row(k);
      for (int j = 0; j < h; ++j) oi[j] += xv * wk[j];
    }
  }
  return out;
}

/// (x (.) mask / keep)^T * g.
DenseMatrix masked_matmul_transpose_a(const DenseMatrix& x,
                                      const std::vector<std::uint8_t>& mask,
                                      double inv_keep, const DenseMatrix& g) {
  if (mask.empty()) return matmul_transpose_a(x, g);
  DenseMatrix out(x.cols(), g.cols());
  const int f = x.cols();
  const int h = g.cols();
  for (int i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    const double* gi = g.row(i);
    const std::uint8_t* mi = mask.data() + static_cast<std::size_t>(i) * f;
    for (int k = 0; k < f; ++k) {
      double xv = xi[k];
      if (xv == 0.0 || !mi[k]) continue;
      xv *= inv_keep;
      double* ok = out.row(k);
      for (int j = 0; j < h; ++j) ok[j] += xv * gi[j];
    }
  }
  return out;
}

void check_forward_shapes(const GcnModel& model, const NormalizedAdjacency& a_hat,
                          const DenseMatrix& x) {
  if (a_hat.matrix.rows != x.rows() || x.cols() != model.w0.rows() ||
      model.w0.cols() != model.w1.rows()) {
    throw ShapeError("forward: A_hat " + std::to_string(a_hat.matrix.rows) + "x" +
                     std::to_string(a_hat.matrix.cols) + ", X " +
                     std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                     ", W0 " + std::to_string(model.w0.rows()) + "x" +
                     std::to_string(model.w0.cols()) + ", W1 " +
                     std::to_string(model.w1.rows()) + "x" +
                     std::to_string(model.w1.cols()));
  }
}

void adam_update(DenseMatrix& w, AdamState& state, const DenseMatrix& grad,
                 double lr, long step) {
  const double bc1 = 1.0 - std::pow(kAdamBeta1, step);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, step);
  auto& wv = w.values();
  auto& mv = state.m.values();
  auto& vv = state.v.values();
  const auto& gv = grad.values();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    mv[i] = kAdamBeta1 * mv[i] + (1.0 - kAdamBeta1) * gv[i];
    vv[i] = kAdamBeta2 * vv[i] + (1.0 - kAdamBeta2) * gv[i] * gv[i];
    wv[i] -= lr * (mv[i] / bc1) / (std::sqrt(vv[i] / bc2) + kAdamEps);
  }
}

}  // namespace

void GcnConfig::validate() const {
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must be in [0, 1)");
  }
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (early_stop_window < 1) throw ConfigError("early_stop_window must be >= 1");
}

GcnModel GcnModel::init(SeededRng& rng, int in_dim, int hidden_dim,
                        int n_classes) {
  GcnModel m;
  m.w0 = glorot_init(rng, in_dim, hidden_dim);
  m.w1 = glorot_init(rng, hidden_dim, n_classes);
  m.adam_w0 = {DenseMatrix(in_dim, hidden_dim), DenseMatrix(in_dim, hidden_dim)};
  m.adam_w1 = {DenseMatrix(hidden_dim, n_classes), DenseMatrix(hidden_dim, n_classes)};
  return m;
}

ForwardCache forward(const GcnModel& model, const NormalizedAdjacency& a_hat,
                     const DenseMatrix& x, bool training, SeededRng& rng,
                     double dropout_rate) {
  check_forward_shapes(model, a_hat, x);
  ForwardCache cache;
  cache.training = training;
  const bool drop = training && dropout_rate > 0.0;
  cache.keep_prob = drop ? 1.0 - dropout_rate : 1.0;
  const double inv_keep = 1.0 / cache.keep_prob;

  if (drop) cache.x_mask = draw_keep_mask(rng, x.size(), cache.keep_prob);
  DenseMatrix xw = masked_matmul(x, cache.x_mask, inv_keep, model.w0);
  cache.h1 = spmm(a_hat.matrix, xw);
  for (double& v : cache.h1.values()) v = std::max(0.0, v);

  if (drop) cache.h1_mask = draw_keep_mask(rng, cache.h1.size(), cache.keep_prob);
  DenseMatrix hw = masked_matmul(cache.h1, cache.h1_mask, inv_keep, model.w1);
  cache.z = softmax_rows(spmm(a_hat.matrix, hw));
  return cache;
}

double loss(const ForwardCache& cache, const std::vector<int>& labels,
            std::span<const int> labeled, const GcnModel& model,
            double weight_decay) {
  if (labeled.empty()) throw UsageError("loss: labeled set is empty");
  double ce = 0.0;
  for (int l : labeled) {
    ce -= std::log(std::max(cache.z(l, labels[l]), kProbFloor));
  }
  double reg = 0.0;
  if (weight_decay != 0.0) {
    for (double w : model.w0.values()) reg += w * w;
    reg *= 0.5 * weight_decay;
  }
  return ce + reg;
}

GcnGradients backward(const GcnModel& model, const ForwardCache& cache,
                      const NormalizedAdjacency& a_hat, const DenseMatrix& x,
                      const std::vector<int>& labels,
                      std::span<const int> labeled, double weight_decay) {
  if (labeled.empty()) throw UsageError("backward: labeled set is empty");
  const int n = x.rows();
  const int hidden = model.w0.cols();
  const int c = model.w1.cols();
  check_forward_shapes(model, a_hat, x);
  if (cache.z.rows() != n || cache.z.cols() != c || cache.h1.rows() != n ||
      cache.h1.cols() != hidden) {
    throw UsageError("backward: cache does not match model/input shapes");
  }
  const bool drop = cache.training && cache.keep_prob < 1.0;
  if (drop && (cache.x_mask.size() != x.size() ||
               cache.h1_mask.size() != cache.h1.size())) {
    throw UsageError("backward: cache dropout masks do not match input shapes");
  }
  const double inv_keep = 1.0 / cache.keep_prob;

  // d loss / d logits = Z - Y on labeled rows, zero elsewhere.
  DenseMatrix d_logits(n, c);
  for (int l : labeled) {
    const double* zl = cache.z.row(l);
    double* dl = d_logits.row(l);
    for (int j = 0; j < c; ++j) dl[j] += zl[j];
    dl[labels[l]] -= 1.0;
  }

  // grad W1 = (A_hat * H1_dropped)^T * d_logits.
  DenseMatrix h1d = cache.h1;
  if (drop) {
    auto& hv = h1d.values();
    for (std::size_t i = 0; i < hv.size(); ++i) {
      hv[i] = cache.h1_mask[i] ? hv[i] * inv_keep : 0.0;
    }
  }
  DenseMatrix ah1d = spmm(a_hat.matrix, h1d);
  GcnGradients grads;
  grads.w1 = matmul_transpose_a(ah1d, d_logits);

  // dH1 = A_hat^T * d_logits * W1^T gated by dropout and ReLU; A_hat is
  // symmetric so spmm applies it directly.
  DenseMatrix ds1 = matmul_transpose_b(spmm(a_hat.matrix, d_logits), model.w1);
  {
    auto& dv = ds1.values();
    const auto& hv = cache.h1.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
      if (hv[i] <= 0.0) {
        dv[i] = 0.0;
      } else if (drop) {
        dv[i] = cache.h1_mask[i] ? dv[i] * inv_keep : 0.0;
      }
    }
  }

  // grad W0 = (A_hat * X_dropped)^T * dS1 + weight_decay * W0.
  DenseMatrix au = spmm(a_hat.matrix, ds1);
  grads.w0 = masked_matmul_transpose_a(x, cache.x_mask, inv_keep, au);
  if (weight_decay != 0.0) {
    auto& gv = grads.w0.values();
    const auto& wv = model.w0.values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += weight_decay * wv[i];
  }
  return grads;
}

void adam_step(GcnModel& model, const GcnGradients& grads,
               const GcnConfig& config) {
  if (grads.w0.rows() != model.w0.rows() || grads.w0.cols() != model.w0.cols() ||
      grads.w1.rows() != model.w1.rows() || grads.w1.cols() != model.w1.cols()) {
    throw ShapeError("adam_step: gradient shapes do not match weights");
  }
  if (!grads.w0.all_finite() || !grads.w1.all_finite()) {
    throw NumericError("adam_step: non-finite gradient at step " +
                       std::to_string(model.step + 1));
  }
  ++model.step;
  adam_update(model.w0, model.adam_w0, grads.w0, config.learning_rate, model.step);
  adam_update(model.w1, model.adam_w1, grads.w1, config.learning_rate, model.step);
}

EpochResult train_epoch(GcnModel& model, const Dataset& dataset,
                        const NormalizedAdjacency& a_hat,
                        std::span<const int> labeled,
                        std::span<const int> validation,
                        const GcnConfig& config, SeededRng& rng) {
  ForwardCache train_cache =
      forward(model, a_hat, dataset.features, true, rng, config.dropout_rate);
  EpochResult res;
  res.train_loss =
      loss(train_cache, dataset.labels, labeled, model, config.weight_decay);
  if (!std::isfinite(res.train_loss)) {
    throw NumericError("train_epoch: training loss is not finite at step " +
                       std::to_string(model.step + 1));
  }
  GcnGradients grads = backward(model, train_cache, a_hat, dataset.features,
                                dataset.labels, labeled, config.weight_decay);
  adam_step(model, grads, config);

  res.eval = forward(model, a_hat, dataset.features, false, rng, 0.0);
  res.val_loss =
      validation.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : loss(res.eval, dataset.labels, validation, model, config.weight_decay);
  return res;
}

const DenseMatrix& embeddings(const ForwardCache& cache) {
  if (cache.training) {
    throw UsageError("embeddings: cache must come from a dropout-off pass");
  }
  return cache.h1;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void save_checkpoint(const GcnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out.write("AGEW", 4);
  auto write_matrix = [&](const DenseMatrix& w) {
    const std::uint32_t r = w.rows(), c = w.cols();
    out.write(reinterpret_cast<const char*>(&r), 4);
    out.write(reinterpret_cast<const char*>(&c), 4);
    out.write(reinterpret_cast<const char*>(w.values().data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
  };
  write_matrix(model.w0);
  write_matrix(model.w1);
  if (!out) throw Error(path + ": write failed");
}

GcnModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "AGEW") {
    throw ParseError(path + ": not a weight checkpoint (bad magic)");
  }
  auto read_matrix = [&]() {
    std::uint32_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), 4);
    in.read(reinterpret_cast<char*>(&c), 4);
    if (!in || r == 0 || c == 0 || r > (1u << 24) || c > (1u << 24)) {
      throw ParseError(path + ": corrupt checkpoint header");
    }
    DenseMatrix w(static_cast<int>(r), static_cast<int>(c));
    in.read(reinterpret_cast<char*>(w.values().data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    if (!in) throw ParseError(path + ": truncated checkpoint");
    return w;
  };
  GcnModel m;
  m.w0 = read_matrix();
  m.w1 = read_matrix();
  if (m.w0.cols() != m.w1.rows()) {
    throw ParseError(path + ": layer shapes do not chain");
  }
  m.adam_w0 = {DenseMatrix(m.w0.rows(), m.w0.cols()),
               DenseMatrix(m.w0.rows(), m.w0.cols())};
  m.adam_w1 = {DenseMatrix(m.w1.rows(), m.w1.cols()),
               DenseMatrix(m.w1.rows(), m.w1.cols())};
  return m;
}

}  // namespace age
