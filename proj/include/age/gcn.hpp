#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "age/dataset.hpp"
#include "age/graph.hpp"
#include "age/matrix.hpp"
#include "age/rng.hpp"

namespace age {

struct GcnConfig {
  int hidden_dim = 16;
  double dropout_rate = 0.5;   // applied to the input features and to H1
  double weight_decay = 5e-4;  // L2 on the first-layer weights only
  double learning_rate = 0.01;
  int max_epochs = 200;
  int early_stop_window = 10;

  void validate() const;
};

struct AdamState {
  DenseMatrix m;  // first moment
  DenseMatrix v;  // second moment
};

/// Two-layer GCN: z = softmax(A_hat * ReLU(A_hat * X * W0) * W1).
struct GcnModel {
  DenseMatrix w0;  // F x hidden
  DenseMatrix w1;  // hidden x C
  AdamState adam_w0, adam_w1;
  long step = 0;

  static GcnModel init(SeededRng& rng, int in_dim, int hidden_dim,
                       int n_classes);
};

struct ForwardCache {
  DenseMatrix h1;  // N x hidden, post-ReLU activations (before dropout)
  DenseMatrix z;   // N x C, row-softmax class probabilities
  std::vector<std::uint8_t> x_mask;   // dropout keep masks, row-major;
  std::vector<std::uint8_t> h1_mask;  // empty when not training or rate == 0
  bool training = false;
  double keep_prob = 1.0;
};

struct GcnGradients {
  DenseMatrix w0;
  DenseMatrix w1;
};

/// Full-batch forward pass. In training mode inverted dropout (scale by
/// 1/(1-rate)) is applied to X and to H1 before each weight product and the
/// keep masks are recorded; inference mode applies no dropout and consumes
/// no rng draws.
ForwardCache forward(const GcnModel& model, const NormalizedAdjacency& a_hat,
                     const DenseMatrix& x, bool training, SeededRng& rng,
                     double dropout_rate);

/// Cross-entropy over the labeled nodes plus weight_decay * 0.5 * ||W0||_F^2.
/// Probabilities are floored at 1e-12 inside the log.
double loss(const ForwardCache& cache, const std::vector<int>& labels,
            std::span<const int> labeled, const GcnModel& model,
            double weight_decay);

/// Analytic gradients of `loss` for the pass that produced `cache`
/// (same dropout masks).
GcnGradients backward(const GcnModel& model, const ForwardCache& cache,
                      const NormalizedAdjacency& a_hat, const DenseMatrix& x,
                      const std::vector<int>& labels,
                      std::span<const int> labeled, double weight_decay);

/// Bias-corrected Adam update (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
void adam_step(GcnModel& model, const GcnGradients& grads,
               const GcnConfig& config);

struct EpochResult {
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when the validation set is empty
  ForwardCache eval;      // dropout-off pass with the updated weights
};

/// One full-batch training step (forward, backward, adam) followed by a
/// dropout-off evaluation pass used for the validation loss and returned for
/// downstream scoring.
EpochResult train_epoch(GcnModel& model, const Dataset& dataset,
                        const NormalizedAdjacency& a_hat,
                        std::span<const int> labeled,
                        std::span<const int> validation,
                        const GcnConfig& config, SeededRng& rng);

/// Hidden embeddings H1 from a dropout-off cache.
const DenseMatrix& embeddings(const ForwardCache& cache);

/// Debug weight checkpoint, little-endian binary: magic "AGEW", then for W0
/// and W1 in turn a u32 row count, u32 column count, and the row-major
/// doubles. Optimizer state is not persisted; load_checkpoint returns a
/// model with fresh Adam accumulators.
void save_checkpoint(const GcnModel& model, const std::string& path);
GcnModel load_checkpoint(const std::string& path);

}  // namespace age
