#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/types.hpp"

namespace specslice {

enum class Architecture { linear, mlp };
enum class OptimizerKind { sgd_momentum, adam, sgd };

// linear: H = Gamma W1 (+ b1)
// mlp:    H = relu(Gamma W1 + b1) W2 + b2
// Empty bias matrices are absent. Gradients reuse this layout.
struct EmbeddingModel {
  Architecture arch = Architecture::linear;
  Matrix w1;
  Matrix b1;
  Matrix w2;
  Matrix b2;

  static EmbeddingModel linear(std::size_t input_dim, std::size_t output_dim, bool bias = false);
  static EmbeddingModel mlp(std::size_t input_dim, std::size_t hidden, std::size_t output_dim);

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t output_dim() const;
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  // Same shapes, all zero.
  EmbeddingModel zeros_like() const;
  bool all_finite() const;
};

struct TrainConfig {
  double margin = 1.0;
  std::size_t negatives_per_anchor = 8;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 200;
  // 0 disables early stopping.
  std::size_t early_stop_patience = 20;
  std::uint64_t seed = 0;
  std::size_t output_dim = 32;
  Architecture arch = Architecture::linear;
  std::size_t hidden = 64;
  OptimizerKind optimizer = OptimizerKind::sgd_momentum;
  double momentum = 0.9;
  // Initial weights are init_scale * N(0, 1) / sqrt(input_dim).
  double init_scale = 0.01;
  // Every same-class training node as a positive, instead of one draw.
  bool enumerate_positives = false;

  void validate() const;
};

struct Triplet {
  NodeId anchor = 0;
  NodeId positive = 0;
  NodeId negative = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

Matrix forward(const EmbeddingModel& model, const Matrix& gamma);

// Anchors and candidates are the labeled nodes inside train_mask.
std::vector<Triplet> sample_triplets(std::span<const int> labels, const NodeMask& train_mask,
                                     const TrainConfig& config, std::uint64_t seed,
                                     std::vector<std::string>* warnings = nullptr);

// Anchors from anchor_mask, positives and negatives from pool_mask.
std::vector<Triplet> sample_triplets(std::span<const int> labels, const NodeMask& anchor_mask,
                                     const NodeMask& pool_mask, const TrainConfig& config,
                                     std::uint64_t seed, std::vector<std::string>* warnings);

// Sum over triplets of [|H_i - H_j|^2 - |H_i - H_k|^2 + margin]_+
double triplet_loss(const Matrix& h, std::span<const Triplet> triplets, double margin);

// Gradient of triplet_loss(forward(model, gamma), ...) w.r.t. every parameter.
EmbeddingModel loss_gradient(const EmbeddingModel& model, const Matrix& gamma,
                             std::span<const Triplet> triplets, double margin);

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double momentum = 0.9);
  void step(EmbeddingModel& model, const EmbeddingModel& grad);

 private:
  OptimizerKind kind_;
  double lr_;
  double momentum_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  bool initialized_ = false;
  EmbeddingModel m1_;
  EmbeddingModel m2_;
};

EmbeddingModel init_model(std::size_t input_dim, const TrainConfig& config);

struct LossRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN without a validation split
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<LossRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  std::vector<std::string> warnings;
};

// Losses in the history are per-triplet means on fixed evaluation triplets;
// entry 0 is the untrained model. With empty splits every labeled node trains.
TrainResult train(const Matrix& gamma, std::span<const int> labels, std::span<const Split> splits,
                  const TrainConfig& config);

void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
EmbeddingModel load_model(const std::filesystem::path& path);
void write_loss_csv(const std::filesystem::path& path, const std::vector<LossRecord>& history);

}  // namespace specslice
