#include "specslice/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "binary_io.hpp"
#include "random.hpp"
#include "specslice/error.hpp"

namespace specslice {

EmbeddingModel EmbeddingModel::linear(std::size_t input_dim, std::size_t output_dim, bool bias) {
  EmbeddingModel m;
  m.arch = Architecture::linear;
  m.w1 = Matrix::Zero(input_dim, output_dim);
  if (bias) m.b1 = Matrix::Zero(1, output_dim);
  return m;
}

EmbeddingModel EmbeddingModel::mlp(std::size_t input_dim, std::size_t hidden, std::size_t output_dim) {
  EmbeddingModel m;
  m.arch = Architecture::mlp;
  m.w1 = Matrix::Zero(input_dim, hidden);
  m.b1 = Matrix::Zero(1, hidden);
  m.w2 = Matrix::Zero(hidden, output_dim);
  m.b2 = Matrix::Zero(1, output_dim);
  return m;
}

std::size_t EmbeddingModel::output_dim() const {
  return static_cast<std::size_t>(arch == Architecture::linear ? w1.cols() : w2.cols());
}

std::vector<Matrix*> EmbeddingModel::parameters() { return {&w1, &b1, &w2, &b2}; }

std::vector<const Matrix*> EmbeddingModel::parameters() const { return {&w1, &b1, &w2, &b2}; }

EmbeddingModel EmbeddingModel::zeros_like() const {
  EmbeddingModel z = *this;
  for (auto* p : z.parameters()) p->setZero();
  return z;
}

bool EmbeddingModel::all_finite() const {
  for (const auto* p : parameters())
    if (!p->allFinite()) return false;
  return true;
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::config, "train: " + what); };
  if (!(margin > 0.0)) bad("margin must be positive");
  if (negatives_per_anchor < 1) bad("negatives_per_anchor must be at least 1");
  if (batch_size < 1) bad("batch_size must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be >= 0");
  if (output_dim < 1) bad("output_dim must be at least 1");
  if (arch == Architecture::mlp && hidden < 1) bad("hidden width must be at least 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum must lie in [0, 1)");
  if (!(init_scale >= 0.0)) bad("init_scale must be >= 0");
}

namespace {

struct ForwardCache {
  Matrix pre;     // mlp pre-activation
  Matrix hidden;  // mlp activation
  Matrix out;
};

void forward_cached(const EmbeddingModel& model, const Matrix& gamma, ForwardCache& cache) {
  if (static_cast<std::size_t>(gamma.cols()) != model.input_dim())
    fail(ErrorCode::data, "forward: dictionary has " + std::to_string(gamma.cols()) +
                              " columns, model expects " + std::to_string(model.input_dim()));
  if (model.arch == Architecture::linear) {
    cache.out.noalias() = gamma * model.w1;
    if (model.b1.size()) cache.out.rowwise() += model.b1.row(0);
    return;
  }
  cache.pre.noalias() = gamma * model.w1;
  cache.pre.rowwise() += model.b1.row(0);
  cache.hidden = cache.pre.cwiseMax(0.0);
  cache.out.noalias() = cache.hidden * model.w2;
  cache.out.rowwise() += model.b2.row(0);
}

// Accumulates d(out)/d(params) given d(loss)/d(out) into grad.
void backward(const EmbeddingModel& model, const Matrix& gamma, const ForwardCache& cache,
              const Matrix& d_out, EmbeddingModel& grad) {
  if (model.arch == Architecture::linear) {
    grad.w1.noalias() += gamma.transpose() * d_out;
    if (model.b1.size()) grad.b1 += d_out.colwise().sum();
    return;
  }
  grad.w2.noalias() += cache.hidden.transpose() * d_out;
  grad.b2 += d_out.colwise().sum();
  Matrix d_hidden = d_out * model.w2.transpose();
  d_hidden = d_hidden.cwiseProduct((cache.pre.array() > 0.0).cast<double>().matrix());
  grad.w1.noalias() += gamma.transpose() * d_hidden;
  grad.b1 += d_hidden.colwise().sum();
}

// Loss and gradient restricted to the rows the triplets touch.
double triplet_step(const EmbeddingModel& model, const Matrix& gamma,
                    std::span<const Triplet> triplets, double margin, EmbeddingModel& grad) {
  std::vector<NodeId> nodes;
  nodes.reserve(triplets.size() * 3);
  for (const auto& t : triplets) {
    nodes.push_back(t.anchor);
    nodes.push_back(t.positive);
    nodes.push_back(t.negative);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (NodeId v : nodes)
    if (v >= gamma.rows()) fail(ErrorCode::data, "triplet node out of range");
  auto local = [&](NodeId v) {
    return static_cast<Eigen::Index>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };

  Matrix sub(static_cast<Eigen::Index>(nodes.size()), gamma.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = gamma.row(nodes[i]);
  ForwardCache cache;
  forward_cached(model, sub, cache);
  const Matrix& h = cache.out;

  Matrix d_out = Matrix::Zero(h.rows(), h.cols());
  double loss = 0.0;
  for (const auto& t : triplets) {
    auto i = local(t.anchor), j = local(t.positive), k = local(t.negative);
    Eigen::RowVectorXd dij = h.row(i) - h.row(j);
    Eigen::RowVectorXd dik = h.row(i) - h.row(k);
    double term = dij.squaredNorm() - dik.squaredNorm() + margin;
    if (term <= 0.0) continue;
    loss += term;
    d_out.row(i) += 2.0 * (dij - dik);
    d_out.row(j) -= 2.0 * dij;
    d_out.row(k) += 2.0 * dik;
  }
  backward(model, sub, cache, d_out, grad);
  return loss;
}

}  // namespace

Matrix forward(const EmbeddingModel& model, const Matrix& gamma) {
  ForwardCache cache;
  forward_cached(model, gamma, cache);
  return std::move(cache.out);
}

std::vector<Triplet> sample_triplets(std::span<const int> labels, const NodeMask& anchor_mask,
                                     const NodeMask& pool_mask, const TrainConfig& config,
                                     std::uint64_t seed, std::vector<std::string>* warnings) {
  if (anchor_mask.size() != labels.size() || pool_mask.size() != labels.size())
    fail(ErrorCode::data, "sample_triplets: mask size != label count");
  if (config.negatives_per_anchor < 1) fail(ErrorCode::config, "negatives_per_anchor must be >= 1");

  std::map<int, std::vector<NodeId>> by_class;
  std::size_t pool_size = 0;
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (pool_mask[v] && labels[v] != kUnlabeled) {
      by_class[labels[v]].push_back(static_cast<NodeId>(v));
      ++pool_size;
    }
  if (by_class.size() < 2)
    fail(ErrorCode::data, "triplet sampling needs at least 2 classes among training nodes");
  if (config.negatives_per_anchor > pool_size - 1)
    fail(ErrorCode::config, "negatives_per_anchor exceeds labeled training nodes minus one");

  std::map<int, std::vector<NodeId>> others;
  for (const auto& [y, members] : by_class) {
    auto& out = others[y];
    for (const auto& [z, m] : by_class)
      if (z != y) out.insert(out.end(), m.begin(), m.end());
  }

  Rng rng(seed);
  std::vector<Triplet> triplets;
  std::vector<int> warned;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (!anchor_mask[v] || labels[v] == kUnlabeled) continue;
    const int y = labels[v];
    auto it = by_class.find(y);
    std::vector<NodeId> positives;
    if (it != by_class.end())
      for (NodeId u : it->second)
        if (u != v) positives.push_back(u);
    if (positives.empty()) {
      if (warnings && std::find(warned.begin(), warned.end(), y) == warned.end())
        warnings->push_back("class " + std::to_string(y) +
                            " has a single training node; used only as a negative");
      warned.push_back(y);
      continue;
    }
    auto neg_it = others.find(y);
    const std::vector<NodeId>& negatives =
        neg_it != others.end() ? neg_it->second : by_class.begin()->second;
    if (negatives.empty()) continue;

    std::vector<NodeId> draws;
    if (config.enumerate_positives) {
      draws = positives;
    } else {
      draws.push_back(positives[detail::uniform_index(rng, positives.size())]);
    }
    for (NodeId pos : draws)
      for (std::size_t n = 0; n < config.negatives_per_anchor; ++n)
        triplets.push_back({static_cast<NodeId>(v), pos,
                            negatives[detail::uniform_index(rng, negatives.size())]});
  }
  return triplets;
}

std::vector<Triplet> sample_triplets(std::span<const int> labels, const NodeMask& train_mask,
                                     const TrainConfig& config, std::uint64_t seed,
                                     std::vector<std::string>* warnings) {
  return sample_triplets(labels, train_mask, train_mask, config, seed, warnings);
}

double triplet_loss(const Matrix& h, std::span<const Triplet> triplets, double margin) {
  double loss = 0.0;
  for (const auto& t : triplets) {
    if (std::max({t.anchor, t.positive, t.negative}) >= h.rows())
      fail(ErrorCode::data, "triplet node out of range");
    double term = (h.row(t.anchor) - h.row(t.positive)).squaredNorm() -
                  (h.row(t.anchor) - h.row(t.negative)).squaredNorm() + margin;
    loss += std::max(0.0, term);
  }
  return loss;
}

EmbeddingModel loss_gradient(const EmbeddingModel& model, const Matrix& gamma,
                             std::span<const Triplet> triplets, double margin) {
  EmbeddingModel grad = model.zeros_like();
  if (!triplets.empty()) triplet_step(model, gamma, triplets, margin, grad);
  return grad;
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double momentum)
    : kind_(kind), lr_(learning_rate), momentum_(momentum) {}

void Optimizer::step(EmbeddingModel& model, const EmbeddingModel& grad) {
  if (!initialized_) {
    m1_ = model.zeros_like();
    m2_ = model.zeros_like();
    initialized_ = true;
  }
  ++t_;
  auto params = model.parameters();
  auto grads = grad.parameters();
  auto first = m1_.parameters();
  auto second = m2_.parameters();
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& w = *params[i];
    const Matrix& g = *grads[i];
    if (w.size() == 0) continue;
    switch (kind_) {
      case OptimizerKind::sgd:
        w -= lr_ * g;
        break;
      case OptimizerKind::sgd_momentum:
        *first[i] = momentum_ * *first[i] + g;
        w -= lr_ * *first[i];
        break;
      case OptimizerKind::adam:
        *first[i] = beta1_ * *first[i] + (1.0 - beta1_) * g;
        *second[i] = beta2_ * *second[i] + (1.0 - beta2_) * g.cwiseAbs2();
        w.array() -= lr_ * (first[i]->array() / bc1) /
                     ((second[i]->array() / bc2).sqrt() + eps_);
        break;
    }
  }
}

EmbeddingModel init_model(std::size_t input_dim, const TrainConfig& config) {
  Rng rng(detail::mix_seed(config.seed, 0x1417));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill = [&](Matrix& w, double scale) {
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * normal(rng);
  };
  const double d = static_cast<double>(std::max<std::size_t>(input_dim, 1));
  if (config.arch == Architecture::linear) {
    auto m = EmbeddingModel::linear(input_dim, config.output_dim);
    fill(m.w1, config.init_scale / std::sqrt(d));
    return m;
  }
  auto m = EmbeddingModel::mlp(input_dim, config.hidden, config.output_dim);
  fill(m.w1, std::sqrt(2.0 / d));
  fill(m.w2, config.init_scale / std::sqrt(static_cast<double>(config.hidden)));
  return m;
}

TrainResult train(const Matrix& gamma, std::span<const int> labels, std::span<const Split> splits,
                  const TrainConfig& config) {
  config.validate();
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(gamma.rows()) != n)
    fail(ErrorCode::data, "train: dictionary rows != label count");
  if (!splits.empty() && splits.size() != n) fail(ErrorCode::data, "train: split count != label count");

  NodeMask train_mask(n, false), val_mask(n, false), pool_mask(n, false);
  bool has_val = false;
  for (std::size_t v = 0; v < n; ++v) {
    if (labels[v] == kUnlabeled) continue;
    Split s = splits.empty() ? Split::train : splits[v];
    train_mask[v] = s == Split::train;
    val_mask[v] = s == Split::val;
    pool_mask[v] = train_mask[v] || val_mask[v];
    has_val = has_val || val_mask[v];
  }

  TrainResult result;
  auto eval_train = sample_triplets(labels, train_mask, train_mask, config,
                                    detail::mix_seed(config.seed, 1), &result.warnings);
  if (eval_train.empty()) fail(ErrorCode::data, "train: no triplets can be formed from training labels");
  std::vector<Triplet> eval_val;
  if (has_val)
    eval_val = sample_triplets(labels, val_mask, pool_mask, config, detail::mix_seed(config.seed, 2), nullptr);
  has_val = !eval_val.empty();

  EmbeddingModel model = init_model(static_cast<std::size_t>(gamma.cols()), config);
  auto record = [&](std::size_t epoch) {
    Matrix h = forward(model, gamma);
    LossRecord rec;
    rec.epoch = epoch;
    rec.train_loss = triplet_loss(h, eval_train, config.margin) / static_cast<double>(eval_train.size());
    rec.val_loss = has_val ? triplet_loss(h, eval_val, config.margin) / static_cast<double>(eval_val.size())
                           : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(rec.train_loss) || (has_val && !std::isfinite(rec.val_loss)))
      fail(ErrorCode::numeric, "training diverged at epoch " + std::to_string(epoch) +
                                   " (non-finite loss)");
    result.history.push_back(rec);
    return rec;
  };

  auto best_val = record(0).val_loss;
  EmbeddingModel best = model;
  std::size_t since_best = 0;
  Optimizer opt(config.optimizer, config.learning_rate, config.momentum);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto triplets = sample_triplets(labels, train_mask, train_mask, config,
                                    detail::mix_seed(config.seed, 1000 + epoch), nullptr);
    Rng rng(detail::mix_seed(config.seed, 2000 + epoch));
    detail::shuffle(triplets.begin(), triplets.end(), rng);
    for (std::size_t start = 0; start < triplets.size(); start += config.batch_size) {
      std::size_t count = std::min(config.batch_size, triplets.size() - start);
      std::span<const Triplet> batch(triplets.data() + start, count);
      EmbeddingModel grad = model.zeros_like();
      triplet_step(model, gamma, batch, config.margin, grad);
      for (auto* p : grad.parameters()) *p /= static_cast<double>(count);
      opt.step(model, grad);
      if (!model.all_finite())
        fail(ErrorCode::numeric, "training diverged at epoch " + std::to_string(epoch) +
                                     " (non-finite weights)");
    }
    auto rec = record(epoch);
    if (!has_val) continue;
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      best = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (config.early_stop_patience && ++since_best >= config.early_stop_patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (has_val) {
    result.model = std::move(best);
  } else {
    result.model = std::move(model);
    result.best_epoch = result.history.back().epoch;
  }
  return result;
}

namespace {

constexpr char kModelMagic[8] = {'S', 'S', 'M', 'O', 'D', 'E', 'L', '1'};

}  // namespace

void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  out.write(kModelMagic, sizeof kModelMagic);
  detail::write_pod<std::uint32_t>(out, model.arch == Architecture::linear ? 0 : 1);
  for (const auto* p : model.parameters()) {
    detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p->rows()));
    detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p->cols()));
  }
  for (const auto* p : model.parameters()) detail::write_doubles(out, p->data(), static_cast<std::size_t>(p->size()));
  if (!out) fail(ErrorCode::data, "write failed: " + path.string());
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::data, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    fail(ErrorCode::data, path.string() + ": not a model checkpoint");
  const std::string what = "checkpoint " + path.string();
  EmbeddingModel model;
  auto tag = detail::read_pod<std::uint32_t>(in, what);
  if (tag > 1) fail(ErrorCode::data, what + ": unknown architecture tag");
  model.arch = tag == 0 ? Architecture::linear : Architecture::mlp;
  for (auto* p : model.parameters()) {
    auto rows = detail::read_pod<std::uint64_t>(in, what);
    auto cols = detail::read_pod<std::uint64_t>(in, what);
    if (rows > (1u << 30) || cols > (1u << 30)) fail(ErrorCode::data, what + ": implausible shape");
    p->resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  }
  for (auto* p : model.parameters()) detail::read_doubles(in, p->data(), static_cast<std::size_t>(p->size()), what);
  return model;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<LossRecord>& history) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  out.precision(17);
  out << "epoch,train_loss,val_loss\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << r.train_loss << ',';
    if (std::isfinite(r.val_loss)) out << r.val_loss;
    out << '\n';
  }
}

}  // namespace specslice
