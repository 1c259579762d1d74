#include "specslice/expressive.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "random.hpp"
#include "specslice/error.hpp"

namespace specslice {

double FrequencyFilter::operator()(double rho) const {
  switch (kind) {
    case FilterKind::low: return std::exp(-100.0 * rho * rho);
    case FilterKind::band: return std::exp(-1000.0 * (rho - 0.5) * (rho - 0.5));
    case FilterKind::high: return 1.0 - std::exp(-10.0 * rho * rho);
  }
  return 0.0;
}

FilterKind parse_filter(const std::string& name) {
  if (name == "low") return FilterKind::low;
  if (name == "band") return FilterKind::band;
  if (name == "high") return FilterKind::high;
  fail(ErrorCode::config, "unknown filter '" + name + "' (low, band, high)");
}

const char* filter_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::low: return "low";
    case FilterKind::band: return "band";
    case FilterKind::high: return "high";
  }
  return "?";
}

namespace {

// Planner calls are not thread-safe in FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double axis_rho(std::size_t index, std::size_t length) {
  auto i = static_cast<long>(index);
  auto len = static_cast<long>(length);
  long k = i <= len / 2 ? i : i - len;
  return length > 1 ? std::abs(static_cast<double>(k)) / (static_cast<double>(length) / 2.0) : 0.0;
}

}  // namespace

ImageSignal make_target(const ImageSignal& img, const std::function<double(double)>& phi) {
  const std::size_t n = img.size();
  if (static_cast<std::size_t>(img.values.size()) != n || n == 0)
    fail(ErrorCode::data, "image has inconsistent dimensions");
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!buf) fail(ErrorCode::internal, "fftw allocation failed");
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_2d(static_cast<int>(img.height), static_cast<int>(img.width), buf, buf,
                           FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft_2d(static_cast<int>(img.height), static_cast<int>(img.width), buf, buf,
                           FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = img.values(static_cast<Eigen::Index>(i));
    buf[i][1] = 0.0;
  }
  fftw_execute(fwd);
  for (std::size_t r = 0; r < img.height; ++r) {
    double r1 = axis_rho(r, img.height);
    for (std::size_t c = 0; c < img.width; ++c) {
      double r2 = axis_rho(c, img.width);
      double scale = phi(r1 * r1 + r2 * r2);
      buf[r * img.width + c][0] *= scale;
      buf[r * img.width + c][1] *= scale;
    }
  }
  fftw_execute(inv);
  ImageSignal out{img.width, img.height, Vector(static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) out.values(static_cast<Eigen::Index>(i)) = buf[i][0] / static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  return out;
}

ImageSignal make_target(const ImageSignal& img, const FrequencyFilter& filter) {
  return make_target(img, std::function<double(double)>(filter));
}

ImageSignal synthetic_image(std::size_t width, std::size_t height, std::uint64_t seed) {
  if (width < 1 || height < 1) fail(ErrorCode::config, "image dimensions must be positive");
  struct Blob {
    double cx, cy, sigma, amp;
  };
  std::vector<Blob> blobs = {{0.3, 0.3, 0.08, 1.0}, {0.7, 0.6, 0.12, 0.7}, {0.5, 0.8, 0.05, 0.9}};
  double phase[3] = {0.0, 0.0, 0.0};
  if (seed != 0) {
    Rng rng(seed);
    for (auto& b : blobs) {
      b.cx += 0.2 * detail::uniform01(rng) - 0.1;
      b.cy += 0.2 * detail::uniform01(rng) - 0.1;
    }
    for (double& p : phase) p = 2.0 * std::numbers::pi * detail::uniform01(rng);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  ImageSignal img{width, height, Vector(static_cast<Eigen::Index>(width * height))};
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      double x = static_cast<double>(c) / static_cast<double>(width);
      double y = static_cast<double>(r) / static_cast<double>(height);
      double v = 0.0;
      for (const auto& b : blobs)
        v += b.amp * std::exp(-((x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy)) / (2.0 * b.sigma * b.sigma));
      v += 0.3 * std::sin(two_pi * 6 * x + phase[0]) * std::cos(two_pi * 3 * y);
      v += 0.25 * std::sin(two_pi * 8 * (x + y) + phase[1]);
      v += 0.15 * std::cos(two_pi * (11 * x + 3 * y) + phase[2]);
      img.values(static_cast<Eigen::Index>(r * width + c)) = v;
    }
  double lo = img.values.minCoeff(), hi = img.values.maxCoeff();
  if (hi > lo) img.values = (img.values.array() - lo) / (hi - lo);
  return img;
}

ImageSignal load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::data, "cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    if (t.empty()) fail(ErrorCode::data, path.string() + ": truncated PGM header");
    return t;
  };
  std::string magic = token();
  if (magic != "P5" && magic != "P2") fail(ErrorCode::data, path.string() + ": not a PGM file");
  std::size_t width = 0, height = 0, maxval = 0;
  try {
    width = std::stoul(token());
    height = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::logic_error&) {
    fail(ErrorCode::data, path.string() + ": bad PGM header");
  }
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
    fail(ErrorCode::data, path.string() + ": bad PGM header values");
  ImageSignal img{width, height, Vector(static_cast<Eigen::Index>(width * height))};
  for (std::size_t i = 0; i < width * height; ++i) {
    std::size_t v = 0;
    if (magic == "P2") {
      v = std::stoul(token());
    } else if (maxval < 256) {
      char b;
      if (!in.get(b)) fail(ErrorCode::data, path.string() + ": truncated PGM data");
      v = static_cast<unsigned char>(b);
    } else {
      char b[2];
      if (!in.read(b, 2)) fail(ErrorCode::data, path.string() + ": truncated PGM data");
      v = (static_cast<unsigned char>(b[0]) << 8) | static_cast<unsigned char>(b[1]);
    }
    img.values(static_cast<Eigen::Index>(i)) = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return img;
}

void save_pgm(const std::filesystem::path& path, const ImageSignal& img) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (Eigen::Index i = 0; i < img.values.size(); ++i) {
    double v = std::clamp(img.values(i), 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  if (!out) fail(ErrorCode::data, "write failed: " + path.string());
}

Matrix baseline_features(const ImageSignal& img) {
  Matrix f(static_cast<Eigen::Index>(img.size()), 3);
  for (std::size_t r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < img.width; ++c) {
      auto i = static_cast<Eigen::Index>(r * img.width + c);
      f(i, 0) = img.values(i);
      f(i, 1) = static_cast<double>(c) / static_cast<double>(img.width);
      f(i, 2) = static_cast<double>(r) / static_cast<double>(img.height);
    }
  return f;
}

RegressResult regress(const Matrix& features, const Vector& target, const RegressConfig& config) {
  if (features.rows() != target.size()) fail(ErrorCode::data, "regress: feature rows != target length");
  if (!(config.learning_rate >= 0.0)) fail(ErrorCode::config, "regress: learning_rate must be >= 0");
  RegressResult result;
  EmbeddingModel model = EmbeddingModel::linear(static_cast<std::size_t>(features.cols()), 1, config.bias);
  Optimizer opt(config.optimizer, config.learning_rate);
  Matrix y = target;

  auto residual = [&](const EmbeddingModel& m) -> Matrix { return forward(m, features) - y; };
  Matrix r = residual(model);
  double best = r.squaredNorm();
  result.history.push_back(best);
  result.model = model;
  std::size_t since_best = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    EmbeddingModel grad = model.zeros_like();
    grad.w1.noalias() = 2.0 * features.transpose() * r;
    if (config.bias) grad.b1 = 2.0 * r.colwise().sum();
    opt.step(model, grad);
    r = residual(model);
    double loss = r.squaredNorm();
    if (!std::isfinite(loss)) fail(ErrorCode::numeric, "regression diverged at iteration " + std::to_string(it));
    result.history.push_back(loss);
    result.iterations = it;
    if (loss < best) {
      best = loss;
      result.model = model;
      since_best = 0;
    } else if (config.patience && ++since_best >= config.patience) {
      break;
    }
  }
  result.sse = best;
  result.prediction = forward(result.model, features).col(0);
  return result;
}

RegressResult regress(const Graph& grid, const Matrix& gamma, const ImageSignal& target,
                      const RegressConfig& config) {
  if (grid.num_nodes() != target.size() || static_cast<std::size_t>(gamma.rows()) != target.size())
    fail(ErrorCode::data, "regress: grid, dictionary and target sizes disagree");
  return regress(gamma, target.values, config);
}

RegressResult baseline_regress(const ImageSignal& img, const ImageSignal& target,
                               const RegressConfig& config) {
  if (img.size() != target.size()) fail(ErrorCode::data, "baseline: image and target sizes disagree");
  return regress(baseline_features(img), target.values, config);
}

}  // namespace specslice
