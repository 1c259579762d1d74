#include <cstring>
#include <filesystem>
#include <fstream>

#include "binary_io.hpp"
#include "parallel.hpp"
#include "specslice/error.hpp"
#include "specslice/slicer.hpp"

namespace specslice {
namespace {

constexpr char kDictMagic[8] = {'S', 'S', 'D', 'I', 'C', 'T', '0', '1'};

}  // namespace

Dictionary build_dictionary(const Graph& g, const SlicerBank& bank, const RandomSignals& r,
                            unsigned threads) {
  bank.validate();
  if (static_cast<std::size_t>(r.values.rows()) != g.num_nodes())
    fail(ErrorCode::data, "random signals have " + std::to_string(r.values.rows()) +
                              " rows, graph has " + std::to_string(g.num_nodes()) + " nodes");
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const Eigen::Index f = g.has_features() ? g.features().cols() : 0;
  const Eigen::Index width = r.values.cols() + f;

  Matrix input(n, width);
  input.leftCols(r.values.cols()) = r.values;
  if (f > 0) input.rightCols(f) = g.features();

  const auto L = normalized_laplacian(g);
  Dictionary dict;
  dict.gamma.resize(n, width * static_cast<Eigen::Index>(bank.size()));
  for (std::size_t b = 0; b < bank.size(); ++b)
    dict.bands.emplace_back(b * width, (b + 1) * width);

  detail::parallel_for(bank.size(), threads, [&](std::size_t b) {
    Matrix block = apply_slicer(L, bank.slicers[b], input);
    dict.gamma.middleCols(static_cast<Eigen::Index>(b) * width, width) = block;
  });
  return dict;
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  out.write(kDictMagic, sizeof kDictMagic);
  detail::write_pod<std::uint64_t>(out, dict.rows());
  detail::write_pod<std::uint64_t>(out, dict.cols());
  detail::write_pod<std::uint64_t>(out, dict.bands.size());
  for (const auto& [begin, end] : dict.bands) {
    detail::write_pod<std::uint64_t>(out, begin);
    detail::write_pod<std::uint64_t>(out, end);
  }
  detail::write_doubles(out, dict.gamma.data(), static_cast<std::size_t>(dict.gamma.size()));
  if (!out) fail(ErrorCode::data, "write failed: " + path.string());
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::data, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kDictMagic, sizeof magic) != 0)
    fail(ErrorCode::data, path.string() + ": not a dictionary file");
  const std::string what = "dictionary " + path.string();
  auto rows = detail::read_pod<std::uint64_t>(in, what);
  auto cols = detail::read_pod<std::uint64_t>(in, what);
  auto bands = detail::read_pod<std::uint64_t>(in, what);
  if (bands > cols + 1) fail(ErrorCode::data, what + ": band count exceeds columns");
  Dictionary dict;
  for (std::uint64_t b = 0; b < bands; ++b) {
    auto begin = detail::read_pod<std::uint64_t>(in, what);
    auto end = detail::read_pod<std::uint64_t>(in, what);
    if (begin > end || end > cols) fail(ErrorCode::data, what + ": bad band range");
    dict.bands.emplace_back(begin, end);
  }
  dict.gamma.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  detail::read_doubles(in, dict.gamma.data(), rows * cols, what);
  return dict;
}

}  // namespace specslice
