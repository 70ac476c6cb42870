#include "dsebo/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

namespace dsebo {

double subspace_halfwidth(int d) {
  if (d < 1) throw UsageError("subspace dimension must be positive");
  return std::sqrt(static_cast<double>(d));
}

Eigen::VectorXd sample_subspace_point(int d, std::mt19937_64& rng) {
  const double half = subspace_halfwidth(d);
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z[i] = uniform(rng, -half, half);
  return z;
}

SharedEmbedding::SharedEmbedding(int ambient_dim, int max_subspace_dim,
                                 std::uint64_t seed)
    : ambient_dim_(ambient_dim), max_dim_(max_subspace_dim), seed_(seed) {
  if (max_subspace_dim < 1)
    throw ConfigError("shared embedding: d_h must be positive");
  if (max_subspace_dim > ambient_dim)
    throw ConfigError("shared embedding: d_h exceeds ambient dimension D");
  const double sigma = std::sqrt(1.0 / static_cast<double>(max_dim_));
  auto rng = substream(seed, Stream::embedding_matrix);
  matrix_.resize(ambient_dim_, max_dim_);
  // Row-major fill order so the matrix matches its binary dump layout.
  for (int i = 0; i < ambient_dim_; ++i)
    for (int j = 0; j < max_dim_; ++j) matrix_(i, j) = sigma * standard_normal(rng);
}

Eigen::Ref<const Eigen::MatrixXd> SharedEmbedding::slice(int d) const {
  if (d < 1 || d > max_dim_)
    throw ConfigError("embedding slice: dimension out of [1, d_h]");
  return matrix_.leftCols(d);
}

Eigen::VectorXd project_to_box(const Eigen::VectorXd& x,
                               const AmbientBox& box) {
  return x.cwiseMax(box.lo).cwiseMin(box.hi);
}

Eigen::VectorXd SharedEmbedding::embed(const Eigen::VectorXd& z,
                                       const AmbientBox& box) const {
  const int d = static_cast<int>(z.size());
  if (d < 1 || d > max_dim_)
    throw UsageError("embed: point dimension outside [1, d_h]");
  // Column-by-column accumulation: appending zero coordinates leaves every
  // partial sum untouched, which makes the cross-dimension evaluation
  // sharing exact rather than merely close.
  Eigen::VectorXd lifted = Eigen::VectorXd::Zero(ambient_dim_);
  for (int j = 0; j < d; ++j) lifted += matrix_.col(j) * z[j];
  return project_to_box(lifted, box);
}

Eigen::VectorXd pad(const Eigen::VectorXd& z, int d_new) {
  if (d_new < z.size())
    throw UsageError("pad: target dimension below current length");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_new);
  out.head(z.size()) = z;
  return out;
}

SubspaceDataset::SubspaceDataset(int dim) : dim_(dim) {
  if (dim < 1) throw UsageError("dataset dimension must be positive");
  points_.resize(16, dim_);
  values_.resize(16);
}

Eigen::Ref<const Eigen::MatrixXd> SubspaceDataset::points() const {
  return points_.topRows(size_);
}

Eigen::Ref<const Eigen::VectorXd> SubspaceDataset::values() const {
  return values_.head(size_);
}

void SubspaceDataset::append(const Eigen::VectorXd& z, double y) {
  if (z.size() != dim_) throw UsageError("dataset append: dimension mismatch");
  if (!std::isfinite(y)) throw DataError("dataset append: non-finite value");
  if (size_ == points_.rows()) {
    points_.conservativeResize(2 * size_, Eigen::NoChange);
    values_.conservativeResize(2 * size_);
  }
  points_.row(size_) = z.transpose();
  values_[size_] = y;
  ++size_;
}

Eigen::VectorXd SubspaceDataset::point(Eigen::Index i) const {
  return points_.row(i).transpose();
}

double SubspaceDataset::value(Eigen::Index i) const { return values_[i]; }

Eigen::Index SubspaceDataset::argmin() const {
  if (size_ == 0) throw UsageError("argmin of empty dataset");
  Eigen::Index best = 0;
  values_.head(size_).minCoeff(&best);
  return best;
}

double SubspaceDataset::min_value() const { return values_[argmin()]; }

SubspaceDataset init_dataset(
    int d, std::mt19937_64& rng,
    const std::function<double(const Eigen::VectorXd&)>& evaluate) {
  SubspaceDataset data(d);
  const Eigen::VectorXd z = sample_subspace_point(d, rng);
  data.append(z, evaluate(z));
  return data;
}

SubspaceDataset init_dataset(const SubspaceDataset& prev, int d_new) {
  if (d_new < prev.dim())
    throw UsageError("init_dataset: new dimension below previous");
  SubspaceDataset data(d_new);
  for (Eigen::Index i = 0; i < prev.size(); ++i)
    data.append(pad(prev.point(i), d_new), prev.value(i));
  return data;
}

namespace {

constexpr char kMagic[4] = {'D', 'S', 'E', 'B'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "embedding dump I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_embedding(const SharedEmbedding& emb, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(emb.ambient_dim()));
  put_u32(out, static_cast<std::uint32_t>(emb.max_subspace_dim()));
  const Eigen::MatrixXd& m = emb.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw DataError("embedding dump: write failed");
}

Eigen::MatrixXd read_embedding(std::istream& in) {
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw DataError("embedding dump: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) throw DataError("embedding dump: unknown version");
  const std::uint32_t rows = get_u32(in);
  const std::uint32_t cols = get_u32(in);
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      m(i, j) = v;
    }
  if (!in) throw DataError("embedding dump: truncated file");
  return m;
}

}  // namespace dsebo
