#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>

namespace dsebo {

// Axis-aligned symmetric search box [lo, hi]^D.
struct AmbientBox {
  double lo = -1.0;
  double hi = 1.0;
};

// Half-width of the subspace box Z_d = [-sqrt(d), sqrt(d)]^d.
double subspace_halfwidth(int d);

// Uniform draw from the subspace box.
Eigen::VectorXd sample_subspace_point(int d, std::mt19937_64& rng);

// Shared Gaussian embedding matrix S (D x d_h) with entries i.i.d.
// N(0, 1/d_h). The leading d columns of S form the embedding map A_d for
// every subspace dimension d <= d_h, so a zero-padded point embeds to the
// same ambient point as the original. Immutable after construction; safe to
// share across threads.
class SharedEmbedding {
public:
  SharedEmbedding(int ambient_dim, int max_subspace_dim, std::uint64_t seed);

  int ambient_dim() const { return ambient_dim_; }
  int max_subspace_dim() const { return max_dim_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // A_d: the first d columns of S (a view, no copy).
  Eigen::Ref<const Eigen::MatrixXd> slice(int d) const;

  // p_X(A_d z): componentwise clamp of A_d * z into the box. The Euclidean
  // projection onto an axis-aligned box is exactly this clamp.
  Eigen::VectorXd embed(const Eigen::VectorXd& z,
                        const AmbientBox& box = {}) const;

private:
  int ambient_dim_;
  int max_dim_;
  std::uint64_t seed_;
  Eigen::MatrixXd matrix_;
};

// Clamp of an already-lifted ambient point into the box.
Eigen::VectorXd project_to_box(const Eigen::VectorXd& x, const AmbientBox& box);

// (z^T, 0, ..., 0)^T of length d_new.
Eigen::VectorXd pad(const Eigen::VectorXd& z, int d_new);

// Evaluated points sharing one subspace dimension; rows of points() are
// the z vectors, values() holds the raw objective values.
class SubspaceDataset {
public:
  explicit SubspaceDataset(int dim);

  int dim() const { return dim_; }
  Eigen::Index size() const { return size_; }
  // n x d and length-n views of the stored data.
  Eigen::Ref<const Eigen::MatrixXd> points() const;
  Eigen::Ref<const Eigen::VectorXd> values() const;

  void append(const Eigen::VectorXd& z, double y);
  Eigen::VectorXd point(Eigen::Index i) const;
  double value(Eigen::Index i) const;

  Eigen::Index argmin() const;
  double min_value() const;

private:
  int dim_;
  Eigen::Index size_ = 0;
  Eigen::MatrixXd points_;  // capacity_ x dim_, first size_ rows valid
  Eigen::VectorXd values_;
};

// Dataset initialization, first-subspace case: one point drawn uniformly
// from the d-dimensional subspace box, evaluated through `evaluate`
// (subspace point -> raw objective value).
SubspaceDataset init_dataset(
    int d, std::mt19937_64& rng,
    const std::function<double(const Eigen::VectorXd&)>& evaluate);

// Dataset initialization, expansion case: every (z, y) of `prev` becomes
// (pad(z, d_new), y), preserving order and values exactly.
SubspaceDataset init_dataset(const SubspaceDataset& prev, int d_new);

// Binary dump of S for audit: 16-byte header (magic "DSEB", version u32,
// D u32, d_h u32), then row-major 64-bit floats, all little-endian.
void write_embedding(const SharedEmbedding& emb, std::ostream& out);

// Reads back a dump written by write_embedding.
Eigen::MatrixXd read_embedding(std::istream& in);

}  // namespace dsebo
