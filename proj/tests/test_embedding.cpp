#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <sstream>

#include "dsebo/embedding.hpp"
#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

using namespace dsebo;

TEST_CASE("shared embedding is deterministic per seed") {
  const SharedEmbedding a(3, 2, 7);
  const SharedEmbedding b(3, 2, 7);
  CHECK(a.matrix().rows() == 3);
  CHECK(a.matrix().cols() == 2);
  CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);

  const SharedEmbedding c(3, 2, 8);
  CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("shared embedding entries follow the stated sampling law") {
  const SharedEmbedding emb(1000, 100, 12345);
  const auto& m = emb.matrix();
  const double mean = m.mean();
  const double std =
      std::sqrt((m.array() - mean).square().sum() / (m.size() - 1));
  // target std = sqrt(1/100) = 0.1
  CHECK(std > 0.09);
  CHECK(std < 0.11);
  CHECK(std::abs(mean) < 0.01);
}

TEST_CASE("shared embedding rejects bad dimension ranges") {
  CHECK_THROWS_AS(SharedEmbedding(2, 3, 0), ConfigError);
  CHECK_THROWS_AS(SharedEmbedding(2, 0, 0), ConfigError);
}

TEST_CASE("slice returns leading columns") {
  const SharedEmbedding emb(6, 4, 3);
  CHECK((emb.slice(4) - emb.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((emb.slice(1) - emb.matrix().col(0)).cwiseAbs().maxCoeff() == 0.0);
  // prefix consistency: A_{d_i} is the first d_i columns of A_{d_j}
  CHECK((emb.slice(2) - emb.slice(3).leftCols(2)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_THROWS_AS(emb.slice(0), ConfigError);
  CHECK_THROWS_AS(emb.slice(5), ConfigError);
}

TEST_CASE("box projection is the componentwise clamp") {
  Eigen::VectorXd interior(2);
  interior << 0.3, -0.7;
  CHECK((project_to_box(interior, {}) - interior).cwiseAbs().maxCoeff() ==
        0.0);

  Eigen::VectorXd outside(2);
  outside << 1.5, -0.2;
  Eigen::VectorXd expected(2);
  expected << 1.0, -0.2;
  CHECK((project_to_box(outside, {}) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embed beats random in-box points at projection") {
  auto rng = substream(99, 1);
  const SharedEmbedding emb(8, 3, 42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd z = sample_subspace_point(3, rng);
    const Eigen::VectorXd lifted = emb.slice(3) * z;
    const Eigen::VectorXd projected = emb.embed(z);
    const double best = (projected - lifted).norm();
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd x(8);
      for (int j = 0; j < 8; ++j) x[j] = uniform(rng, -1.0, 1.0);
      CHECK(best <= (x - lifted).norm() + 1e-12);
    }
  }
}

TEST_CASE("embed is idempotent on in-box products") {
  auto rng = substream(4, 2);
  const SharedEmbedding emb(5, 2, 11);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd z = sample_subspace_point(2, rng);
    const Eigen::VectorXd x = emb.embed(z);
    CHECK((project_to_box(x, {}) - x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pad appends zeros") {
  Eigen::VectorXd z(3);
  z << 0.3, -0.5, 0.1;
  const Eigen::VectorXd padded = pad(z, 5);
  REQUIRE(padded.size() == 5);
  CHECK(padded[0] == 0.3);
  CHECK(padded[1] == -0.5);
  CHECK(padded[2] == 0.1);
  CHECK(padded[3] == 0.0);
  CHECK(padded[4] == 0.0);

  CHECK((pad(z, 3) - z).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd empty(0);
  const Eigen::VectorXd two = pad(empty, 2);
  CHECK(two.size() == 2);
  CHECK(two.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(pad(z, 2), UsageError);
}

TEST_CASE("shared evaluation is exact across dimensions") {
  auto rng = substream(17, 3);
  const SharedEmbedding emb(64, 10, 5);
  const auto g = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  for (int trial = 0; trial < 200; ++trial) {
    const int di = 1 + static_cast<int>(uniform01(rng) * 9);
    const int dj = di + 1 +
                   static_cast<int>(uniform01(rng) * (10 - di));
    REQUIRE(dj <= 10);
    const Eigen::VectorXd z = sample_subspace_point(di, rng);
    const double lo = g(emb.embed(z));
    const double hi = g(emb.embed(pad(z, dj)));
    CHECK(lo == hi);  // zero tolerance
  }
}

TEST_CASE("first-iteration dataset holds one in-box evaluated point") {
  auto rng = substream(0, 4);
  const auto eval = [](const Eigen::VectorXd& z) { return z.sum(); };
  const SubspaceDataset data = init_dataset(5, rng, eval);
  REQUIRE(data.size() == 1);
  CHECK(data.dim() == 5);
  const double half = subspace_halfwidth(5);
  CHECK(data.point(0).cwiseAbs().maxCoeff() <= half);
  CHECK(data.value(0) == data.point(0).sum());
}

TEST_CASE("expansion zero-pads points and keeps values") {
  SubspaceDataset prev(2);
  Eigen::VectorXd z(2);
  z << 0.1, 0.2;
  prev.append(z, 3.5);

  const SubspaceDataset next = init_dataset(prev, 4);
  REQUIRE(next.size() == 1);
  CHECK(next.dim() == 4);
  Eigen::VectorXd expected(4);
  expected << 0.1, 0.2, 0.0, 0.0;
  CHECK((next.point(0) - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.value(0) == 3.5);

  const SubspaceDataset same = init_dataset(prev, 2);
  CHECK(same.size() == prev.size());
  CHECK((same.point(0) - prev.point(0)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(init_dataset(prev, 1), UsageError);
}

TEST_CASE("expansion preserves the multiset of values") {
  auto rng = substream(21, 5);
  SubspaceDataset prev(3);
  for (int i = 0; i < 30; ++i)
    prev.append(sample_subspace_point(3, rng), uniform(rng, -5.0, 5.0));
  const SubspaceDataset next = init_dataset(prev, 7);
  REQUIRE(next.size() == prev.size());
  for (Eigen::Index i = 0; i < prev.size(); ++i)
    CHECK(next.value(i) == prev.value(i));
}

TEST_CASE("dataset rejects bad appends") {
  SubspaceDataset data(2);
  Eigen::VectorXd z3(3);
  z3.setZero();
  CHECK_THROWS_AS(data.append(z3, 1.0), UsageError);
  Eigen::VectorXd z2(2);
  z2.setZero();
  CHECK_THROWS_AS(data.append(z2, std::nan("")), DataError);
}

TEST_CASE("embedding dump round-trips and has the documented layout") {
  const SharedEmbedding emb(4, 3, 77);
  std::ostringstream out(std::ios::binary);
  write_embedding(emb, out);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 16 + 4 * 3 * 8);
  CHECK(std::memcmp(bytes.data(), "DSEB", 4) == 0);
  std::uint32_t version = 0, rows = 0, cols = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&rows, bytes.data() + 8, 4);
  std::memcpy(&cols, bytes.data() + 12, 4);
  CHECK(version == 1);
  CHECK(rows == 4);
  CHECK(cols == 3);
  // row-major doubles: entry (1, 2) sits at index 1*3 + 2
  double probe = 0.0;
  std::memcpy(&probe, bytes.data() + 16 + (1 * 3 + 2) * 8, 8);
  CHECK(probe == emb.matrix()(1, 2));

  std::istringstream in(bytes, std::ios::binary);
  const Eigen::MatrixXd back = read_embedding(in);
  CHECK((back - emb.matrix()).cwiseAbs().maxCoeff() == 0.0);
}
