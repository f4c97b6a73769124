#include <doctest.h>

#include <cmath>
#include <vector>

#include "snippet_smc/random_stream.hpp"

using namespace snippet_smc;

TEST_CASE("substreams are bitwise reproducible from (seed, index)") {
  RandomStream a(42);
  RandomStream b(42);
  auto sa = a.substream(7);
  auto sb = b.substream(7);
  for (int i = 0; i < 100; ++i) CHECK(sa.next_u64() == sb.next_u64());

  // Nested substreams reproduce too.
  auto na = RandomStream(9).substream(3).substream(11);
  auto nb = RandomStream(9).substream(3).substream(11);
  for (int i = 0; i < 10; ++i) CHECK(na.uniform() == nb.uniform());
}

TEST_CASE("distinct substreams look independent") {
  RandomStream root(7);
  auto s0 = root.substream(0);
  auto s1 = root.substream(1);
  const int n = 20000;
  double m0 = 0, m1 = 0, cross = 0;
  std::vector<double> x0(n), x1(n);
  for (int i = 0; i < n; ++i) {
    x0[i] = s0.uniform() - 0.5;
    x1[i] = s1.uniform() - 0.5;
    m0 += x0[i];
    m1 += x1[i];
  }
  m0 /= n;
  m1 /= n;
  for (int i = 0; i < n; ++i) cross += (x0[i] - m0) * (x1[i] - m1);
  const double corr = cross / n / (1.0 / 12.0);
  CHECK(std::abs(corr) < 0.05);
  CHECK(std::abs(m0) < 0.02);
  CHECK(std::abs(m1) < 0.02);
}

TEST_CASE("uniform lies in (0,1) and normals have the right moments") {
  RandomStream rng(123);
  const int n = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("uniform_index covers its range uniformly") {
  RandomStream rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<size_t>(rng.uniform_index(7))];
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}
