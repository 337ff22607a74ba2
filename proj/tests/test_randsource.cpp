#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <random>
#include <set>

#include "dieroll/randsource.hpp"

using namespace dieroll;

namespace {

// Bias of the XOR of the given bits by convolving the two-point laws one bit
// at a time.
double convolved_bias(const std::vector<double>& biases) {
  double p0 = 1.0;  // P(xor = 0) of the empty prefix
  for (double e : biases) {
    const double q0 = 0.5 + e;
    p0 = p0 * q0 + (1.0 - p0) * (1.0 - q0);
  }
  return p0 - 0.5;
}

// Same quantity by summing all 2^j bit patterns.
double enumerated_bias(const std::vector<double>& biases) {
  const std::size_t j = biases.size();
  double p0 = 0.0;
  for (std::uint64_t pattern = 0; pattern < (1ULL << j); ++pattern) {
    double p = 1.0;
    for (std::size_t i = 0; i < j; ++i) p *= (pattern >> i & 1U) ? 0.5 - biases[i] : 0.5 + biases[i];
    if (std::popcount(pattern) % 2 == 0) p0 += p;
  }
  return p0 - 0.5;
}

}  // namespace

TEST_CASE("pile-up examples", "[randsource]") {
  CHECK(pile_up(BitSourceModel({0.1}), 1) == Catch::Approx(0.1).margin(1e-15));
  CHECK(pile_up(BitSourceModel({0.1, 0.1, 0.1}), 3) == Catch::Approx(0.004).margin(1e-15));
  CHECK(pile_up(BitSourceModel({0.25, 0.1}), 2) == Catch::Approx(0.05).margin(1e-15));
  CHECK(enumerated_bias({0.1, 0.1, 0.1}) == Catch::Approx(0.004).margin(1e-15));
}

TEST_CASE("pile-up equals exact convolution", "[randsource][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(1e-6, 0.5 - 1e-6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> biases(16);
    for (double& e : biases) e = u(rng);
    const BitSourceModel bits(biases);
    for (std::size_t j = 1; j <= 16; ++j) {
      std::vector<double> prefix(biases.begin(), biases.begin() + static_cast<long>(j));
      REQUIRE(std::abs(pile_up(bits, j) - convolved_bias(prefix)) <= 1e-12);
      if (j <= 10 && trial < 20) REQUIRE(std::abs(pile_up(bits, j) - enumerated_bias(prefix)) <= 1e-12);
    }
  }
}

TEST_CASE("pile-up argument checks", "[randsource]") {
  const BitSourceModel bits({0.1, 0.2});
  CHECK_THROWS_AS(pile_up(bits, 0), std::out_of_range);
  CHECK_THROWS_AS(pile_up(bits, 3), std::out_of_range);
  CHECK_THROWS_AS(BitSourceModel({0.5}), std::invalid_argument);
  CHECK_THROWS_AS(BitSourceModel({0.0}), std::invalid_argument);
}

TEST_CASE("single combined bit gives a two-point source", "[randsource]") {
  const auto s = build_source_from_bits(BitSourceModel({0.2}), 2, 1);
  CHECK(s.prob(0) == Catch::Approx(0.7));
  CHECK(s.prob(1) == Catch::Approx(0.3));
  CHECK(s.epsilon() == Catch::Approx(0.2));
}

TEST_CASE("two combined bits match exhaustive expansion", "[randsource]") {
  // bits 0,1 feed output bit 0; bits 2,3 feed output bit 1
  const std::vector<double> raw{0.3, 0.2, 0.1, 0.4};
  const auto s = build_source_from_bits(BitSourceModel(raw), 4, 2);
  std::vector<double> expected(4, 0.0);
  for (unsigned pattern = 0; pattern < 16; ++pattern) {
    double p = 1.0;
    for (unsigned i = 0; i < 4; ++i) p *= (pattern >> i & 1U) ? 0.5 - raw[i] : 0.5 + raw[i];
    const unsigned m = ((pattern ^ (pattern >> 1)) & 1U) | ((((pattern >> 2) ^ (pattern >> 3)) & 1U) << 1);
    expected[m] += p;
  }
  double eps = 0.0;
  for (unsigned m = 0; m < 4; ++m) {
    CHECK(s.prob(m) == Catch::Approx(expected[m]).margin(1e-15));
    eps = std::max(eps, std::abs(expected[m] - 0.25));
  }
  CHECK(s.epsilon() == Catch::Approx(eps).margin(1e-15));
}

TEST_CASE("declared epsilon shrinks by 2e per round", "[randsource]") {
  const double e = 0.1;
  const BitSourceModel bits(std::vector<double>(24, e));
  double previous = INFINITY;
  for (std::size_t j = 1; j <= 8; ++j) {
    const double eps2 = build_source_from_bits(bits, 2, j).epsilon();
    CHECK(eps2 < previous);
    if (j > 1) CHECK(eps2 / previous == Catch::Approx(2 * e).epsilon(1e-12));
    previous = eps2;
  }
  for (std::size_t n : {4U, 8U}) {
    double prev = INFINITY;
    for (std::size_t j = 1; j * std::countr_zero(n) <= 24; ++j) {
      const double eps = build_source_from_bits(bits, n, j).epsilon();
      CHECK(eps < prev);
      if (j > 1) CHECK(eps / prev <= 2 * e + 1e-12);
      prev = eps;
    }
  }
}

TEST_CASE("bit sources need a power-of-two modulus and enough bits", "[randsource]") {
  const BitSourceModel bits({0.1, 0.1, 0.1});
  CHECK_THROWS_AS(build_source_from_bits(bits, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_source_from_bits(bits, 4, 2), std::out_of_range);
  CHECK_THROWS_AS(build_source_from_bits(bits, 2, 0), std::out_of_range);
}

TEST_CASE("source model invariants", "[randsource]") {
  CHECK_THROWS_AS(SourceModel({1.0, 0.0, 0.0, 0.0}, 0.5), std::invalid_argument);
  CHECK_NOTHROW(SourceModel({1.0, 0.0, 0.0, 0.0}, 0.75));
  CHECK_THROWS_AS(SourceModel({0.6, 0.6}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SourceModel({1.2, -0.2}, 1.0), std::invalid_argument);
  CHECK(SourceModel::tight({0.3, 0.3, 0.2, 0.2}).epsilon() == Catch::Approx(0.05));
}

TEST_CASE("uniform sampling covers Z_n evenly", "[randsource]") {
  const auto s = SourceModel::uniform(6);
  EntropyStream stream(99);
  std::vector<int> counts(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[sample(s, stream)];
  const double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
  for (int c : counts) CHECK(std::abs(c - draws / 6.0) <= 3 * sigma);
}

TEST_CASE("biased sampling converges to the model", "[randsource]") {
  const auto s = SourceModel::tight({0.3, 0.3, 0.2, 0.2});
  EntropyStream stream(7);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) ++counts[sample(s, stream)];
  for (std::size_t m = 0; m < 4; ++m) {
    const double p = s.prob(m);
    CHECK(std::abs(counts[m] - draws * p) <= 3 * std::sqrt(draws * p * (1 - p)));
  }
}

TEST_CASE("raw-bit sampling matches the built source", "[randsource]") {
  const BitSourceModel bits({0.3, 0.25, 0.2, 0.35});
  const auto s = build_source_from_bits(bits, 4, 2);
  EntropyStream stream(8);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) ++counts[sample_from_bits(bits, 4, 2, stream)];
  for (std::size_t m = 0; m < 4; ++m) {
    const double p = s.prob(m);
    CHECK(std::abs(counts[m] - draws * p) <= 3 * std::sqrt(draws * p * (1 - p)));
  }
}

TEST_CASE("zero-probability residues are never drawn", "[randsource]") {
  const SourceModel s({0.5, 0.5, 0.0}, 1.0);
  EntropyStream stream(5);
  for (int i = 0; i < 10000; ++i) REQUIRE(sample(s, stream) != 2);
}

TEST_CASE("entropy streams replay and respect their budget", "[randsource]") {
  EntropyStream a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  EntropyStream limited(1, 3);
  limited.next_u64();
  limited.next_unit();
  limited.next_u64();
  CHECK(limited.words_used() == 3);
  CHECK_THROWS_AS(limited.next_u64(), EntropyExhausted);
}

TEST_CASE("derived seeds are distinct and reproducible", "[randsource]") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL, 12345ULL}) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
      REQUIRE(derive_seed(base, s) == derive_seed(base, s));
      seen.insert(derive_seed(base, s));
    }
  }
  CHECK(seen.size() == 3000);
}
