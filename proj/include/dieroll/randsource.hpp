#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace dieroll {

class EntropyExhausted : public std::runtime_error {
 public:
  EntropyExhausted() : std::runtime_error("entropy stream exhausted") {}
};

/// Mixes a base seed with a stream index (splitmix64 finalizer), so runs and
/// parties get decorrelated, reproducible streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Deterministic seeded stream. Single owner; not safe for concurrent draws.
/// An optional budget caps the number of 64-bit words it will hand out.
class EntropyStream {
 public:
  explicit EntropyStream(std::uint64_t seed, std::optional<std::uint64_t> budget = std::nullopt);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_unit();
  std::uint64_t words_used() const { return used_; }

 private:
  std::mt19937_64 engine_;
  std::optional<std::uint64_t> budget_;
  std::uint64_t used_ = 0;
};

/// The distribution P_k(m) of a party's generator R_k over Z_n, with the
/// declared bias bound eps_k: |P_k(m) - 1/n| <= eps_k for every m.
class SourceModel {
 public:
  /// Throws std::invalid_argument unless the probabilities form a
  /// distribution and respect the declared epsilon.
  SourceModel(std::vector<double> probs, double epsilon);

  static SourceModel uniform(std::size_t n);
  /// Declares the exact maximum deviation as epsilon.
  static SourceModel tight(std::vector<double> probs);

  std::size_t modulus() const { return probs_.size(); }
  double epsilon() const { return epsilon_; }
  double prob(std::size_t m) const { return probs_.at(m); }
  const std::vector<double>& probs() const { return probs_; }
  double max_deviation() const;

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double epsilon_ = 0.0;

  friend std::size_t sample(const SourceModel&, EntropyStream&);
};

std::size_t sample(const SourceModel& model, EntropyStream& stream);

/// Independent raw bits; bit i is 0 with probability 1/2 + e_i, e_i in (0, 1/2).
class BitSourceModel {
 public:
  explicit BitSourceModel(std::vector<double> biases);

  std::size_t size() const { return biases_.size(); }
  double bias(std::size_t i) const { return biases_.at(i); }
  const std::vector<double>& biases() const { return biases_; }

 private:
  std::vector<double> biases_;
};

/// Bias of the XOR of bits [first, first + count): 2^(count-1) prod e_i.
double xor_bias(const BitSourceModel& bits, std::size_t first, std::size_t count);

/// Bias of the XOR of the first `rounds` bits. Throws std::out_of_range
/// unless 1 <= rounds <= bits.size().
double pile_up(const BitSourceModel& bits, std::size_t rounds);

/// Draws the XOR of bits [first, first + count) from the raw bit source.
int sample_combined_bit(const BitSourceModel& bits, std::size_t first, std::size_t count,
                        EntropyStream& stream);

/// Source over Z_n, n = 2^b, whose output bit l is the XOR of the disjoint
/// block of raw bits [l*rounds, (l+1)*rounds). Epsilon is the exact maximum
/// deviation of the product distribution, prod(1/2 + |beta_l|) - 1/n. Throws std::invalid_argument if n is
/// not a power of two >= 2 and std::out_of_range if b*rounds exceeds the
/// available bits.
SourceModel build_source_from_bits(const BitSourceModel& bits, std::size_t n, std::size_t rounds);

/// Draws m from the raw bits with the block construction above.
std::size_t sample_from_bits(const BitSourceModel& bits, std::size_t n, std::size_t rounds,
                             EntropyStream& stream);

}  // namespace dieroll
