#include "dieroll/randsource.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

namespace dieroll {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EntropyStream::EntropyStream(std::uint64_t seed, std::optional<std::uint64_t> budget)
    : engine_(seed), budget_(budget) {}

std::uint64_t EntropyStream::next_u64() {
  if (budget_ && used_ >= *budget_) throw EntropyExhausted();
  ++used_;
  return engine_();
}

double EntropyStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

SourceModel::SourceModel(std::vector<double> probs, double epsilon)
    : probs_(std::move(probs)), epsilon_(epsilon) {
  if (probs_.empty()) throw std::invalid_argument("source needs n >= 1");
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) {
    throw std::invalid_argument("source epsilon must be finite and non-negative");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("negative source probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(fmt::format("source probabilities sum to {:.17g}", sum));
  }
  if (max_deviation() > epsilon_ + 1e-12) {
    throw std::invalid_argument(fmt::format(
        "source deviates from uniform by {:.6g}, above declared epsilon {:.6g}", max_deviation(),
        epsilon_));
  }
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < probs_.size(); ++m) {
    acc += probs_[m];
    cdf_[m] = acc;
  }
}

SourceModel SourceModel::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("source needs n >= 1");
  return SourceModel(std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0);
}

SourceModel SourceModel::tight(std::vector<double> probs) {
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  double eps = 0.0;
  for (double p : probs) eps = std::max(eps, std::abs(p - inv_n));
  return SourceModel(std::move(probs), eps);
}

double SourceModel::max_deviation() const {
  const double inv_n = 1.0 / static_cast<double>(probs_.size());
  double eps = 0.0;
  for (double p : probs_) eps = std::max(eps, std::abs(p - inv_n));
  return eps;
}

std::size_t sample(const SourceModel& model, EntropyStream& stream) {
  const double u = stream.next_unit() * model.cdf_.back();
  auto it = std::upper_bound(model.cdf_.begin(), model.cdf_.end(), u);
  auto m = static_cast<std::size_t>(std::distance(model.cdf_.begin(), it));
  if (m >= model.modulus()) m = model.modulus() - 1;
  // Never return a zero-probability residue through rounding at the top.
  while (model.probs_[m] == 0.0 && m > 0) --m;
  return m;
}

BitSourceModel::BitSourceModel(std::vector<double> biases) : biases_(std::move(biases)) {
  for (double e : biases_) {
    if (!(e > 0.0 && e < 0.5)) {
      throw std::invalid_argument(fmt::format("bit bias {} outside (0, 1/2)", e));
    }
  }
}

double xor_bias(const BitSourceModel& bits, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > bits.size()) {
    throw std::out_of_range(fmt::format("bit block [{}, {}) outside {} bits", first,
                                        first + count, bits.size()));
  }
  double bias = 1.0;
  for (std::size_t i = first; i < first + count; ++i) bias *= 2.0 * bits.bias(i);
  return bias / 2.0;
}

double pile_up(const BitSourceModel& bits, std::size_t rounds) {
  return xor_bias(bits, 0, rounds);
}

int sample_combined_bit(const BitSourceModel& bits, std::size_t first, std::size_t count,
                        EntropyStream& stream) {
  if (count == 0 || first + count > bits.size()) throw std::out_of_range("bit block out of range");
  int acc = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    const int bit = stream.next_unit() < 0.5 + bits.bias(i) ? 0 : 1;
    acc ^= bit;
  }
  return acc;
}

namespace {

std::size_t output_bits(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw std::invalid_argument(
        fmt::format("bit-built sources need n a power of two, got {}", n));
  }
  return static_cast<std::size_t>(std::countr_zero(n));
}

}  // namespace

SourceModel build_source_from_bits(const BitSourceModel& bits, std::size_t n,
                                   std::size_t rounds) {
  const std::size_t b = output_bits(n);
  if (rounds == 0 || b * rounds > bits.size()) {
    throw std::out_of_range(fmt::format("need {} raw bits for n = {} at {} rounds, have {}",
                                        b * rounds, n, rounds, bits.size()));
  }
  std::vector<double> beta(b);
  for (std::size_t l = 0; l < b; ++l) beta[l] = xor_bias(bits, l * rounds, rounds);
  std::vector<double> probs(n);
  for (std::size_t m = 0; m < n; ++m) {
    double p = 1.0;
    for (std::size_t l = 0; l < b; ++l) p *= ((m >> l) & 1U) ? 0.5 - beta[l] : 0.5 + beta[l];
    probs[m] = p;
  }
  // prod(1/2 + |beta_l|) - 2^-b, accumulated term by term so that tiny biases
  // survive next to 1/n
  double eps = 0.0, scale = 1.0;
  for (double beta_l : beta) {
    const double a = std::abs(beta_l);
    eps = eps / 2.0 + a * scale + a * eps;
    scale /= 2.0;
  }
  return SourceModel(std::move(probs), eps);
}

std::size_t sample_from_bits(const BitSourceModel& bits, std::size_t n, std::size_t rounds,
                             EntropyStream& stream) {
  const std::size_t b = output_bits(n);
  std::size_t m = 0;
  for (std::size_t l = 0; l < b; ++l) {
    m |= static_cast<std::size_t>(sample_combined_bit(bits, l * rounds, rounds, stream)) << l;
  }
  return m;
}

}  // namespace dieroll
