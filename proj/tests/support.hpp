#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "dieroll/analysis.hpp"
#include "dieroll/protocol.hpp"
#include "dieroll/strategies.hpp"

namespace support {

using namespace dieroll;

// Centers one unit apart on the x axis; neighbours have gap 1 - 2r.
inline Layout line_layout(std::size_t m, double radius = 0.1, double deadline = 0.5) {
  std::vector<Ball> balls;
  for (std::size_t i = 0; i < m; ++i) balls.push_back({{static_cast<double>(i), 0.0, 0.0}, radius});
  return Layout(balls, std::vector<double>(m, deadline));
}

// Regular simplex-ish placement for M <= 4 with unit center distances.
inline Layout simplex_layout(std::size_t m, double radius = 0.1, double deadline = 0.5) {
  static const Vec3 corners[4] = {{0.0, 0.0, 0.0},
                                  {1.0, 0.0, 0.0},
                                  {0.5, 0.8660254037844386, 0.0},
                                  {0.5, 0.28867513459481287, 0.816496580927726}};
  std::vector<Ball> balls;
  for (std::size_t i = 0; i < m; ++i) balls.push_back({corners[i], radius});
  return Layout(balls, std::vector<double>(m, deadline));
}

inline Layout random_valid_layout(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> coord(0.0, 4.0);
  for (;;) {
    std::vector<Ball> balls(m);
    for (auto& b : balls) b.center = {coord(rng), coord(rng), coord(rng)};
    double min_center = INFINITY;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        min_center = std::min(min_center, distance(balls[i].center, balls[j].center));
    if (min_center < 0.5) continue;
    std::uniform_real_distribution<double> rad(0.01, min_center / 4.0);
    for (auto& b : balls) b.radius = rad(rng);
    std::vector<double> deadlines(m);
    for (std::size_t i = 0; i < m; ++i) {
      double min_gap = INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        min_gap = std::min(min_gap,
                           distance(balls[i].center, balls[j].center) - balls[i].radius - balls[j].radius);
      }
      deadlines[i] = std::uniform_real_distribution<double>(0.05, 0.95)(rng) * min_gap;
    }
    return Layout(balls, deadlines);
  }
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t size) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(size);
  double total = 0.0;
  for (double& v : p) total += (v = e(rng));
  for (double& v : p) v /= total;
  return p;
}

// A random source over Z_n with maximum deviation at most `max_eps`.
inline SourceModel random_source(std::mt19937_64& rng, std::size_t n, double max_eps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> d(n);
  double mean = 0.0;
  for (double& v : d) mean += (v = u(rng));
  mean /= static_cast<double>(n);
  double span = 0.0;
  for (double& v : d) span = std::max(span, std::abs(v -= mean));
  std::vector<double> p(n);
  const double scale = span > 0.0 ? max_eps / span : 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (p[i] = 1.0 / static_cast<double>(n) + d[i] * scale);
  for (double& v : p) v /= total;
  return SourceModel::tight(p);
}

inline std::shared_ptr<const ProtocolParams> make_params(OutcomePartition partition,
                                                         std::vector<double> eps, Layout layout,
                                                         ProtocolTiming timing = {}) {
  return std::make_shared<const ProtocolParams>(std::move(partition), std::move(eps),
                                                std::move(layout), std::move(timing));
}

inline std::shared_ptr<const ProtocolParams> unbiased_params(std::size_t m, std::size_t n) {
  return make_params(unbiased_partition(n), std::vector<double>(m, 0.0), simplex_layout(m));
}

inline std::vector<StrategyPtr> all_honest(std::size_t m, std::size_t n) {
  std::vector<StrategyPtr> s;
  for (std::size_t k = 0; k < m; ++k) s.push_back(honest_strategy(SourceModel::uniform(n)));
  return s;
}

}  // namespace support
