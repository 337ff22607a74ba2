#include "dieroll/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dieroll {

double norm(const Vec3& v) { return std::hypot(v[0], v[1], v[2]); }

double distance(const Vec3& a, const Vec3& b) {
  return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

SpacetimeEvent SpacetimeEvent::make(double t, const Vec3& pos) {
  if (!std::isfinite(t) || !std::isfinite(pos[0]) || !std::isfinite(pos[1]) ||
      !std::isfinite(pos[2])) {
    throw std::invalid_argument("spacetime event with non-finite coordinate");
  }
  return SpacetimeEvent{t, pos};
}

const char* to_string(Separation s) {
  switch (s) {
    case Separation::Spacelike: return "spacelike";
    case Separation::Timelike: return "timelike";
    case Separation::Lightlike: return "lightlike";
  }
  return "?";
}

Separation separation(const SpacetimeEvent& a, const SpacetimeEvent& b, double tol) {
  const double dt = std::abs(b.t - a.t);
  const double dx = distance(a.pos, b.pos);
  if (std::abs(dt - dx) <= tol) return Separation::Lightlike;
  return dt < dx ? Separation::Spacelike : Separation::Timelike;
}

double causal_deficit(const SpacetimeEvent& cause, const SpacetimeEvent& effect) {
  return distance(cause.pos, effect.pos) - (effect.t - cause.t);
}

bool in_causal_past(const SpacetimeEvent& cause, const SpacetimeEvent& effect, double tol) {
  return causal_deficit(cause, effect) <= tol;
}

bool Ball::contains(const Vec3& p, double tol) const {
  return distance(center, p) <= radius + tol;
}

const char* to_string(LayoutConstraint c) {
  switch (c) {
    case LayoutConstraint::FiniteCoordinates: return "finite coordinates";
    case LayoutConstraint::PositiveRadius: return "r_i > 0";
    case LayoutConstraint::PositiveGap: return "d_ij > 0";
    case LayoutConstraint::RadiusBelowGap: return "2r_i < d_ij";
    case LayoutConstraint::DeadlinePositive: return "0 < t_i";
    case LayoutConstraint::DeadlineBelowGap: return "t_i < d_ij";
  }
  return "?";
}

std::string LayoutViolation::describe() const {
  if (i == j) return fmt::format("violates {} (i={})", to_string(constraint), i + 1);
  return fmt::format("violates {} (i={}, j={})", to_string(constraint), i + 1, j + 1);
}

Layout::Layout(std::vector<Ball> balls, std::vector<double> deadlines)
    : balls_(std::move(balls)), deadlines_(std::move(deadlines)) {
  if (balls_.size() < 2) throw std::invalid_argument("layout needs at least two balls");
  if (deadlines_.size() != balls_.size()) {
    throw std::invalid_argument(
        fmt::format("layout has {} balls but {} deadlines", balls_.size(), deadlines_.size()));
  }
  const std::size_t m = balls_.size();
  gaps_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      gaps_[i * m + j] = center_distance(i, j) - balls_[i].radius - balls_[j].radius;
    }
  }
}

double Layout::gap(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw std::out_of_range("layout index out of range");
  return gaps_[i * size() + j];
}

double Layout::center_distance(std::size_t i, std::size_t j) const {
  return distance(balls_.at(i).center, balls_.at(j).center);
}

double Layout::max_center_distance() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) best = std::max(best, center_distance(i, j));
  return best;
}

std::vector<LayoutViolation> validate_layout(const Layout& layout) {
  std::vector<LayoutViolation> out;
  const std::size_t m = layout.size();
  auto finite = [](const Ball& b) {
    return std::isfinite(b.center[0]) && std::isfinite(b.center[1]) &&
           std::isfinite(b.center[2]) && std::isfinite(b.radius);
  };
  bool all_finite = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (!finite(layout.ball(i)) || !std::isfinite(layout.deadline(i))) {
      out.push_back({LayoutConstraint::FiniteCoordinates, i, i});
      all_finite = false;
    }
  }
  if (!all_finite) return out;

  for (std::size_t i = 0; i < m; ++i) {
    if (!(layout.ball(i).radius > 0.0)) out.push_back({LayoutConstraint::PositiveRadius, i, i});
    if (!(layout.deadline(i) > 0.0)) out.push_back({LayoutConstraint::DeadlinePositive, i, i});
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double d = layout.gap(i, j);
      if (i < j && !(d > 0.0)) out.push_back({LayoutConstraint::PositiveGap, i, j});
      if (!(2.0 * layout.ball(i).radius < d)) {
        out.push_back({LayoutConstraint::RadiusBelowGap, i, j});
      }
      if (!(layout.deadline(i) < d - kGeomTolerance)) {
        out.push_back({LayoutConstraint::DeadlineBelowGap, i, j});
      }
    }
  }
  return out;
}

bool regions_spacelike(const Layout& layout, std::size_t i, std::size_t k) {
  if (i >= layout.size() || k >= layout.size()) {
    throw std::out_of_range("regions_spacelike: party index out of range");
  }
  if (i == k) throw std::invalid_argument("regions_spacelike: i and k must differ");
  const double longest_dt = std::max(layout.deadline(i), layout.deadline(k));
  return longest_dt < layout.gap(i, k) - kGeomTolerance;
}

}  // namespace dieroll
