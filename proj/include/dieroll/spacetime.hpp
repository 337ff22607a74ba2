#pragma once

// Minkowski-geometry primitives in the agreed frame. Units have c = 1: one
// coordinate unit of time is the time light needs to cross one unit of
// distance.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace dieroll {

using Vec3 = std::array<double, 3>;

/// Width of the band around the light cone that is classified as lightlike.
inline constexpr double kGeomTolerance = 1e-9;

double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

struct SpacetimeEvent {
  double t = 0.0;
  Vec3 pos{};

  /// Throws std::invalid_argument on non-finite coordinates.
  static SpacetimeEvent make(double t, const Vec3& pos);

  friend bool operator==(const SpacetimeEvent&, const SpacetimeEvent&) = default;
};

enum class Separation { Spacelike, Timelike, Lightlike };

const char* to_string(Separation s);

/// Classifies the interval between two events. Symmetric and translation
/// invariant; |dt| and |dx| closer than `tol` count as lightlike.
Separation separation(const SpacetimeEvent& a, const SpacetimeEvent& b,
                      double tol = kGeomTolerance);

/// Amount by which `effect` misses the closed future light cone of `cause`:
/// |dx| - dt. Non-positive when a light-speed signal can connect them.
double causal_deficit(const SpacetimeEvent& cause, const SpacetimeEvent& effect);

/// True when `cause` lies in the causal past of `effect`, light cone included.
bool in_causal_past(const SpacetimeEvent& cause, const SpacetimeEvent& effect,
                    double tol = kGeomTolerance);

struct Ball {
  Vec3 center{};
  double radius = 0.0;

  bool contains(const Vec3& p, double tol = kGeomTolerance) const;
};

enum class LayoutConstraint {
  FiniteCoordinates,  // centers, radii and deadlines finite
  PositiveRadius,     // r_i > 0
  PositiveGap,        // d_ij > 0: balls do not touch
  RadiusBelowGap,     // 2 r_i < d_ij
  DeadlinePositive,   // 0 < t_i
  DeadlineBelowGap,   // t_i < d_ij
};

const char* to_string(LayoutConstraint c);

struct LayoutViolation {
  LayoutConstraint constraint;
  std::size_t i = 0;
  std::size_t j = 0;  // equals i for single-ball constraints

  std::string describe() const;
  friend bool operator==(const LayoutViolation&, const LayoutViolation&) = default;
};

/// The M balls B_i with their stage-II deadlines t_i. Gap distances
/// d_ij (center distance minus both radii) are cached at construction.
class Layout {
 public:
  /// Requires at least two balls and one deadline per ball; every other
  /// constraint is reported by validate_layout instead of thrown.
  Layout(std::vector<Ball> balls, std::vector<double> deadlines);

  std::size_t size() const { return balls_.size(); }
  const Ball& ball(std::size_t i) const { return balls_.at(i); }
  const std::vector<Ball>& balls() const { return balls_; }
  double deadline(std::size_t i) const { return deadlines_.at(i); }
  const std::vector<double>& deadlines() const { return deadlines_; }

  /// Shortest distance between any point of B_i and any point of B_j.
  double gap(std::size_t i, std::size_t j) const;
  double center_distance(std::size_t i, std::size_t j) const;
  double max_center_distance() const;

 private:
  std::vector<Ball> balls_;
  std::vector<double> deadlines_;
  std::vector<double> gaps_;
};

/// Empty result means the layout satisfies every constraint. Deadlines within
/// kGeomTolerance of a gap are reported, since such regions touch the light
/// cone.
std::vector<LayoutViolation> validate_layout(const Layout& layout);

/// Whether Q_ki = B_i x [0, t_i] and Q_ik = B_k x [0, t_k] are spacelike
/// separated. Time and space extents are independent, so the largest |dt| is
/// max(t_i, t_k) and the smallest |dx| is d_ik; the regions are spacelike iff
/// max(t_i, t_k) < d_ik (outside the lightlike band).
/// Throws std::out_of_range for bad indices and std::invalid_argument if i == k.
bool regions_spacelike(const Layout& layout, std::size_t i, std::size_t k);

}  // namespace dieroll
