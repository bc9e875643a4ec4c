#pragma once

#include <span>
#include <vector>

namespace tunnel {

enum class BarrierKind { rectangular, piecewise_constant, sampled };

/// Constant slab on the half-open interval [left, right).
struct Segment {
  double left = 0.0;
  double right = 0.0;
  double height = 0.0;

  double width() const { return right - left; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Finite-range potential V(q) >= 0 that vanishes for |q - center| > D.
///
/// Every kind is stored as an ordered, contiguous list of constant slabs so
/// the scattering solver treats all of them exactly. Values are immutable
/// after construction.
class Barrier {
public:
  /// Single slab of height `v0` and width `width` centered on `center`.
  static Barrier rectangular(double v0, double width, double center = 0.0);

  /// Contiguous, non-overlapping slabs given left to right.
  static Barrier piecewise(std::vector<Segment> segments);

  /// Heights on the uniform grid q_i = first + i*spacing, each read as a slab
  /// [q_i - spacing/2, q_i + spacing/2).
  static Barrier sampled(double first, double spacing, std::vector<double> heights);

  BarrierKind kind() const { return kind_; }
  double center() const { return center_; }
  double support_radius() const { return radius_; }
  double left_edge() const { return center_ - radius_; }
  double right_edge() const { return center_ + radius_; }
  std::span<const Segment> segments() const { return segments_; }

  /// V(q). Edges belong to the slab on their right.
  double operator()(double q) const;

  /// True when every slab has zero height.
  bool is_free() const;

  double max_height() const;

private:
  Barrier(BarrierKind kind, std::vector<Segment> segments);

  BarrierKind kind_;
  std::vector<Segment> segments_;
  double center_ = 0.0;
  double radius_ = 0.0;
};

Barrier make_rectangular(double v0, double width, double center);

double evaluate(const Barrier& barrier, double q);

const char* to_string(BarrierKind kind);

} // namespace tunnel
