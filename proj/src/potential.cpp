#include "tunnel/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "tunnel/errors.hpp"

namespace tunnel {
namespace {

void check_segments(const std::vector<Segment>& segments) {
  if (segments.empty()) throw InvalidParameter("barrier needs at least one segment");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (!std::isfinite(s.left) || !std::isfinite(s.right) || !std::isfinite(s.height)) {
      throw InvalidParameter("barrier segment " + std::to_string(i) + " has a non-finite value");
    }
    if (!(s.right > s.left)) {
      std::ostringstream msg;
      msg << "barrier segment " << i << " is empty or reversed: [" << s.left << ", " << s.right << ")";
      throw InvalidParameter(msg.str());
    }
    if (s.height < 0.0) {
      std::ostringstream msg;
      msg << "barrier segment " << i << " has negative height " << s.height;
      throw InvalidParameter(msg.str());
    }
    if (i > 0 && segments[i - 1].right != s.left) {
      std::ostringstream msg;
      msg << "barrier segments " << i - 1 << " and " << i << " are not contiguous: " << segments[i - 1].right
          << " != " << s.left;
      throw InvalidParameter(msg.str());
    }
  }
}

} // namespace

Barrier::Barrier(BarrierKind kind, std::vector<Segment> segments) : kind_(kind), segments_(std::move(segments)) {
  check_segments(segments_);
  const double lo = segments_.front().left;
  const double hi = segments_.back().right;
  center_ = 0.5 * (lo + hi);
  radius_ = 0.5 * (hi - lo);
}

Barrier Barrier::rectangular(double v0, double width, double center) {
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw InvalidParameter("rectangular barrier needs V0 >= 0");
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidParameter("rectangular barrier needs width > 0");
  if (!std::isfinite(center)) throw InvalidParameter("rectangular barrier center must be finite");
  Barrier b(BarrierKind::rectangular, {Segment{center - 0.5 * width, center + 0.5 * width, v0}});
  b.center_ = center;
  b.radius_ = 0.5 * width;
  return b;
}

Barrier Barrier::piecewise(std::vector<Segment> segments) {
  return Barrier(BarrierKind::piecewise_constant, std::move(segments));
}

Barrier Barrier::sampled(double first, double spacing, std::vector<double> heights) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidParameter("sampled barrier needs spacing > 0");
  if (heights.empty()) throw InvalidParameter("sampled barrier needs at least one height");
  std::vector<Segment> segments;
  segments.reserve(heights.size());
  // Edges are computed from the index, not accumulated, and shared between
  // neighbours so the slabs stay exactly contiguous.
  auto edge = [&](std::size_t i) { return first + (static_cast<double>(i) - 0.5) * spacing; };
  for (std::size_t i = 0; i < heights.size(); ++i) segments.push_back({edge(i), edge(i + 1), heights[i]});
  return Barrier(BarrierKind::sampled, std::move(segments));
}

double Barrier::operator()(double q) const {
  if (q < segments_.front().left || q >= segments_.back().right) return 0.0;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), q,
                             [](double x, const Segment& s) { return x < s.right; });
  return it == segments_.end() ? 0.0 : it->height;
}

bool Barrier::is_free() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.height == 0.0; });
}

double Barrier::max_height() const {
  double h = 0.0;
  for (const auto& s : segments_) h = std::max(h, s.height);
  return h;
}

Barrier make_rectangular(double v0, double width, double center) { return Barrier::rectangular(v0, width, center); }

double evaluate(const Barrier& barrier, double q) { return barrier(q); }

const char* to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::rectangular: return "rectangular";
    case BarrierKind::piecewise_constant: return "piecewise";
    case BarrierKind::sampled: return "sampled";
  }
  return "unknown";
}

} // namespace tunnel
