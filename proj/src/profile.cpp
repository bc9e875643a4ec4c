#include "tunnel/profile.hpp"

#include <algorithm>
#include <cmath>

#include "tunnel/errors.hpp"

namespace tunnel {

double parabolic_peak(std::span<const double> q, std::span<const double> y) {
  if (q.size() != y.size() || q.size() < 3) throw InvalidParameter("peak search needs matching arrays of >= 3 points");
  const auto i = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (i == 0 || i + 1 == y.size()) return q[i];
  const double a = y[i - 1], b = y[i], c = y[i + 1];
  const double curvature = a - 2.0 * b + c;
  if (curvature >= 0.0) return q[i];
  const double offset = 0.5 * (a - c) / curvature;
  const double step = 0.5 * (q[i + 1] - q[i - 1]);
  return q[i] + offset * step;
}

double half_height_front(std::span<const double> q, std::span<const double> y) {
  if (q.size() != y.size() || q.size() < 2) throw InvalidParameter("front search needs matching arrays");
  const double half = 0.5 * *std::max_element(y.begin(), y.end());
  for (std::size_t i = y.size() - 1; i > 0; --i) {
    if (y[i - 1] >= half && y[i] < half) {
      const double f = (y[i - 1] - half) / (y[i - 1] - y[i]);
      return q[i - 1] + f * (q[i] - q[i - 1]);
    }
  }
  return q.back();
}

ProfileMoments profile_moments(std::span<const double> q, std::span<const double> y) {
  if (q.size() != y.size() || q.size() < 2) throw InvalidParameter("moments need matching arrays");
  const double h = (q.back() - q.front()) / static_cast<double>(q.size() - 1);
  ProfileMoments m;
  double s1 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = (i == 0 || i + 1 == q.size()) ? 0.5 * h : h;
    m.norm += w * y[i];
    s1 += w * y[i] * q[i];
  }
  if (m.norm == 0.0) return m;
  m.mean = s1 / m.norm;
  double s2 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = (i == 0 || i + 1 == q.size()) ? 0.5 * h : h;
    s2 += w * y[i] * (q[i] - m.mean) * (q[i] - m.mean);
  }
  m.variance = s2 / m.norm;
  return m;
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

} // namespace tunnel
