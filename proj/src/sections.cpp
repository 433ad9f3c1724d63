#include "svset/sections.hpp"

#include <cmath>
#include <numbers>

namespace svset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool inside(const TransferEvaluator& ev, Complex point, double epsilon, double band) {
  return ev.norm_value(point) >= (1.0 / epsilon) * (1.0 - band);
}

}  // namespace

std::vector<CrossSection> assemble_vertical(const BoundaryPointSet& points,
                                            const TransferEvaluator& ev,
                                            double epsilon, double membership_band) {
  std::vector<CrossSection> out;
  const std::vector<double>& ys = points.ordinates;
  std::vector<bool> in_section(ys.size(), false);
  for (size_t k = 0; k + 1 < ys.size(); ++k) {
    const double mid = 0.5 * (ys[k] + ys[k + 1]);
    if (inside(ev, Complex(points.x, mid), epsilon, membership_band)) {
      out.push_back({CrossSection::Kind::Interval, ys[k], ys[k + 1], points.x, 0.0});
      in_section[k] = in_section[k + 1] = true;
    }
  }
  // Isolated boundary points are recorded as zero-length sections.
  for (size_t k = 0; k < ys.size(); ++k) {
    if (!in_section[k])
      out.push_back({CrossSection::Kind::Interval, ys[k], ys[k], points.x, 0.0});
  }
  return out;
}

std::vector<CrossSection> assemble_circular(const BoundaryPointSet& points,
                                            const TransferEvaluator& ev,
                                            double epsilon, double membership_band) {
  std::vector<CrossSection> out;
  const std::vector<double>& th = points.ordinates;
  const double r = points.radius;
  if (th.empty()) return out;
  std::vector<bool> in_section(th.size(), false);
  for (size_t k = 0; k + 1 < th.size(); ++k) {
    const double mid = 0.5 * (th[k] + th[k + 1]);
    if (inside(ev, r * std::polar(1.0, mid), epsilon, membership_band)) {
      out.push_back({CrossSection::Kind::Arc, th[k], th[k + 1], 0.0, r});
      in_section[k] = in_section[k + 1] = true;
    }
  }
  // Wrap-around arc [theta_l, theta_1 + 2pi]; for a single ordinate this is
  // the full circle less that point.
  const double lo = th.back();
  const double hi = th.front() + kTwoPi;
  if (hi > lo) {
    const double mid = 0.5 * (lo + hi);
    if (inside(ev, r * std::polar(1.0, mid), epsilon, membership_band)) {
      out.push_back({CrossSection::Kind::Arc, lo, hi, 0.0, r});
      in_section.front() = in_section.back() = true;
    }
  }
  for (size_t k = 0; k < th.size(); ++k) {
    if (!in_section[k])
      out.push_back({CrossSection::Kind::Arc, th[k], th[k], 0.0, r});
  }
  return out;
}

std::vector<CrossSection> prune_conjugates(std::vector<CrossSection> sections,
                                           bool system_is_real) {
  if (!system_is_real) return sections;
  std::vector<CrossSection> out;
  out.reserve(sections.size());
  for (const CrossSection& s : sections) {
    if (s.kind == CrossSection::Kind::Interval) {
      if (s.hi < 0.0) continue;  // entirely below the real axis
    } else {
      if (s.lo > std::numbers::pi && s.hi < kTwoPi) continue;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<CrossSection> split_safeguard(std::vector<CrossSection> sections,
                                          std::optional<double> last_best,
                                          double rel_tol) {
  if (!last_best) return sections;
  for (size_t i = 0; i < sections.size(); ++i) {
    const CrossSection& s = sections[i];
    if (s.length() <= 0.0) continue;
    double lb = *last_best;
    if (s.kind == CrossSection::Kind::Arc) {
      // Arcs may live on a shifted branch; bring last_best into [lo, lo+2pi).
      while (lb < s.lo) lb += kTwoPi;
      while (lb >= s.lo + kTwoPi) lb -= kTwoPi;
    }
    if (lb <= s.lo || lb >= s.hi) continue;
    if (std::abs(lb - s.midpoint()) <= rel_tol * s.length()) {
      CrossSection left = s, right = s;
      left.hi = lb;
      right.lo = lb;
      sections[i] = left;
      sections.insert(sections.begin() + static_cast<std::ptrdiff_t>(i) + 1, right);
      break;  // only one section may be split per level search
    }
  }
  return sections;
}

}  // namespace svset
