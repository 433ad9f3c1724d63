#pragma once

#include <optional>
#include <vector>

#include "svset/pencils.hpp"
#include "svset/transfer.hpp"

namespace svset {

/// A cross section of the spectral value set: an interval on a vertical line
/// or an arc on an origin-centered circle. Arcs may wrap past 2pi (hi > 2pi).
/// Zero-length sections record isolated boundary points; they are kept but
/// never launch searches.
struct CrossSection {
  enum class Kind { Interval, Arc };
  Kind kind = Kind::Interval;
  double lo = 0.0;
  double hi = 0.0;
  double line_x = 0.0;    // Interval: the vertical line position
  double circle_r = 0.0;  // Arc: the circle radius

  double midpoint() const { return 0.5 * (lo + hi); }
  double length() const { return hi - lo; }
};

/// Keeps each adjacent ordinate pair whose midpoint lies inside the set
/// (||G|| >= eps^{-1} (1 - band)); isolated ordinates become zero-length
/// sections.
std::vector<CrossSection> assemble_vertical(const BoundaryPointSet& points,
                                            const TransferEvaluator& ev,
                                            double epsilon,
                                            double membership_band = 1e-12);

/// Same on a circle, including the wrap-around pair [theta_l, theta_1 + 2pi].
std::vector<CrossSection> assemble_circular(const BoundaryPointSet& points,
                                            const TransferEvaluator& ev,
                                            double epsilon,
                                            double membership_band = 1e-12);

/// For real-valued systems, drops sections lying entirely in the open lower
/// half-plane (they are duplicated by their conjugates). No-op otherwise.
std::vector<CrossSection> prune_conjugates(std::vector<CrossSection> sections,
                                           bool system_is_real);

/// Splits the (single) section that contains last_best into two at last_best
/// when last_best is within rel_tol * length of its midpoint. At most one
/// section is split per call; the union of sections is unchanged.
std::vector<CrossSection> split_safeguard(std::vector<CrossSection> sections,
                                          std::optional<double> last_best,
                                          double rel_tol);

}  // namespace svset
