#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "retswitch/engine.hpp"
#include "retswitch/rat.hpp"

namespace retswitch::render {

struct RenderOptions {
  unsigned width = 960;
  unsigned height = 320;
  /// 1-based turning point indices to annotate as alpha_j; empty labels none.
  std::vector<unsigned> label_indices;
  std::string title;
};

/// Exact affine map from (t, x) data space onto the SVG canvas.
class PlotFrame {
 public:
  PlotFrame(const RenderOptions& options, Rat t_max, Rat x_min, Rat x_max);

  [[nodiscard]] Rat px_t(const Rat& t) const;
  [[nodiscard]] Rat px_x(const Rat& x) const;
  /// "px,py" with two fractional digits, as written into the SVG.
  [[nodiscard]] std::string point(const Rat& t, const Rat& x) const;

  [[nodiscard]] const Rat& t_max() const { return t_max_; }
  [[nodiscard]] const Rat& x_min() const { return x_min_; }
  [[nodiscard]] const Rat& x_max() const { return x_max_; }

 private:
  Rat left_, right_, top_, bottom_;
  Rat t_max_, x_min_, x_max_;
};

/// Divergent tail to draw after the last event, ending on the viewport edge.
struct Tail {
  engine::Direction direction;
};

/// Frame used by render_trajectory for the given trace.
PlotFrame frame_for(std::span<const engine::TraceEvent> events, const std::optional<Tail>& tail,
                    const RenderOptions& options);

/// SVG 1.1 document: path through every event point, guide lines at x = 0 and
/// x = 1, optional alpha_j labels, and an arrow-tipped tail for divergent
/// runs. Throws std::invalid_argument for an empty trace.
std::string render_trajectory(std::span<const engine::TraceEvent> events, const std::optional<Tail>& tail,
                              const RenderOptions& options);

/// Convenience overload that derives the tail from the outcome.
std::string render_outcome(const engine::Outcome& outcome, const RenderOptions& options);

/// Polyline vertices of a rendered trace: consecutive duplicate points collapse.
std::vector<std::string> polyline_vertices(std::span<const engine::TraceEvent> events, const PlotFrame& frame);

}  // namespace retswitch::render
