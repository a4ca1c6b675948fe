#include "retswitch/render.hpp"

#include <algorithm>
#include <sstream>

namespace retswitch::render {

namespace {

constexpr long kMarginLeft = 48;
constexpr long kMarginRight = 24;
constexpr long kMarginTop = 32;
constexpr long kMarginBottom = 28;

std::string dec(const Rat& v) { return v.to_decimal(2); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

// Where the divergent ray leaving the last event meets the viewport edge.
engine::TraceEvent tail_end(const engine::TraceEvent& last, engine::Direction dir, const Rat& x_min,
                            const Rat& x_max) {
  if (dir == engine::Direction::MinusInfinity) return {last.t + (last.x - x_min), x_min, engine::EventKind::Hit};
  return {last.t + (x_max - last.x), x_max, engine::EventKind::Hit};
}

}  // namespace

PlotFrame::PlotFrame(const RenderOptions& options, Rat t_max, Rat x_min, Rat x_max)
    : left_(kMarginLeft),
      right_(static_cast<long>(options.width) - kMarginRight),
      top_(kMarginTop),
      bottom_(static_cast<long>(options.height) - kMarginBottom),
      t_max_(std::move(t_max)),
      x_min_(std::move(x_min)),
      x_max_(std::move(x_max)) {
  if (!(right_ > left_) || !(bottom_ > top_)) throw std::invalid_argument("render: canvas too small");
  if (t_max_.sign() <= 0 || !(x_max_ > x_min_)) throw std::invalid_argument("render: degenerate data range");
}

Rat PlotFrame::px_t(const Rat& t) const { return left_ + (right_ - left_) * t / t_max_; }

Rat PlotFrame::px_x(const Rat& x) const { return bottom_ - (bottom_ - top_) * (x - x_min_) / (x_max_ - x_min_); }

std::string PlotFrame::point(const Rat& t, const Rat& x) const { return dec(px_t(t)) + "," + dec(px_x(x)); }

PlotFrame frame_for(std::span<const engine::TraceEvent> events, const std::optional<Tail>& tail,
                    const RenderOptions& options) {
  if (events.empty()) throw std::invalid_argument("render: empty trace");
  Rat lo = 0;
  Rat hi = 1;
  Rat t_max = 0;
  for (const auto& e : events) {
    lo = std::min(lo, e.x);
    hi = std::max(hi, e.x);
    t_max = std::max(t_max, e.t);
  }
  const Rat pad(1, 2);
  lo -= pad;
  hi += pad;
  if (tail) t_max = std::max(t_max, tail_end(events.back(), tail->direction, lo, hi).t);
  if (t_max.sign() == 0) t_max = 1;
  return PlotFrame(options, t_max, lo, hi);
}

std::vector<std::string> polyline_vertices(std::span<const engine::TraceEvent> events, const PlotFrame& frame) {
  std::vector<std::string> out;
  const engine::TraceEvent* prev = nullptr;
  for (const auto& e : events) {
    if (prev != nullptr && prev->t == e.t && prev->x == e.x) continue;
    out.push_back(frame.point(e.t, e.x));
    prev = &e;
  }
  return out;
}

std::string render_trajectory(std::span<const engine::TraceEvent> events, const std::optional<Tail>& tail,
                              const RenderOptions& options) {
  const PlotFrame frame = frame_for(events, tail, options);
  const std::string x0 = dec(frame.px_x(0));
  const std::string x1 = dec(frame.px_x(1));
  const std::string left = dec(frame.px_t(0));
  const std::string right = dec(frame.px_t(frame.t_max()));

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width << "\" height=\""
     << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n"
     << "<defs>\n"
     << "<marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" "
        "orient=\"auto\">\n"
     << "<polyline points=\"0,0 10,5 0,10 0,0\" fill=\"black\" stroke=\"none\"/>\n"
     << "</marker>\n"
     << "</defs>\n";

  if (!options.title.empty()) {
    os << "<text x=\"" << options.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"serif\" "
       << "font-size=\"14\">" << escape(options.title) << "</text>\n";
  }

  // Axes and the two critical levels.
  os << "<line x1=\"" << left << "\" y1=\"" << dec(frame.px_x(frame.x_max())) << "\" x2=\"" << left << "\" y2=\""
     << dec(frame.px_x(frame.x_min())) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << x0 << "\" x2=\"" << right << "\" y2=\"" << x0
     << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << x1 << "\" x2=\"" << right << "\" y2=\"" << x1
     << "\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << kMarginLeft - 14 << "\" y=\"" << x0 << "\" font-family=\"serif\" font-size=\"12\" "
     << "dominant-baseline=\"middle\">0</text>\n";
  os << "<text x=\"" << kMarginLeft - 14 << "\" y=\"" << x1 << "\" font-family=\"serif\" font-size=\"12\" "
     << "dominant-baseline=\"middle\">1</text>\n";
  os << "<text x=\"" << right << "\" y=\"" << x0 << "\" dy=\"16\" font-family=\"serif\" font-size=\"12\" "
     << "font-style=\"italic\">t</text>\n";
  os << "<text x=\"" << kMarginLeft - 14 << "\" y=\"" << kMarginTop << "\" font-family=\"serif\" "
     << "font-size=\"12\" font-style=\"italic\">x</text>\n";

  os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  const auto vertices = polyline_vertices(events, frame);
  for (std::size_t i = 0; i < vertices.size(); ++i) os << (i ? " " : "") << vertices[i];
  os << "\"/>\n";

  if (tail) {
    const auto& last = events.back();
    const auto end = tail_end(last, tail->direction, frame.x_min(), frame.x_max());
    os << "<line x1=\"" << dec(frame.px_t(last.t)) << "\" y1=\"" << dec(frame.px_x(last.x)) << "\" x2=\""
       << dec(frame.px_t(end.t)) << "\" y2=\"" << dec(frame.px_x(end.x))
       << "\" stroke=\"black\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
  }

  if (!options.label_indices.empty()) {
    unsigned j = 0;
    for (const auto& e : events) {
      if (e.kind != engine::EventKind::Switch) continue;
      ++j;
      if (std::find(options.label_indices.begin(), options.label_indices.end(), j) ==
          options.label_indices.end()) {
        continue;
      }
      // Maxima get labels above the vertex, minima below.
      const char* dy = (e.x >= Rat(1, 2)) ? "-6" : "14";
      os << "<text x=\"" << dec(frame.px_t(e.t)) << "\" y=\"" << dec(frame.px_x(e.x)) << "\" dy=\"" << dy
         << "\" text-anchor=\"middle\" font-family=\"serif\" font-size=\"10\">α" << j << "</text>\n";
    }
  }

  os << "</svg>\n";
  return os.str();
}

std::string render_outcome(const engine::Outcome& outcome, const RenderOptions& options) {
  std::optional<Tail> tail;
  if (const auto* d = std::get_if<engine::Divergent>(&outcome.result)) tail = Tail{d->direction};
  return render_trajectory(outcome.events, tail, options);
}

}  // namespace retswitch::render
