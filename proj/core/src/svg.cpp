#include "swarmnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "swarmnet/errors.hpp"
#include "text.hpp"

namespace swarmnet::plot {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bounds {
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = std::numeric_limits<double>::infinity();
  double hi_x = -std::numeric_limits<double>::infinity();
  double hi_y = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  }
  bool empty() const { return lo_x > hi_x; }
};

class Canvas {
 public:
  Canvas(Bounds b, int width, int height) : width_(width), height_(height) {
    if (b.empty()) b = {-1, -1, 1, 1};
    const double span = std::max({b.hi_x - b.lo_x, b.hi_y - b.lo_y, 1e-6}) * 1.1;
    cx_ = 0.5 * (b.lo_x + b.hi_x);
    cy_ = 0.5 * (b.lo_y + b.hi_y);
    scale_ = (std::min(width, height) - 2 * kMargin) / span;
  }
  double x(double wx) const { return 0.5 * width_ + (wx - cx_) * scale_; }
  double y(double wy) const { return 0.5 * height_ - (wy - cy_) * scale_; }
  double len(double w) const { return w * scale_; }

 private:
  static constexpr double kMargin = 40.0;
  int width_, height_;
  double cx_ = 0.0, cy_ = 0.0, scale_ = 1.0;
};

std::string pt(const Canvas& c, double x, double y) { return detail::num(c.x(x)) + "," + detail::num(c.y(y)); }

}  // namespace

std::string agent_color(int agent) {
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
  return kPalette[agent % 10];
}

std::string render_svg(const PlotSpec& spec) {
  using detail::num;
  const auto* truth = spec.truth;
  const auto* pred = spec.prediction;
  if (truth != nullptr && pred != nullptr && truth->agents != pred->agents) {
    throw DimensionError("plot: truth has " + std::to_string(truth->agents) + " agents, prediction " +
                         std::to_string(pred->agents));
  }
  const bool stochastic = pred != nullptr && pred->mode == rollout::RolloutMode::stochastic;

  Bounds b;
  if (truth != nullptr)
    for (int t = 0; t < truth->steps; ++t)
      for (int i = 0; i < truth->agents; ++i) b.add(truth->at(t, i, 0), truth->at(t, i, 1));
  if (pred != nullptr) {
    for (int t = 0; t < pred->horizon; ++t)
      for (int i = 0; i < pred->agents; ++i) b.add(pred->at(t, i, 0), pred->at(t, i, 1));
    for (int s = 0; s < (stochastic ? pred->sample_count() : 0); ++s)
      for (int t = 0; t < pred->horizon; ++t)
        for (int i = 0; i < pred->agents; ++i) b.add(pred->sample(s, t, i, 0), pred->sample(s, t, i, 1));
  }
  for (const auto& o : spec.context.obstacles) {
    b.add(o.center.x - o.radius, o.center.y - o.radius);
    b.add(o.center.x + o.radius, o.center.y + o.radius);
  }
  if (spec.context.goal) b.add(spec.context.goal->x, spec.context.goal->y);
  const Canvas c(b, spec.width, spec.height);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
  if (!spec.metadata.empty()) out << "<metadata>" << escape(spec.metadata) << "</metadata>\n";
  out << "<defs>\n";
  const int agents = pred != nullptr ? pred->agents : 0;
  for (int i = 0; i < agents; ++i) {
    out << "<marker id=\"arrow" << i << "\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" "
        << "markerHeight=\"5\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\""
        << agent_color(i) << "\"/></marker>\n";
  }
  out << "</defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << escape(spec.title) << "</text>\n";
  }

  for (const auto& o : spec.context.obstacles) {
    out << "<circle class=\"obstacle\" cx=\"" << num(c.x(o.center.x)) << "\" cy=\"" << num(c.y(o.center.y))
        << "\" r=\"" << num(c.len(o.radius)) << "\" fill=\"black\" fill-opacity=\"0.8\"/>\n";
  }
  if (spec.context.goal) {
    const double gx = c.x(spec.context.goal->x), gy = c.y(spec.context.goal->y);
    out << "<path class=\"goal\" d=\"M" << num(gx - 7) << ',' << num(gy) << " L" << num(gx + 7) << ',' << num(gy)
        << " M" << num(gx) << ',' << num(gy - 7) << " L" << num(gx) << ',' << num(gy + 7)
        << "\" stroke=\"black\" stroke-width=\"2.5\"/>\n";
  }

  if (truth != nullptr) {
    for (int i = 0; i < truth->agents; ++i) {
      out << "<polyline class=\"truth\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1.5\" "
          << "stroke-dasharray=\"5,4\" points=\"";
      for (int t = 0; t < truth->steps; ++t) out << (t ? " " : "") << pt(c, truth->at(t, i, 0), truth->at(t, i, 1));
      out << "\"/>\n";
    }
  }

  if (stochastic) {
    for (int s = 0; s < pred->sample_count(); ++s) {
      for (int i = 0; i < pred->agents; ++i) {
        out << "<polyline class=\"sample\" fill=\"none\" stroke=\"" << agent_color(i)
            << "\" stroke-opacity=\"0.12\" stroke-width=\"1\" points=\"";
        for (int t = 0; t < pred->horizon; ++t) {
          out << (t ? " " : "") << pt(c, pred->sample(s, t, i, 0), pred->sample(s, t, i, 1));
        }
        out << "\"/>\n";
      }
    }
  }

  if (pred != nullptr) {
    const bool anchored = spec.anchor.size() == static_cast<std::size_t>(pred->agents) * 2;
    for (int i = 0; i < pred->agents; ++i) {
      out << "<g class=\"prediction\" stroke=\"" << agent_color(i) << "\" stroke-width=\"1.5\">";
      double px = anchored ? spec.anchor[static_cast<std::size_t>(i) * 2] : pred->at(0, i, 0);
      double py = anchored ? spec.anchor[static_cast<std::size_t>(i) * 2 + 1] : pred->at(0, i, 1);
      for (int t = anchored ? 0 : 1; t < pred->horizon; ++t) {
        const double qx = pred->at(t, i, 0), qy = pred->at(t, i, 1);
        out << "<line x1=\"" << num(c.x(px)) << "\" y1=\"" << num(c.y(py)) << "\" x2=\"" << num(c.x(qx))
            << "\" y2=\"" << num(c.y(qy)) << "\" marker-end=\"url(#arrow" << i << ")\"/>";
        px = qx;
        py = qy;
      }
      out << "</g>\n";
    }
  }

  // Legend: ground truth first, then one entry per predicted agent.
  int row = 0;
  const auto legend_y = [&](int r) { return 40 + 16 * r; };
  if (truth != nullptr) {
    out << "<g class=\"legend-truth\"><line x1=\"12\" y1=\"" << legend_y(row) << "\" x2=\"32\" y2=\""
        << legend_y(row) << "\" stroke=\"#999999\" stroke-dasharray=\"5,4\"/><text x=\"38\" y=\""
        << legend_y(row) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">ground truth</text></g>\n";
    ++row;
  }
  for (int i = 0; i < agents; ++i, ++row) {
    out << "<g class=\"legend-agent\"><line x1=\"12\" y1=\"" << legend_y(row) << "\" x2=\"32\" y2=\""
        << legend_y(row) << "\" stroke=\"" << agent_color(i) << "\" stroke-width=\"2\"/><text x=\"38\" y=\""
        << legend_y(row) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">agent " << i << "</text></g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) { detail::write_file(path, render_svg(spec)); }

}  // namespace swarmnet::plot
