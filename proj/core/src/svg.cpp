#include "th/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "th/error.hpp"

namespace th {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string render_svg(const Scene& scene, const QuotientComplex& cx, int size) {
  if (cx.mode != ComplexMode::Exact2d) throw Error(ErrorKind::Unsupported, "SVG output needs a planar scene");
  const Box& box = scene.bbox();
  const double w = box.max[0] - box.min[0];
  const double h = box.max[1] - box.min[1];
  const double scale = size / std::max(w, h);
  auto px = [&](const Point& p) {
    return fmt((p[0] - box.min[0]) * scale) + "," + fmt((box.max[1] - p[1]) * scale);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w * scale) << "\" height=\""
     << fmt(h * scale) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : cx.classes) {
    if (c.representative.polyline.size() < 2) continue;
    os << "<polyline fill=\"none\" stroke=\"#9bb\" stroke-width=\"1\" points=\"";
    for (const Point& p : c.representative.polyline) os << px(p) << ' ';
    os << "\"/>\n";
  }
  for (const auto& curve : cx.curves) {
    os << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (const Point& p : curve.points) os << px(p) << ' ';
    os << "\"/>\n";
  }
  for (const auto& c : cx.classes)
    for (const auto& b : c.contacts) {
      if (b.multiplicity < 2) continue;
      const std::string xy = px(b.coords);
      const auto comma = xy.find(',');
      os << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1)
         << "\" r=\"4\" stroke=\"#c33\" stroke-width=\"1.5\" fill=\""
         << (b.side > 0 ? "#c33" : "white") << "\"/>\n";
    }
  os << "</svg>\n";
  return os.str();
}

}  // namespace th
