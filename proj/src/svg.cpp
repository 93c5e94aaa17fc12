#include "slelab/svg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "slelab/results.hpp"

namespace slelab {

void render_traces(std::span<const CurveTrace> traces,
                   std::span<const cplx> targets,
                   std::span<const double> radii, const std::string& path,
                   std::size_t max_points_per_trace) {
  if (traces.empty()) throw std::invalid_argument("render_traces: no traces");
  if (targets.size() != radii.size()) {
    throw std::invalid_argument("render_traces: targets/radii length mismatch");
  }
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  auto grow = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const CurveTrace& tr : traces) {
    for (const cplx& p : tr.tips) grow(p.real(), p.imag());
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    grow(targets[i].real() - radii[i], targets[i].imag() - radii[i]);
    grow(targets[i].real() + radii[i], targets[i].imag() + radii[i]);
  }
  const double w = std::max(1e-9, xmax - xmin), h = std::max(1e-9, ymax - ymin);
  const double mx = 0.1 * w, my = 0.1 * h;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  // y axis flipped so the half-plane points up
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << format_g12(xmin - mx) << " " << format_g12(-(ymax + my)) << " "
      << format_g12(w + 2 * mx) << " " << format_g12(h + 2 * my) << "\">\n";
  const double stroke = 0.002 * std::max(w, h);
  for (const CurveTrace& tr : traces) {
    const std::size_t n = tr.tips.size();
    const std::size_t stride = std::max<std::size_t>(1, n / max_points_per_trace);
    out << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\""
        << format_g12(stroke) << "\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      out << format_g12(tr.tips[i].real()) << ","
          << format_g12(-tr.tips[i].imag()) << " ";
    }
    if ((n - 1) % stride != 0) {
      out << format_g12(tr.tips[n - 1].real()) << ","
          << format_g12(-tr.tips[n - 1].imag());
    }
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out << "<circle cx=\"" << format_g12(targets[i].real()) << "\" cy=\""
        << format_g12(-targets[i].imag()) << "\" r=\"" << format_g12(radii[i])
        << "\" fill=\"none\" stroke=\"#c00000\" stroke-width=\""
        << format_g12(stroke) << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace slelab
