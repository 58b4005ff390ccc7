#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wtv1d/grid.hpp"
#include "wtv1d/io.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

// Self-contained SVG plots: fixed 800x500 viewBox, inline styling, no
// external assets. Top panel overlays data and solution, bottom panel the
// dual variable inside its dashed weight envelope.

namespace svg_detail {

struct Box {
  double x0, y0, w, h;
};

inline std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, const Box& px,
                            double xmin, double xmax, double ymin, double ymax, const char* style) {
  if (ymax - ymin < 1e-300) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  std::ostringstream out;
  out << "<polyline fill=\"none\" " << style << " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double sx = px.x0 + (xs[i] - xmin) / (xmax - xmin) * px.w;
    const double sy = px.y0 + px.h - (ys[i] - ymin) / (ymax - ymin) * px.h;
    out << format_double(std::round(sx * 100.0) / 100.0) << ',' << format_double(std::round(sy * 100.0) / 100.0)
        << ' ';
  }
  out << "\"/>\n";
  return out.str();
}

inline void span(double& lo, double& hi, const std::vector<double>& v) {
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
}

}  // namespace svg_detail

inline void write_solution_svg(const std::string& path, const Signal& f, const Signal& u,
                               const std::vector<double>& v, const WeightField& weight,
                               bool weight_on_edges) {
  const Grid& g = f.grid;
  std::vector<double> xc(g.n), xn(g.n + 1), xe(std::max(g.num_edges(), 1));
  for (int j = 0; j < g.n; ++j) xc[j] = g.cell_center(j);
  for (int k = 0; k <= g.n; ++k) xn[k] = g.node(k);
  for (int i = 0; i < g.num_edges(); ++i) xe[i] = g.edge(i);

  double ylo = 0.0, yhi = 0.0;
  svg_detail::span(ylo, yhi, f.values);
  svg_detail::span(ylo, yhi, u.values);
  const double pad = 0.05 * std::max(yhi - ylo, 1e-12);

  const std::vector<double>& env = weight_on_edges ? weight.edge_values : weight.cell_values;
  const std::vector<double>& envx = weight_on_edges ? xe : xc;
  std::vector<double> env_neg(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) env_neg[i] = -env[i];
  double vlo = 0.0, vhi = 0.0;
  svg_detail::span(vlo, vhi, v);
  svg_detail::span(vlo, vhi, env);
  svg_detail::span(vlo, vhi, env_neg);
  const double vpad = 0.05 * std::max(vhi - vlo, 1e-12);

  const svg_detail::Box top{60, 20, 720, 260};
  const svg_detail::Box bot{60, 310, 720, 170};

  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_solution_svg: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n"
      << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n"
      << "<text x=\"60\" y=\"14\" font-family=\"monospace\" font-size=\"12\">data f (thin), solution u (thick)</text>\n"
      << "<text x=\"60\" y=\"304\" font-family=\"monospace\" font-size=\"12\">dual v with weight envelope (dashed)</text>\n";
  out << svg_detail::polyline(xc, f.values, top, g.a, g.b, ylo - pad, yhi + pad,
                              "stroke=\"#999999\" stroke-width=\"1\"");
  out << svg_detail::polyline(xc, u.values, top, g.a, g.b, ylo - pad, yhi + pad,
                              "stroke=\"#c0392b\" stroke-width=\"2\"");
  out << svg_detail::polyline(envx, env, bot, g.a, g.b, vlo - vpad, vhi + vpad,
                              "stroke=\"#7f8c8d\" stroke-width=\"1\" stroke-dasharray=\"5 3\"");
  out << svg_detail::polyline(envx, env_neg, bot, g.a, g.b, vlo - vpad, vhi + vpad,
                              "stroke=\"#7f8c8d\" stroke-width=\"1\" stroke-dasharray=\"5 3\"");
  out << svg_detail::polyline(xn, v, bot, g.a, g.b, vlo - vpad, vhi + vpad,
                              "stroke=\"#2980b9\" stroke-width=\"1.5\"");
  out << "</svg>\n";
}

// Regime map over a (mu, c) rectangle: one colored cell per sweep sample.
inline void write_regime_map_svg(const std::string& path, const std::vector<double>& mus,
                                 const std::vector<double>& cs, const std::vector<int>& regimes) {
  const std::size_t nm = mus.size(), nc = cs.size();
  if (regimes.size() != nm * nc) throw std::invalid_argument("write_regime_map_svg: size mismatch");
  const svg_detail::Box px{60, 20, 700, 430};
  const double mu_lo = mus.front(), mu_hi = mus.back();
  const double c_lo = cs.front(), c_hi = cs.back();
  const double cw = px.w / static_cast<double>(nm);
  const double ch = px.h / static_cast<double>(nc);
  const char* colors[3] = {"#3498db", "#e67e22", "#95a5a6"};

  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_regime_map_svg: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n"
      << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n"
      << "<text x=\"60\" y=\"14\" font-family=\"monospace\" font-size=\"12\">regimes over (mu, c): "
         "blue = plateaus with jump, orange = pure step, grey = zero</text>\n";
  for (std::size_t im = 0; im < nm; ++im)
    for (std::size_t ic = 0; ic < nc; ++ic) {
      const double x = px.x0 + (nm > 1 ? (mus[im] - mu_lo) / (mu_hi - mu_lo) * (px.w - cw) : 0.0);
      const double y = px.y0 + px.h - ch -
                       (nc > 1 ? (cs[ic] - c_lo) / (c_hi - c_lo) * (px.h - ch) : 0.0);
      out << "<rect x=\"" << format_double(std::round(x * 100.0) / 100.0) << "\" y=\""
          << format_double(std::round(y * 100.0) / 100.0) << "\" width=\""
          << format_double(std::round(cw * 100.0) / 100.0) << "\" height=\""
          << format_double(std::round(ch * 100.0) / 100.0) << "\" fill=\""
          << colors[regimes[im * nc + ic] % 3] << "\"/>\n";
    }
  out << "</svg>\n";
}

}  // namespace wtv1d
