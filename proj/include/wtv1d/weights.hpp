#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wtv1d/grid.hpp"

namespace wtv1d {

// Symbolic descriptions of a nonnegative continuous weight. Regularizer
// weights are sampled at interior edges, fidelity weights at cell centers.

struct ScalarWeight {
  double value = 1.0;
};

// mu |x - x0| + c
struct AbsValueWeight {
  double mu = 0.0;
  double c = 0.0;
  double x0 = 0.0;
};

// Continuous piecewise-affine interpolation through knots (xs, ys),
// extended constantly outside the knot range.
struct PiecewiseAffineWeight {
  std::vector<double> xs;
  std::vector<double> ys;
};

// One tent per interval: on [p_k, p_{k+1}] the weight is
// slope_k * min(x - p_k, p_{k+1} - x); it vanishes at every interval
// boundary and peaks at the midpoint.
struct TentWeight {
  std::vector<double> points;  // interval boundaries, increasing, size N+1
  std::vector<double> slopes;  // size N
};

// Raw per-edge samples; only meaningful on a grid with matching edge count.
struct SampledWeight {
  std::vector<double> edge_values;
};

struct WeightSpec {
  std::variant<ScalarWeight, AbsValueWeight, PiecewiseAffineWeight, TentWeight, SampledWeight> node;

  bool is_sampled() const { return std::holds_alternative<SampledWeight>(node); }

  const char* kind() const {
    switch (node.index()) {
      case 0: return "scalar";
      case 1: return "abs";
      case 2: return "pwa";
      case 3: return "tent";
      default: return "sampled";
    }
  }

  double evaluate(double x) const {
    if (const auto* s = std::get_if<ScalarWeight>(&node)) return s->value;
    if (const auto* a = std::get_if<AbsValueWeight>(&node)) return a->mu * std::abs(x - a->x0) + a->c;
    if (const auto* p = std::get_if<PiecewiseAffineWeight>(&node)) {
      const auto& xs = p->xs;
      const auto& ys = p->ys;
      if (x <= xs.front()) return ys.front();
      if (x >= xs.back()) return ys.back();
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - xs.begin());
      const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
      return ys[k - 1] + t * (ys[k] - ys[k - 1]);
    }
    if (const auto* t = std::get_if<TentWeight>(&node)) {
      const auto& p = t->points;
      if (x <= p.front() || x >= p.back()) return 0.0;
      auto it = std::upper_bound(p.begin(), p.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - p.begin()) - 1;
      return t->slopes[k] * std::min(x - p[k], p[k + 1] - x);
    }
    throw std::logic_error("WeightSpec::evaluate: sampled weights have no symbolic form");
  }
};

inline WeightSpec scalar_weight(double value) { return WeightSpec{ScalarWeight{value}}; }
inline WeightSpec abs_weight(double mu, double c, double x0 = 0.0) { return WeightSpec{AbsValueWeight{mu, c, x0}}; }
inline WeightSpec pwa_weight(std::vector<double> xs, std::vector<double> ys) {
  return WeightSpec{PiecewiseAffineWeight{std::move(xs), std::move(ys)}};
}
inline WeightSpec tent_weight(std::vector<double> points, std::vector<double> slopes) {
  return WeightSpec{TentWeight{std::move(points), std::move(slopes)}};
}
inline WeightSpec sampled_weight(std::vector<double> edge_values) {
  return WeightSpec{SampledWeight{std::move(edge_values)}};
}

namespace detail {

inline void validate_spec(const WeightSpec& spec, const Grid& g) {
  const double lo = g.a - 1e-12 * g.length();
  const double hi = g.b + 1e-12 * g.length();
  if (const auto* s = std::get_if<ScalarWeight>(&spec.node)) {
    if (s->value < 0.0) throw std::invalid_argument("weight: scalar value must be >= 0");
  } else if (const auto* a = std::get_if<AbsValueWeight>(&spec.node)) {
    if (a->mu < 0.0 || a->c < 0.0) throw std::invalid_argument("weight: abs parameters must be >= 0");
    if (a->x0 < lo || a->x0 > hi) throw std::invalid_argument("weight: abs center outside the domain");
  } else if (const auto* p = std::get_if<PiecewiseAffineWeight>(&spec.node)) {
    if (p->xs.size() < 2 || p->xs.size() != p->ys.size())
      throw std::invalid_argument("weight: pwa needs matching xs/ys with at least two knots");
    for (std::size_t k = 0; k < p->xs.size(); ++k) {
      if (p->ys[k] < 0.0) throw std::invalid_argument("weight: pwa values must be >= 0");
      if (p->xs[k] < lo || p->xs[k] > hi) throw std::invalid_argument("weight: pwa breakpoint outside the domain");
      if (k > 0 && !(p->xs[k] > p->xs[k - 1]))
        throw std::invalid_argument("weight: pwa breakpoints must be strictly increasing");
    }
  } else if (const auto* t = std::get_if<TentWeight>(&spec.node)) {
    if (t->points.size() < 2 || t->slopes.size() + 1 != t->points.size())
      throw std::invalid_argument("weight: tent needs N+1 points and N slopes");
    for (std::size_t k = 0; k < t->points.size(); ++k) {
      if (t->points[k] < lo || t->points[k] > hi)
        throw std::invalid_argument("weight: tent boundary outside the domain");
      if (k > 0 && !(t->points[k] > t->points[k - 1]))
        throw std::invalid_argument("weight: tent boundaries must be strictly increasing");
    }
    for (double s : t->slopes)
      if (s < 0.0) throw std::invalid_argument("weight: tent slopes must be >= 0");
  } else if (const auto* sw = std::get_if<SampledWeight>(&spec.node)) {
    if (static_cast<int>(sw->edge_values.size()) != g.num_edges())
      throw std::invalid_argument("weight: sampled edge count does not match the grid");
    for (double v : sw->edge_values)
      if (!(v >= 0.0)) throw std::invalid_argument("weight: sampled values must be >= 0");
  }
}

}  // namespace detail

// A weight realized on a grid: edge samples (regularizer), cell samples
// (fidelity), and the signed derivative jumps of the symbolic spec keyed
// by the nearest interior edge.
struct WeightField {
  Grid grid;
  std::vector<double> edge_values;
  std::vector<double> cell_values;
  std::map<int, double> dprime_jumps;

  double max_edge() const { return edge_values.empty() ? 0.0 : *std::max_element(edge_values.begin(), edge_values.end()); }
  double min_edge() const { return edge_values.empty() ? 0.0 : *std::min_element(edge_values.begin(), edge_values.end()); }
  double max_cell() const { return *std::max_element(cell_values.begin(), cell_values.end()); }

  double dprime_at(int edge) const {
    auto it = dprime_jumps.find(edge);
    return it == dprime_jumps.end() ? 0.0 : it->second;
  }

  // Weight raised by a constant; derivative jumps are unchanged.
  WeightField with_added(double s) const {
    if (s < 0.0) throw std::invalid_argument("WeightField::with_added: need s >= 0");
    WeightField out = *this;
    for (double& v : out.edge_values) v += s;
    for (double& v : out.cell_values) v += s;
    return out;
  }
};

inline WeightField realize_weight(const WeightSpec& spec, const Grid& grid) {
  detail::validate_spec(spec, grid);
  WeightField f;
  f.grid = grid;
  f.edge_values.resize(grid.num_edges());
  f.cell_values.resize(grid.num_cells());

  if (const auto* sw = std::get_if<SampledWeight>(&spec.node)) {
    f.edge_values = sw->edge_values;
    for (int j = 0; j < grid.n; ++j) {
      const int left = j - 1;
      const int right = j;
      if (left < 0) f.cell_values[j] = f.edge_values.front();
      else if (right > grid.num_edges() - 1) f.cell_values[j] = f.edge_values.back();
      else f.cell_values[j] = 0.5 * (f.edge_values[left] + f.edge_values[right]);
    }
    return f;
  }

  for (int i = 0; i < grid.num_edges(); ++i) f.edge_values[i] = spec.evaluate(grid.edge(i));
  for (int j = 0; j < grid.n; ++j) f.cell_values[j] = spec.evaluate(grid.cell_center(j));

  auto add_jump = [&](double x, double jump) {
    if (jump == 0.0) return;
    if (!(x > grid.a && x < grid.b)) return;  // kinks at the boundary carry no interior edge
    f.dprime_jumps[grid.nearest_edge(x)] += jump;
  };

  if (const auto* a = std::get_if<AbsValueWeight>(&spec.node)) {
    add_jump(a->x0, 2.0 * a->mu);
  } else if (const auto* p = std::get_if<PiecewiseAffineWeight>(&spec.node)) {
    for (std::size_t k = 1; k + 1 < p->xs.size(); ++k) {
      const double sl = (p->ys[k] - p->ys[k - 1]) / (p->xs[k] - p->xs[k - 1]);
      const double sr = (p->ys[k + 1] - p->ys[k]) / (p->xs[k + 1] - p->xs[k]);
      add_jump(p->xs[k], sr - sl);
    }
  } else if (const auto* t = std::get_if<TentWeight>(&spec.node)) {
    const auto& pts = t->points;
    for (std::size_t k = 0; k < t->slopes.size(); ++k) {
      add_jump(0.5 * (pts[k] + pts[k + 1]), -2.0 * t->slopes[k]);  // peak
      if (k + 1 < t->slopes.size()) add_jump(pts[k + 1], t->slopes[k] + t->slopes[k + 1]);
    }
  }
  return f;
}

// Fidelity weight field from raw cell samples.
inline WeightField cell_weight_field(const Grid& grid, std::vector<double> cells) {
  if (static_cast<int>(cells.size()) != grid.n)
    throw std::invalid_argument("cell_weight_field: cell count does not match the grid");
  for (double v : cells)
    if (!(v >= 0.0)) throw std::invalid_argument("cell_weight_field: values must be >= 0");
  WeightField f;
  f.grid = grid;
  f.cell_values = std::move(cells);
  f.edge_values.resize(grid.num_edges());
  for (int i = 0; i < grid.num_edges(); ++i)
    f.edge_values[i] = 0.5 * (f.cell_values[i] + f.cell_values[i + 1]);
  return f;
}

// --- JSON form -------------------------------------------------------------
//
//   {"kind":"scalar","value":V}
//   {"kind":"abs","mu":M,"c":C,"x0":X}          (x0 optional, default 0)
//   {"kind":"pwa","xs":[...],"ys":[...]}
//   {"kind":"tent","points":[...],"slopes":[...]}
//   {"kind":"sampled","values":[...]}            (one value per interior edge)

inline nlohmann::json to_json(const WeightSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind();
  if (const auto* s = std::get_if<ScalarWeight>(&spec.node)) {
    j["value"] = s->value;
  } else if (const auto* a = std::get_if<AbsValueWeight>(&spec.node)) {
    j["mu"] = a->mu;
    j["c"] = a->c;
    j["x0"] = a->x0;
  } else if (const auto* p = std::get_if<PiecewiseAffineWeight>(&spec.node)) {
    j["xs"] = p->xs;
    j["ys"] = p->ys;
  } else if (const auto* t = std::get_if<TentWeight>(&spec.node)) {
    j["points"] = t->points;
    j["slopes"] = t->slopes;
  } else if (const auto* sw = std::get_if<SampledWeight>(&spec.node)) {
    j["values"] = sw->edge_values;
  }
  return j;
}

inline WeightSpec weight_spec_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return scalar_weight(j.at("value").get<double>());
  if (kind == "abs")
    return abs_weight(j.at("mu").get<double>(), j.at("c").get<double>(), j.value("x0", 0.0));
  if (kind == "pwa")
    return pwa_weight(j.at("xs").get<std::vector<double>>(), j.at("ys").get<std::vector<double>>());
  if (kind == "tent")
    return tent_weight(j.at("points").get<std::vector<double>>(), j.at("slopes").get<std::vector<double>>());
  if (kind == "sampled") return sampled_weight(j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("weight_spec_from_json: unknown kind '" + kind + "'");
}

}  // namespace wtv1d
