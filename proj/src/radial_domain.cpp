#include "quadnls/radial_domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace quadnls {

Grid make_grid(int dim, double radius, int nodes) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "grid dimension must be >= 1, got " + std::to_string(dim));
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::InvalidArgument, "grid radius must be positive and finite");
  if (nodes < 16) throw Error(ErrorKind::InvalidArgument, "grid needs at least 16 nodes, got " + std::to_string(nodes));

  auto g = std::make_shared<GridSpec>();
  g->dim = dim;
  g->radius = radius;
  g->nodes = nodes;
  g->spacing = radius / nodes;
  g->sphere_area = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);

  const double h = g->spacing;
  g->r.resize(nodes);
  g->weight.resize(nodes);
  g->face.resize(nodes);
  double cumulative = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double rj = (j + 0.5) * h;
    const double rpow = std::pow(rj, dim - 1);
    g->r[j] = rj;
    g->weight[j] = g->sphere_area * rpow * h;
    cumulative += rpow;
    g->face[j] = dim * h * cumulative / ((j + 1) * h);
  }
  return g;
}

RadialField::RadialField(Grid g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw Error(ErrorKind::InvalidArgument, "field without grid");
  if (static_cast<int>(values.size()) != grid->nodes)
    throw Error(ErrorKind::GridMismatch, "field has " + std::to_string(values.size()) + " samples, grid has " +
                                             std::to_string(grid->nodes));
}

bool RadialField::all_finite() const {
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

PairState::PairState(RadialField u_, RadialField v_) : u(std::move(u_)), v(std::move(v_)) {
  if (!u.grid || !v.grid) throw Error(ErrorKind::InvalidArgument, "pair component without grid");
  require_same_grid(*u.grid, *v.grid);
  if (u.size() != v.size()) throw Error(ErrorKind::GridMismatch, "pair components differ in length");
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!a.same_as(b))
    throw Error(ErrorKind::GridMismatch, "grids differ: (d=" + std::to_string(a.dim) + ", N=" + std::to_string(a.nodes) +
                                             ") vs (d=" + std::to_string(b.dim) + ", N=" + std::to_string(b.nodes) + ")");
}

double integrate(const GridSpec& grid, std::span<const double> f) {
  if (static_cast<int>(f.size()) != grid.nodes) throw Error(ErrorKind::GridMismatch, "integrand length != grid nodes");
  double acc = 0.0;
  for (int j = 0; j < grid.nodes; ++j) acc += grid.weight[j] * f[j];
  return acc;
}

double norm_sq(const RadialField& f) {
  const auto& w = f.grid->weight;
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * std::norm(f.values[j]);
  return acc;
}

double inner_re(const RadialField& f, const RadialField& g) {
  require_same_grid(*f.grid, *g.grid);
  const auto& w = f.grid->weight;
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * (std::conj(f.values[j]) * g.values[j]).real();
  return acc;
}

Tridiagonal<double> laplacian_matrix(const GridSpec& grid) {
  const int n = grid.nodes;
  const double h = grid.spacing;
  Tridiagonal<double> m(n);
  for (int j = 0; j < n; ++j) {
    const double scale = 1.0 / (h * h * std::pow(grid.r[j], grid.dim - 1));
    const double right = grid.face[j];
    const double left = j > 0 ? grid.face[j - 1] : 0.0;
    m.lower[j] = left * scale;
    m.upper[j] = j + 1 < n ? right * scale : 0.0;
    // ghost f_N = -f_{N-1} doubles the outward flux on the last row
    m.diag[j] = -(left + (j + 1 < n ? right : 2.0 * right)) * scale;
  }
  return m;
}

RadialField laplacian(const RadialField& f) {
  const auto m = laplacian_matrix(*f.grid);
  RadialField out(f.grid);
  m.apply<Complex>(f.values, out.values);
  return out;
}

double gradient_norm_sq(const RadialField& f) {
  const auto& g = *f.grid;
  const int n = g.nodes;
  const double h = g.spacing;
  double acc = 0.0;
  for (int j = 0; j + 1 < n; ++j) acc += g.face[j] * std::norm(f.values[j + 1] - f.values[j]);
  acc += 2.0 * g.face[n - 1] * std::norm(f.values[n - 1]);
  return g.sphere_area * acc / h;
}

double second_moment(const PairState& s) {
  require_same_grid(*s.u.grid, *s.v.grid);
  const auto& g = *s.u.grid;
  double acc = 0.0;
  for (int j = 0; j < g.nodes; ++j)
    acc += g.weight[j] * g.r[j] * g.r[j] * (std::norm(s.u.values[j]) + 2.0 * std::norm(s.v.values[j]));
  return acc;
}

Complex interpolate(const RadialField& f, double x) {
  const auto& g = *f.grid;
  const int n = g.nodes;
  if (x >= g.radius) return {0.0, 0.0};
  x = std::abs(x);
  const double h = g.spacing;
  auto at = [&](int k) -> Complex {
    if (k < 0) return f.values[-k - 1];
    if (k >= n) {
      const int m = 2 * n - 1 - k;
      return m >= 0 ? -f.values[m] : Complex{};
    }
    return f.values[k];
  };
  const double s = x / h - 0.5;
  const int base = static_cast<int>(std::floor(s));
  const double t = s - base;  // position within [base, base+1]
  // Lagrange weights on nodes base-1, base, base+1, base+2
  const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return w0 * at(base - 1) + w1 * at(base) + w2 * at(base + 1) + w3 * at(base + 2);
}

}  // namespace quadnls
