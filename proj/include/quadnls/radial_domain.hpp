#pragma once

// Radial discretisation of R^d for rotationally symmetric fields.
//
// Nodes are cell centred, r_j = (j + 1/2) h, so the (d-1)/r term of the radial
// Laplacian is never evaluated at the origin. Integrals use the midpoint rule
//
//     \int f dx  ~  sigma(d) sum_j f(r_j) r_j^{d-1} h,
//
// and the Laplacian is written in flux form,
//
//     (L f)_j = [a_{j+1/2}(f_{j+1} - f_j) - a_{j-1/2}(f_j - f_{j-1})] / (h^2 r_j^{d-1}),
//
// with face coefficients a_{j+1/2} = d h sum_{k<=j} r_k^{d-1} / r_{j+1/2}. This
// choice makes L symmetric in the quadrature inner product (so Green's identity
// holds exactly for the discrete gradient norm) and exact on constants and r^2,
// including the first cell. a_{-1/2} = 0 gives the even reflection at r = 0; a
// ghost value f_N = -f_{N-1} places a homogeneous Dirichlet condition at r = R.

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "quadnls/tridiagonal.hpp"

namespace quadnls {

using Complex = std::complex<double>;

struct GridSpec {
  int dim = 5;
  double radius = 0.0;
  int nodes = 0;
  double spacing = 0.0;
  double sphere_area = 0.0;    ///< |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  std::vector<double> r;       ///< node radii
  std::vector<double> weight;  ///< quadrature weights sigma r_j^{d-1} h
  std::vector<double> face;    ///< a_{j+1/2}, j = 0..N-1 (last entry is the r = R face)

  bool same_as(const GridSpec& other) const {
    return dim == other.dim && nodes == other.nodes && radius == other.radius;
  }
};

using Grid = std::shared_ptr<const GridSpec>;

Grid make_grid(int dim, double radius, int nodes);

/// Complex samples of a radial profile at the nodes of `grid`.
struct RadialField {
  Grid grid;
  std::vector<Complex> values;
  /// Set by the evolution code once a run has been declared singular; such
  /// fields are allowed to carry non-finite samples.
  bool post_blowup = false;

  RadialField() = default;
  explicit RadialField(Grid g) : grid(std::move(g)), values(grid ? grid->nodes : 0) {}
  RadialField(Grid g, std::vector<Complex> v);

  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

/// Two-component state (u, v) on one grid.
struct PairState {
  RadialField u, v;

  PairState() = default;
  PairState(RadialField u_, RadialField v_);
  explicit PairState(Grid g) : u(g), v(g) {}

  const Grid& grid() const { return u.grid; }
};

/// Throws GridMismatch unless both grids describe the same discretisation.
void require_same_grid(const GridSpec& a, const GridSpec& b);

/// Sample an analytic profile at the nodes.
template <typename F>
RadialField sample(const Grid& grid, F&& profile) {
  RadialField f(grid);
  for (int j = 0; j < grid->nodes; ++j) f.values[j] = Complex(profile(grid->r[j]));
  return f;
}

double integrate(const GridSpec& grid, std::span<const double> f);

/// Squared L^2 norm, \int |f|^2 dx.
double norm_sq(const RadialField& f);

/// Weighted inner product Re \int conj(f) g dx.
double inner_re(const RadialField& f, const RadialField& g);

RadialField laplacian(const RadialField& f);

/// \int |f'|^2 dx from node differences; equals -Re \int conj(f) L f dx exactly.
double gradient_norm_sq(const RadialField& f);

/// The radial Laplacian as a tridiagonal matrix acting on node values.
Tridiagonal<double> laplacian_matrix(const GridSpec& grid);

/// \int r^2 (|u|^2 + 2|v|^2) dx.
double second_moment(const PairState& s);

/// Cubic (4-point Lagrange) interpolation of f at radius x, using the even
/// extension across r = 0 and the odd (Dirichlet) extension across r = R;
/// returns 0 for x >= R.
Complex interpolate(const RadialField& f, double x);

}  // namespace quadnls
