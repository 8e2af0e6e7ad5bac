#pragma once

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "quadnls/ground_state.hpp"

namespace testing_support {

using namespace quadnls;

inline constexpr double kPi = std::numbers::pi;

/// Closed forms for g(r) = exp(-r^2/2) in five dimensions.
inline double gauss_l2() { return std::pow(kPi, 2.5); }              // \int e^{-r^2}
inline double gauss_grad() { return 2.5 * std::pow(kPi, 2.5); }      // \int r^2 e^{-r^2}
inline double gauss_cube() { return std::pow(2.0 * kPi / 3.0, 2.5); }  // \int e^{-3r^2/2}

inline PairState gaussian_pair(const Grid& g, double a = 1.0, double b = 1.0) {
  return PairState(sample(g, [&](double r) { return a * std::exp(-0.5 * r * r); }),
                   sample(g, [&](double r) { return b * std::exp(-0.5 * r * r); }));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Default ground state (omega = 1, R = 30, N = 4096), solved once per process.
inline const GroundStateResult& default_ground() {
  static const GroundStateResult res = [] {
    GroundStateConfig cfg;
    cfg.grid = make_grid(5, 30.0, 4096);
    return solve_ground_state(cfg);
  }();
  return res;
}

}  // namespace testing_support
