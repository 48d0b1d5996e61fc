#pragma once

#include "exradon/model.hpp"
#include "exradon/radon.hpp"

#include <complex>
#include <vector>

namespace exradon {

struct FrequencySample {
  Vector xi;
  Complex value;
};

/// mu^(xi) = <mu, exp(-i x . xi)> for finite measures: exact sums for atomic
/// and grid models, polar quadrature about the effective support for
/// analytic ones. Throws InfiniteMass for homogeneous or origin-singular models.
Complex fourier_measure(const MeasureModel& m, const Eigen::Ref<const Vector>& xi, const QuadratureSettings& q = {});

/// One-dimensional transform of a push-forward at sigma.
Complex fourier_pushforward(const Pushforward& pf, double sigma);

struct SliceRow {
  double sigma;
  Complex slice;   // (R mu(w, .))^(sigma)
  Complex direct;  // mu^(sigma w)
  double abs_diff;
};

struct SliceReport {
  std::vector<SliceRow> rows;
  double max_abs_diff = 0.0;
};

SliceReport slice_residual(const MeasureModel& m, const Direction& omega, const std::vector<double>& sigmas,
                           const RadonSettings& s = {}, const QuadratureSettings& q = {});

}  // namespace exradon
