#pragma once

#include <Eigen/Core>

#include "bqce/eam.hpp"

namespace bqce {

/// Fourth-order tensor d^2W/dF_ij dF_kl stored as a 4x4 matrix with row
/// index 2i+j and column index 2k+l.
using Tensor4 = Eigen::Matrix4d;

/// Cauchy-Born energy density and its derivatives at one strain.
struct StrainState {
  Mat2 F = Mat2::Identity();
  double W = 0.0;
  Mat2 dW = Mat2::Zero();
  Tensor4 d2W = Tensor4::Zero();
};

/// W(F) = E_0(y^F) / |vor(0)| summed over the reference shells of the model.
/// Raises EvaluationError for det F <= 0.
StrainState cb_density(const EamModel& model, const Mat2& F, bool want_hessian = true);

/// Energy density only, skipping derivative work.
double cb_energy(const EamModel& model, const Mat2& F);

/// F0 = t0 I with t0 the minimiser of t -> W(t I) on [0.8, 1.2].
Mat2 find_ground_state(const EamModel& model);

}  // namespace bqce
