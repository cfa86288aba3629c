#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bqce/lattice.hpp"
#include "bqce/types.hpp"

namespace bqce {

/// Value and first two derivatives of a scalar function.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// EAM toy model: Morse-type pair term, exponential density and a quartic
/// embedding function centred at rho_bar_0.
struct EamModel {
  double a = 4.4;
  double b = 3.0;
  double c = 5.0;
  double rho_bar_0 = 6.0 * 0.049787068367863944;  // 6 e^{-3}
  double density_cutoff = 1.8;
  double pair_cutoff = 2.5;

  static EamModel defaults() { return {}; }
  /// Defaults with rho_bar_0 = 6 e^{-b} recomputed for the given b.
  static EamModel with(double a, double b, double c);

  Jet phi(double r) const;
  Jet rho(double r) const;
  Jet embed(double rho_bar) const;
};

/// Relative neighbour positions seen from one site, d_k = y(eta_k) - y(xi).
struct SiteStencil {
  std::size_t count = 0;
  std::array<Vec2, kMaxNeighbors> d;
  std::array<std::uint8_t, kMaxNeighbors> mask;  // bit 0: pair term, bit 1: density term

  static constexpr std::uint8_t kPair = 1;
  static constexpr std::uint8_t kDensity = 2;

  void push(Vec2 offset, bool pair, bool density) {
    d[count] = offset;
    mask[count] = static_cast<std::uint8_t>((pair ? kPair : 0) | (density ? kDensity : 0));
    ++count;
  }
};

/// Derivatives of one site energy with respect to the neighbour offsets d_k.
/// The derivative with respect to the centre is minus the sum over k.
struct SiteDerivatives {
  std::array<Vec2, kMaxNeighbors> grad;
  /// hess(k, l) is the 2x2 block d^2 E / d d_k d d_l, stored row-major by
  /// block in a dense (2 count) x (2 count) matrix.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> hess;
};

/// Thrown by the kernel when two interacting atoms coincide; carries the
/// local neighbour index so callers can name the sites.
class CoincidentAtoms : public EvaluationError {
 public:
  explicit CoincidentAtoms(std::size_t local) : EvaluationError("coincident atoms"), local_index(local) {}
  std::size_t local_index;
};

/// Site energy 1/2 sum phi(|d_k|) + G(sum rho(|d_k|)) with optional gradient
/// and Hessian with respect to the offsets.
double eam_site_energy(const EamModel& model, const SiteStencil& stencil, SiteDerivatives* deriv = nullptr,
                       bool want_hessian = false);

/// Positions of every table site; halo and defect entries are ignored by the
/// evaluators below.
using Deformation = std::vector<Vec2>;

/// y(xi) = F xi on every site of the table.
Deformation homogeneous_deformation(const LatticeDomain& domain, const Mat2& F);

/// Stencil of `site` read from a deformation.
SiteStencil gather_stencil(const NeighborTable& nbrs, const Deformation& y, int site);

/// Site energy of a non-defect site; coincident neighbours raise an error
/// naming both sites.
double site_energy(const EamModel& model, const NeighborTable& nbrs, const Deformation& y, int site);

}  // namespace bqce
