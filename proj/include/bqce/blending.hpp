#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "bqce/lattice.hpp"

namespace bqce {

enum class Region : std::uint8_t { atomistic, blend, continuum };

/// Region decomposition by hopping distance d from the defect core:
/// atomistic d <= K0, blend K0 < d <= K0+K1, continuum beyond.
struct Regions {
  int K0 = 0;
  int K1 = 0;
  std::vector<int> distance;   // per table site
  std::vector<Region> label;   // per table site; defect points are atomistic
};

/// Raises Error when the blend region would reach the clamped boundary layer.
Regions classify_regions(const LatticeDomain& domain, int K0, int K1);

enum class BlendKind { qce, linear, smooth };
BlendKind parse_blend(std::string_view name);
std::string_view to_string(BlendKind kind);

/// Per-site weights: 0 selects the atomistic site energy, 1 the Cauchy-Born
/// one. Sites outside the free set carry 1 (defects 0).
struct BlendField {
  BlendKind kind = BlendKind::qce;
  int K0 = 0;
  int K1 = 0;
  std::vector<double> beta;
  /// Largest excursion of the unclamped smooth solution outside [0, 1].
  double overshoot = 0.0;
};

BlendField beta_qce(const Regions& regions);
BlendField beta_linear(const Regions& regions);
/// Minimiser of the second-difference roughness under the region
/// constraints. Requires K1 >= 2.
BlendField beta_smooth(const LatticeDomain& domain, const Regions& regions);

BlendField make_blend(const LatticeDomain& domain, const Regions& regions, BlendKind kind);

/// Sum over table sites and the three lattice directions of squared second
/// differences; points outside the table read 1.
double blend_roughness(const LatticeDomain& domain, const std::vector<double>& beta);

enum class ParameterRule { table, mu };
ParameterRule parse_rule(std::string_view name);

struct ParameterPlan {
  double alpha = 3.0;
  double p = 2.0;  // may be +infinity
  double gamma = 0.0;
  double mu = 0.0;  // 0 when the mu rule does not apply
  int K0 = 0;
  int K1 = 0;
  double mesh_exponent = 0.0;
};

/// Optimal blend width and mesh grading for a point defect with decay alpha
/// measured in the W^{1,p} seminorm.
ParameterPlan select_parameters(double alpha, double p, int K0, int N, ParameterRule rule);

}  // namespace bqce
