#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bqce/blending.hpp"
#include "bqce/cauchy_born.hpp"
#include "bqce/eam.hpp"
#include "bqce/mesh.hpp"

namespace bqce {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Flattened description of an energy sum_T v_T W(grad y|_T) +
/// sum_xi w_xi E_xi(y) over "points" (mesh nodes plus any clamped lattice
/// sites the atomistic stencils read). Every point has reference coordinates
/// x; its deformed position is F x + u, with u taken from the unknown vector
/// for points that carry a dof and 0 otherwise.
struct AssemblyPlan {
  EamModel model;
  Mat2 F = Mat2::Identity();
  std::vector<Vec2> ref;
  std::vector<int> dof;  // index of the x-component in the unknown vector, or -1
  std::size_t unknowns = 0;

  struct SiteTerm {
    int site = -1;         // lattice site id, for diagnostics
    double weight = 1.0;   // 1 - beta
    std::uint32_t first = 0;  // stencil[first] is the centre
    std::uint32_t count = 0;  // neighbours, stored right after the centre
  };
  std::vector<SiteTerm> sites;
  std::vector<int> stencil;             // centre point followed by its neighbour points
  std::vector<std::uint8_t> stencil_mask;

  struct ElementTerm {
    int element = -1;
    double volume = 0.0;
    std::array<int, 3> points{};
    std::array<Vec2, 3> grad{};  // shape-function gradients in the reference element
  };
  std::vector<ElementTerm> elements;

  Vec2 position(std::size_t point, const Eigen::VectorXd& u) const {
    const int d = dof[point];
    Vec2 y = F * ref[point];
    if (d >= 0) y += Vec2(u[d], u[d + 1]);
    return y;
  }
};

/// Atomistic energy summed over every site whose stencil reads a site with
/// free_mask set; every unmasked table site is clamped to F xi. Point indices equal lattice site ids.
AssemblyPlan atomistic_plan(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                            const std::vector<std::uint8_t>& free_mask, const Mat2& F);

/// Free sites of the domain (hex_norm <= N-1, defects excluded).
std::vector<std::uint8_t> domain_free_mask(const LatticeDomain& domain);
/// Free sites with hex_norm <= radius-1, for the reduced atomistic problem.
std::vector<std::uint8_t> ball_free_mask(const LatticeDomain& domain, int radius);

/// Blended energy on a mesh with effective volumes already computed. Point
/// indices of mesh nodes equal node ids; Dirichlet nodes are clamped.
AssemblyPlan bqce_plan(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                       const Mesh& mesh, const BlendField& blend, const Mat2& F);

/// Structural nonzeros of the Hessian of a plan (values zero).
SparseMatrix hessian_pattern(const AssemblyPlan& plan);

namespace kernels {

/// Single-threaded reference implementations.
namespace serial {
double energy(const AssemblyPlan& plan, const Eigen::VectorXd& u);
double energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd& grad);
SparseMatrix hessian(const AssemblyPlan& plan, const SparseMatrix& pattern, const Eigen::VectorXd& u);
}  // namespace serial

/// OpenMP-parallel implementations; `reproducible` matches serial bitwise.
namespace omp {
double energy(const AssemblyPlan& plan, const Eigen::VectorXd& u, Reduction mode = Reduction::fast);
double energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd& grad,
                       Reduction mode = Reduction::fast);
SparseMatrix hessian(const AssemblyPlan& plan, const SparseMatrix& pattern, const Eigen::VectorXd& u);
}  // namespace omp

}  // namespace kernels

/// Smooth objective over the free unknowns, as consumed by the solver.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t size() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual double value_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const = 0;
  virtual SparseMatrix hessian(const Eigen::VectorXd& x) const = 0;
};

/// Objective backed by an assembly plan and the OpenMP kernels.
class PlanObjective final : public Objective {
 public:
  explicit PlanObjective(AssemblyPlan plan, Reduction mode = Reduction::fast);

  std::size_t size() const override { return plan_.unknowns; }
  double value(const Eigen::VectorXd& x) const override;
  double value_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;
  SparseMatrix hessian(const Eigen::VectorXd& x) const override;

  const AssemblyPlan& plan() const { return plan_; }
  Reduction mode() const { return mode_; }

  /// Deformed positions of every point.
  std::vector<Vec2> positions(const Eigen::VectorXd& x) const;

 private:
  AssemblyPlan plan_;
  Reduction mode_;
  mutable std::shared_ptr<const SparseMatrix> pattern_;
};

/// Gradient sup-norm and l2 norm of the blended energy at y = F0 x.
struct GhostForce {
  double sup = 0.0;
  double l2 = 0.0;
};
GhostForce ghost_force_norm(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                            const Mesh& mesh, const BlendField& blend, const Mat2& F0);

}  // namespace bqce
