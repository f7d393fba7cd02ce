#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "levylab/domain.hpp"
#include "levylab/kernel.hpp"

namespace levylab {

/// What a field is taken to be beyond the bounding box.
struct FarField {
  enum class Kind { Zero, Constant, Cosine };
  Kind kind = Kind::Zero;
  double value = 0.0;  // Constant
  Point xi{};          // Cosine: u(y) = cos(xi . y)

  static FarField zero() { return {}; }
  static FarField constant(double c) { return {Kind::Constant, c, {}}; }
  static FarField cosine(Point xi) { return {Kind::Cosine, 0.0, xi}; }
};

struct StencilOptions {
  // Cells with max(|i|, |j|) <= near_cells carry second-moment weights.
  int near_cells = 8;
};

class Convolver;

/// Translation-invariant discretization of Psi(-Delta) on the lattice hZ^2:
///   (L u)(x) = sum_{z != 0} W_z (u(x) - u(x + z)) + T u(x) - (far-field part),
/// where W_z is the kernel mass of the cell around z (near cells: second-moment
/// weighted), the four axis neighbours also carry the local Laplacian term
/// kappa / h^2 with kappa = 1/2 int_{cell 0} y_1^2 j, and T is the kernel mass
/// beyond the stencil reach.
class OperatorMatrix {
public:
  OperatorMatrix(const JumpKernel& kernel, double h, int reach, StencilOptions opts = {});
  OperatorMatrix(const OperatorMatrix&) = delete;
  OperatorMatrix& operator=(const OperatorMatrix&) = delete;
  ~OperatorMatrix();

  double h() const { return h_; }
  int reach() const { return reach_; }
  int width() const { return 2 * reach_ + 1; }
  const JumpKernel& kernel() const { return kernel_; }

  /// Off-diagonal magnitude for offset (di, dj) in cells; zero beyond the reach.
  double weight(int di, int dj) const;
  const std::vector<double>& weights() const { return weights_; }
  double kappa() const { return kappa_; }
  double tail() const { return tail_; }
  double diagonal() const { return diagonal_; }

  /// int_{max(|y1|,|y2|) > (reach + 1/2) h} cos(xi . y) j(|y|) dy.
  double cosine_tail(Point xi) const;
  /// Multiplier of the scheme on cos(xi . x) extended to all of R^2.
  double discrete_symbol(Point xi) const;

  /// FFT convolution engine for an n x n grid (n <= reach + 1), built on first use.
  const Convolver& convolver(int n) const;

private:
  JumpKernel kernel_;
  double h_;
  int reach_;
  std::vector<double> weights_;
  double kappa_ = 0.0;
  double tail_ = 0.0;
  double diagonal_ = 0.0;
  mutable std::map<int, std::unique_ptr<Convolver>> convolvers_;
  mutable std::mutex convolver_mutex_;
};

/// Stencil whose reach spans the whole bounding box of `grid`.
std::unique_ptr<OperatorMatrix> assemble(const DomainGrid& grid, const JumpKernel& kernel, StencilOptions opts = {});
std::unique_ptr<OperatorMatrix> assemble(const JumpKernel& kernel, double h, int reach, StencilOptions opts = {});

struct MMatrixReport {
  bool pass = false;
  double min_weight = 0.0;      // smallest W_z (off-diagonals are -W_z)
  double diagonal = 0.0;
  double dominance_margin = 0.0;  // diagonal - sum W_z
};
MMatrixReport check_m_matrix(const OperatorMatrix& op);

/// L u at every inside node (zero elsewhere), u read on the whole bbox.
Field apply(const OperatorMatrix& op, const Field& u, const FarField& far = {});
/// Same at a single node, by direct summation over the stencil.
double apply_at(const OperatorMatrix& op, const Field& u, std::size_t idx, const FarField& far = {});

struct SolveOptions {
  double tolerance = 1e-10;  // on ||r||_2 / ||b||_2
  int max_iterations = 20000;
};
struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Solves L u = f in D with u = g on the bbox outside D and zero beyond, by
/// conjugate gradients on the inside unknowns. `f` is read at inside nodes and
/// `g` at outside nodes; `guess` (optional) seeds the iteration.
Field solve_linear(const OperatorMatrix& op, const Field& f, const Field& g, const SolveOptions& opts = {},
                   SolveStats* stats = nullptr, const Field* guess = nullptr);
Field solve_linear(const DomainGrid& grid, const JumpKernel& kernel, const Field& f, const Field& g);

struct SemilinearOptions {
  double omega = 1.0;
  double tolerance = 1e-8;  // sup-norm change between iterates
  int max_iterations = 10000;
  SolveOptions linear;
};
struct SemilinearStats {
  int iterations = 0;
  double last_change = 0.0;
  int linear_iterations = 0;
};

/// Damped Picard iteration u <- (1 - omega) u + omega solve_linear(f(u), g).
Field solve_semilinear(const OperatorMatrix& op, const std::function<double(double)>& f, const Field& g,
                       const SemilinearOptions& opts = {}, SemilinearStats* stats = nullptr);

/// max over inside nodes of |L u - f(u)|.
double semilinear_residual(const OperatorMatrix& op, const Field& u, const std::function<double(double)>& f);

}  // namespace levylab
