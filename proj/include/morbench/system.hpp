// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <concepts>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "morbench/errors.hpp"

namespace morbench
{

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Fixed-step time grid; samples live at t_k = k*dt for k = 0..steps-1.
struct SimGrid
{
  double dt = 1e-3;
  Index steps = 1000;

  double horizon() const { return dt * static_cast<double>(steps); }

  static SimGrid over(double horizon, double dt)
  {
    return SimGrid{dt, static_cast<Index>(std::llround(horizon / dt))};
  }

  void validate() const
  {
    if (!(dt > 0.0) || !std::isfinite(dt))
    {
      throw InvalidArgument("SimGrid: dt must be positive and finite");
    }
    if (steps < 1)
    {
      throw InvalidArgument("SimGrid: at least one step is required");
    }
  }
};

struct ParameterPoint
{
  Vector theta;

  ParameterPoint() = default;
  explicit ParameterPoint(Vector values) : theta(std::move(values)) {}
  ParameterPoint(std::initializer_list<double> values)
    : theta(static_cast<Index>(values.size()))
  {
    Index i = 0;
    for (double v : values)
    {
      theta(i++) = v;
    }
  }

  Index size() const { return theta.size(); }
  double operator[](Index i) const { return theta(i); }

  std::string str() const
  {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (Index i = 0; i < theta.size(); ++i)
    {
      os << (i ? ", " : "") << theta(i);
    }
    os << ')';
    return os.str();
  }

  friend bool operator==(const ParameterPoint &a, const ParameterPoint &b)
  {
    return a.theta.size() == b.theta.size() && a.theta == b.theta;
  }
};

// Box of admissible parameters.
struct ParameterDomain
{
  Vector lower;
  Vector upper;

  bool contains(const ParameterPoint &p) const
  {
    if (p.size() != lower.size())
    {
      return false;
    }
    return ((p.theta.array() >= lower.array()) && (p.theta.array() <= upper.array())).all();
  }
};

struct Trajectory
{
  Matrix values;  // D x K, column k is the sample at t = k*dt
  SimGrid grid;
};

enum class Capture
{
  State,
  Output
};

namespace detail
{

template <class Mat>
struct Factorization;

template <>
struct Factorization<Matrix>
{
  Eigen::PartialPivLU<Matrix> lu;

  bool compute(const Matrix &m)
  {
    if (!m.allFinite())
    {
      return false;
    }
    lu.compute(m);
    const double rc = lu.rcond();
    return std::isfinite(rc) && rc > std::numeric_limits<double>::epsilon();
  }
  Matrix solve(const Matrix &rhs) const { return lu.solve(rhs); }
};

template <>
struct Factorization<SparseMatrix>
{
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;

  bool compute(const SparseMatrix &m)
  {
    SparseMatrix c = m;
    c.makeCompressed();
    lu.analyzePattern(c);
    lu.factorize(c);
    return lu.info() == Eigen::Success;
  }
  Matrix solve(const Matrix &rhs) const { return lu.solve(rhs); }
};

inline Matrix transposed(const Matrix &m) { return m.transpose(); }
inline SparseMatrix transposed(const SparseMatrix &m) { return SparseMatrix(m.transpose()); }

inline Matrix to_dense(const Matrix &m) { return m; }
inline Matrix to_dense(const SparseMatrix &m) { return Matrix(m); }

}  // namespace detail

// Generalized affine-parametric LTI system
//   E x' = (A_0 + sum_p theta_p A_p) x + B u,   y = C x.
// Mat is Matrix (dense, used for reduced models) or SparseMatrix (full models).
template <class Mat>
class AffineLTISystem
{
public:
  using MatrixType = Mat;

  AffineLTISystem(Mat E, std::vector<Mat> a_terms, Matrix B, Matrix C,
                  std::optional<ParameterDomain> domain = std::nullopt)
    : E_(std::move(E)), A_(std::move(a_terms)), B_(std::move(B)), C_(std::move(C)),
      domain_(std::move(domain))
  {
    const Index n = E_.rows();
    if (E_.cols() != n || n == 0)
    {
      throw InvalidArgument("AffineLTISystem: E must be square and nonempty");
    }
    if (A_.empty())
    {
      throw InvalidArgument("AffineLTISystem: A_0 is required");
    }
    for (const auto &a : A_)
    {
      if (a.rows() != n || a.cols() != n)
      {
        throw InvalidArgument("AffineLTISystem: A_p must be N x N");
      }
    }
    if (B_.rows() != n || C_.cols() != n)
    {
      throw InvalidArgument("AffineLTISystem: B must be N x M and C must be Q x N");
    }
    if (domain_ && (domain_->lower.size() != parameters() || domain_->upper.size() != parameters()))
    {
      throw InvalidArgument("AffineLTISystem: parameter domain must have P entries");
    }
    auto f = std::make_shared<detail::Factorization<Mat>>();
    if (!f->compute(E_))
    {
      throw SingularSystem("AffineLTISystem: mass matrix E is singular");
    }
    mass_ = std::move(f);
  }

  Index states() const { return E_.rows(); }
  Index inputs() const { return B_.cols(); }
  Index outputs() const { return C_.rows(); }
  Index parameters() const { return static_cast<Index>(A_.size()) - 1; }

  const Mat &E() const { return E_; }
  const std::vector<Mat> &A_terms() const { return A_; }
  const Matrix &B() const { return B_; }
  const Matrix &C() const { return C_; }
  const std::optional<ParameterDomain> &domain() const { return domain_; }

  void check_parameter(const ParameterPoint &theta) const
  {
    if (theta.size() != parameters())
    {
      throw InvalidArgument("parameter has " + std::to_string(theta.size()) +
                            " components, system expects " + std::to_string(parameters()));
    }
    if (domain_ && !domain_->contains(theta))
    {
      throw InvalidArgument("parameter " + theta.str() + " outside the declared domain");
    }
  }

  // A(theta) = A_0 + sum_p theta_p A_p.
  Mat assemble(const ParameterPoint &theta) const
  {
    check_parameter(theta);
    Mat a = A_.front();
    for (Index p = 0; p < parameters(); ++p)
    {
      a += theta[p] * A_[static_cast<std::size_t>(p + 1)];
    }
    return a;
  }

  // Dual system (E^T, A_p^T, C^T, B^T).
  AffineLTISystem dual() const
  {
    std::vector<Mat> at;
    at.reserve(A_.size());
    for (const auto &a : A_)
    {
      at.push_back(detail::transposed(a));
    }
    return AffineLTISystem(detail::transposed(E_), std::move(at), C_.transpose(), B_.transpose(),
                           domain_);
  }

  // E^{-1} rhs.
  Matrix solve_mass(const Matrix &rhs) const { return mass_->solve(rhs); }

private:
  Mat E_;
  std::vector<Mat> A_;
  Matrix B_;
  Matrix C_;
  std::optional<ParameterDomain> domain_;
  std::shared_ptr<const detail::Factorization<Mat>> mass_;
};

using SparseSystem = AffineLTISystem<SparseMatrix>;
using DenseSystem = AffineLTISystem<Matrix>;

template <class Mat>
Mat assemble(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta)
{
  return sys.assemble(theta);
}

// One implicit Euler step: (E - dt A) x_{k+1} = E x_k + dt B u_{k+1}.
// The factorization is built once and reused for every step and column.
template <class Mat>
class ImplicitEulerStepper
{
public:
  ImplicitEulerStepper(const Mat &E, const Mat &A, const Matrix &B, double dt)
    : E_(E), B_(B), dt_(dt)
  {
    const Mat shifted = E - dt * A;
    if (!lu_.compute(shifted))
    {
      throw SingularSystem("implicit Euler: E - dt*A is singular");
    }
  }

  // Advances every column of X by one step; U holds one input column per state column.
  void advance(Matrix &X, const Matrix *U = nullptr) const
  {
    Matrix rhs = E_ * X;
    if (U)
    {
      rhs.noalias() += dt_ * (B_ * (*U));
    }
    X = lu_.solve(rhs);
  }

  double dt() const { return dt_; }

private:
  Mat E_;
  Matrix B_;
  double dt_;
  detail::Factorization<Mat> lu_;
};

// Implicit-Euler trajectory from x(0) = x0. u is M x K (column k is u(t_k)) or empty for u = 0.
template <class Mat>
Trajectory simulate(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta, const Matrix &u,
                    const Vector &x0, const SimGrid &grid, Capture capture = Capture::Output)
{
  grid.validate();
  const Index n = sys.states();
  if (x0.size() != n)
  {
    throw InvalidArgument("simulate: x0 must have N entries");
  }
  const bool forced = u.size() > 0;
  if (forced && (u.rows() != sys.inputs() || u.cols() != grid.steps))
  {
    throw InvalidArgument("simulate: input must be M x K");
  }
  if (!x0.allFinite() || (forced && !u.allFinite()))
  {
    throw InvalidArgument("simulate: non-finite input or initial state");
  }
  const ImplicitEulerStepper<Mat> stepper(sys.E(), sys.assemble(theta), sys.B(), grid.dt);

  const bool states = capture == Capture::State;
  Trajectory traj{Matrix(states ? n : sys.outputs(), grid.steps), grid};
  Matrix x = x0;
  Matrix uk;
  for (Index k = 0; k < grid.steps; ++k)
  {
    if (k > 0)
    {
      if (forced)
      {
        uk = u.col(k);
        stepper.advance(x, &uk);
      }
      else
      {
        stepper.advance(x);
      }
    }
    if (states)
    {
      traj.values.col(k) = x.col(0);
    }
    else
    {
      traj.values.col(k).noalias() = sys.C() * x.col(0);
    }
  }
  return traj;
}

// Input given as a function of time, sampled at the grid points.
template <class Mat, class F>
  requires std::invocable<F, double> &&
           (!std::derived_from<std::remove_cvref_t<F>, Eigen::EigenBase<std::remove_cvref_t<F>>>)
Trajectory simulate(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta, F &&input,
                    const Vector &x0, const SimGrid &grid, Capture capture = Capture::Output)
{
  grid.validate();
  Matrix u(sys.inputs(), grid.steps);
  for (Index k = 0; k < grid.steps; ++k)
  {
    u.col(k) = input(static_cast<double>(k) * grid.dt);
  }
  return simulate(sys, theta, u, x0, grid, capture);
}

// Trajectory of E^T z' = A(theta)^T z + C^T v; output capture returns B^T z.
template <class Mat>
Trajectory simulate_dual(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                         const Matrix &v, const Vector &z0, const SimGrid &grid,
                         Capture capture = Capture::Output)
{
  return simulate(sys.dual(), theta, v, z0, grid, capture);
}

// max Re(lambda) over the generalized eigenvalues of the pencil (A, E).
inline double spectral_abscissa(const Matrix &E, const Matrix &A)
{
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows())
  {
    throw InvalidArgument("spectral_abscissa: E and A must be square of equal size");
  }
  detail::Factorization<Matrix> lu;
  if (!lu.compute(E))
  {
    throw SingularSystem("spectral_abscissa: E is singular");
  }
  const Matrix m = lu.solve(A);
  if (!m.allFinite())
  {
    throw SingularSystem("spectral_abscissa: E^{-1}A is not finite");
  }
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success)
  {
    throw ConvergenceFailure("spectral_abscissa: eigenvalue iteration failed");
  }
  return es.eigenvalues().real().maxCoeff();
}

inline double spectral_abscissa(const SparseMatrix &E, const SparseMatrix &A)
{
  return spectral_abscissa(Matrix(E), Matrix(A));
}

}  // namespace morbench
