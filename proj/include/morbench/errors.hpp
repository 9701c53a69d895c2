// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace morbench
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Inconsistent shapes, out-of-range arguments, malformed input.
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

// A factorization that was required to succeed did not (E, E - dt*A, reduced E).
class SingularSystem : public Error
{
public:
  using Error::Error;
};

// Trajectory produced non-finite samples.
class Divergence : public Error
{
public:
  using Error::Error;
};

// Eigenvalue or SVD iteration did not converge.
class ConvergenceFailure : public Error
{
public:
  using Error::Error;
};

// A decomposition delivered fewer directions than were asked for.
class RankDeficient : public Error
{
public:
  RankDeficient(const std::string &what, long achieved)
    : Error(what + " (achieved rank " + std::to_string(achieved) + ")"), achieved_rank(achieved)
  {
  }
  long achieved_rank;
};

// Bi-orthogonalization of cross-Gramian singular vectors is too ill-conditioned.
class BalancingBreakdown : public Error
{
public:
  using Error::Error;
};

}  // namespace morbench
