// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "morbench/matrix_market.hpp"
#include "morbench/thermal_block.hpp"
#include "oracles.hpp"

using namespace morbench;

TEST(MatrixMarket, DenseRoundTripIsExact)
{
  oracle::Gen gen(1);
  const Matrix m = gen.gaussian(4, 3) * 1e-7;
  std::stringstream ss;
  mm::write(ss, m);
  EXPECT_EQ(mm::read_dense(ss), m);
}

TEST(MatrixMarket, SparseRoundTripIsExact)
{
  SparseMatrix s(5, 4);
  s.insert(0, 0) = 1.0 / 3.0;
  s.insert(4, 3) = -2.5e-300;
  s.insert(2, 1) = 7.0;
  std::stringstream ss;
  mm::write(ss, s);
  const SparseMatrix r = mm::read_sparse(ss);
  EXPECT_EQ(Matrix(r), Matrix(s));
}

TEST(MatrixMarket, ReadsSymmetricCoordinate)
{
  std::stringstream ss("%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 -1\n");
  Matrix want(2, 2);
  want << 4, -1, -1, 0;
  EXPECT_EQ(mm::read_dense(ss), want);
}

TEST(MatrixMarket, RejectsMalformedInput)
{
  std::stringstream none("");
  EXPECT_THROW(mm::read_sparse(none), InvalidArgument);
  std::stringstream banner("%%NotMatrixMarket\n");
  EXPECT_THROW(mm::read_sparse(banner), InvalidArgument);
  std::stringstream complex("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
  EXPECT_THROW(mm::read_sparse(complex), InvalidArgument);
  std::stringstream range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  EXPECT_THROW(mm::read_sparse(range), InvalidArgument);
  std::stringstream truncated("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
  EXPECT_THROW(mm::read_sparse(truncated), InvalidArgument);
}

TEST(MatrixMarket, SystemDirectoryRoundTrip)
{
  const auto dir = std::filesystem::temp_directory_path() / "morbench_mm_system";
  std::filesystem::remove_all(dir);
  thermal::ThermalBlockConfig cfg;
  cfg.grid_n = 8;
  const auto sys = thermal::build(cfg);
  mm::write_system(dir, sys);
  const auto back = mm::read_system(dir);
  ASSERT_EQ(back.states(), sys.states());
  ASSERT_EQ(back.parameters(), sys.parameters());
  for (std::size_t p = 0; p < sys.A_terms().size(); ++p)
  {
    EXPECT_EQ(Matrix(back.A_terms()[p]), Matrix(sys.A_terms()[p]));
  }
  EXPECT_EQ(back.B(), sys.B());
  EXPECT_EQ(back.C(), sys.C());

  std::filesystem::remove(dir / "E.mtx");
  const auto no_mass = mm::read_system(dir);
  EXPECT_EQ(Matrix(no_mass.E()), Matrix::Identity(64, 64));
  std::filesystem::remove_all(dir);
}

TEST(MatrixMarket, MissingSystemDirectoryFails)
{
  EXPECT_THROW(mm::read_system("/nonexistent/morbench"), InvalidArgument);
}
