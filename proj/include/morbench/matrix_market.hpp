// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "morbench/system.hpp"

// Plain-text Matrix Market I/O ("coordinate" for sparse, "array" for dense; real general only).
// A system directory holds E.mtx, A0.mtx ... AP.mtx, B.mtx and C.mtx.

namespace morbench::mm
{

namespace detail
{

inline std::string format_real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string lowercase(std::string s)
{
  for (auto &c : s)
  {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

}  // namespace detail

inline void write(std::ostream &os, const SparseMatrix &m)
{
  SparseMatrix c = m;
  c.makeCompressed();
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << c.rows() << ' ' << c.cols() << ' ' << c.nonZeros() << '\n';
  for (Index j = 0; j < c.outerSize(); ++j)
  {
    for (SparseMatrix::InnerIterator it(c, j); it; ++it)
    {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << detail::format_real(it.value()) << '\n';
    }
  }
}

inline void write(std::ostream &os, const Matrix &m)
{
  os << "%%MatrixMarket matrix array real general\n";
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
  {
    for (Index i = 0; i < m.rows(); ++i)
    {
      os << detail::format_real(m(i, j)) << '\n';
    }
  }
}

template <class Mat>
void write_file(const std::filesystem::path &path, const Mat &m)
{
  std::ofstream os(path);
  if (!os)
  {
    throw Error("cannot open " + path.string() + " for writing");
  }
  write(os, m);
}

// Reads either layout into a sparse matrix.
inline SparseMatrix read_sparse(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line))
  {
    throw InvalidArgument("matrix market: empty stream");
  }
  std::istringstream header(detail::lowercase(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
  {
    throw InvalidArgument("matrix market: missing banner");
  }
  if (field != "real" && field != "integer" && field != "double")
  {
    throw InvalidArgument("matrix market: only real matrices are supported");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
  {
    throw InvalidArgument("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(is, line))
  {
    if (!line.empty() && line[0] != '%')
    {
      break;
    }
  }
  std::istringstream size(line);
  Index rows = 0, cols = 0, nnz = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  if (format == "coordinate")
  {
    if (!(size >> rows >> cols >> nnz))
    {
      throw InvalidArgument("matrix market: bad size line");
    }
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    for (Index k = 0; k < nnz; ++k)
    {
      Index i = 0, j = 0;
      double v = 0.0;
      if (!(is >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
      {
        throw InvalidArgument("matrix market: bad coordinate entry");
      }
      triplets.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j)
      {
        triplets.emplace_back(j - 1, i - 1, v);
      }
    }
  }
  else if (format == "array")
  {
    if (!(size >> rows >> cols))
    {
      throw InvalidArgument("matrix market: bad size line");
    }
    for (Index j = 0; j < cols; ++j)
    {
      for (Index i = symmetric ? j : 0; i < rows; ++i)
      {
        double v = 0.0;
        if (!(is >> v))
        {
          throw InvalidArgument("matrix market: truncated array data");
        }
        if (v != 0.0)
        {
          triplets.emplace_back(i, j, v);
          if (symmetric && i != j)
          {
            triplets.emplace_back(j, i, v);
          }
        }
      }
    }
  }
  else
  {
    throw InvalidArgument("matrix market: unknown format '" + format + "'");
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

inline Matrix read_dense(std::istream &is) { return Matrix(read_sparse(is)); }

inline SparseMatrix read_sparse_file(const std::filesystem::path &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw InvalidArgument("cannot open " + path.string());
  }
  return read_sparse(is);
}

inline Matrix read_dense_file(const std::filesystem::path &path)
{
  return Matrix(read_sparse_file(path));
}

template <class Mat>
void write_system(const std::filesystem::path &dir, const AffineLTISystem<Mat> &sys)
{
  std::filesystem::create_directories(dir);
  write_file(dir / "E.mtx", sys.E());
  for (std::size_t p = 0; p < sys.A_terms().size(); ++p)
  {
    write_file(dir / ("A" + std::to_string(p) + ".mtx"), sys.A_terms()[p]);
  }
  write_file(dir / "B.mtx", sys.B());
  write_file(dir / "C.mtx", sys.C());
}

inline SparseSystem read_system(const std::filesystem::path &dir)
{
  std::vector<SparseMatrix> a;
  for (std::size_t p = 0;; ++p)
  {
    const auto path = dir / ("A" + std::to_string(p) + ".mtx");
    if (!std::filesystem::exists(path))
    {
      break;
    }
    a.push_back(read_sparse_file(path));
  }
  if (a.empty())
  {
    throw InvalidArgument("system directory " + dir.string() + " has no A0.mtx");
  }
  SparseMatrix e;
  if (std::filesystem::exists(dir / "E.mtx"))
  {
    e = read_sparse_file(dir / "E.mtx");
  }
  else
  {
    e.resize(a.front().rows(), a.front().cols());
    e.setIdentity();
  }
  return SparseSystem(std::move(e), std::move(a), read_dense_file(dir / "B.mtx"),
                      read_dense_file(dir / "C.mtx"));
}

}  // namespace morbench::mm
