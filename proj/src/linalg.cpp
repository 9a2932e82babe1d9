// Copyright 2026 The spinreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spinreg/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "spinreg/errors.hpp"
#include "spinreg/simd/kernels.hpp"

namespace spinreg {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
  if (!is_power_of_two(dim)) {
    throw ValidationError("matrix dimension must be a power of 2, got " + std::to_string(dim));
  }
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<cplx> row_major) : ComplexMatrix(dim) {
  if (row_major.size() != dim * dim) throw ValidationError("initializer size does not match dim*dim");
  std::copy(row_major.begin(), row_major.end(), data_.begin());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

cplx ComplexMatrix::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_dim(*this, o, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_dim(*this, o, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c;
  multiply_into(a, b, c);
  return c;
}

void multiply_into(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c) {
  require_same_dim(a, b, "multiply");
  if (c.dim() != a.dim()) c = ComplexMatrix(a.dim());
  simd::cgemm(a.dim(), a.data(), b.data(), c.data());
}

bool ComplexMatrix::is_hermitian(double tolerance) const {
  const double scale = std::max(1.0, max_abs());
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tolerance * scale) return false;
  return true;
}

bool ComplexMatrix::is_unitary(double tolerance) const {
  const ComplexMatrix p = adjoint() * (*this);
  return max_abs_diff(p, identity(dim_)) <= tolerance;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

double phase_aligned_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  const cplx overlap = trace_inner(b, a);
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1.0);
  return max_abs_diff(a, b * phase);
}

cplx trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "trace_inner");
  return simd::cdotc(a.values().size(), a.data(), b.data());
}

namespace pauli {
ComplexMatrix i2() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
ComplexMatrix h() {
  const double s = 1.0 / std::sqrt(2.0);
  return ComplexMatrix(2, {s, s, s, -s});
}
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix r(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) r(i * db + k, j * db + l) = aij * b(k, l);
    }
  return r;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::identity(1);
  ComplexMatrix r = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) r = kron(r, factors[i]);
  return r;
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::size_t site, std::size_t n_sites) {
  if (op.dim() != 2) throw ValidationError("embed_operator: operator must be 2x2");
  if (site >= n_sites) {
    throw ValidationError("embed_operator: site " + std::to_string(site) + " out of range for " +
                          std::to_string(n_sites) + " sites");
  }
  const std::size_t left = std::size_t{1} << site;
  const std::size_t right = std::size_t{1} << (n_sites - site - 1);
  return kron(kron(ComplexMatrix::identity(left), op), ComplexMatrix::identity(right));
}

HermitianEigen eigh(const ComplexMatrix& h) {
  if (!h.is_hermitian()) throw ValidationError("eigh: matrix is not Hermitian");
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
      m(i, j) = 0.5 * (h(a, b) + std::conj(h(b, a)));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) throw DomainError("eigh: eigendecomposition failed");
  HermitianEigen out;
  out.values.resize(h.dim());
  out.vectors = ComplexMatrix(h.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    for (Eigen::Index j = 0; j < n; ++j)
      out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = solver.eigenvectors()(i, j);
  }
  return out;
}

ComplexMatrix evolve(const HermitianEigen& eig, double t) {
  const std::size_t n = eig.vectors.dim();
  // V diag(e^{-i w t}) V^dagger
  ComplexMatrix scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) scaled(i, k) = eig.vectors(i, k) * std::polar(1.0, -eig.values[k] * t);
  return scaled * eig.vectors.adjoint();
}

ComplexMatrix evolve(const ComplexMatrix& h, double t) {
  if (t < 0) throw ValidationError("evolve: negative duration");
  return evolve(eigh(h), t);
}

double gate_fidelity(const ComplexMatrix& u_target, const ComplexMatrix& u_actual) {
  require_same_dim(u_target, u_actual, "gate_fidelity");
  const double d = static_cast<double>(u_target.dim());
  const double f = std::norm(trace_inner(u_target, u_actual) / d);
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace spinreg
