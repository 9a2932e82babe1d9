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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace spinreg {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double kUnitary = 1e-10;
// Relative to max(1, |H|_max); absolute for unit-scale operators.
inline constexpr double kHermitian = 1e-12;
}  // namespace tol

// Square complex matrix of power-of-two dimension, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::initializer_list<cplx> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const cplx> diag);

  std::size_t dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::span<const cplx> values() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  bool is_hermitian(double tolerance = tol::kHermitian) const;
  bool is_unitary(double tolerance = tol::kUnitary) const;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

// c = a * b into preallocated storage (no allocation if c already has the dim).
void multiply_into(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& c);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Max-abs difference after removing the best global phase from b.
double phase_aligned_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Tr(a^dagger b)
cplx trace_inner(const ComplexMatrix& a, const ComplexMatrix& b);

namespace pauli {
ComplexMatrix i2();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
ComplexMatrix h();
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

// I (x) ... (x) op (x) ... (x) I with op at `site`; site 0 is the most
// significant tensor factor.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::size_t site, std::size_t n_sites);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

HermitianEigen eigh(const ComplexMatrix& h);

// exp(-i h t) via Hermitian eigendecomposition.
ComplexMatrix evolve(const ComplexMatrix& h, double t);
ComplexMatrix evolve(const HermitianEigen& eig, double t);

// |Tr(u_target^dagger u_actual) / dim|^2
double gate_fidelity(const ComplexMatrix& u_target, const ComplexMatrix& u_actual);

}  // namespace spinreg
