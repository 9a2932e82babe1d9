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

#include "spinreg/simd/kernels.hpp"

#if defined(SPINREG_BUILD_AVX2)
#include <immintrin.h>
#endif

namespace spinreg::simd {

#if defined(SPINREG_BUILD_AVX2)

namespace {

// Multiplies the complex pair packed in b (re0, im0, re1, im1) by the scalar
// (ar, ai) broadcast into two registers.
inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d b) {
  const __m256d bswap = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

}  // namespace

void cgemm_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
  if (n < 2 || n % 2 != 0) {
    cgemm_scalar(n, a, b, c);
    return;
  }
  const double* bd = reinterpret_cast<const double*>(b);
  double* cd = reinterpret_cast<double*>(c);
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t j = 0; j < n; j += 2) _mm256_storeu_pd(crow + 2 * j, _mm256_setzero_pd());
    for (std::size_t k = 0; k < n; ++k) {
      const double ar_s = a[i * n + k].real();
      const double ai_s = a[i * n + k].imag();
      if (ar_s == 0.0 && ai_s == 0.0) continue;
      const __m256d ar = _mm256_set1_pd(ar_s);
      const __m256d ai = _mm256_set1_pd(ai_s);
      const double* brow = bd + 2 * k * n;
      // n is even here, so columns come in whole pairs.
      for (std::size_t j = 0; j < n; j += 2) {
        __m256d acc = _mm256_loadu_pd(crow + 2 * j);
        acc = _mm256_add_pd(acc, cmul_bcast(ar, ai, _mm256_loadu_pd(brow + 2 * j)));
        _mm256_storeu_pd(crow + 2 * j, acc);
      }
    }
  }
}

namespace {

template <bool Conj>
cplx dot_avx2(std::size_t len, const cplx* a, const cplx* b) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  // re accumulates a.re*b.re (+/-) a.im*b.im, im accumulates the cross terms.
  __m256d acc_rr = _mm256_setzero_pd();
  __m256d acc_x = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d va = _mm256_loadu_pd(ad + 2 * i);
    const __m256d vb = _mm256_loadu_pd(bd + 2 * i);
    acc_rr = _mm256_fmadd_pd(va, vb, acc_rr);  // (ar*br, ai*bi, ...)
    acc_x = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_x);  // (ar*bi, ai*br, ...)
  }
  alignas(32) double rr[4];
  alignas(32) double xx[4];
  _mm256_store_pd(rr, acc_rr);
  _mm256_store_pd(xx, acc_x);
  double re, im;
  if constexpr (Conj) {
    re = rr[0] + rr[1] + rr[2] + rr[3];
    im = (xx[0] - xx[1]) + (xx[2] - xx[3]);
  } else {
    re = (rr[0] - rr[1]) + (rr[2] - rr[3]);
    im = xx[0] + xx[1] + xx[2] + xx[3];
  }
  cplx out(re, im);
  for (; i < len; ++i) out += (Conj ? std::conj(a[i]) : a[i]) * b[i];
  return out;
}

}  // namespace

cplx cdotc_avx2(std::size_t len, const cplx* a, const cplx* b) { return dot_avx2<true>(len, a, b); }
cplx cdotu_avx2(std::size_t len, const cplx* a, const cplx* b) { return dot_avx2<false>(len, a, b); }

#else

void cgemm_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* c) { cgemm_scalar(n, a, b, c); }
cplx cdotc_avx2(std::size_t len, const cplx* a, const cplx* b) { return cdotc_scalar(len, a, b); }
cplx cdotu_avx2(std::size_t len, const cplx* a, const cplx* b) { return cdotu_scalar(len, a, b); }

#endif

bool avx2_compiled() {
#if defined(SPINREG_BUILD_AVX2)
  return true;
#else
  return false;
#endif
}

}  // namespace spinreg::simd
