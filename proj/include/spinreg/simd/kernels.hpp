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

// Dense complex kernels used by every propagator product. Each kernel has a
// portable scalar reference and an AVX2/FMA variant; the variant is chosen
// once at runtime from CPUID and can be pinned for equivalence testing.

#include <complex>
#include <cstddef>
#include <string_view>

namespace spinreg::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

// c = a * b for row-major n x n matrices. c must not alias a or b.
void cgemm_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void cgemm_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* c);

// sum_i conj(a[i]) * b[i]
cplx cdotc_scalar(std::size_t len, const cplx* a, const cplx* b);
cplx cdotc_avx2(std::size_t len, const cplx* a, const cplx* b);

// sum_i a[i] * b[i] (no conjugation)
cplx cdotu_scalar(std::size_t len, const cplx* a, const cplx* b);
cplx cdotu_avx2(std::size_t len, const cplx* a, const cplx* b);

bool cpu_has_avx2();
// True when the AVX2 variants were compiled into this build.
bool avx2_compiled();

Isa active_isa();
// Pins the dispatch target. Requesting avx2 on a CPU without it is ignored
// and returns false.
bool force_isa(Isa isa);
std::string_view isa_name(Isa isa);

void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c);
cplx cdotc(std::size_t len, const cplx* a, const cplx* b);
cplx cdotu(std::size_t len, const cplx* a, const cplx* b);

}  // namespace spinreg::simd
