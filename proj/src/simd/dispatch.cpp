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

#include <atomic>

#include "spinreg/simd/kernels.hpp"

namespace spinreg::simd {

namespace {

struct Table {
  void (*gemm)(std::size_t, const cplx*, const cplx*, cplx*);
  cplx (*dotc)(std::size_t, const cplx*, const cplx*);
  cplx (*dotu)(std::size_t, const cplx*, const cplx*);
};

constexpr Table kScalar{cgemm_scalar, cdotc_scalar, cdotu_scalar};
constexpr Table kAvx2{cgemm_avx2, cdotc_avx2, cdotu_avx2};

Isa detect() { return (avx2_compiled() && cpu_has_avx2()) ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const Table& table() { return current().load(std::memory_order_relaxed) == Isa::avx2 ? kAvx2 : kScalar; }

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

bool force_isa(Isa isa) {
  if (isa == Isa::avx2 && !(avx2_compiled() && cpu_has_avx2())) return false;
  current().store(isa);
  return true;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) { table().gemm(n, a, b, c); }
cplx cdotc(std::size_t len, const cplx* a, const cplx* b) { return table().dotc(len, a, b); }
cplx cdotu(std::size_t len, const cplx* a, const cplx* b) { return table().dotu(len, a, b); }

}  // namespace spinreg::simd
