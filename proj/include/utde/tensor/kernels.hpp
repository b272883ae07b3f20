/*
 * Copyright 2026 The UTDE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>

// Raw dense kernels. All matrices are row-major; results are accumulated
// into `c` (callers zero it when they want a plain product).
namespace utde::kernels {

// c[m x n] += a[m x k] * b[k x n]
void GemmNN(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
            std::size_t n);
// c[m x n] += a[m x k] * b[n x k]^T
void GemmNT(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
            std::size_t n);
// c[m x n] += a[k x m]^T * b[k x n]
void GemmTN(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
            std::size_t n);

}  // namespace utde::kernels
