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
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace utde {

// Raised when operand shapes do not agree. The message names both shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);

// Dense row-major array of doubles.
//
// Every operation in the library works on the "matrix view" of a tensor:
// all leading dimensions are flattened into rows and the last dimension is
// the column count. A default-constructed tensor is empty and is only used
// as a "not yet allocated" marker (e.g. for lazily created gradients).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Scalar(double value);
  static Tensor Row(std::vector<double> values);
  static Tensor Column(std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return shape_.empty(); }

  std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
  std::size_t rows() const { return cols() == 0 ? 0 : data_.size() / cols(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }
  const std::vector<double>& data() const { return data_; }

  // Value of a single-element tensor.
  double item() const;

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  // Elementwise accumulation; shapes must match.
  Tensor& operator+=(const Tensor& other);

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Throws DimensionError unless `a` and `b` have identical shapes.
void RequireSameShape(const Tensor& a, const Tensor& b, const char* op);

bool AllFinite(const Tensor& t);

}  // namespace utde
