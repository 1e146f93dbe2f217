// autograd/tensor.h

// Copyright 2026  The selffilm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SELFFILM_AUTOGRAD_TENSOR_H_
#define SELFFILM_AUTOGRAD_TENSOR_H_

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace selffilm {

using Shape = std::vector<int64_t>;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::string ShapeString(const Shape &shape);
int64_t ShapeSize(const Shape &shape);

/// Storage aligned to the widest vector unit, so every Eigen kernel sees the
/// same alignment and repeated evaluations round identically.
using AlignedBuffer = std::vector<double, Eigen::aligned_allocator<double>>;

/// Dense row-major array of doubles. Value type; copies are deep.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, const std::vector<double> &values);
  Tensor(Shape shape, AlignedBuffer values);
  Tensor(Shape shape, std::initializer_list<double> values)
      : Tensor(std::move(shape), AlignedBuffer(values)) {}

  static Tensor Scalar(double v) { return Tensor(Shape{}, {v}); }

  const Shape &Dims() const { return shape_; }
  int64_t Dim(size_t i) const { return shape_.at(i); }
  size_t Rank() const { return shape_.size(); }
  int64_t Size() const { return static_cast<int64_t>(data_.size()); }
  bool Empty() const { return data_.empty(); }

  double *Data() { return data_.data(); }
  const double *Data() const { return data_.data(); }
  std::span<double> Values() { return data_; }
  std::span<const double> Values() const { return data_; }

  double &operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  /// Value of a scalar (or single-element) tensor.
  double Item() const;

  /// Views a rank-2 tensor (or the given row/col split) as an Eigen matrix.
  MatrixMap AsMatrix(int64_t rows, int64_t cols);
  ConstMatrixMap AsMatrix(int64_t rows, int64_t cols) const;
  MatrixMap AsMatrix();
  ConstMatrixMap AsMatrix() const;

  Tensor Reshaped(Shape shape) const;
  void Fill(double v);
  void SetZero() { Fill(0.0); }

  Tensor &operator+=(const Tensor &other);
  /// this += scale * other.
  void AddScaled(const Tensor &other, double scale);

  bool AllFinite() const;
  bool operator==(const Tensor &other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  AlignedBuffer data_;
};

}  // namespace selffilm

#endif  // SELFFILM_AUTOGRAD_TENSOR_H_
