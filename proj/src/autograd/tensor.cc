// autograd/tensor.cc

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

#include "selffilm/autograd/tensor.h"

#include <algorithm>
#include <cmath>

#include "selffilm/base/common.h"

namespace selffilm {

std::string ShapeString(const Shape &shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

int64_t ShapeSize(const Shape &shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    Require(d >= 0, "negative dimension in shape ", ShapeString(shape));
    n *= d;
  }
  return n;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)),
      data_(static_cast<size_t>(ShapeSize(shape_)), fill) {}

Tensor::Tensor(Shape shape, const std::vector<double> &values)
    : Tensor(std::move(shape), AlignedBuffer(values.begin(), values.end())) {}

Tensor::Tensor(Shape shape, AlignedBuffer values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  Require(static_cast<int64_t>(data_.size()) == ShapeSize(shape_),
          "tensor of shape ", ShapeString(shape_), " given ", data_.size(),
          " values");
}

double Tensor::Item() const {
  Require(data_.size() == 1, "Item() on tensor of shape ", ShapeString(shape_));
  return data_[0];
}

MatrixMap Tensor::AsMatrix(int64_t rows, int64_t cols) {
  Require(rows * cols == Size(), "cannot view ", ShapeString(shape_), " as ",
          rows, "x", cols);
  return MatrixMap(data_.data(), rows, cols);
}

ConstMatrixMap Tensor::AsMatrix(int64_t rows, int64_t cols) const {
  Require(rows * cols == Size(), "cannot view ", ShapeString(shape_), " as ",
          rows, "x", cols);
  return ConstMatrixMap(data_.data(), rows, cols);
}

MatrixMap Tensor::AsMatrix() {
  Require(Rank() == 2, "AsMatrix() needs rank 2, got ", ShapeString(shape_));
  return AsMatrix(shape_[0], shape_[1]);
}

ConstMatrixMap Tensor::AsMatrix() const {
  Require(Rank() == 2, "AsMatrix() needs rank 2, got ", ShapeString(shape_));
  return AsMatrix(shape_[0], shape_[1]);
}

Tensor Tensor::Reshaped(Shape shape) const {
  Require(ShapeSize(shape) == Size(), "cannot reshape ", ShapeString(shape_),
          " to ", ShapeString(shape));
  return Tensor(std::move(shape), data_);
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor &Tensor::operator+=(const Tensor &other) {
  AddScaled(other, 1.0);
  return *this;
}

void Tensor::AddScaled(const Tensor &other, double scale) {
  Require(other.Size() == Size(), "size mismatch ", ShapeString(shape_), " vs ",
          ShapeString(other.shape_));
  const double *src = other.Data();
  double *dst = data_.data();
  const size_t n = data_.size();
  if (scale == 1.0) {
    for (size_t i = 0; i < n; ++i) dst[i] += src[i];
  } else {
    for (size_t i = 0; i < n; ++i) dst[i] += scale * src[i];
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace selffilm
