#ifndef SEMSYNGTN_TENSOR_HPP_
#define SEMSYNGTN_TENSOR_HPP_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace semsyngtn {

// Dense row-major array of 64-bit floats. Rank is arbitrary but the
// differentiable ops in tape.hpp work on rank-1/rank-2 views; a scalar is a
// 1x1 matrix.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double v);
  static Tensor scalar(double v) { return Tensor({1, 1}, {v}); }
  static Tensor row(std::vector<double> v);
  // Build a matrix from nested braces: Tensor::matrix({{1,2},{3,4}}).
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(int n);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int numel() const { return static_cast<int>(data_.size()); }
  int rows() const;
  int cols() const;
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  double& at(int i, int j);
  double at(int i, int j) const;
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }
  double scalar_value() const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;
  double max_abs() const;

  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

// Max over entries of |a - b|; throws on shape mismatch.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_TENSOR_HPP_
