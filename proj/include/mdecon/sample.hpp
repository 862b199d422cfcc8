#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdecon {

//! n x d matrix of strictly positive observations, stored row-major.
class SampleMatrix
{
public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t n, std::size_t d, std::vector<double> data);

  //! single-column sample from a vector of observations.
  static SampleMatrix column(std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return n_ == 0; }

  double operator()(std::size_t i, std::size_t j) const
  {
    return data_[i * d_ + j];
  }
  std::span<const double> row(std::size_t i) const
  {
    return { data_.data() + i * d_, d_ };
  }
  std::vector<double> col(std::size_t j) const;
  const std::vector<double>& data() const { return data_; }

  bool operator==(const SampleMatrix& other) const = default;

private:
  std::size_t n_{ 0 };
  std::size_t d_{ 0 };
  std::vector<double> data_;
};

//! entrywise product Y = X * U of two samples with the same shape.
SampleMatrix
contaminate(const SampleMatrix& x_sample, const SampleMatrix& u_sample);

//! empirical quantile (type 7, linear interpolation) of one column.
double
empirical_quantile(const SampleMatrix& sample, std::size_t axis, double p);

} // namespace mdecon
