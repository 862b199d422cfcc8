#include "mdecon/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdecon {

SampleMatrix::SampleMatrix(std::size_t n, std::size_t d, std::vector<double> data)
  : n_(n)
  , d_(d)
  , data_(std::move(data))
{
  if (n_ < 1 || d_ < 1) {
    throw std::invalid_argument("sample must have at least one row and column");
  }
  if (data_.size() != n_ * d_) {
    throw std::invalid_argument("sample data size does not match n x d");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!(data_[i] > 0.0) || !std::isfinite(data_[i])) {
      throw std::invalid_argument("sample entry (" + std::to_string(i / d_) +
                                  ", " + std::to_string(i % d_) +
                                  ") is not a finite positive number");
    }
  }
}

SampleMatrix
SampleMatrix::column(std::vector<double> values)
{
  const std::size_t n = values.size();
  return SampleMatrix(n, 1, std::move(values));
}

std::vector<double>
SampleMatrix::col(std::size_t j) const
{
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    out[i] = data_[i * d_ + j];
  }
  return out;
}

SampleMatrix
contaminate(const SampleMatrix& x_sample, const SampleMatrix& u_sample)
{
  if (x_sample.n() != u_sample.n() || x_sample.dim() != u_sample.dim()) {
    throw std::invalid_argument("contaminate: sample shapes differ (" +
                                std::to_string(x_sample.n()) + "x" +
                                std::to_string(x_sample.dim()) + " vs " +
                                std::to_string(u_sample.n()) + "x" +
                                std::to_string(u_sample.dim()) + ")");
  }
  std::vector<double> y(x_sample.data().size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x_sample.data()[i] * u_sample.data()[i];
  }
  return SampleMatrix(x_sample.n(), x_sample.dim(), std::move(y));
}

double
empirical_quantile(const SampleMatrix& sample, std::size_t axis, double p)
{
  if (axis >= sample.dim()) {
    throw std::out_of_range("empirical_quantile: axis out of range");
  }
  auto v = sample.col(axis);
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

} // namespace mdecon
