#pragma once

#include "mdecon/distributions.hpp"
#include "mdecon/quadrature.hpp"
#include "mdecon/sample.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mdecon::detail {

template<class Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using CMatrix = RowMatrix<cplx>;
using RMatrix = RowMatrix<double>;

//! Node values of a function on a tensor frequency grid. Rows run over the
//! first-axis nodes, either all of them or only t_1 >= 0 (`half`); columns
//! run over the remaining axes flattened with the last axis fastest.
struct NodeLayout
{
  std::vector<FrequencyAxis> axes;
  bool half{ false };

  std::size_t rows() const;
  std::size_t cols() const;
  //! first-axis node index of row r.
  std::size_t first_index(std::size_t r) const;
  //! frequency vector of node (r, col).
  std::vector<double> point(std::size_t r, std::size_t col) const;
};

//! empirical Mellin transform on every node, by one complex matrix product.
CMatrix
empirical_on_nodes(const SampleMatrix& sample,
                   std::span<const double> c,
                   const NodeLayout& layout);

//! per-axis closed-form transforms of a tensor model on the layout nodes:
//! element 0 holds the first-axis rows, element 1 the flattened columns.
std::pair<std::vector<cplx>, std::vector<cplx>>
separable_transform(const DistributionModel& model,
                    std::span<const double> c,
                    const NodeLayout& layout);

//! divides node values by the noise transform, enforcing |M_g| >= tol_zero.
void
divide_by_noise(CMatrix& values,
                const DistributionModel& noise,
                std::span<const double> c,
                const NodeLayout& layout,
                double tol_zero);

//! rebuilds the full node matrix from its t_1 >= 0 rows using H(-t) = conj H(t).
CMatrix
mirror_half(const CMatrix& half_rows, std::size_t full_rows);

//! tensor Simpson weights of the layout, same shape as the node matrix.
RMatrix
node_weights(const NodeLayout& layout);

//! multiplies a row-major tensor along one axis: out = M x_axis data.
template<class Scalar>
std::vector<Scalar>
mode_product(const std::vector<Scalar>& data,
             std::vector<std::size_t>& extents,
             std::size_t axis,
             const RowMatrix<Scalar>& m)
{
  std::size_t pre = 1;
  std::size_t post = 1;
  for (std::size_t j = 0; j < extents.size(); ++j) {
    if (j < axis) {
      pre *= extents[j];
    } else if (j > axis) {
      post *= extents[j];
    }
  }
  const auto in_len = static_cast<Eigen::Index>(extents[axis]);
  const auto out_len = m.rows();
  std::vector<Scalar> out(pre * static_cast<std::size_t>(out_len) * post);
  if (post == 1) {
    Eigen::Map<const RowMatrix<Scalar>> in_all(data.data(), static_cast<Eigen::Index>(pre), in_len);
    Eigen::Map<RowMatrix<Scalar>> out_all(out.data(), static_cast<Eigen::Index>(pre), out_len);
    out_all.noalias() = in_all * m.transpose();
    extents[axis] = static_cast<std::size_t>(out_len);
    return out;
  }
  for (std::size_t p = 0; p < pre; ++p) {
    Eigen::Map<const RowMatrix<Scalar>> in_block(
      data.data() + p * in_len * post, in_len, static_cast<Eigen::Index>(post));
    Eigen::Map<RowMatrix<Scalar>> out_block(
      out.data() + p * out_len * post, out_len, static_cast<Eigen::Index>(post));
    out_block.noalias() = m * in_block;
  }
  extents[axis] = static_cast<std::size_t>(out_len);
  return out;
}

//! per-axis phase matrix E[p][i] = exp(-i t_i log x_p).
CMatrix
phase_matrix(std::span<const double> x, const FrequencyAxis& axis);

} // namespace mdecon::detail
