#pragma once

#include <Eigen/Dense>

#include "lpstab/matrix.hpp"

namespace lpstab {
namespace detail {

inline Eigen::MatrixXd to_dense(const IndexedMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (const Entry& e : a.entries()) m(e.row, e.col) = e.value;
  return m;
}

/// Singular values of a dense matrix, descending.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.rows() <= 32 && m.cols() <= 32)
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace detail
}  // namespace lpstab
