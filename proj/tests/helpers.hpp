#pragma once

#include <pqcausal/common.hpp>

#include <initializer_list>

namespace testutil {

inline pqcausal::Vec vec(std::initializer_list<double> xs) {
  pqcausal::Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline pqcausal::Mat mat(Eigen::Index rows, Eigen::Index cols,
                         std::initializer_list<double> xs) {
  pqcausal::Mat m(rows, cols);
  Eigen::Index k = 0;
  for (double x : xs) {
    m(k / cols, k % cols) = x;
    ++k;
  }
  return m;
}

inline bool bitwise_equal(const pqcausal::Mat& a, const pqcausal::Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

}  // namespace testutil
