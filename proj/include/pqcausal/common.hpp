#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pqcausal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when an iterative routine exhausts its budget without meeting its
// stopping tolerance. Callers map this to a distinct failure mode from
// precondition violations (std::invalid_argument).
class nonconvergence_error : public std::runtime_error {
 public:
  explicit nonconvergence_error(const std::string& what)
      : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace pqcausal
