#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "bds/averaging.hpp"

namespace bds::testing {

// Brute-force stationary law: dense null space of L^T via full-pivot LU.
// Deliberately a different algorithm from the production sparse solve.
inline std::vector<double> dense_nullspace_pi(const SwapGenerator& gen) {
  const auto m = static_cast<Eigen::Index>(gen.size());
  Eigen::MatrixXd lt = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t a = 0; a < gen.size(); ++a)
    lt(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = gen.diagonal[a];
  for (const auto& entry : gen.off_diagonal)
    lt(static_cast<Eigen::Index>(entry.col), static_cast<Eigen::Index>(entry.row)) += entry.rate;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(lt);
  lu.setThreshold(1e-9);
  const Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() != 1)
    throw std::runtime_error("dense oracle: null space dimension " +
                             std::to_string(kernel.cols()));
  Eigen::VectorXd pi = kernel.col(0);
  if (pi.sum() < 0.0) pi = -pi;
  pi /= pi.sum();
  std::vector<double> out(gen.size());
  for (std::size_t a = 0; a < gen.size(); ++a) out[a] = pi(static_cast<Eigen::Index>(a));
  return out;
}

}  // namespace bds::testing
