#ifndef EXPANAL_ASSIGNMENT_HPP
#define EXPANAL_ASSIGNMENT_HPP

#include <vector>

#include <Eigen/Core>

namespace expanal
{

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> hungarian_assignment(const Eigen::MatrixXd& cost);

/// Repeatedly takes the globally cheapest remaining (row, column) pair.
/// Ties go to the smallest row, then the smallest column.
std::vector<int> greedy_assignment(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment);

bool is_permutation_of_range(const std::vector<int>& p);

} // namespace expanal

#endif
