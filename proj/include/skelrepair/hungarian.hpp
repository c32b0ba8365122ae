#pragma once

#include <Eigen/Core>

#include <vector>

namespace skelrepair {

/// Minimum-total-cost assignment for a rectangular cost matrix (Kuhn-Munkres with
/// potentials, O(n^2 m)). Returns, for each row, the assigned column or -1 when the
/// matrix has more rows than columns and the row is left unmatched. Exactly
/// min(rows, cols) rows are assigned.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace skelrepair
