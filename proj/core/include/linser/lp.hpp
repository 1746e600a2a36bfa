#pragma once

#include <vector>

#include <Eigen/Dense>

namespace linser {

// Statuses describe the primal problem below.
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

// min t  subject to  a_i . u <= t (rows added incrementally),  E u = e.
//
// Solved through its dual  min -e.mu  s.t.  A^T lambda - E^T mu = 0, sum lambda = 1,
// lambda >= 0, by a dense revised simplex with an explicit basis inverse. Adding
// rows keeps the current basis feasible, so re-solving after column generation is
// a warm start. Pricing is Dantzig with a Bland fallback after long degenerate runs.
class MinimaxLp {
 public:
  MinimaxLp(Eigen::MatrixXd equality, Eigen::VectorXd rhs);

  void add_constraint(const Eigen::Ref<const Eigen::VectorXd>& row);
  LpStatus solve(int max_iterations = 200000);

  double value() const noexcept { return value_; }
  const Eigen::VectorXd& solution() const noexcept { return solution_; }
  int iterations() const noexcept { return iterations_; }
  Eigen::Index constraint_count() const noexcept { return lambda_count_; }

 private:
  Eigen::VectorXd column(Eigen::Index j) const;
  double cost(Eigen::Index j, bool phase_one) const;
  void refactor();
  LpStatus run(bool phase_one, int max_iterations);
  void drive_out_artificials();
  void extract_primal();
  bool equalities_consistent() const;

  Eigen::Index n_;             // primal variables u
  Eigen::Index rows_;          // n_ + 1
  Eigen::Index eq_count_;      // rows of E
  Eigen::MatrixXd columns_;    // rows_ x capacity structural columns
  Eigen::Index column_count_ = 0;
  Eigen::Index lambda_count_ = 0;
  Eigen::VectorXd eq_rhs_;
  Eigen::VectorXd dual_rhs_;

  std::vector<Eigen::Index> basis_;  // structural index or -(row+1) for artificials
  std::vector<char> in_basis_;
  Eigen::MatrixXd basis_inverse_;
  Eigen::VectorXd basic_values_;
  bool feasible_ = false;
  int since_refactor_ = 0;
  int iterations_ = 0;

  double value_ = 0.0;
  Eigen::VectorXd solution_;
};

}  // namespace linser
