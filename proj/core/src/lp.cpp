#include "linser/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "linser/error.hpp"

namespace linser {

namespace {

constexpr double cost_tolerance = 1e-10;
constexpr double pivot_tolerance = 1e-9;
constexpr double infeasibility_tolerance = 1e-9;
constexpr int refactor_interval = 64;
constexpr int degenerate_limit = 200;
constexpr double harris_slack = 1e-11;
constexpr double rhs_perturbation = 1e-7;

}  // namespace

MinimaxLp::MinimaxLp(Eigen::MatrixXd equality, Eigen::VectorXd rhs)
    : n_(equality.cols()), rows_(equality.cols() + 1), eq_count_(equality.rows()), eq_rhs_(std::move(rhs)) {
  require(n_ >= 1 && eq_count_ >= 1 && eq_rhs_.size() == eq_count_, ErrorCode::invalid_argument,
          "minimax LP needs a nonempty equality system");
  columns_.resize(rows_, 2 * eq_count_ + 64);
  for (Eigen::Index j = 0; j < eq_count_; ++j) {
    columns_.col(2 * j).setZero();
    columns_.col(2 * j + 1).setZero();
    columns_.col(2 * j).head(n_) = -equality.row(j).transpose();
    columns_.col(2 * j + 1).head(n_) = equality.row(j).transpose();
  }
  column_count_ = 2 * eq_count_;
  // A small positive perturbation of the dual right-hand side removes the ties that
  // stall the simplex at highly degenerate optima. Any dual-feasible basis still
  // yields a feasible primal point, so the reported value stays an upper bound.
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> jitter(0.5, 1.0);
  dual_rhs_.resize(rows_);
  for (Eigen::Index r = 0; r < n_; ++r) dual_rhs_(r) = rhs_perturbation * jitter(rng);
  dual_rhs_(n_) = 1.0;
  in_basis_.assign(static_cast<std::size_t>(column_count_), 0);
}

void MinimaxLp::add_constraint(const Eigen::Ref<const Eigen::VectorXd>& row) {
  require(row.size() == n_, ErrorCode::invalid_argument, "constraint row has the wrong length");
  if (column_count_ == columns_.cols()) columns_.conservativeResize(Eigen::NoChange, 2 * columns_.cols());
  const double scale = std::max(1.0, row.cwiseAbs().maxCoeff());
  columns_.col(column_count_).head(n_) = row / scale;
  columns_(n_, column_count_) = 1.0 / scale;
  ++column_count_;
  ++lambda_count_;
  in_basis_.push_back(0);
}

Eigen::VectorXd MinimaxLp::column(Eigen::Index j) const {
  if (j >= 0) return columns_.col(j);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(rows_);
  e(-j - 1) = 1.0;
  return e;
}

double MinimaxLp::cost(Eigen::Index j, bool phase_one) const {
  if (phase_one) return j < 0 ? 1.0 : 0.0;
  if (j < 0 || j >= 2 * eq_count_) return 0.0;
  const double e = eq_rhs_(j / 2);
  return (j % 2 == 0) ? -e : e;
}

void MinimaxLp::refactor() {
  Eigen::MatrixXd b(rows_, rows_);
  for (Eigen::Index r = 0; r < rows_; ++r) b.col(r) = column(basis_[static_cast<std::size_t>(r)]);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  basis_inverse_ = lu.inverse();
  basic_values_ = basis_inverse_ * dual_rhs_;
  for (Eigen::Index r = 0; r < rows_; ++r) {
    if (basic_values_(r) < 0.0 && basic_values_(r) > -1e-12) basic_values_(r) = 0.0;
  }
  since_refactor_ = 0;
}

LpStatus MinimaxLp::run(bool phase_one, int max_iterations) {
  int degenerate_run = 0;
  const int start = iterations_;
  Eigen::VectorXd basic_costs(rows_);
  while (true) {
    if (iterations_ - start >= max_iterations) return LpStatus::iteration_limit;
    if (since_refactor_ >= refactor_interval) refactor();

    for (Eigen::Index r = 0; r < rows_; ++r) basic_costs(r) = cost(basis_[static_cast<std::size_t>(r)], phase_one);
    const Eigen::VectorXd y = basis_inverse_.transpose() * basic_costs;
    const Eigen::VectorXd priced = columns_.leftCols(column_count_).transpose() * y;

    const bool bland = degenerate_run > degenerate_limit;
    Eigen::Index entering = -1;
    double best = -cost_tolerance;
    for (Eigen::Index j = 0; j < column_count_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      if (j < 2 * eq_count_ && in_basis_[static_cast<std::size_t>(j ^ 1)]) continue;  // partner already free in basis
      const double reduced = cost(j, phase_one) - priced(j);
      if (reduced < best) {
        entering = j;
        best = reduced;
        if (bland) break;
      }
    }
    if (entering < 0) {
      // Confirm on a fresh factorization; drift in the explicit inverse can fake optimality.
      if (since_refactor_ == 0) return LpStatus::optimal;
      refactor();
      continue;
    }

    const Eigen::VectorXd direction = basis_inverse_ * columns_.col(entering);
    // A basic multiplier column stands for a free variable and never blocks.
    const auto is_free = [&](Eigen::Index r) {
      const Eigen::Index var = basis_[static_cast<std::size_t>(r)];
      return var >= 0 && var < 2 * eq_count_;
    };
    // Artificials parked at zero in phase two leave first, at zero step.
    Eigen::Index leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rows_ && !phase_one; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < 0 && std::abs(direction(r)) > pivot_tolerance &&
          (leaving < 0 || std::abs(direction(r)) > std::abs(direction(leaving)))) {
        leaving = r;
        theta = 0.0;
      }
    }
    if (leaving < 0 && bland) {
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double w = direction(r);
        if (w <= pivot_tolerance || is_free(r)) continue;
        const double ratio = std::max(basic_values_(r), 0.0) / w;
        if (ratio < theta || (ratio == theta && basis_[static_cast<std::size_t>(r)] <
                                                    basis_[static_cast<std::size_t>(leaving)])) {
          theta = ratio;
          leaving = r;
        }
      }
    } else if (leaving < 0) {
      // Harris two-pass test: relax the bound slightly, then take the largest pivot.
      double relaxed = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double w = direction(r);
        if (w > pivot_tolerance && !is_free(r)) relaxed = std::min(relaxed, (std::max(basic_values_(r), 0.0) + harris_slack) / w);
      }
      double largest = 0.0;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double w = direction(r);
        if (w > pivot_tolerance && !is_free(r) && std::max(basic_values_(r), 0.0) / w <= relaxed && w > largest) {
          largest = w;
          leaving = r;
        }
      }
      if (leaving >= 0) theta = std::max(basic_values_(leaving), 0.0) / direction(leaving);
    }
    if (leaving < 0) {
      if (since_refactor_ == 0) return LpStatus::unbounded;
      refactor();
      continue;
    }

    degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
    basic_values_ -= theta * direction;
    basic_values_(leaving) = theta;
    const double pivot = direction(leaving);
    basis_inverse_.row(leaving) /= pivot;
    const Eigen::RowVectorXd pivot_row = basis_inverse_.row(leaving);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (r != leaving && direction(r) != 0.0) basis_inverse_.row(r) -= direction(r) * pivot_row;
    }
    const Eigen::Index old = basis_[static_cast<std::size_t>(leaving)];
    if (old >= 0) in_basis_[static_cast<std::size_t>(old)] = 0;
    basis_[static_cast<std::size_t>(leaving)] = entering;
    in_basis_[static_cast<std::size_t>(entering)] = 1;
    ++iterations_;
    ++since_refactor_;
  }
}

void MinimaxLp::drive_out_artificials() {
  for (Eigen::Index r = 0; r < rows_; ++r) {
    if (basis_[static_cast<std::size_t>(r)] >= 0) continue;
    const Eigen::RowVectorXd tableau_row = basis_inverse_.row(r) * columns_.leftCols(column_count_);
    Eigen::Index best = -1;
    double magnitude = 1e-7;
    for (Eigen::Index j = 0; j < column_count_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      if (j < 2 * eq_count_ && in_basis_[static_cast<std::size_t>(j ^ 1)]) continue;
      if (std::abs(tableau_row(j)) > magnitude) {
        magnitude = std::abs(tableau_row(j));
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row; the artificial stays parked at zero
    const Eigen::VectorXd direction = basis_inverse_ * columns_.col(best);
    const double pivot = direction(r);
    basis_inverse_.row(r) /= pivot;
    const Eigen::RowVectorXd pivot_row = basis_inverse_.row(r);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i != r) basis_inverse_.row(i) -= direction(i) * pivot_row;
    }
    basis_[static_cast<std::size_t>(r)] = best;
    in_basis_[static_cast<std::size_t>(best)] = 1;
    ++since_refactor_;
  }
  refactor();
}

bool MinimaxLp::equalities_consistent() const {
  Eigen::MatrixXd e(eq_count_, n_);
  for (Eigen::Index j = 0; j < eq_count_; ++j) e.row(j) = columns_.col(2 * j + 1).head(n_).transpose();
  const Eigen::VectorXd u = e.completeOrthogonalDecomposition().solve(eq_rhs_);
  return (e * u - eq_rhs_).norm() <= 1e-9 * (1.0 + eq_rhs_.norm());
}

void MinimaxLp::extract_primal() {
  Eigen::VectorXd basic_costs(rows_);
  for (Eigen::Index r = 0; r < rows_; ++r) basic_costs(r) = cost(basis_[static_cast<std::size_t>(r)], false);
  const Eigen::VectorXd y = basis_inverse_.transpose() * basic_costs;
  solution_ = y.head(n_);
  value_ = -y(n_);
}

LpStatus MinimaxLp::solve(int max_iterations) {
  require(lambda_count_ > 0, ErrorCode::invalid_argument, "minimax LP has no inequality rows");
  if (!feasible_) {
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index r = 0; r < rows_; ++r) basis_[static_cast<std::size_t>(r)] = -(r + 1);
    std::fill(in_basis_.begin(), in_basis_.end(), 0);
    refactor();
    const LpStatus phase_one = run(true, max_iterations);
    if (phase_one != LpStatus::optimal) return phase_one;
    double infeasibility = 0.0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < 0) infeasibility += basic_values_(r);
    }
    // An infeasible dual leaves the primal infeasible or unbounded; E u = e decides.
    if (infeasibility > infeasibility_tolerance) {
      return equalities_consistent() ? LpStatus::unbounded : LpStatus::infeasible;
    }
    drive_out_artificials();
    feasible_ = true;
  } else {
    refactor();
  }
  const LpStatus status = run(false, max_iterations);
  if (status == LpStatus::optimal) extract_primal();
  // An unbounded dual certifies an infeasible primal.
  return status == LpStatus::unbounded ? LpStatus::infeasible : status;
}

}  // namespace linser
