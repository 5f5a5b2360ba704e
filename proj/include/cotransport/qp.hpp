// Copyright 2026 The cotransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense convex quadratic programming.
//
//   minimize    1/2 x^T H x + f^T x
//   subject to  A_eq x = b_eq
//               lower <= A_in x <= upper
//
// The solver is an operator-splitting (ADMM) scheme with over-relaxation and
// adaptive step size. Its iterates are used to guess the active set, which is
// then polished by solving the equality-constrained KKT system directly and
// corrected one constraint at a time until the KKT conditions hold.
//
// Dual sign convention: the Lagrangian is
//   1/2 x^T H x + f^T x + y_eq^T (A_eq x - b_eq) + y_in^T (A_in x - s),
// so y_in <= 0 on rows resting at their lower bound and y_in >= 0 at the upper.

#ifndef COTRANSPORT_QP_HPP_
#define COTRANSPORT_QP_HPP_

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>

#include "cotransport/types.hpp"

namespace cotransport::qp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

struct QpProblem {
  MatrixXd H;
  VectorXd f;
  MatrixXd A_eq;
  VectorXd b_eq;
  MatrixXd A_in;
  VectorXd lower;
  VectorXd upper;

  /// An unconstrained problem of n variables with zero cost.
  static QpProblem empty(int n);

  int num_vars() const { return static_cast<int>(f.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }
  int num_in() const { return static_cast<int>(lower.size()); }

  /// Throws DimensionMismatch on inconsistent sizes and InvalidArgument when H
  /// is not symmetric within 1e-10 (relative to its largest entry).
  void validate() const;
};

enum class QpStatus { Optimal, MaxIter, Infeasible };

const char* to_string(QpStatus s);

struct QpSolution {
  VectorXd x;
  VectorXd y_eq;
  VectorXd y_in;
  QpStatus status = QpStatus::MaxIter;
  double kkt_residual = kInf;
  int iterations = 0;
  bool polished = false;
};

struct QpSettings {
  double tol = 1e-8;
  int max_iter = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double relaxation = 1.6;
  int check_every = 5;
  bool adaptive_rho = true;
  bool polish = true;
  double infeasibility_tol = 1e-6;
};

struct WarmStart {
  VectorXd x;
  VectorXd y_eq;
  VectorXd y_in;
};

struct KktResiduals {
  double primal = 0.0;           // worst constraint violation
  double stationarity = 0.0;     // |H x + f + A^T y|_inf
  double complementarity = 0.0;  // worst |y_i| * slack_i, wrong-side multipliers count in full

  double max() const;
};

KktResiduals kkt_residuals(const QpProblem& p, const VectorXd& x, const VectorXd& y_eq,
                           const VectorXd& y_in);

QpSolution solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 4000);

QpSolution solve_qp(const QpProblem& p, const QpSettings& settings,
                    const WarmStart* warm = nullptr);

/// Plain-text dump, one matrix row per line (see README for the layout).
void write_problem(std::ostream& os, const QpProblem& p);
QpProblem read_problem(std::istream& is);

}  // namespace cotransport::qp

#endif  // COTRANSPORT_QP_HPP_
