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

#include "cotransport/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace cotransport::qp {

namespace {

constexpr double kBigBound = 1e20;

bool is_finite_bound(double b) { return std::abs(b) < kBigBound; }

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

enum class RowState : unsigned char { Inactive, Lower, Upper };

// Stacked view used by the iterations: C = [A_eq; A_in], l <= C x <= u.
struct Stacked {
  MatrixXd C;
  VectorXd l;
  VectorXd u;
  int m_eq = 0;
};

Stacked stack_constraints(const QpProblem& p) {
  Stacked s;
  const int n = p.num_vars();
  s.m_eq = p.num_eq();
  const int m = p.num_eq() + p.num_in();
  s.C.resize(m, n);
  s.l.resize(m);
  s.u.resize(m);
  if (p.num_eq() > 0) {
    s.C.topRows(p.num_eq()) = p.A_eq;
    s.l.head(p.num_eq()) = p.b_eq;
    s.u.head(p.num_eq()) = p.b_eq;
  }
  if (p.num_in() > 0) {
    s.C.bottomRows(p.num_in()) = p.A_in;
    s.l.tail(p.num_in()) = p.lower;
    s.u.tail(p.num_in()) = p.upper;
  }
  return s;
}

VectorXd project(const VectorXd& v, const Stacked& s) { return v.cwiseMax(s.l).cwiseMin(s.u); }

// Solves the KKT system of the problem restricted to the given active rows,
//   [H  A^T] [x]   [-f]
//   [A  0  ] [y] = [ b],
// through a lightly regularised factorisation plus iterative refinement, which
// copes with redundant active rows.
bool solve_active_kkt(const QpProblem& p, const Stacked& s, const std::vector<RowState>& state,
                      VectorXd& x, VectorXd& y) {
  const int n = p.num_vars();
  std::vector<int> rows;
  std::vector<double> rhs_b;
  for (int i = 0; i < s.C.rows(); ++i) {
    if (i < s.m_eq) {
      rows.push_back(i);
      rhs_b.push_back(s.l[i]);
    } else if (state[i - s.m_eq] == RowState::Lower) {
      rows.push_back(i);
      rhs_b.push_back(s.l[i]);
    } else if (state[i - s.m_eq] == RowState::Upper) {
      rows.push_back(i);
      rhs_b.push_back(s.u[i]);
    }
  }
  const int ma = static_cast<int>(rows.size());
  MatrixXd K = MatrixXd::Zero(n + ma, n + ma);
  K.topLeftCorner(n, n) = p.H;
  for (int j = 0; j < ma; ++j) {
    K.block(n + j, 0, 1, n) = s.C.row(rows[j]);
    K.block(0, n + j, n, 1) = s.C.row(rows[j]).transpose();
  }
  VectorXd rhs(n + ma);
  rhs.head(n) = -p.f;
  for (int j = 0; j < ma; ++j) rhs[n + j] = rhs_b[j];

  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  const double delta = 1e-11 * scale;
  MatrixXd Kreg = K;
  Kreg.topLeftCorner(n, n).diagonal().array() += delta;
  Kreg.bottomRightCorner(ma, ma).diagonal().array() -= delta;
  Eigen::PartialPivLU<MatrixXd> lu(Kreg);
  VectorXd sol = lu.solve(rhs);
  for (int it = 0; it < 8; ++it) {
    const VectorXd r = rhs - K * sol;
    if (inf_norm(r) < 1e-14 * scale) break;
    sol += lu.solve(r);
  }
  if (!sol.allFinite()) return false;
  x = sol.head(n);
  y = VectorXd::Zero(s.C.rows());
  for (int j = 0; j < ma; ++j) y[rows[j]] = sol[n + j];
  return true;
}

struct PolishResult {
  bool ok = false;
  VectorXd x;
  VectorXd y;
};

// Active-set correction starting from a guessed state: add the most violated
// inactive row or drop the active row whose multiplier has the wrong sign,
// until the KKT conditions hold.
PolishResult polish(const QpProblem& p, const Stacked& s, std::vector<RowState> state,
                    double tol) {
  PolishResult res;
  const int mi = p.num_in();
  const int max_rounds = 2 * mi + 4;
  for (int round = 0; round <= max_rounds; ++round) {
    VectorXd x, y;
    if (!solve_active_kkt(p, s, state, x, y)) return res;
    const VectorXd Cx = s.C * x;

    int worst_add = -1;
    double worst_add_v = tol;
    RowState add_side = RowState::Inactive;
    int worst_drop = -1;
    double worst_drop_v = tol;
    for (int i = 0; i < mi; ++i) {
      const int r = s.m_eq + i;
      if (state[i] == RowState::Inactive) {
        const double lo = s.l[r] - Cx[r];
        const double hi = Cx[r] - s.u[r];
        if (lo > worst_add_v) {
          worst_add_v = lo;
          worst_add = i;
          add_side = RowState::Lower;
        }
        if (hi > worst_add_v) {
          worst_add_v = hi;
          worst_add = i;
          add_side = RowState::Upper;
        }
      } else {
        const double wrong = state[i] == RowState::Lower ? y[r] : -y[r];
        if (wrong > worst_drop_v && s.l[r] != s.u[r]) {
          worst_drop_v = wrong;
          worst_drop = i;
        }
      }
    }
    if (worst_add < 0 && worst_drop < 0) {
      res.ok = true;
      res.x = x;
      res.y = y;
      return res;
    }
    // Prefer fixing primal feasibility first.
    if (worst_add >= 0) {
      state[worst_add] = add_side;
    } else {
      state[worst_drop] = RowState::Inactive;
    }
  }
  return res;
}

std::vector<RowState> guess_active(const Stacked& s, const VectorXd& z, const VectorXd& y) {
  const int mi = static_cast<int>(s.C.rows()) - s.m_eq;
  std::vector<RowState> state(mi, RowState::Inactive);
  for (int i = 0; i < mi; ++i) {
    const int r = s.m_eq + i;
    if (s.l[r] == s.u[r]) {
      state[i] = RowState::Lower;
    } else if (is_finite_bound(s.l[r]) && z[r] - s.l[r] < -y[r]) {
      state[i] = RowState::Lower;
    } else if (is_finite_bound(s.u[r]) && s.u[r] - z[r] < y[r]) {
      state[i] = RowState::Upper;
    }
  }
  return state;
}

void split_duals(const VectorXd& y, int m_eq, QpSolution& sol) {
  sol.y_eq = y.head(m_eq);
  sol.y_in = y.tail(y.size() - m_eq);
}

}  // namespace

QpProblem QpProblem::empty(int n) {
  QpProblem p;
  p.H = MatrixXd::Zero(n, n);
  p.f = VectorXd::Zero(n);
  p.A_eq = MatrixXd::Zero(0, n);
  p.b_eq = VectorXd::Zero(0);
  p.A_in = MatrixXd::Zero(0, n);
  p.lower = VectorXd::Zero(0);
  p.upper = VectorXd::Zero(0);
  return p;
}

void QpProblem::validate() const {
  const auto n = f.size();
  if (H.rows() != n || H.cols() != n) throw DimensionMismatch("qp: H must be n x n");
  if (A_eq.cols() != n || A_eq.rows() != b_eq.size()) {
    throw DimensionMismatch("qp: A_eq/b_eq dimensions inconsistent");
  }
  if (A_in.cols() != n || A_in.rows() != lower.size() || lower.size() != upper.size()) {
    throw DimensionMismatch("qp: A_in/lower/upper dimensions inconsistent");
  }
  if (!H.allFinite() || !f.allFinite() || !A_eq.allFinite() || !b_eq.allFinite() ||
      !A_in.allFinite()) {
    throw InvalidArgument("qp: non-finite problem data");
  }
  const double scale = std::max(1.0, n > 0 ? H.cwiseAbs().maxCoeff() : 0.0);
  if (n > 0 && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("qp: H is not symmetric");
  }
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::MaxIter: return "max_iter";
    case QpStatus::Infeasible: return "infeasible";
  }
  return "?";
}

double KktResiduals::max() const { return std::max({primal, stationarity, complementarity}); }

KktResiduals kkt_residuals(const QpProblem& p, const VectorXd& x, const VectorXd& y_eq,
                           const VectorXd& y_in) {
  KktResiduals r;
  VectorXd grad = p.H * x + p.f;
  if (p.num_eq() > 0) {
    r.primal = inf_norm(p.A_eq * x - p.b_eq);
    grad += p.A_eq.transpose() * y_eq;
  }
  if (p.num_in() > 0) {
    const VectorXd ax = p.A_in * x;
    grad += p.A_in.transpose() * y_in;
    for (int i = 0; i < p.num_in(); ++i) {
      r.primal = std::max({r.primal, p.lower[i] - ax[i], ax[i] - p.upper[i]});
      double c = 0.0;
      if (y_in[i] > 0.0) {
        c = is_finite_bound(p.upper[i]) ? y_in[i] * std::abs(p.upper[i] - ax[i]) : y_in[i];
      } else if (y_in[i] < 0.0) {
        c = is_finite_bound(p.lower[i]) ? -y_in[i] * std::abs(ax[i] - p.lower[i]) : -y_in[i];
      }
      r.complementarity = std::max(r.complementarity, c);
    }
  }
  r.stationarity = inf_norm(grad);
  return r;
}

QpSolution solve_qp(const QpProblem& p, double tol, int max_iter) {
  QpSettings s;
  s.tol = tol;
  s.max_iter = max_iter;
  return solve_qp(p, s);
}

QpSolution solve_qp(const QpProblem& p, const QpSettings& settings, const WarmStart* warm) {
  p.validate();
  const int n = p.num_vars();
  const Stacked s = stack_constraints(p);
  const int m = static_cast<int>(s.C.rows());

  QpSolution sol;
  sol.x = VectorXd::Zero(n);
  sol.y_eq = VectorXd::Zero(p.num_eq());
  sol.y_in = VectorXd::Zero(p.num_in());
  for (int i = 0; i < p.num_in(); ++i) {
    if (p.lower[i] > p.upper[i]) {
      sol.status = QpStatus::Infeasible;
      return sol;
    }
  }

  VectorXd x = VectorXd::Zero(n);
  VectorXd y = VectorXd::Zero(m);
  if (warm != nullptr) {
    if (warm->x.size() == n) x = warm->x;
    if (warm->y_eq.size() == p.num_eq() && warm->y_in.size() == p.num_in()) {
      y << warm->y_eq, warm->y_in;
    }
  }
  VectorXd z = project(s.C * x, s);

  auto finish_polished = [&](const PolishResult& pr, int iters) {
    sol.x = pr.x;
    split_duals(pr.y, s.m_eq, sol);
    sol.kkt_residual = kkt_residuals(p, sol.x, sol.y_eq, sol.y_in).max();
    sol.iterations = iters;
    sol.polished = true;
    sol.status = sol.kkt_residual < settings.tol ? QpStatus::Optimal : QpStatus::MaxIter;
    return sol.status == QpStatus::Optimal;
  };

  if (settings.polish) {
    const PolishResult pr = polish(p, s, guess_active(s, z, y), settings.tol);
    if (pr.ok && finish_polished(pr, 0)) return sol;
  }

  // Per-row step sizes; equality rows are stiffer.
  double rho = settings.rho;
  auto rho_vector = [&](double base) {
    VectorXd r(m);
    for (int i = 0; i < m; ++i) {
      if (s.l[i] == s.u[i]) {
        r[i] = 1e3 * base;
      } else if (!is_finite_bound(s.l[i]) && !is_finite_bound(s.u[i])) {
        r[i] = 1e-6;
      } else {
        r[i] = base;
      }
    }
    return r;
  };
  VectorXd rho_v = rho_vector(rho);
  auto factor = [&](const VectorXd& rv) {
    MatrixXd K = p.H;
    K.diagonal().array() += settings.sigma;
    if (m > 0) K += s.C.transpose() * rv.asDiagonal() * s.C;
    return Eigen::LLT<MatrixXd>(K);
  };
  Eigen::LLT<MatrixXd> llt = factor(rho_v);
  if (llt.info() != Eigen::Success) throw InvalidArgument("qp: H is not positive semidefinite");

  const double a = settings.relaxation;
  VectorXd y_prev = y;
  double r_prim = kInf, r_dual = kInf;
  for (int k = 1; k <= settings.max_iter; ++k) {
    y_prev = y;
    const VectorXd rhs = settings.sigma * x - p.f + s.C.transpose() * (rho_v.cwiseProduct(z) - y);
    const VectorXd xt = llt.solve(rhs);
    const VectorXd zt = s.C * xt;
    x = a * xt + (1.0 - a) * x;
    const VectorXd zr = a * zt + (1.0 - a) * z;
    const VectorXd z_new = project(zr + y.cwiseQuotient(rho_v), s);
    y += rho_v.cwiseProduct(zr - z_new);
    z = z_new;

    if (k % settings.check_every != 0 && k != settings.max_iter) continue;

    const VectorXd Cx = s.C * x;
    const VectorXd Hx = p.H * x;
    const VectorXd Cty = s.C.transpose() * y;
    r_prim = inf_norm(Cx - z);
    r_dual = inf_norm(Hx + p.f + Cty);

    if (settings.polish) {
      const PolishResult pr = polish(p, s, guess_active(s, z, y), settings.tol);
      if (pr.ok && finish_polished(pr, k)) return sol;
    }
    if (r_prim < settings.tol && r_dual < settings.tol) {
      sol.x = x;
      split_duals(y, s.m_eq, sol);
      sol.kkt_residual = kkt_residuals(p, x, sol.y_eq, sol.y_in).max();
      sol.iterations = k;
      sol.polished = false;
      if (sol.kkt_residual < settings.tol) {
        sol.status = QpStatus::Optimal;
        return sol;
      }
    }

    // Primal infeasibility certificate on the dual increment.
    const VectorXd dy = y - y_prev;
    const double ndy = inf_norm(dy);
    if (ndy > 1e-12) {
      bool certificate = inf_norm(s.C.transpose() * dy) <= settings.infeasibility_tol * ndy;
      double support = 0.0;
      for (int i = 0; certificate && i < m; ++i) {
        if (dy[i] > 0.0) {
          if (!is_finite_bound(s.u[i])) {
            certificate = dy[i] < settings.infeasibility_tol * ndy;
          } else {
            support += s.u[i] * dy[i];
          }
        } else if (dy[i] < 0.0) {
          if (!is_finite_bound(s.l[i])) {
            certificate = -dy[i] < settings.infeasibility_tol * ndy;
          } else {
            support += s.l[i] * dy[i];
          }
        }
      }
      if (certificate && support < -settings.infeasibility_tol * ndy) {
        sol.x = x;
        split_duals(y, s.m_eq, sol);
        sol.iterations = k;
        sol.status = QpStatus::Infeasible;
        sol.kkt_residual = kkt_residuals(p, x, sol.y_eq, sol.y_in).max();
        return sol;
      }
    }

    if (settings.adaptive_rho && m > 0) {
      const double prim_scale = std::max({inf_norm(Cx), inf_norm(z), 1e-12});
      const double dual_scale = std::max({inf_norm(Hx), inf_norm(Cty), inf_norm(p.f), 1e-12});
      const double ratio =
          std::sqrt((r_prim / prim_scale) / std::max(r_dual / dual_scale, 1e-300));
      const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
      if (new_rho > 5.0 * rho || new_rho < 0.2 * rho) {
        rho = new_rho;
        rho_v = rho_vector(rho);
        llt = factor(rho_v);
      }
    }
  }

  sol.x = x;
  split_duals(y, s.m_eq, sol);
  sol.iterations = settings.max_iter;
  sol.kkt_residual = kkt_residuals(p, x, sol.y_eq, sol.y_in).max();
  const double feas_scale = 1.0 + std::max(inf_norm(s.C * x), inf_norm(z));
  sol.status = r_prim <= 1e-4 * feas_scale ? QpStatus::MaxIter : QpStatus::Infeasible;
  return sol;
}

void write_problem(std::ostream& os, const QpProblem& p) {
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  auto put_matrix = [&](const char* name, const MatrixXd& M) {
    os << name << '\n';
    for (int i = 0; i < M.rows(); ++i) {
      for (int j = 0; j < M.cols(); ++j) {
        if (j) os << ' ';
        put(M(i, j));
      }
      os << '\n';
    }
  };
  auto put_vector = [&](const char* name, const VectorXd& v) {
    os << name << '\n';
    for (int i = 0; i < v.size(); ++i) {
      if (i) os << ' ';
      put(v[i]);
    }
    os << '\n';
  };
  os << "# cotransport-qp v1\n";
  os << p.num_vars() << ' ' << p.num_eq() << ' ' << p.num_in() << '\n';
  put_matrix("H", p.H);
  put_vector("f", p.f);
  put_matrix("A_eq", p.A_eq);
  put_vector("b_eq", p.b_eq);
  put_matrix("A_in", p.A_in);
  put_vector("lower", p.lower);
  put_vector("upper", p.upper);
}

QpProblem read_problem(std::istream& is) {
  std::string tok;
  auto next = [&]() -> std::string {
    while (is >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(is, rest);
        continue;
      }
      return tok;
    }
    throw InvalidArgument("qp dump: unexpected end of input");
  };
  auto number = [&]() {
    const std::string t = next();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') throw InvalidArgument("qp dump: bad number '" + t + "'");
    return v;
  };
  auto integer = [&]() {
    const double v = number();
    if (v < 0 || v != std::floor(v)) throw InvalidArgument("qp dump: bad dimension");
    return static_cast<int>(v);
  };
  auto expect = [&](const char* name) {
    if (next() != name) throw InvalidArgument(std::string("qp dump: expected section ") + name);
  };
  const int n = integer(), me = integer(), mi = integer();
  QpProblem p;
  auto read_matrix = [&](const char* name, int rows, int cols) {
    expect(name);
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) M(i, j) = number();
    return M;
  };
  auto read_vector = [&](const char* name, int size) {
    expect(name);
    VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = number();
    return v;
  };
  p.H = read_matrix("H", n, n);
  p.f = read_vector("f", n);
  p.A_eq = read_matrix("A_eq", me, n);
  p.b_eq = read_vector("b_eq", me);
  p.A_in = read_matrix("A_in", mi, n);
  p.lower = read_vector("lower", mi);
  p.upper = read_vector("upper", mi);
  p.validate();
  return p;
}

}  // namespace cotransport::qp
