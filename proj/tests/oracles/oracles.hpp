#pragma once

// Reference implementations used only by the tests. None of them call into the
// library, so agreement with it is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double normal_pdf(double x, double sigma2) {
  return std::exp(-x * x / (2.0 * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

/// Composite Simpson rule with `m` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
  const double h = (b - a) / m;
  double acc = f(a) + f(b);
  for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

/// BHHJ loss of a single observation z under the N(0, sigma2) model, built
/// from the divergence definition: int f^(1+a) - (1 + 1/a) f(z)^a, with the
/// integral done by quadrature.
inline double bhhj_rho_quadrature(double alpha, double sigma2, double z) {
  const double s = std::sqrt(sigma2);
  const double integral =
      simpson([&](double x) { return std::pow(normal_pdf(x, sigma2), 1.0 + alpha); }, -40.0 * s, 40.0 * s);
  return integral - (1.0 + 1.0 / alpha) * std::pow(normal_pdf(z, sigma2), alpha);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Hessian of f at x by central differences of f itself.
inline MatrixXd fd_hessian(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h) {
  const Index k = x.size();
  MatrixXd H(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = a; b < k; ++b) {
      VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[a] += h, pp[b] += h;
      pm[a] += h, pm[b] -= h;
      mp[a] -= h, mp[b] += h;
      mm[a] -= h, mm[b] -= h;
      H(a, b) = H(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Textbook cyclic coordinate descent for
///   (1 / (2 sigma2)) ||y - X b||^2 + n lambda sum_j w_j |b_j|.
inline VectorXd cd_lasso(const MatrixXd& X, const VectorXd& y, double lambda, const VectorXd& w,
                         double sigma2 = 1.0, double tol = 1e-14, int max_sweeps = 200000) {
  const Index n = X.rows(), p = X.cols();
  VectorXd b = VectorXd::Zero(p);
  VectorXd r = y;
  const VectorXd sq = X.colwise().squaredNorm();
  const double thr = static_cast<double>(n) * lambda * sigma2;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (sq[j] == 0.0) continue;
      const double rho = X.col(j).dot(r) + sq[j] * b[j];
      const double t = thr * w[j];
      double nb = 0.0;
      if (rho > t) nb = (rho - t) / sq[j];
      else if (rho < -t) nb = (rho + t) / sq[j];
      const double d = nb - b[j];
      if (d != 0.0) {
        r -= d * X.col(j);
        b[j] = nb;
        biggest = std::max(biggest, std::abs(d));
      }
    }
    if (biggest < tol) break;
  }
  return b;
}

/// Nelder-Mead simplex minimiser.
inline VectorXd nelder_mead(const std::function<double(const VectorXd&)>& f, VectorXd x0, double step = 0.5,
                            double ftol = 1e-15, int max_iter = 200000) {
  const Index k = x0.size();
  std::vector<VectorXd> s(k + 1, x0);
  std::vector<double> fv(k + 1);
  for (Index i = 0; i < k; ++i) s[i + 1][i] += step;
  for (Index i = 0; i <= k; ++i) fv[i] = f(s[i]);
  std::vector<Index> idx(k + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (Index i = 0; i <= k; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return fv[a] < fv[b]; });
    const Index lo = idx[0], hi = idx[k], nh = idx[k - 1];
    if (std::abs(fv[hi] - fv[lo]) <= ftol * (std::abs(fv[lo]) + 1e-30)) {
      double spread = 0.0;
      for (Index i = 0; i <= k; ++i) spread = std::max(spread, (s[i] - s[lo]).cwiseAbs().maxCoeff());
      if (spread < 1e-10) break;
    }
    VectorXd c = VectorXd::Zero(k);
    for (Index i = 0; i <= k; ++i)
      if (i != hi) c += s[i];
    c /= static_cast<double>(k);
    const VectorXd xr = c + (c - s[hi]);
    const double fr = f(xr);
    if (fr < fv[lo]) {
      const VectorXd xe = c + 2.0 * (c - s[hi]);
      const double fe = f(xe);
      if (fe < fr) s[hi] = xe, fv[hi] = fe;
      else s[hi] = xr, fv[hi] = fr;
    } else if (fr < fv[nh]) {
      s[hi] = xr, fv[hi] = fr;
    } else {
      const VectorXd xc = c + 0.5 * (s[hi] - c);
      const double fc = f(xc);
      if (fc < fv[hi]) {
        s[hi] = xc, fv[hi] = fc;
      } else {
        for (Index i = 0; i <= k; ++i) {
          if (i == lo) continue;
          s[i] = s[lo] + 0.5 * (s[i] - s[lo]);
          fv[i] = f(s[i]);
        }
      }
    }
  }
  Index best = 0;
  for (Index i = 1; i <= k; ++i)
    if (fv[i] < fv[best]) best = i;
  return s[best];
}

/// Exhaustive search over supports of size <= max_size, scoring each by
/// least squares plus `per_variable` per included column. Returns the
/// minimising support (ascending).
inline std::vector<Index> best_subset(const MatrixXd& X, const VectorXd& y, Index max_size, double per_variable) {
  const Index p = X.cols();
  std::vector<Index> best;
  double best_score = y.squaredNorm();
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index from) {
    if (!cur.empty()) {
      MatrixXd Xs(X.rows(), static_cast<Index>(cur.size()));
      for (std::size_t k = 0; k < cur.size(); ++k) Xs.col(static_cast<Index>(k)) = X.col(cur[k]);
      const VectorXd b = Xs.colPivHouseholderQr().solve(y);
      const double score = (y - Xs * b).squaredNorm() + per_variable * static_cast<double>(cur.size());
      if (score < best_score) best_score = score, best = cur;
    }
    if (static_cast<Index>(cur.size()) == max_size) return;
    for (Index j = from; j < p; ++j) {
      cur.push_back(j);
      rec(j + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return best;
}

/// Gaussian design and response for small test problems.
struct Problem {
  MatrixXd X;
  VectorXd y;
  VectorXd beta;
};

inline Problem random_problem(std::uint64_t seed, Index n, Index p, Index s, double coef = 1.0,
                              double noise = 1.0) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Problem pr;
  pr.X.resize(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) pr.X(i, j) = N(g);
  pr.beta = VectorXd::Zero(p);
  for (Index j = 0; j < std::min(s, p); ++j) pr.beta[j] = (j % 2 ? -coef : coef);
  pr.y = pr.X * pr.beta;
  for (Index i = 0; i < n; ++i) pr.y[i] += noise * N(g);
  return pr;
}

}  // namespace oracle
