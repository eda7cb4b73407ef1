#include "core/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace psce {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Restarted GMRES for x with A x = b, right-preconditioned by `precond`.
/// Returns the achieved relative residual.
double gmres(const std::function<void(const Vec&, Vec&)>& apply_a,
             const std::function<void(const Vec&, Vec&)>& precond,
             const Vec& b, Vec& x, int restart, int max_iters, double tol) {
  const std::size_t n = b.size();
  const double bnorm = nrm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0.0;
  }

  Vec r(n), w(n), z(n);
  int iters = 0;
  double rel = 1.0;
  while (iters < max_iters) {
    apply_a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = nrm(r);
    rel = beta / bnorm;
    if (rel <= tol) return rel;

    const int m = std::min(restart, max_iters - iters);
    std::vector<Vec> v(m + 1, Vec(n));
    std::vector<Vec> zk(m, Vec(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    g[0] = beta;

    int j = 0;
    for (; j < m; ++j, ++iters) {
      precond(v[j], zk[j]);
      apply_a(zk[j], w);
      for (int k = 0; k <= j; ++k) {
        h[k][j] = dot(w, v[k]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= h[k][j] * v[k][i];
      }
      h[j + 1][j] = nrm(w);
      if (h[j + 1][j] > 1e-300)
        for (std::size_t i = 0; i < n; ++i) v[j + 1][i] = w[i] / h[j + 1][j];

      for (int k = 0; k < j; ++k) {
        const double t = cs[k] * h[k][j] + sn[k] * h[k + 1][j];
        h[k + 1][j] = -sn[k] * h[k][j] + cs[k] * h[k + 1][j];
        h[k][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = h[j][j] / denom;
      sn[j] = h[j + 1][j] / denom;
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      rel = std::abs(g[j + 1]) / bnorm;
      if (rel <= tol) {
        ++j;
        ++iters;
        break;
      }
    }

    // back-substitute and update x
    std::vector<double> yv(j, 0.0);
    for (int k = j - 1; k >= 0; --k) {
      double s = g[k];
      for (int l = k + 1; l < j; ++l) s -= h[k][l] * yv[l];
      yv[k] = s / h[k][k];
    }
    for (int k = 0; k < j; ++k)
      for (std::size_t i = 0; i < n; ++i) x[i] += yv[k] * zk[k][i];
    if (rel <= tol) return rel;
  }
  return rel;
}

}  // namespace

ScalarField stationary_residual(const ScalarField& v, const ScalarField& f) {
  const TorusGrid& g = v.grid();
  g.check_field(f);
  require(v.all_positive(), ErrorCode::positivity_loss,
          "stationary residual requires v > 0");
  ScalarField out = g.laplacian(v);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] += f[i] * v[i] - 0.5 / v[i];
  return out;
}

StationaryState solve_stationary(const TorusGrid& grid, const ScalarField& f,
                                 const std::optional<ScalarField>& guess,
                                 const StationaryOptions& opts) {
  grid.check_field(f);
  require(f.all_positive() && f.all_finite(), ErrorCode::invalid_argument,
          "stationary solve requires a positive finite source");

  ScalarField v = guess ? *guess
                        : ScalarField(grid,
                                      Vec(grid.size(),
                                          1.0 / std::sqrt(2.0 * grid.mean(f))));
  grid.check_field(v);
  require(v.all_positive(), ErrorCode::invalid_argument,
          "stationary solve requires a positive initial guess");

  const std::size_t n = grid.size();
  StationaryState st{v, 0.0, f, 0, {}};

  auto resid_norm = [&](const ScalarField& w) {
    return stationary_residual(w, f).max_abs();
  };

  st.residual_norm = resid_norm(v);
  st.residual_history.push_back(st.residual_norm);

  for (int it = 0; it < opts.max_iters; ++it) {
    if (st.residual_norm <= opts.tol) {
      st.omega = v;
      st.iterations = it;
      return st;
    }

    // Jacobian J = Lap + f + 1/(2 v^2), applied matrix-free.
    Vec diag(n);
    for (std::size_t i = 0; i < n; ++i)
      diag[i] = f[i] + 0.5 / (v[i] * v[i]);
    const double dbar =
        std::accumulate(diag.begin(), diag.end(), 0.0) / double(n);

    auto apply_j = [&](const Vec& x, Vec& out) {
      grid.laplacian_inplace(x.data(), out.data());
      for (std::size_t i = 0; i < n; ++i) out[i] += diag[i] * x[i];
    };
    auto precond = [&](const Vec& x, Vec& out) {
      ScalarField xf(grid, x);
      ScalarField sol = grid.helmholtz_solve(xf, dbar);
      std::copy(sol.values().begin(), sol.values().end(), out.begin());
    };

    ScalarField F = stationary_residual(v, f);
    Vec b(F.values().begin(), F.values().end());
    for (auto& x : b) x = -x;
    Vec step(n, 0.0);
    gmres(apply_j, precond, b, step, opts.gmres_restart, opts.gmres_max_iters,
          opts.gmres_tol);

    // Backtracking on the residual max-norm with a positivity floor.
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, lambda *= 0.5) {
      ScalarField trial(grid);
      bool positive = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = v[i] + lambda * step[i];
        if (!(trial[i] > opts.positivity_floor)) {
          positive = false;
          break;
        }
      }
      if (!positive) continue;
      const double rn = resid_norm(trial);
      if (rn < st.residual_norm * (1.0 - 1e-4 * lambda) ||
          rn <= opts.tol) {
        v = trial;
        st.residual_norm = rn;
        accepted = true;
        break;
      }
    }
    require(accepted, ErrorCode::no_convergence,
            "Newton line search stalled on the stationary equation");
    st.residual_history.push_back(st.residual_norm);
  }

  require(st.residual_norm <= opts.tol, ErrorCode::no_convergence,
          "stationary solve did not converge within the iteration budget");
  st.omega = v;
  st.iterations = opts.max_iters;
  return st;
}

}  // namespace psce
