#include "beamspin/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

#include "beamspin/closed_form.hpp"
#include "beamspin/constants.hpp"
#include "beamspin/coupling.hpp"
#include "beamspin/faddeeva.hpp"
#include "beamspin/random.hpp"

namespace beamspin {

namespace {

// ---- small dense symmetric solves (Cholesky) --------------------------------

bool cholesky(std::vector<double>& s, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = s[i * n + j];
      for (int k = 0; k < j; ++k) sum -= s[i * n + k] * s[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        s[i * n + i] = std::sqrt(sum);
      } else {
        s[i * n + j] = sum / s[j * n + j];
      }
    }
  }
  return true;
}

void chol_solve_inplace(const std::vector<double>& l, std::vector<double>& b, int n) {
  for (int i = 0; i < n; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i * n + k] * b[k];
    b[i] = sum / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = b[i];
    for (int k = i + 1; k < n; ++k) sum -= l[k * n + i] * b[k];
    b[i] = sum / l[i * n + i];
  }
}

// inverse of SPD matrix from its Cholesky factor
std::vector<double> chol_inverse(const std::vector<double>& l, int n) {
  std::vector<double> inv(n * n, 0.0);
  std::vector<double> e(n);
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    chol_solve_inplace(l, e, n);
    for (int r = 0; r < n; ++r) inv[r * n + c] = e[r];
  }
  // symmetrize against roundoff
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double m = 0.5 * (inv[i * n + j] + inv[j * n + i]);
      inv[i * n + j] = inv[j * n + i] = m;
    }
  return inv;
}

// ---- Levenberg-Marquardt -----------------------------------------------------

struct LmModel {
  int np = 0;
  std::function<double(double, const double*)> value;
  std::function<void(double, const double*, double*)> gradient;
  std::function<bool(const double*)> feasible;  // optional step guard
};

double chi2(const std::vector<double>& t, const std::vector<double>& y,
            const std::vector<double>& w, const LmModel& model, const double* p) {
  double cost = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - model.value(t[i], p);
    cost += w[i] * r * r;
  }
  return cost;
}

FitResult lm_fit(const std::vector<double>& t, const std::vector<double>& y,
                 const std::vector<double>& w, const LmModel& model,
                 std::vector<double> p, std::vector<std::string> names) {
  const int n = static_cast<int>(t.size());
  const int np = model.np;
  constexpr int kMaxIter = 200;
  constexpr double kRelTol = 1e-10;

  std::vector<double> grad(np), hess(np * np), step(np), p_try(np), jrow(np);
  double cost = chi2(t, y, w, model, p.data());
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  auto build_normal_equations = [&](const double* params) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      model.gradient(t[i], params, jrow.data());
      const double r = y[i] - model.value(t[i], params);
      for (int a = 0; a < np; ++a) {
        grad[a] += w[i] * jrow[a] * r;
        for (int b = 0; b <= a; ++b) hess[a * np + b] += w[i] * jrow[a] * jrow[b];
      }
    }
    for (int a = 0; a < np; ++a)
      for (int b = a + 1; b < np; ++b) hess[a * np + b] = hess[b * np + a];
  };

  for (iter = 1; iter <= kMaxIter; ++iter) {
    build_normal_equations(p.data());
    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      std::vector<double> damped = hess;
      for (int a = 0; a < np; ++a)
        damped[a * np + a] += lambda * std::max(hess[a * np + a], 1e-300);
      std::vector<double> l = damped;
      if (!cholesky(l, np)) {
        lambda *= 10.0;
        continue;
      }
      step = grad;
      chol_solve_inplace(l, step, np);
      for (int a = 0; a < np; ++a) p_try[a] = p[a] + step[a];
      if (model.feasible && !model.feasible(p_try.data())) {
        lambda *= 10.0;
        continue;
      }
      const double cost_try = chi2(t, y, w, model, p_try.data());
      if (cost_try <= cost * (1.0 + 1e-15)) {
        double rel = 0.0;
        for (int a = 0; a < np; ++a)
          rel = std::max(rel, std::fabs(step[a]) / (std::fabs(p[a]) + 1e-300));
        p = p_try;
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        if (rel < kRelTol) converged = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted || converged) break;
  }

  FitResult out;
  out.names = std::move(names);
  out.params = p;
  out.converged = converged;
  out.n_iter = iter;

  build_normal_equations(p.data());
  double ginf = 0.0;
  for (int a = 0; a < np; ++a) ginf = std::max(ginf, std::fabs(grad[a]));
  out.gradient_inf = ginf;

  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - model.value(t[i], p.data());
    rss += r * r;
  }
  out.residual_rms = std::sqrt(rss / n);

  const double scale = cost / std::max(n - np, 1);
  std::vector<double> l = hess;
  if (cholesky(l, np)) {
    out.covariance = chol_inverse(l, np);
    for (double& c : out.covariance) c *= scale;
  } else {
    out.covariance.assign(np * np, std::numeric_limits<double>::quiet_NaN());
    out.converged = false;
  }
  out.std_errors.resize(np);
  for (int a = 0; a < np; ++a) {
    const double v = out.covariance[a * np + a];
    out.std_errors[a] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return out;
}

// Pulls (t, y, w) out of records: counts when shot noise was applied
// (Poisson weights 1/max(counts,1)), mean_signal otherwise (unit weights).
void extract_data(std::span<const CountsRecord> data, std::span<const double> weights,
                  std::vector<double>& t, std::vector<double>& y, std::vector<double>& w) {
  t.resize(data.size());
  y.resize(data.size());
  w.resize(data.size());
  if (!weights.empty() && weights.size() != data.size())
    throw std::invalid_argument("fit: weights length mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) {
    t[i] = data[i].setting;
    if (data[i].shots > 0) {
      y[i] = static_cast<double>(data[i].counts);
      w[i] = 1.0 / std::max<double>(static_cast<double>(data[i].counts), 1.0);
    } else {
      y[i] = data[i].mean_signal;
      w[i] = 1.0;
    }
    if (!weights.empty()) w[i] = weights[i];
    if (!(w[i] >= 0.0)) throw std::invalid_argument("fit: negative weight");
  }
}

bool all_equal(const std::vector<double>& y) {
  for (const double v : y)
    if (v != y.front()) return false;
  return true;
}

// appends a derived parameter with delta-method variance: var = g^T C g
void append_derived(FitResult& fit, const std::string& name, double value,
                    const std::vector<double>& dvalue_dp) {
  const int np = static_cast<int>(fit.params.size());
  std::vector<double> cross(np, 0.0);
  double var = 0.0;
  for (int a = 0; a < np; ++a) {
    for (int b = 0; b < np; ++b) cross[a] += fit.covariance[a * np + b] * dvalue_dp[b];
  }
  for (int a = 0; a < np; ++a) var += dvalue_dp[a] * cross[a];

  std::vector<double> cov((np + 1) * (np + 1));
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) cov[a * (np + 1) + b] = fit.covariance[a * np + b];
  for (int a = 0; a < np; ++a) {
    cov[a * (np + 1) + np] = cross[a];
    cov[np * (np + 1) + a] = cross[a];
  }
  cov[np * (np + 1) + np] = var;

  fit.covariance = std::move(cov);
  fit.names.push_back(name);
  fit.params.push_back(value);
  fit.std_errors.push_back(var > 0.0 ? std::sqrt(var) : 0.0);
}

} // namespace

double FitResult::param(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params[i];
  throw std::invalid_argument("FitResult: no parameter named " + std::string(name));
}

double FitResult::std_error(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return std_errors[i];
  throw std::invalid_argument("FitResult: no parameter named " + std::string(name));
}

FitResult fit_exponential(std::span<const CountsRecord> data, std::span<const double> weights) {
  if (data.size() < 3) throw std::invalid_argument("fit_exponential: need >= 3 points");
  std::vector<double> t, y, w;
  extract_data(data, weights, t, y, w);
  for (const double ti : t)
    if (!(ti > 0.0)) throw std::invalid_argument("fit_exponential: times must be positive");
  if (all_equal(y)) throw std::invalid_argument("fit_exponential: degenerate (constant) data");

  // log-linear initialization on the positive samples
  double sw = 0, st = 0, sl = 0, stt = 0, stl = 0;
  int n_pos = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] <= 0.0) continue;
    const double logy = std::log(y[i]);
    sw += 1.0;
    st += t[i];
    sl += logy;
    stt += t[i] * t[i];
    stl += t[i] * logy;
    ++n_pos;
  }
  double a0 = 0.0, t0 = (t.back() - t.front());
  if (n_pos >= 2) {
    const double det = sw * stt - st * st;
    if (std::fabs(det) > 0.0) {
      const double slope = (sw * stl - st * sl) / det;
      const double intercept = (sl * stt - st * stl) / det;
      a0 = std::exp(intercept);
      if (slope < 0.0) t0 = -1.0 / slope;
    }
  }
  if (!(a0 > 0.0)) a0 = *std::max_element(y.begin(), y.end());
  if (!(t0 > 0.0)) t0 = t.back();

  LmModel model;
  model.np = 2;
  model.value = [](double tt, const double* p) { return p[0] * std::exp(-tt / p[1]); };
  model.gradient = [](double tt, const double* p, double* g) {
    const double e = std::exp(-tt / p[1]);
    g[0] = e;
    g[1] = p[0] * tt / (p[1] * p[1]) * e;
  };
  model.feasible = [](const double* p) { return p[1] > 0.0; };

  return lm_fit(t, y, w, model, {a0, t0}, {"A", "T"});
}

FitResult fit_lineshape(std::span<const CountsRecord> data, LineModel model_kind) {
  if (data.size() < 5) throw std::invalid_argument("fit_lineshape: need >= 5 points");
  std::vector<double> x, y, w;
  extract_data(data, {}, x, y, w);
  if (all_equal(y)) throw std::invalid_argument("fit_lineshape: degenerate (constant) data");

  // shift/scale the abscissa so the fit is well conditioned for rad/s grids
  const std::size_t imin = std::min_element(y.begin(), y.end()) - y.begin();
  const double x_ref = x[imin];
  double offset0 = *std::max_element(y.begin(), y.end());
  const double depth0 = offset0 - y[imin];

  // half-depth crossings around the dip for a width estimate
  double left = x.front(), right = x.back();
  const double half = y[imin] + 0.5 * depth0;
  for (std::size_t i = imin; i-- > 0;)
    if (y[i] >= half) {
      left = x[i];
      break;
    }
  for (std::size_t i = imin + 1; i < x.size(); ++i)
    if (y[i] >= half) {
      right = x[i];
      break;
    }
  double fwhm0 = right - left;
  if (!(fwhm0 > 0.0)) fwhm0 = (x.back() - x.front()) / 4.0;
  const double s_ref = fwhm0;

  std::vector<double> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = (x[i] - x_ref) / s_ref;

  // models in scaled coordinates: y = offset - depth * S(u - c)/S(0)
  LmModel model;
  std::vector<double> p0;
  std::vector<std::string> names;
  const double kG = 2.3548200450309493;  // FWHM of a unit-sigma Gaussian

  switch (model_kind) {
    case LineModel::gaussian:
      model.np = 4;
      model.value = [](double u, const double* p) {
        const double d = (u - p[0]) / p[1];
        return p[3] - p[2] * std::exp(-0.5 * d * d);
      };
      model.gradient = [](double u, const double* p, double* g) {
        const double d = (u - p[0]) / p[1];
        const double e = std::exp(-0.5 * d * d);
        g[0] = -p[2] * e * d / p[1];
        g[1] = -p[2] * e * d * d / p[1];
        g[2] = -e;
        g[3] = 1.0;
      };
      model.feasible = [](const double* p) { return p[1] > 0.0; };
      p0 = {0.0, 1.0 / kG, depth0, offset0};
      names = {"center", "sigma", "depth", "offset"};
      break;
    case LineModel::lorentzian:
      model.np = 4;
      model.value = [](double u, const double* p) {
        const double d = u - p[0];
        const double g2 = p[1] * p[1];
        return p[3] - p[2] * g2 / (d * d + g2);
      };
      model.gradient = [](double u, const double* p, double* g) {
        const double d = u - p[0];
        const double g2 = p[1] * p[1];
        const double den = d * d + g2;
        g[0] = -p[2] * g2 * 2.0 * d / (den * den);
        g[1] = -p[2] * 2.0 * p[1] * d * d / (den * den);
        g[2] = -g2 / den;
        g[3] = 1.0;
      };
      model.feasible = [](const double* p) { return p[1] > 0.0; };
      p0 = {0.0, 0.5, depth0, offset0};
      names = {"center", "gamma", "depth", "offset"};
      break;
    case LineModel::voigt: {
      model.np = 5;
      auto shape = [](double u, const double* p) {
        const double s = std::fabs(p[1]), g = std::fabs(p[2]);
        return voigt(u - p[0], s, g) / voigt(0.0, s, g);
      };
      model.value = [shape](double u, const double* p) { return p[4] - p[3] * shape(u, p); };
      model.gradient = [shape](double u, const double* p, double* g) {
        // numeric central differences for the profile parameters
        double q[5];
        std::copy(p, p + 5, q);
        for (int a = 0; a < 3; ++a) {
          const double h = 1e-6 * std::max(std::fabs(p[a]), 1e-3);
          q[a] = p[a] + h;
          const double up = shape(u, q);
          q[a] = p[a] - h;
          const double dn = shape(u, q);
          q[a] = p[a];
          g[a] = -p[3] * (up - dn) / (2.0 * h);
        }
        g[3] = -shape(u, p);
        g[4] = 1.0;
      };
      model.feasible = [](const double* p) {
        return std::fabs(p[1]) + std::fabs(p[2]) > 0.0;
      };
      p0 = {0.0, 1.0 / kG * 0.7, 0.35, depth0, offset0};
      names = {"center", "sigma", "gamma", "depth", "offset"};
      break;
    }
  }

  FitResult fit = lm_fit(xs, y, w, model, p0, names);

  // back to physical units (center shift, widths scale)
  const int np = static_cast<int>(fit.params.size());
  std::vector<double> scale(np, 1.0);
  scale[0] = s_ref;
  for (int a = 1; a < np; ++a)
    if (fit.names[a] == "sigma" || fit.names[a] == "gamma") scale[a] = s_ref;
  fit.params[0] = x_ref + s_ref * fit.params[0];
  for (int a = 1; a < np; ++a) fit.params[a] *= scale[a];
  for (int a = 0; a < np; ++a) {
    fit.std_errors[a] *= scale[a];
    for (int b = 0; b < np; ++b) fit.covariance[a * np + b] *= scale[a] * scale[b];
  }
  for (int a = 1; a < np; ++a)
    if (fit.names[a] == "sigma" || fit.names[a] == "gamma")
      fit.params[a] = std::fabs(fit.params[a]);

  // derived FWHM
  if (model_kind == LineModel::gaussian) {
    const double s = fit.param("sigma");
    std::vector<double> g(np, 0.0);
    g[1] = kG;
    append_derived(fit, "fwhm", kG * s, g);
  } else if (model_kind == LineModel::lorentzian) {
    std::vector<double> g(np, 0.0);
    g[1] = 2.0;
    append_derived(fit, "fwhm", 2.0 * fit.param("gamma"), g);
  } else {
    const double s = fit.param("sigma"), gm = fit.param("gamma");
    auto fwhm_of = [](double s_, double g_) {
      if (s_ == 0.0 && g_ == 0.0) return 0.0;
      const double peak = voigt(0.0, s_, g_);
      double lo = 0.0, hi = 2.0 * (2.0 * s_ + g_) + 1e-300;
      while (voigt(hi, s_, g_) > 0.5 * peak) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (voigt(mid, s_, g_) > 0.5 * peak ? lo : hi) = mid;
      }
      return lo + hi;  // full width = 2 * half width
    };
    const double f = fwhm_of(s, gm);
    std::vector<double> g(np, 0.0);
    const double hs = 1e-6 * std::max(s + gm, 1e-30);
    const double s_lo = std::max(s - hs, 0.0), g_lo = std::max(gm - hs, 0.0);
    g[1] = (fwhm_of(s + hs, gm) - fwhm_of(s_lo, gm)) / (s + hs - s_lo);
    g[2] = (fwhm_of(s, gm + hs) - fwhm_of(s, g_lo)) / (gm + hs - g_lo);
    append_derived(fit, "fwhm", f, g);
  }
  return fit;
}

RatioEstimate estimate_ratio(const FitResult& fit_beam, const FitResult& fit_ref,
                             CiMethod method, std::uint64_t seed) {
  if (!fit_beam.converged || !fit_ref.converged)
    throw std::invalid_argument("estimate_ratio: both fits must have converged");
  const double tb = fit_beam.param("T"), tr = fit_ref.param("T");
  const double sb = fit_beam.std_error("T"), sr = fit_ref.std_error("T");
  if (!(tb > 0.0) || !(tr > 0.0))
    throw std::invalid_argument("estimate_ratio: decay times must be positive");

  RatioEstimate est;
  est.method = method;
  est.ratio = tb / tr;
  if (method == CiMethod::delta_method) {
    const double rel2 = (sb / tb) * (sb / tb) + (sr / tr) * (sr / tr);
    const double sigma = est.ratio * std::sqrt(rel2);
    est.ci_lower = est.ratio - constants::z95 * sigma;
    est.ci_upper = est.ratio + constants::z95 * sigma;
  } else {
    constexpr std::size_t kDraws = 10000;
    Rng rng(seed);
    std::vector<double> draws;
    draws.reserve(kDraws);
    std::size_t attempts = 0;
    while (draws.size() < kDraws) {
      if (++attempts > 100 * kDraws)
        throw std::runtime_error("estimate_ratio: bootstrap rejection rate too high");
      const double b = tb + sb * rng.normal();
      const double r = tr + sr * rng.normal();
      if (r <= 0.0) continue;  // outside the model's support
      draws.push_back(b / r);
    }
    std::sort(draws.begin(), draws.end());
    auto quantile = [&](double q) {
      const double pos = q * (kDraws - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const double frac = pos - lo;
      return draws[lo] * (1.0 - frac) + draws[std::min<std::size_t>(lo + 1, kDraws - 1)] * frac;
    };
    est.ci_lower = quantile(0.025);
    est.ci_upper = quantile(0.975);
  }
  return est;
}

CouplingBound coupling_bound_pipeline(const RatioEstimate& ratio, const SpinParams& spin,
                                      double rho0) {
  CouplingBound bound;
  if (ratio.ci_lower >= 1.0) {
    bound.constraining = false;  // the data do not limit the coupling
    return bound;
  }
  constexpr double kEps = 1e-6;
  const double r = std::clamp(ratio.ci_lower, kEps, 1.0);
  bound.constraining = true;
  bound.omega_max = invert_coupling_bound(r, spin);
  bound.i_res_max = current_for_rabi(bound.omega_max, rho0);
  return bound;
}

std::string format_value_uncertainty(double value, double sigma, std::string_view unit) {
  char buf[96];
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(value)) {
    std::snprintf(buf, sizeof buf, "%.6g %.*s", value, static_cast<int>(unit.size()),
                  unit.data());
    return buf;
  }
  int e = static_cast<int>(std::floor(std::log10(sigma)));
  int digit = static_cast<int>(std::lround(sigma / std::pow(10.0, e)));
  if (digit >= 10) {
    digit = 1;
    ++e;
  }
  if (e < 0) {
    std::snprintf(buf, sizeof buf, "%.*f(%d) %.*s", -e, value, digit,
                  static_cast<int>(unit.size()), unit.data());
  } else {
    const double scale = std::pow(10.0, e);
    const double v = std::round(value / scale) * scale;
    std::snprintf(buf, sizeof buf, "%.0f(%.0f) %.*s", v, digit * scale,
                  static_cast<int>(unit.size()), unit.data());
  }
  return buf;
}

} // namespace beamspin
