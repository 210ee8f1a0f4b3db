#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "paulilearn/errors.hpp"
#include "paulilearn/pauli.hpp"
#include "paulilearn/protocol.hpp"

namespace paulilearn {

struct CurvePoint {
  int depth = 0;
  double fhat = 0.0;
  double variance = 0.0;
  long count = 0;
};

struct DecayCurve {
  std::string query;
  std::vector<CurvePoint> points;
};

enum class VarianceMode { shot, circuit };

enum class EstimateMethod { fit, ratio, single_depth };

inline const char* method_name(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::fit: return "fit";
    case EstimateMethod::ratio: return "ratio";
    default: return "single_depth";
  }
}

struct FidelityEstimate {
  double alpha = 1.0;
  double lam = 1.0;
  double var_alpha = 0.0;
  double var_lam = 0.0;
  double covariance = 0.0;
  EstimateMethod method = EstimateMethod::fit;
  bool flagged = false;  // set when a fallback path produced the estimate

  double stderr_lam() const { return std::sqrt(std::max(var_lam, 0.0)); }
};

namespace detail {

template <typename EstimatorFn>
inline DecayCurve build_curve(std::span<const ShotRecord> records, VarianceMode mode,
                              EstimatorFn&& value_of) {
  struct DepthAcc {
    double sum = 0.0;
    long count = 0;
    std::map<int, std::pair<double, long>> per_circuit;
  };
  std::map<int, DepthAcc> acc;
  for (const ShotRecord& r : records) {
    DepthAcc& a = acc[r.depth];
    const double v = value_of(r.outcome);
    a.sum += v;
    a.count += 1;
    if (mode == VarianceMode::circuit) {
      auto& pc = a.per_circuit[r.circuit];
      pc.first += v;
      pc.second += 1;
    }
  }
  DecayCurve curve;
  for (const auto& [d, a] : acc) {
    CurvePoint p;
    p.depth = d;
    p.count = a.count;
    const double mean = a.sum / a.count;
    p.fhat = mean;
    if (mode == VarianceMode::shot) {
      // Per-shot values are +-1; variance of the mean from the sample
      // variance of the shots.
      p.variance = a.count > 1 ? (1.0 - mean * mean) / (a.count - 1) : 0.0;
    } else {
      const size_t nc = a.per_circuit.size();
      double ss = 0.0;
      for (const auto& [ci, pc] : a.per_circuit) {
        const double cm = pc.first / pc.second;
        ss += (cm - mean) * (cm - mean);
      }
      p.variance = nc > 1 ? ss / ((nc - 1) * nc) : 0.0;
    }
    p.variance = std::max(p.variance, 0.0);
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace detail

/// Per-depth means of the single-shot estimator (-1)^{<mu, a>}.
inline DecayCurve eel_curve(std::span<const ShotRecord> records, const PauliLabel& a,
                            VarianceMode mode = VarianceMode::shot) {
  DecayCurve c = detail::build_curve(records, mode, [&](const PauliLabel& mu) {
    return symplectic_inner(mu, a) ? -1.0 : 1.0;
  });
  c.query = a.str();
  return c;
}

/// Per-depth means of (-1)^{k . s} for a pattern query s.
inline DecayCurve aux_curve(std::span<const ShotRecord> records, uint64_t s,
                            VarianceMode mode = VarianceMode::shot) {
  DecayCurve c = detail::build_curve(records, mode, [&](const PauliLabel& k) {
    return (std::popcount(k.x & s) & 1) ? -1.0 : 1.0;
  });
  c.query = "pt:" + std::to_string(s);
  return c;
}

inline bool efl_query_compatible(const PauliLabel& a, const PauliLabel& basis) {
  return ((a.x | a.z) & ((a.x ^ basis.x) | (a.z ^ basis.z))) == 0;
}

/// Per-depth means of the basis-restricted estimator for Pauli a; the query
/// must act within the measured product basis.
inline DecayCurve efl_curve(std::span<const ShotRecord> records, const PauliLabel& a,
                            const PauliLabel& basis, VarianceMode mode = VarianceMode::shot) {
  if (!efl_query_compatible(a, basis))
    throw IncompatibleQueryError("EFL query " + a.str() + " incompatible with basis " + basis.str());
  const uint64_t pat = pattern(a);
  DecayCurve c = detail::build_curve(records, mode, [&](const PauliLabel& v) {
    return (std::popcount(v.x & pat) & 1) ? -1.0 : 1.0;
  });
  c.query = a.str();
  return c;
}

/// Ratio estimator lambda = (f_d / f_0)^{1/d} with its first-order variance
/// lambda^2 (Var[f_0] + Var[f_d]/lambda^{2d}) / (d^2 alpha^2).
inline FidelityEstimate ratio_estimate(double f0, double var0, double fd, double vard, int d) {
  if (d < 1) throw DomainError("ratio estimator: d must be >= 1");
  if (f0 <= 0.0) throw DomainError("ratio estimator: f_0 must be positive");
  const double ratio = fd / f0;
  if (ratio <= 0.0)
    throw DomainError(
        "ratio estimator: f_d/f_0 is nonpositive; the decay is consistent with zero at this "
        "depth (increase shots or reduce d)");
  FidelityEstimate est;
  est.method = EstimateMethod::ratio;
  est.lam = std::pow(ratio, 1.0 / d);
  est.alpha = f0;
  const double lam2d = std::pow(est.lam, 2 * d);
  est.var_lam = est.lam * est.lam * (var0 + vard / lam2d) / (static_cast<double>(d) * d * f0 * f0);
  est.var_alpha = var0;
  return est;
}

inline double ratio_estimator(double f0, double fd, int d) {
  return ratio_estimate(f0, 0.0, fd, 0.0, d).lam;
}

/// Weighted nonlinear least squares for f_d = alpha * lambda^d via
/// Gauss-Newton with step halving; initialized from a weighted log-linear
/// regression. Parameter covariance comes from the normal equations with the
/// supplied point variances.
inline FidelityEstimate fit_decay(const DecayCurve& curve) {
  std::vector<CurvePoint> pts = curve.points;
  {
    std::vector<int> depths;
    for (const auto& p : pts) depths.push_back(p.depth);
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    if (depths.size() < 2)
      throw FitError("fit_decay: need at least 2 distinct depths, got " +
                     std::to_string(depths.size()));
  }

  std::vector<double> w(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    const double floor = 1e-6 / std::max<long>(pts[i].count, 1);
    w[i] = 1.0 / std::max(pts[i].variance, floor);
  }

  // Log-linear initialization from the positive points.
  double alpha = 0.0, lam = 0.0;
  {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    int positive = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].fhat <= 0.0) continue;
      ++positive;
      const double lw = w[i] * pts[i].fhat * pts[i].fhat;
      const double y = std::log(pts[i].fhat);
      const double x = pts[i].depth;
      sw += lw;
      swx += lw * x;
      swy += lw * y;
      swxx += lw * x * x;
      swxy += lw * x * y;
    }
    const double det = sw * swxx - swx * swx;
    if (positive < 2 || std::abs(det) < 1e-300) {
      // Fall back to a ratio estimate on the two largest-|f| depths.
      std::vector<size_t> order(pts.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::abs(pts[a].fhat) > std::abs(pts[b].fhat);
      });
      size_t ia = order[0], ib = order[1];
      if (pts[ia].depth == pts[ib].depth) {
        for (size_t k = 2; k < order.size(); ++k)
          if (pts[order[k]].depth != pts[ia].depth) {
            ib = order[k];
            break;
          }
      }
      if (pts[ia].depth > pts[ib].depth) std::swap(ia, ib);
      const int dd = pts[ib].depth - pts[ia].depth;
      const double r = pts[ib].fhat / pts[ia].fhat;
      if (dd == 0 || r <= 0.0 || pts[ia].fhat == 0.0)
        throw FitError("fit_decay: no positive decay visible; cannot initialize");
      FidelityEstimate est;
      est.method = EstimateMethod::ratio;
      est.flagged = true;
      est.lam = std::pow(r, 1.0 / dd);
      est.alpha = pts[ia].fhat / std::pow(est.lam, pts[ia].depth);
      est.var_lam = est.lam * est.lam *
                    (pts[ia].variance / (pts[ia].fhat * pts[ia].fhat) +
                     pts[ib].variance / (pts[ib].fhat * pts[ib].fhat)) /
                    (static_cast<double>(dd) * dd);
      est.var_alpha = pts[ia].variance;
      return est;
    }
    const double slope = (sw * swxy - swx * swy) / det;
    const double icept = (swxx * swy - swx * swxy) / det;
    lam = std::exp(slope);
    alpha = std::exp(icept);
  }

  double chi2 = 0.0;
  auto chi_squared = [&](double a, double l) {
    double acc = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      const double r = pts[i].fhat - a * std::pow(l, pts[i].depth);
      acc += w[i] * r * r;
    }
    return acc;
  };
  chi2 = chi_squared(alpha, lam);

  double jj00 = 0, jj01 = 0, jj11 = 0;
  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    jj00 = jj01 = jj11 = 0;
    double g0 = 0, g1 = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      const int d = pts[i].depth;
      const double ld = std::pow(lam, d);
      const double r = pts[i].fhat - alpha * ld;
      const double ja = ld;
      const double jl = d == 0 ? 0.0 : alpha * d * std::pow(lam, d - 1);
      jj00 += w[i] * ja * ja;
      jj01 += w[i] * ja * jl;
      jj11 += w[i] * jl * jl;
      g0 += w[i] * ja * r;
      g1 += w[i] * jl * r;
    }
    const double det = jj00 * jj11 - jj01 * jj01;
    if (std::abs(det) < 1e-300) throw FitError("fit_decay: singular normal equations");
    double da = (jj11 * g0 - jj01 * g1) / det;
    double dl = (jj00 * g1 - jj01 * g0) / det;

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h) {
      const double na = alpha + step * da, nl = lam + step * dl;
      if (na > 0.0 && nl > 0.0) {
        const double nchi = chi_squared(na, nl);
        if (nchi <= chi2 + 1e-14) {
          const double rel = std::abs(chi2 - nchi) / std::max(chi2, 1e-300);
          alpha = na;
          lam = nl;
          chi2 = nchi;
          accepted = true;
          if ((std::abs(step * da) < 1e-13 * std::max(1.0, std::abs(alpha)) &&
               std::abs(step * dl) < 1e-13 * std::max(1.0, std::abs(lam))) ||
              rel < 1e-15)
            converged = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no further improvement possible at this scale
    }
  }
  if (!converged)
    throw FitError("fit_decay: no convergence after iteration cap (chi2=" + std::to_string(chi2) +
                   ", alpha=" + std::to_string(alpha) + ", lambda=" + std::to_string(lam) + ")");

  FidelityEstimate est;
  est.method = EstimateMethod::fit;
  est.alpha = alpha;
  est.lam = lam;
  const double det = jj00 * jj11 - jj01 * jj01;
  if (std::abs(det) > 1e-300) {
    est.var_alpha = jj11 / det;
    est.var_lam = jj00 / det;
    est.covariance = -jj01 / det;
  }
  return est;
}

/// EMEEL combination: divide the Bell-frame estimate by the ancilla
/// pattern estimate; variance by first-order propagation.
inline FidelityEstimate emeel_combine(const FidelityEstimate& eel, const FidelityEstimate& aux) {
  if (aux.lam <= 0.0) throw DomainError("emeel_combine: ancilla estimate must be positive");
  FidelityEstimate est;
  est.method = eel.method;
  est.flagged = eel.flagged || aux.flagged;
  est.lam = eel.lam / aux.lam;
  est.alpha = eel.alpha;
  const double a2 = aux.lam * aux.lam;
  est.var_lam = eel.var_lam / a2 + (eel.lam * eel.lam / (a2 * a2)) * aux.var_lam;
  est.var_alpha = eel.var_alpha;
  return est;
}

/// Single-depth SPAM cancellation: experiment 2 over experiment 1.
inline double spam_robust_pair(double lambda1, double lambda2) {
  if (lambda1 <= 0.0) throw DomainError("spam_robust_pair: calibration estimate must be positive");
  return lambda2 / lambda1;
}

/// Worst-case error of the SPAM-robust pair given additive errors eps1,
/// eps2 on the two estimators and a diagonal fidelity xi > eps1.
inline double spam_robust_error_bound(double eps1, double eps2, double xi) {
  if (eps1 >= xi) throw DomainError("spam_robust_error_bound: requires eps1 < xi");
  return (eps1 + eps2) / (xi - eps1);
}

inline long hoeffding_samples(double eps, double delta) {
  if (eps <= 0.0 || eps >= 1.0 || delta <= 0.0 || delta >= 1.0)
    throw DomainError("hoeffding_samples: eps, delta must lie in (0,1)");
  return static_cast<long>(std::ceil(2.0 / (eps * eps) * std::log(2.0 / delta)));
}

inline long noisy_hoeffding_samples(double eps, double delta, double fidelity_floor) {
  if (eps <= 0.0 || eps >= 1.0 || delta <= 0.0 || delta >= 1.0 || fidelity_floor <= 0.0 ||
      fidelity_floor > 1.0)
    throw DomainError("noisy_hoeffding_samples: arguments out of range");
  return static_cast<long>(
      std::ceil(18.0 / (eps * eps * fidelity_floor * fidelity_floor) * std::log(4.0 / delta)));
}

/// V := Var[f_0] + Var[f_d] / lambda^{2d}, the bracket of the ratio-estimator
/// variance.
inline double variance_bracket(double var0, double vard, double lam, int d) {
  return var0 + vard / std::pow(lam, 2 * d);
}

struct ProtocolVariance {
  double depth = 1.0;
  double alpha = 1.0;
  double v = 0.0;  // variance bracket
};

/// Full-form predicted variance overhead of the mitigated protocol over the
/// direct one, with empirical variance brackets supplied per protocol.
inline double predicted_overhead(const ProtocolVariance& efl, const ProtocolVariance& eel,
                                 const ProtocolVariance& aux) {
  if (efl.v <= 0.0 || eel.depth == 0.0 || aux.depth == 0.0 || eel.alpha == 0.0 || aux.alpha == 0.0)
    throw DomainError("predicted_overhead: zero denominator");
  const double num = efl.depth * efl.depth * efl.alpha * efl.alpha / efl.v;
  return num * (eel.v / (eel.depth * eel.depth * eel.alpha * eel.alpha) +
                aux.v / (aux.depth * aux.depth * aux.alpha * aux.alpha));
}

/// Simplified overhead (1 + r_aux/r_efl)^2 (alpha_efl/alpha_eel)^2 + 1 with
/// r := ln(1/lambda).
inline double simplified_overhead(double r_aux, double r_efl, double alpha_efl, double alpha_eel) {
  if (r_efl <= 0.0 || alpha_eel <= 0.0) throw DomainError("simplified_overhead: zero denominator");
  const double shape = 1.0 + r_aux / r_efl;
  const double spam = alpha_efl / alpha_eel;
  return shape * shape * spam * spam + 1.0;
}

struct OverheadBaseFit {
  double base = 1.0;
  double stderr_base = 0.0;
};

/// Through-origin least squares of log(overhead) = w log c.
inline OverheadBaseFit fit_overhead_base(const std::vector<double>& weights,
                                         const std::vector<double>& overheads) {
  if (weights.size() != overheads.size() || weights.size() < 2)
    throw DomainError("fit_overhead_base: need >= 2 (weight, overhead) pairs");
  {
    std::vector<double> distinct = weights;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw DomainError("fit_overhead_base: need >= 2 distinct weights");
  }
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (overheads[i] <= 0.0) throw DomainError("fit_overhead_base: overheads must be positive");
    sxx += weights[i] * weights[i];
    sxy += weights[i] * std::log(overheads[i]);
  }
  const double b = sxy / sxx;
  double ss = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double r = std::log(overheads[i]) - b * weights[i];
    ss += r * r;
  }
  const double s2 = weights.size() > 1 ? ss / (weights.size() - 1) : 0.0;
  OverheadBaseFit out;
  out.base = std::exp(b);
  out.stderr_base = out.base * std::sqrt(s2 / sxx);
  return out;
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double stderr_slope = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw DomainError("linear_fit: degenerate abscissae");
  LinearFit out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - out.intercept - out.slope * x[i];
    ss += r * r;
  }
  const double dof = n - 2;
  const double s2 = dof > 0 ? ss / dof : 0.0;
  out.stderr_slope = std::sqrt(s2 * n / det);
  return out;
}

/// Deviation of errors from a tensor product across two blocks.
inline double correlation_metric(double l_pppp, double l_ppii, double l_iipp) {
  return std::abs(l_pppp - l_ppii * l_iipp);
}

inline double average_correlation(double delta_x, double delta_z) {
  return 0.5 * (delta_x + delta_z);
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

inline WilsonInterval wilson_interval(long successes, long trials, double z = 1.96) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2 * n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {(center - half) / denom, (center + half) / denom};
}

}  // namespace paulilearn
