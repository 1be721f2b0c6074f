#include "parwb/perfcalc.hpp"

#include <cmath>

#include "parwb/errors.hpp"

namespace parwb::perfcalc {

namespace {

double log2_pos(double x) { return std::log2(x); }

double nonparallel_term(const TimeModel& m, double n, double p) {
  switch (m.kind) {
    case TimeModel::Kind::N_over_P_plus_1:
      return 1.0;
    case TimeModel::Kind::N_over_P_plus_logP:
      return log2_pos(p);
    case TimeModel::Kind::N_over_P_plus_logN:
      return log2_pos(n);
    case TimeModel::Kind::N_over_P_plus_P:
      return p;
    case TimeModel::Kind::Custom: {
      double t = 0.0;
      for (const auto& term : m.custom_terms) {
        t += term.coeff * std::pow(n, term.n_pow) * std::pow(p, term.p_pow) *
             std::pow(log2_pos(n), term.logn_pow) * std::pow(log2_pos(p), term.logp_pow);
      }
      return t;
    }
  }
  throw DomainError("model_time: unknown kind");
}

}  // namespace

double amdahl(double s, std::int64_t p) {
  require(s > 0.0 && s <= 1.0, "amdahl: s must be in (0,1]");
  require(p >= 1, "amdahl: p must be >= 1");
  return 1.0 / (s + (1.0 - s) / static_cast<double>(p));
}

SpeedupEfficiency speedup_efficiency(double t_seq, double t_par, std::int64_t p) {
  require(t_seq > 0.0, "speedup_efficiency: t_seq must be positive");
  require(t_par > 0.0, "speedup_efficiency: t_par must be positive");
  require(p >= 1, "speedup_efficiency: p must be >= 1");
  SpeedupEfficiency r;
  r.speedup = t_seq / t_par;
  r.efficiency = r.speedup / static_cast<double>(p);
  return r;
}

double model_time(const TimeModel& model, std::int64_t n, std::int64_t p) {
  require(model.leading_constant > 0.0, "model_time: leading constant must be positive");
  require(n >= 1, "model_time: n must be >= 1");
  require(p >= 1, "model_time: p must be >= 1");
  double dn = static_cast<double>(n);
  double dp = static_cast<double>(p);
  return model.leading_constant * (dn / dp + nonparallel_term(model, dn, dp));
}

double iso_efficiency(const TimeModel& model, double e, std::int64_t p) {
  require(e > 0.0 && e < 1.0, "iso_efficiency: e must be in (0,1)");
  require(p >= 1, "iso_efficiency: p must be >= 1");
  double dp = static_cast<double>(p);
  double ratio = e * dp / (1.0 - e);
  switch (model.kind) {
    case TimeModel::Kind::N_over_P_plus_1:
      return ratio;
    case TimeModel::Kind::N_over_P_plus_logP:
      return ratio * log2_pos(dp);
    case TimeModel::Kind::N_over_P_plus_P:
      return ratio * dp;
    case TimeModel::Kind::N_over_P_plus_logN: {
      // Solve n / log2(n) = ratio; the left side is increasing for n >= 4
      // and equals 2 at both ends of the dip [2,4].
      double lo = 2.0, hi = std::ldexp(1.0, 60);
      require(ratio >= 2.0, "iso_efficiency: no solution with n >= 2");
      require(hi / log2_pos(hi) >= ratio, "iso_efficiency: no solution in bracket");
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid / log2_pos(mid) < ratio)
          lo = mid;
        else
          hi = mid;
        if ((hi - lo) <= 1e-9 * hi) break;
      }
      return 0.5 * (lo + hi);
    }
    case TimeModel::Kind::Custom:
      break;
  }
  throw DomainError("iso_efficiency: unsupported model kind");
}

AsymptoticClass master_solve(const Recurrence& r) {
  require(r.a >= 1.0, "master_solve: a must be >= 1");
  require(r.b > 1.0, "master_solve: b must be > 1");
  require(r.d >= 0.0, "master_solve: d must be >= 0");
  require(r.e >= 0.0, "master_solve: e must be >= 0");
  double bd = std::pow(r.b, r.d);
  AsymptoticClass c;
  if (std::fabs(r.a - bd) <= 1e-12 * std::fmax(r.a, bd)) {
    c.case_id = 2;
    c.exponent = r.d;
    c.log_power = r.e + 1.0;
  } else if (r.a < bd) {
    c.case_id = 1;
    c.exponent = r.d;
    c.log_power = r.e;
  } else {
    c.case_id = 3;
    c.exponent = std::log(r.a) / std::log(r.b);
    c.log_power = 0.0;
  }
  return c;
}

double recurrence_eval(const Recurrence& r, double base, std::int64_t n) {
  require(n >= 1, "recurrence_eval: n must be >= 1");
  double bint = std::round(r.b);
  require(std::fabs(r.b - bint) < 1e-12 && bint >= 2.0, "recurrence_eval: b must be an integer >= 2");
  std::int64_t b = static_cast<std::int64_t>(bint);
  // Validate n = b^k and evaluate bottom-up.
  std::int64_t m = n;
  int k = 0;
  while (m > 1) {
    require(m % b == 0, "recurrence_eval: n must be a power of b");
    m /= b;
    ++k;
  }
  double t = base;
  std::int64_t size = 1;
  for (int level = 0; level < k; ++level) {
    size *= b;
    double dn = static_cast<double>(size);
    t = r.a * t + std::pow(dn, r.d) * std::pow(std::log2(dn), r.e);
  }
  return t;
}

double geometric_sum(double q, std::int64_t n) {
  require(n >= 0, "geometric_sum: n must be >= 0");
  if (q == 1.0) return static_cast<double>(n + 1);
  return (std::pow(q, static_cast<double>(n + 1)) - 1.0) / (q - 1.0);
}

}  // namespace parwb::perfcalc
