#pragma once

#include <cstdint>
#include <vector>

namespace parwb::perfcalc {

// Analytic running-time model T(n,p) = C * (n/p + t(n,p)).
// The kind selects the non-parallelizable term t(n,p); Custom sums the
// given terms coeff * n^n_pow * p^p_pow * log2(n)^logn_pow * log2(p)^logp_pow.
struct TimeModel {
  enum class Kind { N_over_P_plus_1, N_over_P_plus_logP, N_over_P_plus_logN, N_over_P_plus_P, Custom };

  struct Term {
    double coeff = 0.0;
    double n_pow = 0.0;
    double p_pow = 0.0;
    double logn_pow = 0.0;
    double logp_pow = 0.0;
  };

  Kind kind = Kind::N_over_P_plus_1;
  double leading_constant = 1.0;
  std::vector<Term> custom_terms;
};

// Divide-and-conquer recurrence T(n) = a*T(n/b) + Theta(n^d * log^e n).
struct Recurrence {
  double a = 1.0;
  double b = 2.0;
  double d = 0.0;
  double e = 0.0;
};

// Solution class Theta(n^exponent * log^log_power n).
struct AsymptoticClass {
  int case_id = 0;  // 1, 2, or 3
  double exponent = 0.0;
  double log_power = 0.0;
};

double amdahl(double s, std::int64_t p);

struct SpeedupEfficiency {
  double speedup = 0.0;
  double efficiency = 0.0;
};
SpeedupEfficiency speedup_efficiency(double t_seq, double t_par, std::int64_t p);

double model_time(const TimeModel& model, std::int64_t n, std::int64_t p);

// Smallest problem size sustaining efficiency e at p processors for the
// model's kind. Kind N_over_P_plus_logN is solved numerically (bisection on
// [2, 2^60], relative tolerance 1e-9); the other closed forms are exact.
double iso_efficiency(const TimeModel& model, double e, std::int64_t p);

AsymptoticClass master_solve(const Recurrence& r);

// Exact evaluation T(n) = a*T(n/b) + n^d * log2(n)^e with T(1) = base.
// Requires integer b and n a power of b.
double recurrence_eval(const Recurrence& r, double base, std::int64_t n);

double geometric_sum(double q, std::int64_t n);

}  // namespace parwb::perfcalc
