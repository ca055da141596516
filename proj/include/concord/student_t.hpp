#pragma once

namespace concord::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// P(T > t).
double student_t_upper_tail(double t, double df);

/// P(|T| > |t|).
double student_t_two_sided(double t, double df);

}  // namespace concord::stats
