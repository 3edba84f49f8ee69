#pragma once

#include <span>

// Small statistics helpers for Monte Carlo result checking.

namespace wfusion::stats {

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_pvalue(double chi2, int dof);

// Pearson statistic of observed counts against expected probabilities.
double chi_square_statistic(std::span<const long> observed,
                            std::span<const double> expected_probs);

}  // namespace wfusion::stats
