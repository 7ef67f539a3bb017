#ifndef EFFHSIM_SPECIAL_FUNCTIONS_HPP
#define EFFHSIM_SPECIAL_FUNCTIONS_HPP

namespace effhsim {

/// Dawson integral F(x) = exp(-x^2) * int_0^x exp(t^2) dt.
/// Odd in x, absolute error below 1e-13 on the whole real line.
double dawson(double x);

}  // namespace effhsim

#endif
