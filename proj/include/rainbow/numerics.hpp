// Shared numerical kernels: normal distribution helpers, adaptive
// Gauss-Kronrod quadrature, bracketed root finding, seeded RNG streams and a
// small deterministic parallel-for.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace rainbow {

/// Error raised by any rainbow module. `module()` names the component that
/// failed so front ends can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
double norm_quantile(double p);

/// Student-t with `nu` degrees of freedom.
double student_t_cdf(double x, double nu);
double student_t_pdf(double x, double nu);
double student_t_quantile(double p, double nu);

using ScalarFn = std::function<double(double)>;

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
  // Subinterval with the largest error estimate when not converged.
  double worst_lo = 0.0;
  double worst_hi = 0.0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over [a, b]. Either end
/// may be infinite; semi-infinite and infinite ranges are mapped to finite
/// ones by rational substitution.
QuadratureResult integrate(const ScalarFn& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Like `integrate` but throws `Error(module, ...)` naming the worst
/// subinterval when the tolerance is not met.
double integrate_or_throw(const ScalarFn& f, double a, double b, const QuadratureOptions& opts,
                          const std::string& module);

/// Root of a nondecreasing function on [lo, hi] (f(lo) <= 0 <= f(hi)) by
/// bisection, stopping when the bracket is narrower than `x_tol`.
double bisect_increasing(const ScalarFn& f, double lo, double hi, double x_tol,
                         int max_iter = 200);

/// Newton iteration safeguarded by a bracket. `fdf` returns (f, f') at x.
/// Requires sign(f(lo)) != sign(f(hi)).
double safeguarded_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                          double hi, double f_tol, double x_tol, int max_iter = 200);

/// Minimizes `f` on [lo, hi]: a coarse grid scan picks the best cell, then
/// Brent refines inside the neighbouring cells.
struct Minimum {
  double x;
  double value;
};
Minimum minimize_scalar(const ScalarFn& f, double lo, double hi, double x_tol = 1e-8,
                        int grid = 24);

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) pairs.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform in the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  // 53 random bits, shifted by half an ulp so neither endpoint occurs.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Worker count from RAINBOW_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs `task(i)` for i in [0, n). Tasks must write only their own outputs;
/// the result is then independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace rainbow
