#include "rainbow/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/minima.hpp>

namespace rainbow {

double norm_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double student_t_cdf(double x, double nu) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_pdf(double x, double nu) {
  return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_quantile(double p, double nu) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

namespace {

// QUADPACK G7/K15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const ScalarFn& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate(const ScalarFn& f, double a, double b, const QuadratureOptions& opts) {
  if (a == b) return {0.0, 0.0, 0, true, a, b};
  if (a > b) {
    auto r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (lo_inf && hi_inf) {
    // x = t / (1 - t^2), t in (-1, 1)
    auto g = [&f](double t) {
      const double d = 1.0 - t * t;
      if (d <= 0.0) return 0.0;
      const double v = f(t / d);
      return v == 0.0 ? 0.0 : v * (1.0 + t * t) / (d * d);
    };
    return integrate(g, -1.0, 1.0, opts);
  }
  if (hi_inf) {
    // x = a + t / (1 - t), t in [0, 1)
    auto g = [&f, a](double t) {
      const double d = 1.0 - t;
      if (d <= 0.0) return 0.0;
      const double v = f(a + t / d);
      return v == 0.0 ? 0.0 : v / (d * d);
    };
    return integrate(g, 0.0, 1.0, opts);
  }
  if (lo_inf) {
    auto g = [&f, b](double t) {
      const double d = 1.0 - t;
      if (d <= 0.0) return 0.0;
      const double v = f(b - t / d);
      return v == 0.0 ? 0.0 : v / (d * d);
    };
    return integrate(g, 0.0, 1.0, opts);
  }

  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int count = 1;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         count < opts.max_intervals) {
    Segment worst = heap.top();
    if (worst.hi - worst.lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(worst.lo), std::abs(worst.hi)))
      break;
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Segment left = kronrod15(f, worst.lo, mid);
    Segment right = kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to remove accumulated cancellation in the running totals.
  QuadratureResult out;
  out.intervals = count;
  out.worst_lo = heap.top().lo;
  out.worst_hi = heap.top().hi;
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  out.value = v;
  out.error = e;
  out.converged = e <= std::max(opts.abs_tol, opts.rel_tol * std::abs(v));
  return out;
}

double integrate_or_throw(const ScalarFn& f, double a, double b, const QuadratureOptions& opts,
                          const std::string& module) {
  const auto r = integrate(f, a, b, opts);
  if (!r.converged) {
    std::ostringstream os;
    os << "quadrature on [" << a << ", " << b << "] did not converge: error estimate "
       << r.error << " after " << r.intervals << " subintervals; worst subinterval ["
       << r.worst_lo << ", " << r.worst_hi << "]";
    throw Error(module, os.str());
  }
  return r.value;
}

double bisect_increasing(const ScalarFn& f, double lo, double hi, double x_tol, int max_iter) {
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double safeguarded_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                          double hi, double f_tol, double x_tol, int max_iter) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error("numerics", "safeguarded_newton: root not bracketed");
  const bool increasing = flo < 0;
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    auto [fx, dx] = fdf(x);
    if (std::abs(fx) <= f_tol) return x;
    if ((fx < 0) == increasing)
      lo = x;
    else
      hi = x;
    double next = (dx != 0.0 && std::isfinite(dx)) ? x - fx / dx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= x_tol * (1.0 + std::abs(x)) || hi - lo <= x_tol) return next;
    x = next;
  }
  return x;
}

Minimum minimize_scalar(const ScalarFn& f, double lo, double hi, double x_tol, int grid) {
  std::vector<double> xs(grid + 1), fs(grid + 1);
  int best = 0;
  for (int i = 0; i <= grid; ++i) {
    xs[i] = lo + (hi - lo) * i / grid;
    fs[i] = f(xs[i]);
    if (!std::isfinite(fs[i])) fs[i] = std::numeric_limits<double>::max();
    if (fs[i] < fs[best]) best = i;
  }
  const double a = xs[std::max(best - 1, 0)];
  const double b = xs[std::min(best + 1, grid)];
  const int bits = std::clamp(static_cast<int>(-std::log2(x_tol)), 8,
                              std::numeric_limits<double>::digits / 2);
  auto safe = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  auto [x, v] = boost::math::tools::brent_find_minima(safe, a, b, bits);
  if (fs[best] < v) return {xs[best], fs[best]};
  return {x, v};
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RAINBOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rainbow
