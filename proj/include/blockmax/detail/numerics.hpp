#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace blockmax::detail {

// Neumaier compensated accumulator.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Run fn(i) for i in [0,n).  Callers must write results into per-index slots;
// then the outcome is identical for every thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  std::size_t t = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  t = std::min(t, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t j = 0; j < t; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct SimplexResult {
  std::array<double, 3> x{};
  double fmax = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead simplex maximization in R^3.  -inf objective values act as a
// rejection penalty.  Convergence: simplex diameter below tol in coordinates
// rescaled by `scale`.
inline SimplexResult nelder_mead3(
    const std::function<double(const std::array<double, 3>&)>& f,
    const std::array<double, 3>& x0, const std::array<double, 3>& step,
    const std::array<double, 3>& scale, double tol, int max_iter) {
  using Point = std::array<double, 3>;
  constexpr int n = 3;
  std::array<Point, n + 1> v;
  std::array<double, n + 1> fv;
  v[0] = x0;
  for (int i = 0; i < n; ++i) {
    v[i + 1] = x0;
    v[i + 1][i] += step[i];
  }
  auto eval = [&](const Point& p) {
    const double y = f(p);
    return std::isnan(y) ? -std::numeric_limits<double>::infinity() : y;
  };
  for (int i = 0; i <= n; ++i) fv[i] = eval(v[i]);

  auto order = [&]() {  // descending objective: v[0] best, v[n] worst
    std::array<int, n + 1> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] > fv[b]; });
    std::array<Point, n + 1> v2;
    std::array<double, n + 1> f2;
    for (int i = 0; i <= n; ++i) {
      v2[i] = v[idx[i]];
      f2[i] = fv[idx[i]];
    }
    v = v2;
    fv = f2;
  };
  auto diameter = [&]() {
    double d = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        for (int c = 0; c < n; ++c)
          d = std::max(d, std::abs(v[i][c] - v[j][c]) / scale[c]);
    return d;
  };

  SimplexResult out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    order();
    if (diameter() < tol) {
      out.converged = true;
      break;
    }
    Point centroid{};
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) centroid[c] += v[i][c] / n;
    auto blend = [&](double t) {  // centroid + t*(centroid - worst)
      Point p;
      for (int c = 0; c < n; ++c) p[c] = centroid[c] + t * (centroid[c] - v[n][c]);
      return p;
    };
    const Point xr = blend(1.0);
    const double fr = eval(xr);
    if (fr > fv[0]) {
      const Point xe = blend(2.0);
      const double fe = eval(xe);
      if (fe > fr) {
        v[n] = xe;
        fv[n] = fe;
      } else {
        v[n] = xr;
        fv[n] = fr;
      }
    } else if (fr > fv[n - 1]) {
      v[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr > fv[n];
      const Point xc = blend(outside ? 0.5 : -0.5);
      const double fc = eval(xc);
      if (fc > (outside ? fr : fv[n])) {
        v[n] = xc;
        fv[n] = fc;
      } else {  // shrink toward the best vertex
        for (int i = 1; i <= n; ++i) {
          for (int c = 0; c < n; ++c) v[i][c] = v[0][c] + 0.5 * (v[i][c] - v[0][c]);
          fv[i] = eval(v[i]);
        }
      }
    }
  }
  order();
  out.x = v[0];
  out.fmax = fv[0];
  out.iterations = iter;
  return out;
}

}  // namespace blockmax::detail
