#include "jumpdiff/common.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace jumpdiff {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

void parallel_for(long n, const std::function<void(long)>& body, int threads) {
  if (n <= 0) return;
  int hw = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (hw == 1 || n == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  int workers = static_cast<int>(std::min<long>(hw, n));
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

using Cplx = std::complex<double>;

Cplx simpson(double a, double b, Cplx fa, Cplx fm, Cplx fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Cplx simpson_rec(const std::function<Cplx(double)>& f, double a, double b, Cplx fa, Cplx fm,
                 Cplx fb, Cplx whole, double abs_tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  Cplx flm = f(lm), frm = f(rm);
  Cplx left = simpson(a, m, fa, flm, fm);
  Cplx right = simpson(m, b, fm, frm, fb);
  Cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * abs_tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1);
}

}  // namespace

std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double rel_tol, int max_depth) {
  if (a == b) return {0.0, 0.0};
  Cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  Cplx whole = simpson(a, b, fa, fm, fb);
  double scale = std::max({std::abs(whole), std::abs(fa) * std::abs(b - a), 1e-300});
  return simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

}  // namespace jumpdiff
