#include "pcvi/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcvi::kernels {

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(std::span<const double> a) {
  double s = 0.0;
  for (const double v : a) s += v * v;
  return std::sqrt(s);
}

double nrm1(std::span<const double> a) {
  double s = 0.0;
  for (const double v : a) s += std::fabs(v);
  return s;
}

double nrm2_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void matvec(std::span<const double> A, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y) {
  assert(A.size() == m * n && x.size() == n && y.size() == m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = A.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void matvec_sparse_cols(std::span<const double> At, std::size_t m, std::size_t n,
                        std::span<const double> x, std::span<double> y) {
  assert(At.size() == m * n && x.size() == n && y.size() == m);
  for (std::size_t i = 0; i < m; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* col = At.data() + j * m;
    for (std::size_t i = 0; i < m; ++i) y[i] += xj * col[i];
  }
}

}  // namespace serial

namespace {

// Block-partial reduction: each block's sum is accumulated independently and
// the partials are combined in block order, decoupling the result from the
// thread count.
template <typename BlockSum>
double blocked_reduce(std::size_t n, BlockSum block_sum) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) return n == 0 ? 0.0 : block_sum(0, n);
  std::vector<double> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
#endif
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    partial[static_cast<std::size_t>(blk)] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (const double p : partial) s += p;
  return s;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const double* pa = a.data();
  const double* pb = b.data();
  return blocked_reduce(a.size(), [pa, pb](std::size_t lo, std::size_t hi) {
    double s = 0.0;
#ifdef _OPENMP
#pragma omp simd reduction(+ : s)
#endif
    for (std::size_t i = lo; i < hi; ++i) s += pa[i] * pb[i];
    return s;
  });
}

double nrm2(std::span<const double> a) {
  const double* pa = a.data();
  const double s = blocked_reduce(a.size(), [pa](std::size_t lo, std::size_t hi) {
    double t = 0.0;
#ifdef _OPENMP
#pragma omp simd reduction(+ : t)
#endif
    for (std::size_t i = lo; i < hi; ++i) t += pa[i] * pa[i];
    return t;
  });
  return std::sqrt(s);
}

double nrm1(std::span<const double> a) {
  const double* pa = a.data();
  return blocked_reduce(a.size(), [pa](std::size_t lo, std::size_t hi) {
    double t = 0.0;
#ifdef _OPENMP
#pragma omp simd reduction(+ : t)
#endif
    for (std::size_t i = lo; i < hi; ++i) t += std::fabs(pa[i]);
    return t;
  });
}

double nrm2_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const double* pa = a.data();
  const double* pb = b.data();
  const double s = blocked_reduce(a.size(), [pa, pb](std::size_t lo, std::size_t hi) {
    double t = 0.0;
#ifdef _OPENMP
#pragma omp simd reduction(+ : t)
#endif
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = pa[i] - pb[i];
      t += d * d;
    }
    return t;
  });
  return std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const double* px = x.data();
  double* py = y.data();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#ifdef _OPENMP
#pragma omp parallel for simd schedule(static) if (x.size() >= kParallelCutoff)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) py[i] += alpha * px[i];
}

void scal(double alpha, std::span<double> x) {
  double* px = x.data();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#ifdef _OPENMP
#pragma omp parallel for simd schedule(static) if (x.size() >= kParallelCutoff)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) px[i] *= alpha;
}

void matvec(std::span<const double> A, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y) {
  assert(A.size() == m * n && x.size() == n && y.size() == m);
  const double* pA = A.data();
  const double* px = x.data();
  double* py = y.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m * n >= kParallelCutoff)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    const double* row = pA + static_cast<std::size_t>(i) * n;
    double s = 0.0;
#ifdef _OPENMP
#pragma omp simd reduction(+ : s)
#endif
    for (std::size_t j = 0; j < n; ++j) s += row[j] * px[j];
    py[i] = s;
  }
}

void matvec_sparse_cols(std::span<const double> At, std::size_t m, std::size_t n,
                        std::span<const double> x, std::span<double> y) {
  assert(At.size() == m * n && x.size() == n && y.size() == m);
  // Gather the support first; each output element then accumulates its fixed
  // slice in index order, which keeps the result independent of threading.
  std::vector<std::size_t> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < n; ++j)
    if (x[j] != 0.0) nz.push_back(j);
  const double* pAt = At.data();
  const double* px = x.data();
  double* py = y.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m * nz.size() >= kParallelCutoff)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double s = 0.0;
    for (const std::size_t j : nz) s += px[j] * pAt[j * m + static_cast<std::size_t>(i)];
    py[i] = s;
  }
}

std::size_t count_nonzeros(std::span<const double> x) {
  std::size_t c = 0;
  for (const double v : x) c += v != 0.0 ? 1 : 0;
  return c;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
  if (n < 1) return;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

}  // namespace pcvi::kernels
