#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcvi::kernels {

// Reduction block length. Partial sums are formed per block and combined
// serially in block order, so reductions are bitwise reproducible for any
// thread count.
inline constexpr std::size_t kBlock = 1024;

// Minimum element count before a kernel opens an OpenMP region.
inline constexpr std::size_t kParallelCutoff = 1 << 15;

/// Serial reference kernels. Plain loops, kept as the comparison baseline for
/// the parallel variants and for the kernel benchmark.
namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
double nrm1(std::span<const double> a);
double nrm2_diff(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
/// y = A x with A row-major (m x n).
void matvec(std::span<const double> A, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y);
/// y = sum_j x_j * row_j(At) over nonzero x_j, with At row-major (n x m).
/// Computes A x through its transpose, skipping zero coordinates of x.
void matvec_sparse_cols(std::span<const double> At, std::size_t m, std::size_t n,
                        std::span<const double> x, std::span<double> y);

}  // namespace serial

// OpenMP kernels. Contracts match the serial namespace; reductions use the
// fixed block scheme above so results do not depend on the thread count.

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
double nrm1(std::span<const double> a);
double nrm2_diff(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
void matvec(std::span<const double> A, std::size_t m, std::size_t n,
            std::span<const double> x, std::span<double> y);
void matvec_sparse_cols(std::span<const double> At, std::size_t m, std::size_t n,
                        std::span<const double> x, std::span<double> y);

std::size_t count_nonzeros(std::span<const double> x);

/// Number of OpenMP threads the kernels may use.
int max_threads();

/// Caps the OpenMP thread count (no-op in serial builds, or when n < 1).
void set_threads(int n);

}  // namespace pcvi::kernels
