#pragma once

#include <cstddef>

namespace emgcs {

// Row-major matrix products. All kernels accumulate each output element with
// a serial ascending reduction, so results are bit-identical for any OpenMP
// thread count. accumulate=false zeroes C first.

// C[M,N] += A[M,K] * B[K,N]
void gemm_nn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);

// C[K,N] += A[M,K]^T * B[M,N]
void gemm_tn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);

// C[M,K] += A[M,N] * B[K,N]^T
void gemm_nt(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);

namespace ref {

// Plain serial triple loops, kept as the reference the fast kernels are
// tested against.
void gemm_nn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);
void gemm_tn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);
void gemm_nt(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate = false);

}  // namespace ref

}  // namespace emgcs
