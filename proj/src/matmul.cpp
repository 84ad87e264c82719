#include "emgcs/matmul.hpp"

#include <cstring>

namespace emgcs {

// Layout notes: gemm_nn keeps k in the middle loop so the n-loop becomes a
// stream of FMAs over contiguous B/C rows; each C element still sees its k
// terms in ascending order, which keeps the result independent of the thread
// count.

void gemm_nn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
    // Blocks of 8 A-rows share one pass over B; B is by far the largest
    // operand for the convolution shapes this feeds.
    constexpr int MB = 8;
    constexpr int NB = 512;
    const int nblocks = (M + MB - 1) / MB;
#pragma omp parallel for schedule(static)
    for (int blk = 0; blk < nblocks; ++blk) {
        const int m0 = blk * MB;
        const int mb = (m0 + MB <= M) ? MB : M - m0;
        if (!accumulate)
            std::memset(C + static_cast<std::size_t>(m0) * N, 0,
                        sizeof(double) * mb * N);
        for (int j0 = 0; j0 < N; j0 += NB) {
            const int jb = (j0 + NB <= N) ? NB : N - j0;
            for (int k = 0; k < K; ++k) {
                const double* brow = B + static_cast<std::size_t>(k) * N + j0;
                for (int i = 0; i < mb; ++i) {
                    const double a = A[static_cast<std::size_t>(m0 + i) * K + k];
                    if (a == 0.0) continue;
                    double* crow = C + static_cast<std::size_t>(m0 + i) * N + j0;
                    for (int j = 0; j < jb; ++j)
                        crow[j] += a * brow[j];
                }
            }
        }
    }
}

void gemm_tn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < K; ++k) {
        double* crow = C + static_cast<std::size_t>(k) * N;
        if (!accumulate)
            std::memset(crow, 0, sizeof(double) * N);
        for (int m = 0; m < M; ++m) {
            const double a = A[static_cast<std::size_t>(m) * K + k];
            if (a == 0.0) continue;
            const double* brow = B + static_cast<std::size_t>(m) * N;
            for (int j = 0; j < N; ++j)
                crow[j] += a * brow[j];
        }
    }
}

void gemm_nt(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int m = 0; m < M; ++m) {
        const double* arow = A + static_cast<std::size_t>(m) * N;
        double* crow = C + static_cast<std::size_t>(m) * K;
        for (int k = 0; k < K; ++k) {
            const double* brow = B + static_cast<std::size_t>(k) * N;
            double s = 0.0;
            for (int j = 0; j < N; ++j)
                s += arow[j] * brow[j];
            if (accumulate)
                crow[k] += s;
            else
                crow[k] = s;
        }
    }
}

namespace ref {

void gemm_nn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < N; ++j) {
            double s = accumulate ? C[static_cast<std::size_t>(m) * N + j] : 0.0;
            for (int k = 0; k < K; ++k)
                s += A[static_cast<std::size_t>(m) * K + k] *
                     B[static_cast<std::size_t>(k) * N + j];
            C[static_cast<std::size_t>(m) * N + j] = s;
        }
}

void gemm_tn(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < N; ++j) {
            double s = accumulate ? C[static_cast<std::size_t>(k) * N + j] : 0.0;
            for (int m = 0; m < M; ++m)
                s += A[static_cast<std::size_t>(m) * K + k] *
                     B[static_cast<std::size_t>(m) * N + j];
            C[static_cast<std::size_t>(k) * N + j] = s;
        }
}

void gemm_nt(int M, int N, int K, const double* A, const double* B, double* C,
             bool accumulate) {
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) {
            double s = accumulate ? C[static_cast<std::size_t>(m) * K + k] : 0.0;
            for (int j = 0; j < N; ++j)
                s += A[static_cast<std::size_t>(m) * N + j] *
                     B[static_cast<std::size_t>(k) * N + j];
            C[static_cast<std::size_t>(m) * K + k] = s;
        }
}

}  // namespace ref

}  // namespace emgcs
