// Microbenchmark comparing the serial reference kernels against the
// OpenMP-parallel production paths: matrix product, convolution forward and
// backward, and whole-bundle feature extraction.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "emgcs/dataset.hpp"
#include "emgcs/features.hpp"
#include "emgcs/layers.hpp"
#include "emgcs/matmul.hpp"
#include "emgcs/synth.hpp"

using Clock = std::chrono::steady_clock;
using emgcs::Tensor;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Tensor random_tensor(int n, int h, int w, int c, std::uint64_t seed) {
    Tensor t(n, h, w, c);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& v : t.data) v = g(rng);
    return t;
}

void bench_gemm() {
    // widest convolution in the network: 128 filters over 25*256 taps,
    // 42 positions x 148 batch columns
    const int M = 128, K = 6400, N = 6216;
    std::vector<double> A(static_cast<size_t>(M) * K), B(static_cast<size_t>(K) * N),
        C(static_cast<size_t>(M) * N);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& v : A) v = u(rng);
    for (auto& v : B) v = u(rng);
    const double flops = 2.0 * M * K * static_cast<double>(N);

    std::printf("-- gemm %dx%dx%d --\n", M, K, N);
    for (int threads : {1, omp_get_num_procs()}) {
        omp_set_num_threads(threads);
        const auto t0 = Clock::now();
        emgcs::gemm_nn(M, N, K, A.data(), B.data(), C.data());
        const double dt = seconds_since(t0);
        std::printf("  openmp (%d threads)  %6.2fs  %7.2f GFLOP/s\n", threads, dt,
                    flops / dt / 1e9);
    }
    const auto t0 = Clock::now();
    emgcs::ref::gemm_nn(M, N, K, A.data(), B.data(), C.data());
    const double dt = seconds_since(t0);
    std::printf("  serial reference     %6.2fs  %7.2f GFLOP/s\n", dt, flops / dt / 1e9);
}

void bench_conv() {
    const int batch = 32;
    const Tensor x = random_tensor(batch, 6, 7, 128, 1);
    const Tensor w = random_tensor(64, 5, 5, 128, 2);
    const std::vector<double> bias(64, 0.0);
    const Tensor gout = random_tensor(batch, 6, 7, 64, 3);

    std::printf("-- conv 6x7x128 -> 64 filters, batch %d --\n", batch);
    for (int threads : {1, omp_get_num_procs()}) {
        omp_set_num_threads(threads);
        const auto t0 = Clock::now();
        Tensor y = emgcs::conv2d_forward(x, w, bias);
        Tensor gi, gw;
        std::vector<double> gb;
        emgcs::conv2d_backward(x, w, gout, gi, gw, gb);
        std::printf("  openmp (%d threads)  fwd+bwd %6.3fs\n", threads, seconds_since(t0));
    }
    const auto t0 = Clock::now();
    Tensor y = emgcs::ref::conv2d_forward(x, w, bias);
    Tensor gi, gw;
    std::vector<double> gb;
    emgcs::ref::conv2d_backward(x, w, gout, gi, gw, gb);
    std::printf("  serial reference     fwd+bwd %6.3fs\n", seconds_since(t0));
}

void bench_extraction() {
    emgcs::SynthConfig cfg;
    cfg.subjects_per_class = 1;
    cfg.signal_length = 4096;
    cfg.seed = 3;
    emgcs::SubjectBundle bundle = emgcs::generate_subject(1, cfg, 1);
    bundle.subject_id = "bench";
    const auto grids =
        emgcs::assemble_samples(bundle, emgcs::AssemblyMode::Random(12, 1));

    std::printf("-- feature extraction, 12 grids x 42 cells, 4096 samples --\n");
    for (int threads : {1, omp_get_num_procs()}) {
        omp_set_num_threads(threads);
        const auto t0 = Clock::now();
        const auto samples = emgcs::extract_samples(grids, {});
        std::printf("  openmp (%d threads)  %6.2fs  (%zu samples)\n", threads,
                    seconds_since(t0), samples.size());
    }
}

}  // namespace

int main() {
    std::printf("hardware threads: %d\n", omp_get_num_procs());
    bench_gemm();
    bench_conv();
    bench_extraction();
    return 0;
}
