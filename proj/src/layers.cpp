#include "emgcs/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "emgcs/errors.hpp"
#include "emgcs/matmul.hpp"

namespace emgcs {

namespace {

void check_conv_shapes(const Tensor& input, const Tensor& weights,
                       const std::vector<double>& bias) {
    if (weights.h != weights.w)
        throw ShapeError("conv2d: kernel must be square, got " + weights.shape_str());
    if (input.c != weights.c)
        throw ShapeError("conv2d: input depth " + input.shape_str() +
                         " does not match weights " + weights.shape_str());
    if (static_cast<int>(bias.size()) != weights.n)
        throw ShapeError("conv2d: bias size " + std::to_string(bias.size()) +
                         " does not match filter count " + std::to_string(weights.n));
}

// col(k, p) = input value for filter tap k at output position p, zero padded.
// k = (fy*f + fx)*cin + ci, p = (b*h + y)*w + x.
void im2col(const Tensor& in, int f, std::vector<double>& col) {
    const int pt = (f - 1) / 2, pl = (f - 1) / 2;
    const int N = in.n * in.h * in.w;
    col.assign(static_cast<std::size_t>(f) * f * in.c * N, 0.0);
#pragma omp parallel for schedule(static) collapse(2)
    for (int fy = 0; fy < f; ++fy) {
        for (int fx = 0; fx < f; ++fx) {
            for (int ci = 0; ci < in.c; ++ci) {
                double* crow =
                    col.data() + (static_cast<std::size_t>(fy) * f + fx) * in.c * N +
                    static_cast<std::size_t>(ci) * N;
                for (int b = 0; b < in.n; ++b)
                    for (int y = 0; y < in.h; ++y) {
                        const int iy = y + fy - pt;
                        if (iy < 0 || iy >= in.h) continue;
                        const std::size_t prow = (static_cast<std::size_t>(b) * in.h + y) * in.w;
                        for (int x = 0; x < in.w; ++x) {
                            const int ix = x + fx - pl;
                            if (ix < 0 || ix >= in.w) continue;
                            crow[prow + x] = in.at(b, iy, ix, ci);
                        }
                    }
            }
        }
    }
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::vector<double>& bias) {
    check_conv_shapes(input, weights, bias);
    const int f = weights.h;
    const int cout = weights.n;
    const int N = input.n * input.h * input.w;
    const int K = f * f * input.c;

    std::vector<double> col;
    im2col(input, f, col);

    std::vector<double> out_mat(static_cast<std::size_t>(cout) * N);
    gemm_nn(cout, N, K, weights.data.data(), col.data(), out_mat.data());

    Tensor out(input.n, input.h, input.w, cout);
#pragma omp parallel for schedule(static)
    for (int o = 0; o < cout; ++o) {
        const double* row = out_mat.data() + static_cast<std::size_t>(o) * N;
        const double bo = bias[o];
        for (int p = 0; p < N; ++p)
            out.data[static_cast<std::size_t>(p) * cout + o] = row[p] + bo;
    }
    return out;
}

void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_input, Tensor& grad_weights,
                     std::vector<double>& grad_bias) {
    const int f = weights.h;
    const int cout = weights.n;
    const int cin = input.c;
    const int N = input.n * input.h * input.w;
    const int K = f * f * cin;
    if (grad_out.n != input.n || grad_out.h != input.h || grad_out.w != input.w ||
        grad_out.c != cout)
        throw ShapeError("conv2d_backward: grad shape " + grad_out.shape_str() +
                         " does not match input " + input.shape_str());

    // grad_out as (cout, N)
    std::vector<double> gmat(static_cast<std::size_t>(cout) * N);
#pragma omp parallel for schedule(static)
    for (int o = 0; o < cout; ++o)
        for (int p = 0; p < N; ++p)
            gmat[static_cast<std::size_t>(o) * N + p] =
                grad_out.data[static_cast<std::size_t>(p) * cout + o];

    // bias: plain sum per filter
    grad_bias.assign(cout, 0.0);
#pragma omp parallel for schedule(static)
    for (int o = 0; o < cout; ++o) {
        double s = 0.0;
        const double* row = gmat.data() + static_cast<std::size_t>(o) * N;
        for (int p = 0; p < N; ++p) s += row[p];
        grad_bias[o] = s;
    }

    // weights: dW(cout, K) = gmat(cout, N) * col(K, N)^T
    std::vector<double> col;
    im2col(input, f, col);
    grad_weights = Tensor(weights.n, weights.h, weights.w, weights.c);
    gemm_nt(cout, N, K, gmat.data(), col.data(), grad_weights.data.data());

    // data: dcol(K, N) = W(cout, K)^T * gmat(cout, N), then gather
    std::vector<double> dcol(static_cast<std::size_t>(K) * N);
    gemm_tn(cout, N, K, weights.data.data(), gmat.data(), dcol.data());

    grad_input = Tensor(input.n, input.h, input.w, cin);
    const int pt = (f - 1) / 2, pl = (f - 1) / 2;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < input.n; ++b)
        for (int iy = 0; iy < input.h; ++iy)
            for (int ix = 0; ix < input.w; ++ix)
                for (int ci = 0; ci < cin; ++ci) {
                    double s = 0.0;
                    for (int fy = 0; fy < f; ++fy) {
                        const int y = iy - fy + pt;
                        if (y < 0 || y >= input.h) continue;
                        for (int fx = 0; fx < f; ++fx) {
                            const int x = ix - fx + pl;
                            if (x < 0 || x >= input.w) continue;
                            const std::size_t k =
                                (static_cast<std::size_t>(fy) * f + fx) * cin + ci;
                            const std::size_t p =
                                (static_cast<std::size_t>(b) * input.h + y) * input.w + x;
                            s += dcol[k * N + p];
                        }
                    }
                    grad_input.at(b, iy, ix, ci) = s;
                }
}

Tensor maxpool2x2_forward(const Tensor& input, std::vector<std::size_t>* argmax) {
    const int oh = (input.h + 1) / 2, ow = (input.w + 1) / 2;
    Tensor out(input.n, oh, ow, input.c);
    if (argmax) argmax->assign(out.size(), 0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < input.n; ++b)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x)
                for (int c = 0; c < input.c; ++c) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (int dy = 0; dy < 2; ++dy) {
                        const int iy = 2 * y + dy;
                        if (iy >= input.h) continue;
                        for (int dx = 0; dx < 2; ++dx) {
                            const int ix = 2 * x + dx;
                            if (ix >= input.w) continue;
                            const double v = input.at(b, iy, ix, c);
                            if (v > best) {
                                best = v;
                                best_idx =
                                    ((static_cast<std::size_t>(b) * input.h + iy) * input.w +
                                     ix) * input.c + c;
                            }
                        }
                    }
                    out.at(b, y, x, c) = best;
                    if (argmax)
                        (*argmax)[((static_cast<std::size_t>(b) * oh + y) * ow + x) * input.c +
                                  c] = best_idx;
                }
    return out;
}

Tensor maxpool2x2_backward(const Tensor& input_like, const Tensor& grad_out,
                           const std::vector<std::size_t>& argmax) {
    if (argmax.size() != grad_out.size())
        throw ShapeError("maxpool backward: argmax/grad size mismatch");
    Tensor grad_in(input_like.n, input_like.h, input_like.w, input_like.c);
    // scatter is serial: windows overlap never, but keep it simple and exact
    for (std::size_t i = 0; i < argmax.size(); ++i)
        grad_in.data[argmax[i]] += grad_out.data[i];
    return grad_in;
}

Tensor batchnorm_forward(const Tensor& input, BatchNormState& state, bool train,
                         double momentum, double eps, BatchNormCache* cache) {
    const int C = input.c;
    if (static_cast<int>(state.scale.size()) != C)
        throw ShapeError("batchnorm: state has " + std::to_string(state.scale.size()) +
                         " channels, input " + std::to_string(C));
    const std::size_t M = input.size() / C;

    Tensor out(input.n, input.h, input.w, input.c);
    if (train) {
        if (input.n < 2)
            throw ConfigError("batchnorm: train mode needs batch >= 2, got " +
                              std::to_string(input.n));
        if (cache) {
            cache->mean.assign(C, 0.0);
            cache->inv_std.assign(C, 0.0);
        }
#pragma omp parallel for schedule(static)
        for (int c = 0; c < C; ++c) {
            double mean = 0.0;
            for (std::size_t m = 0; m < M; ++m) mean += input.data[m * C + c];
            mean /= static_cast<double>(M);
            double var = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                const double d = input.data[m * C + c] - mean;
                var += d * d;
            }
            var /= static_cast<double>(M);
            const double inv_std = 1.0 / std::sqrt(var + eps);
            const double sc = state.scale[c], sh = state.shift[c];
            for (std::size_t m = 0; m < M; ++m)
                out.data[m * C + c] = sc * (input.data[m * C + c] - mean) * inv_std + sh;
            state.running_mean[c] = momentum * state.running_mean[c] + (1.0 - momentum) * mean;
            state.running_var[c] = momentum * state.running_var[c] + (1.0 - momentum) * var;
            if (cache) {
                cache->mean[c] = mean;
                cache->inv_std[c] = inv_std;
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < C; ++c) {
            const double inv_std = 1.0 / std::sqrt(state.running_var[c] + eps);
            const double mean = state.running_mean[c];
            const double sc = state.scale[c], sh = state.shift[c];
            for (std::size_t m = 0; m < M; ++m)
                out.data[m * C + c] = sc * (input.data[m * C + c] - mean) * inv_std + sh;
        }
    }
    return out;
}

Tensor batchnorm_backward(const Tensor& input, const BatchNormState& state,
                          const BatchNormCache& cache, const Tensor& grad_out,
                          std::vector<double>& grad_scale, std::vector<double>& grad_shift) {
    require_same_shape(input, grad_out, "batchnorm_backward");
    const int C = input.c;
    const std::size_t M = input.size() / C;
    Tensor grad_in(input.n, input.h, input.w, input.c);
    grad_scale.assign(C, 0.0);
    grad_shift.assign(C, 0.0);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        const double mean = cache.mean[c], inv_std = cache.inv_std[c];
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double g = grad_out.data[m * C + c];
            const double xhat = (input.data[m * C + c] - mean) * inv_std;
            sum_g += g;
            sum_gx += g * xhat;
        }
        grad_shift[c] = sum_g;
        grad_scale[c] = sum_gx;
        const double k = state.scale[c] * inv_std;
        const double mg = sum_g / static_cast<double>(M);
        const double mgx = sum_gx / static_cast<double>(M);
        for (std::size_t m = 0; m < M; ++m) {
            const double g = grad_out.data[m * C + c];
            const double xhat = (input.data[m * C + c] - mean) * inv_std;
            grad_in.data[m * C + c] = k * (g - mg - xhat * mgx);
        }
    }
    return grad_in;
}

Tensor relu_forward(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.data)
        if (v < 0.0) v = 0.0;
    return out;
}

Tensor relu_backward(const Tensor& output, const Tensor& grad_out) {
    require_same_shape(output, grad_out, "relu_backward");
    Tensor grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.size(); ++i)
        if (!(output.data[i] > 0.0)) grad_in.data[i] = 0.0;
    return grad_in;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights,
                     const std::vector<double>& bias) {
    const int D = input.c;
    const int out_w = weights.c;
    if (weights.n != D)
        throw ShapeError("dense: input width " + std::to_string(D) + " vs weights " +
                         weights.shape_str());
    if (static_cast<int>(bias.size()) != out_w)
        throw ShapeError("dense: bias width mismatch");
    Tensor out(input.n, 1, 1, out_w);
    gemm_nn(input.n, out_w, D, input.data.data(), weights.data.data(), out.data.data());
#pragma omp parallel for schedule(static)
    for (int b = 0; b < input.n; ++b)
        for (int o = 0; o < out_w; ++o)
            out.data[static_cast<std::size_t>(b) * out_w + o] += bias[o];
    return out;
}

void dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                    Tensor& grad_input, Tensor& grad_weights, std::vector<double>& grad_bias) {
    const int D = input.c;
    const int out_w = weights.c;
    grad_weights = Tensor(weights.n, 1, 1, weights.c);
    gemm_tn(input.n, out_w, D, input.data.data(), grad_out.data.data(),
            grad_weights.data.data());
    grad_input = Tensor(input.n, 1, 1, D);
    gemm_nt(input.n, out_w, D, grad_out.data.data(), weights.data.data(),
            grad_input.data.data());
    grad_bias.assign(out_w, 0.0);
    for (int b = 0; b < input.n; ++b)
        for (int o = 0; o < out_w; ++o)
            grad_bias[o] += grad_out.data[static_cast<std::size_t>(b) * out_w + o];
}

Tensor softmax2(const Tensor& logits) {
    if (logits.c != 2)
        throw ShapeError("softmax2: expected 2 classes, got " + std::to_string(logits.c));
    for (double v : logits.data)
        if (!std::isfinite(v)) throw NumericError("softmax2: non-finite logit");
    Tensor out(logits.n, logits.h, logits.w, 2);
    const std::size_t rows = logits.size() / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const double a = logits.data[2 * r], b = logits.data[2 * r + 1];
        const double m = a > b ? a : b;
        const double ea = std::exp(a - m), eb = std::exp(b - m);
        const double z = ea + eb;
        out.data[2 * r] = ea / z;
        out.data[2 * r + 1] = eb / z;
    }
    return out;
}

namespace ref {

Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::vector<double>& bias) {
    check_conv_shapes(input, weights, bias);
    const int f = weights.h;
    const int pt = (f - 1) / 2, pl = (f - 1) / 2;
    Tensor out(input.n, input.h, input.w, weights.n);
    for (int b = 0; b < input.n; ++b)
        for (int y = 0; y < input.h; ++y)
            for (int x = 0; x < input.w; ++x)
                for (int o = 0; o < weights.n; ++o) {
                    double s = 0.0;
                    for (int fy = 0; fy < f; ++fy) {
                        const int iy = y + fy - pt;
                        if (iy < 0 || iy >= input.h) continue;
                        for (int fx = 0; fx < f; ++fx) {
                            const int ix = x + fx - pl;
                            if (ix < 0 || ix >= input.w) continue;
                            for (int ci = 0; ci < input.c; ++ci)
                                s += input.at(b, iy, ix, ci) * weights.at(o, fy, fx, ci);
                        }
                    }
                    out.at(b, y, x, o) = s + bias[o];
                }
    return out;
}

void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_input, Tensor& grad_weights,
                     std::vector<double>& grad_bias) {
    const int f = weights.h;
    const int pt = (f - 1) / 2, pl = (f - 1) / 2;
    grad_input = Tensor(input.n, input.h, input.w, input.c);
    grad_weights = Tensor(weights.n, weights.h, weights.w, weights.c);
    grad_bias.assign(weights.n, 0.0);
    for (int b = 0; b < input.n; ++b)
        for (int y = 0; y < input.h; ++y)
            for (int x = 0; x < input.w; ++x)
                for (int o = 0; o < weights.n; ++o) {
                    const double g = grad_out.at(b, y, x, o);
                    grad_bias[o] += g;
                    for (int fy = 0; fy < f; ++fy) {
                        const int iy = y + fy - pt;
                        if (iy < 0 || iy >= input.h) continue;
                        for (int fx = 0; fx < f; ++fx) {
                            const int ix = x + fx - pl;
                            if (ix < 0 || ix >= input.w) continue;
                            for (int ci = 0; ci < input.c; ++ci) {
                                grad_weights.at(o, fy, fx, ci) += input.at(b, iy, ix, ci) * g;
                                grad_input.at(b, iy, ix, ci) += weights.at(o, fy, fx, ci) * g;
                            }
                        }
                    }
                }
}

Tensor maxpool2x2_forward(const Tensor& input) {
    return emgcs::maxpool2x2_forward(input, nullptr);
}

}  // namespace ref

}  // namespace emgcs
