#pragma once

#include <vector>

#include "emgcs/tensor.hpp"

namespace emgcs {

// All layer kernels keep each output element's reduction serial and ordered,
// so results do not depend on the OpenMP thread count.

// ---- 2-D convolution, stride 1, same (zero) padding ----
// input   (n, h, w, cin)
// weights (cout, f, f, cin)
// output  (n, h, w, cout)
Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::vector<double>& bias);

void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_input, Tensor& grad_weights,
                     std::vector<double>& grad_bias);

// ---- 2x2 max pooling, stride 2, ceiling output size ----
// argmax (when non-null) records the flat input index feeding each output.
Tensor maxpool2x2_forward(const Tensor& input, std::vector<std::size_t>* argmax);
Tensor maxpool2x2_backward(const Tensor& input_like, const Tensor& grad_out,
                           const std::vector<std::size_t>& argmax);

// ---- batch normalization over (batch x spatial) per channel ----
struct BatchNormState {
    std::vector<double> scale, shift;          // learned
    std::vector<double> running_mean, running_var;

    explicit BatchNormState(int channels)
        : scale(channels, 1.0), shift(channels, 0.0),
          running_mean(channels, 0.0), running_var(channels, 1.0) {}
    BatchNormState() = default;
};

struct BatchNormCache {
    std::vector<double> mean, inv_std;  // batch statistics used in the forward
};

// train=true normalizes with batch statistics (batch >= 2 required) and
// updates the running estimates with the given momentum.
Tensor batchnorm_forward(const Tensor& input, BatchNormState& state, bool train,
                         double momentum, double eps, BatchNormCache* cache);

Tensor batchnorm_backward(const Tensor& input, const BatchNormState& state,
                          const BatchNormCache& cache, const Tensor& grad_out,
                          std::vector<double>& grad_scale, std::vector<double>& grad_shift);

// ---- ReLU ----
Tensor relu_forward(const Tensor& input);
// masks by the forward OUTPUT (output > 0)
Tensor relu_backward(const Tensor& output, const Tensor& grad_out);

// ---- dense ----
// input (n, 1, 1, in), weights (in, 1, 1, out)
Tensor dense_forward(const Tensor& input, const Tensor& weights,
                     const std::vector<double>& bias);
void dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                    Tensor& grad_input, Tensor& grad_weights, std::vector<double>& grad_bias);

// ---- softmax over the last axis (2 classes), max-subtracted ----
Tensor softmax2(const Tensor& logits);

namespace ref {
// Direct-loop serial references for testing and benchmarking the fast paths.
Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::vector<double>& bias);
void conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                     Tensor& grad_input, Tensor& grad_weights,
                     std::vector<double>& grad_bias);
Tensor maxpool2x2_forward(const Tensor& input);
}  // namespace ref

}  // namespace emgcs
