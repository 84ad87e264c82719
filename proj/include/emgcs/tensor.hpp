#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "emgcs/errors.hpp"

namespace emgcs {

// Dense row-major tensor of doubles, at most 4 axes laid out as
// (batch, height, width, channels). Lower-rank tensors set leading axes to 1.
struct Tensor {
    int n = 1, h = 1, w = 1, c = 1;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int n_, int h_, int w_, int c_)
        : n(n_), h(h_), w(w_), c(c_),
          data(static_cast<std::size_t>(n_) * h_ * w_ * c_, 0.0) {
        if (n_ <= 0 || h_ <= 0 || w_ <= 0 || c_ <= 0)
            throw ShapeError("tensor dims must be positive, got " + shape_str(n_, h_, w_, c_));
    }

    static Tensor vec(int len) { return Tensor(1, 1, 1, len); }

    std::size_t size() const { return data.size(); }

    double& at(int in, int ih, int iw, int ic) {
        return data[((static_cast<std::size_t>(in) * h + ih) * w + iw) * c + ic];
    }
    double at(int in, int ih, int iw, int ic) const {
        return data[((static_cast<std::size_t>(in) * h + ih) * w + iw) * c + ic];
    }

    bool same_shape(const Tensor& o) const {
        return n == o.n && h == o.h && w == o.w && c == o.c;
    }

    std::string shape_str() const { return shape_str(n, h, w, c); }

    static std::string shape_str(int n, int h, int w, int c) {
        return "(" + std::to_string(n) + "," + std::to_string(h) + "," +
               std::to_string(w) + "," + std::to_string(c) + ")";
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
}

}  // namespace emgcs
