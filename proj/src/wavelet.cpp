#include "emgcs/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "emgcs/errors.hpp"

namespace emgcs {

namespace {

// Orthonormal scaling (lowpass reconstruction) coefficients; sum = sqrt(2).
const std::vector<double> kHaar = {
    0.7071067811865476, 0.7071067811865476};

const std::vector<double> kDb2 = {
    0.48296291314469025, 0.836516303737469, 0.22414386804185735,
    -0.12940952255092145};

const std::vector<double> kDb4 = {
    0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278};

// Half-sample symmetric index: ... x1 x0 | x0 x1 ... xn-1 | xn-1 xn-2 ...
int sym_index(long long i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2LL * n - 1 - i;
    }
    return static_cast<int>(i);
}

int per_index(long long i, int n) {
    long long r = i % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

}  // namespace

WaveletFilters wavelet_filters(const std::string& name) {
    const std::vector<double>* rec_lo = nullptr;
    if (name == "haar" || name == "db1")
        rec_lo = &kHaar;
    else if (name == "db2")
        rec_lo = &kDb2;
    else if (name == "db4")
        rec_lo = &kDb4;
    else
        throw ConfigError("unknown wavelet '" + name + "' (supported: haar, db1, db2, db4)");

    WaveletFilters f;
    f.name = name;
    f.rec_lo = *rec_lo;
    const int F = static_cast<int>(rec_lo->size());
    f.rec_hi.resize(F);
    f.dec_lo.resize(F);
    f.dec_hi.resize(F);
    for (int k = 0; k < F; ++k)
        f.rec_hi[k] = ((k % 2) ? -1.0 : 1.0) * f.rec_lo[F - 1 - k];
    for (int k = 0; k < F; ++k) {
        f.dec_lo[k] = f.rec_lo[F - 1 - k];
        f.dec_hi[k] = f.rec_hi[F - 1 - k];
    }
    return f;
}

Padding padding_from_name(const std::string& name) {
    if (name == "symmetric") return Padding::Symmetric;
    if (name == "periodic" || name == "periodization") return Padding::Periodic;
    throw ConfigError("unknown padding mode '" + name + "'");
}

std::string padding_name(Padding p) {
    return p == Padding::Symmetric ? "symmetric" : "periodic";
}

void dwt_step(std::span<const double> x, const WaveletFilters& f, Padding mode,
              std::vector<double>& approx, std::vector<double>& detail) {
    const int n = static_cast<int>(x.size());
    const int F = f.length();
    if (n < 2) throw TooShortError("dwt_step: signal too short");

    if (mode == Padding::Symmetric) {
        const int L = (n + F - 1) / 2;
        approx.assign(L, 0.0);
        detail.assign(L, 0.0);
        for (int k = 0; k < L; ++k) {
            double a = 0.0, d = 0.0;
            for (int u = 0; u < F; ++u) {
                const double v = x[sym_index(2LL * k + 1 - u, n)];
                a += f.dec_lo[u] * v;
                d += f.dec_hi[u] * v;
            }
            approx[k] = a;
            detail[k] = d;
        }
    } else {
        // Periodic: pad odd lengths by repeating the last sample, then wrap.
        std::vector<double> tmp;
        std::span<const double> s = x;
        int ne = n;
        if (n % 2) {
            tmp.assign(x.begin(), x.end());
            tmp.push_back(x[n - 1]);
            s = tmp;
            ne = n + 1;
        }
        const int L = ne / 2;
        approx.assign(L, 0.0);
        detail.assign(L, 0.0);
        for (int k = 0; k < L; ++k) {
            double a = 0.0, d = 0.0;
            for (int u = 0; u < F; ++u) {
                const double v = s[per_index(2LL * k + 1 - u, ne)];
                a += f.dec_lo[u] * v;
                d += f.dec_hi[u] * v;
            }
            approx[k] = a;
            detail[k] = d;
        }
    }
}

std::vector<double> idwt_step(const std::vector<double>& approx,
                              const std::vector<double>& detail,
                              const WaveletFilters& f, Padding mode, int out_len) {
    const int L = static_cast<int>(approx.size());
    if (static_cast<int>(detail.size()) != L)
        throw ShapeError("idwt_step: approx/detail length mismatch");
    const int F = f.length();

    if (mode == Padding::Symmetric) {
        // Adjoint synthesis restricted to the original positions. Every
        // position 0..out_len-1 has all of its covering analysis windows
        // inside k = 0..L-1, so the orthonormal expansion is complete there
        // and the adjoint is the exact inverse.
        std::vector<double> out(out_len, 0.0);
        for (int k = 0; k < L; ++k) {
            const double a = approx[k];
            const double d = detail[k];
            const long long base = 2LL * k + 1;
            const int u_lo = static_cast<int>(std::max(0LL, base - (out_len - 1)));
            const int u_hi = static_cast<int>(std::min<long long>(F - 1, base));
            for (int u = u_lo; u <= u_hi; ++u) {
                const int s = static_cast<int>(base - u);
                out[s] += a * f.dec_lo[u] + d * f.dec_hi[u];
            }
        }
        return out;
    }

    const int ne = out_len + (out_len % 2);
    std::vector<double> out(ne, 0.0);
    for (int k = 0; k < L; ++k) {
        const double a = approx[k];
        const double d = detail[k];
        for (int u = 0; u < F; ++u) {
            const int t = per_index(2LL * k + 1 - u, ne);
            out[t] += a * f.dec_lo[u] + d * f.dec_hi[u];
        }
    }
    out.resize(out_len);
    return out;
}

int min_length_for_levels(const WaveletFilters& f, int levels) {
    return (f.length() - 1) << levels;
}

WaveletTree wavedec(std::span<const double> signal, const std::string& wavelet,
                    int levels, Padding mode) {
    const WaveletFilters f = wavelet_filters(wavelet);
    const int n = static_cast<int>(signal.size());
    if (n < min_length_for_levels(f, levels))
        throw TooShortError("wavedec: need at least " +
                            std::to_string(min_length_for_levels(f, levels)) +
                            " samples for " + std::to_string(levels) + " levels of " +
                            wavelet + ", got " + std::to_string(n));
    for (double v : signal)
        if (!std::isfinite(v)) throw InvalidSignalError("wavedec: non-finite sample");

    WaveletTree tree;
    tree.wavelet_name = wavelet;
    tree.padding_mode = padding_name(mode);

    std::vector<double> cur(signal.begin(), signal.end());
    for (int lev = 0; lev < levels; ++lev) {
        tree.lengths.push_back(static_cast<int>(cur.size()));
        std::vector<double> a, d;
        dwt_step(cur, f, mode, a, d);
        tree.details.push_back(std::move(d));
        cur = std::move(a);
    }
    tree.approximation = std::move(cur);
    return tree;
}

std::vector<double> waverec(const WaveletTree& tree) {
    const WaveletFilters f = wavelet_filters(tree.wavelet_name);
    const Padding mode = padding_from_name(tree.padding_mode);
    std::vector<double> cur = tree.approximation;
    for (int lev = static_cast<int>(tree.details.size()) - 1; lev >= 0; --lev)
        cur = idwt_step(cur, tree.details[lev], f, mode, tree.lengths[lev]);
    return cur;
}

std::vector<std::vector<double>> wpd_subbands(std::span<const double> signal,
                                              const std::string& wavelet, int levels) {
    const WaveletFilters f = wavelet_filters(wavelet);
    const int n = static_cast<int>(signal.size());
    if (n < min_length_for_levels(f, levels))
        throw TooShortError("wpd_subbands: need at least " +
                            std::to_string(min_length_for_levels(f, levels)) +
                            " samples for " + std::to_string(levels) + " levels of " +
                            wavelet + ", got " + std::to_string(n));
    for (double v : signal)
        if (!std::isfinite(v)) throw InvalidSignalError("wpd_subbands: non-finite sample");

    std::vector<std::vector<double>> nodes;
    nodes.emplace_back(signal.begin(), signal.end());
    for (int lev = 0; lev < levels; ++lev) {
        std::vector<std::vector<double>> next;
        next.reserve(nodes.size() * 2);
        for (const auto& node : nodes) {
            std::vector<double> a, d;
            dwt_step(node, f, Padding::Periodic, a, d);
            next.push_back(std::move(a));
            next.push_back(std::move(d));
        }
        nodes = std::move(next);
    }

    // Paths enumerate in natural (binary) order; decimating the highpass
    // branch mirrors its spectrum, so frequency order is the Gray-code
    // permutation of the natural index.
    const int count = 1 << levels;
    std::vector<std::vector<double>> out(count);
    for (int k = 0; k < count; ++k) out[k] = std::move(nodes[k ^ (k >> 1)]);
    return out;
}

}  // namespace emgcs
