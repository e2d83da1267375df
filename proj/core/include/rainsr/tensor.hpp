#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rainsr/errors.hpp"

namespace rainsr::nn {

/// Dense (batch, channels, height, width) tensor. Training instantiates
/// float; gradient checks instantiate double.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_, T fill = T(0))
        : n(n_), c(c_), h(h_), w(w_), v(size_t(n_) * c_ * h_ * w_, fill) {}

    size_t size() const { return v.size(); }
    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    T* plane(int in, int ic) { return v.data() + (size_t(in) * c + ic) * h * w; }
    const T* plane(int in, int ic) const { return v.data() + (size_t(in) * c + ic) * h * w; }

    T at(int in, int ic, int iy, int ix) const { return plane(in, ic)[size_t(iy) * w + ix]; }
    T& at(int in, int ic, int iy, int ix) { return plane(in, ic)[size_t(iy) * w + ix]; }
};

/// 3x3 convolution layer, stride 1, zero padding 1 (spatial size preserved).
/// Implemented as cross-correlation, the usual network convention; kernels
/// are not flipped. Gradient buffers are filled by conv2d_backward.
template <typename T>
struct ConvLayer {
    int in_ch = 0, out_ch = 0;
    std::vector<T> weight; // (out_ch, in_ch, 3, 3)
    std::vector<T> bias;   // (out_ch)
    std::vector<T> weight_grad;
    std::vector<T> bias_grad;

    ConvLayer() = default;
    ConvLayer(int in, int out)
        : in_ch(in), out_ch(out), weight(size_t(out) * in * 9), bias(size_t(out)),
          weight_grad(size_t(out) * in * 9), bias_grad(size_t(out)) {}

    T wval(int o, int i, int ky, int kx) const {
        return weight[((size_t(o) * in_ch + i) * 3 + ky) * 3 + kx];
    }
    size_t param_count() const { return weight.size() + bias.size(); }
};

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const ConvLayer<T>& layer) {
    if (x.c != layer.in_ch)
        throw ShapeError("conv2d_forward: input channels != layer in_channels");
    const int H = x.h, W = x.w;
    Tensor4<T> y(x.n, layer.out_ch, H, W);
    for (int in = 0; in < x.n; ++in) {
        for (int o = 0; o < layer.out_ch; ++o) {
            T* yp = y.plane(in, o);
            const T b = layer.bias[size_t(o)];
            for (size_t k = 0; k < size_t(H) * W; ++k)
                yp[k] = b;
            for (int i = 0; i < layer.in_ch; ++i) {
                const T* xp = x.plane(in, i);
                for (int ky = 0; ky < 3; ++ky) {
                    const int dy = ky - 1;
                    const int y0 = dy < 0 ? 1 : 0;
                    const int y1 = dy > 0 ? H - 1 : H;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int dx = kx - 1;
                        const int x0 = dx < 0 ? 1 : 0;
                        const int x1 = dx > 0 ? W - 1 : W;
                        const T wv = layer.wval(o, i, ky, kx);
                        for (int yy = y0; yy < y1; ++yy) {
                            const T* xrow = xp + size_t(yy + dy) * W;
                            T* yrow = yp + size_t(yy) * W;
                            for (int xx = x0; xx < x1; ++xx)
                                yrow[xx] += wv * xrow[xx + dx];
                        }
                    }
                }
            }
        }
    }
    return y;
}

/// Exact adjoints of conv2d_forward. Fills layer.weight_grad / layer.bias_grad
/// (overwriting) and returns the gradient with respect to x.
template <typename T>
Tensor4<T> conv2d_backward(const Tensor4<T>& x, ConvLayer<T>& layer, const Tensor4<T>& gy) {
    if (x.c != layer.in_ch)
        throw ShapeError("conv2d_backward: input channels != layer in_channels");
    if (gy.n != x.n || gy.c != layer.out_ch || gy.h != x.h || gy.w != x.w)
        throw ShapeError("conv2d_backward: upstream gradient shape mismatch");
    const int H = x.h, W = x.w;
    Tensor4<T> gx(x.n, x.c, H, W);
    std::fill(layer.weight_grad.begin(), layer.weight_grad.end(), T(0));
    std::fill(layer.bias_grad.begin(), layer.bias_grad.end(), T(0));

    for (int in = 0; in < x.n; ++in) {
        for (int o = 0; o < layer.out_ch; ++o) {
            const T* gyp = gy.plane(in, o);
            T bsum = T(0);
            for (size_t k = 0; k < size_t(H) * W; ++k)
                bsum += gyp[k];
            layer.bias_grad[size_t(o)] += bsum;

            for (int i = 0; i < layer.in_ch; ++i) {
                const T* xp = x.plane(in, i);
                T* gxp = gx.plane(in, i);
                for (int ky = 0; ky < 3; ++ky) {
                    const int dy = ky - 1;
                    const int y0 = dy < 0 ? 1 : 0;
                    const int y1 = dy > 0 ? H - 1 : H;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int dx = kx - 1;
                        const int x0 = dx < 0 ? 1 : 0;
                        const int x1 = dx > 0 ? W - 1 : W;
                        const T wv = layer.wval(o, i, ky, kx);
                        T wsum = T(0);
                        for (int yy = y0; yy < y1; ++yy) {
                            const T* xrow = xp + size_t(yy + dy) * W;
                            T* gxrow = gxp + size_t(yy + dy) * W;
                            const T* gyrow = gyp + size_t(yy) * W;
                            for (int xx = x0; xx < x1; ++xx) {
                                wsum += gyrow[xx] * xrow[xx + dx];
                                gxrow[xx + dx] += wv * gyrow[xx];
                            }
                        }
                        layer.weight_grad[((size_t(o) * layer.in_ch + i) * 3 + ky) * 3 + kx] +=
                            wsum;
                    }
                }
            }
        }
    }
    return gx;
}

template <typename T>
Tensor4<T> relu(const Tensor4<T>& x) {
    Tensor4<T> y = x;
    for (T& v : y.v)
        v = v > T(0) ? v : T(0);
    return y;
}

/// Gates the upstream gradient by x > 0; the subgradient at exactly 0 is 0.
/// Gating by the forward output max(0,x) is equivalent and lets callers keep
/// only post-activation tensors.
template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& x, const Tensor4<T>& gy) {
    if (!x.same_shape(gy))
        throw ShapeError("relu_backward: shape mismatch");
    Tensor4<T> gx(x.n, x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i)
        gx.v[i] = x.v[i] > T(0) ? gy.v[i] : T(0);
    return gx;
}

/// Mean over all elements of |pred - target|. Accumulates in double.
template <typename T>
double l1_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    if (!pred.same_shape(target))
        throw ShapeError("l1_loss: shape mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(double(pred.v[i]) - double(target.v[i]));
    return sum / double(pred.size());
}

/// d loss / d pred = sign(pred - target) / element_count, with sign(0) := 0.
template <typename T>
Tensor4<T> l1_loss_backward(const Tensor4<T>& pred, const Tensor4<T>& target) {
    if (!pred.same_shape(target))
        throw ShapeError("l1_loss_backward: shape mismatch");
    Tensor4<T> g(pred.n, pred.c, pred.h, pred.w);
    const T scale = T(1) / T(double(pred.size()));
    for (size_t i = 0; i < pred.size(); ++i) {
        const T d = pred.v[i] - target.v[i];
        g.v[i] = d > T(0) ? scale : (d < T(0) ? -scale : T(0));
    }
    return g;
}

/// Stacks b's channels after a's. Both operands must agree on (n, h, w).
template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b) {
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw ShapeError("concat_channels: spatial/batch mismatch");
    Tensor4<T> out(a.n, a.c + b.c, a.h, a.w);
    const size_t plane = size_t(a.h) * a.w;
    for (int in = 0; in < a.n; ++in) {
        for (int ic = 0; ic < a.c; ++ic)
            std::copy_n(a.plane(in, ic), plane, out.plane(in, ic));
        for (int ic = 0; ic < b.c; ++ic)
            std::copy_n(b.plane(in, ic), plane, out.plane(in, a.c + ic));
    }
    return out;
}

template <typename T>
Tensor4<T> tensor_add(const Tensor4<T>& a, const Tensor4<T>& b) {
    if (!a.same_shape(b))
        throw ShapeError("tensor_add: shape mismatch");
    Tensor4<T> out = a;
    for (size_t i = 0; i < out.size(); ++i)
        out.v[i] += b.v[i];
    return out;
}

template <typename T>
Tensor4<T> tensor_sub(const Tensor4<T>& a, const Tensor4<T>& b) {
    if (!a.same_shape(b))
        throw ShapeError("tensor_sub: shape mismatch");
    Tensor4<T> out = a;
    for (size_t i = 0; i < out.size(); ++i)
        out.v[i] -= b.v[i];
    return out;
}

} // namespace rainsr::nn
