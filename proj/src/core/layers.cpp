#include "core/layers.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <limits>

#include "core/parallel.hpp"

namespace vcnn::nn {

namespace {

void require(bool cond, const char* message) {
    if (!cond) raise(ErrorCode::ShapeMismatch, message);
}

void check_activation_5d(const std::vector<int64_t>& s, const char* who) {
    if (s.size() != 5) raise(ErrorCode::ShapeMismatch, std::string(who) + ": expected a 5-D activation");
}

}  // namespace

// ---------------------------------------------------------------------------
// conv3d
// ---------------------------------------------------------------------------
//
// The valid cross-correlation below is shared by the forward pass and (with a
// zero halo and a transposed, flipped kernel) by the input-gradient pass.
// Every output cell accumulates its terms in ascending tap order with the
// lane axis innermost, so results match a naive loop nest term for term.

namespace {

struct CorrShape {
    int64_t B, D, H, W;       // source dims
    int64_t k, lanes_in, lanes_out;
    int64_t OD, OH, OW;
};

template <typename T> struct VecTraits;
template <> struct VecTraits<float> {
    typedef float V __attribute__((vector_size(32)));
    static constexpr int64_t width = 8;
};
template <> struct VecTraits<double> {
    typedef double V __attribute__((vector_size(32)));
    static constexpr int64_t width = 4;
};

// One output row. The channel axis is processed in vector-register chunks
// with four output positions sharing each kernel-row load; leftover lanes run
// scalar with the same four-position blocking. Lanes are independent output
// scalars, so vectorization never reorders an individual cell's reduction.
template <typename T>
void corr_row(const T* xd, const T* wd, const T* bias, T* od, const CorrShape& s, int64_t b,
              int64_t zo, int64_t yo) {
    using V = typename VecTraits<T>::V;
    constexpr int64_t VW = VecTraits<T>::width;
    const int64_t ci = s.lanes_in, co = s.lanes_out, k = s.k, kci = k * ci;
    const int64_t x_row = s.W * ci, x_plane = s.H * x_row, x_vol = s.D * x_plane;
    const int64_t o_row = s.OW * co, o_plane = s.OH * o_row, o_vol = s.OD * o_plane;
    const int64_t w_kh = kci * co;
    const T* xbase = xd + b * x_vol + zo * x_plane + yo * x_row;
    T* dst_row = od + b * o_vol + zo * o_plane + yo * o_row;

    int64_t o0 = 0;
    for (; o0 + VW <= co; o0 += VW) {
        V bchunk;
        if (bias) std::memcpy(&bchunk, bias + o0, sizeof(V));
        else std::memset(&bchunk, 0, sizeof(V));

        int64_t xo = 0;
        for (; xo + 4 <= s.OW; xo += 4) {
            V a0 = bchunk, a1 = bchunk, a2 = bchunk, a3 = bchunk;
            for (int64_t kd = 0; kd < k; ++kd) {
                for (int64_t kh = 0; kh < k; ++kh) {
                    const T* xr = xbase + kd * x_plane + kh * x_row + xo * ci;
                    const T* wr = wd + (kd * k + kh) * w_kh + o0;
                    for (int64_t j = 0; j < kci; ++j) {
                        V w;
                        std::memcpy(&w, wr + j * co, sizeof(V));
                        a0 += xr[j] * w;
                        a1 += xr[j + ci] * w;
                        a2 += xr[j + 2 * ci] * w;
                        a3 += xr[j + 3 * ci] * w;
                    }
                }
            }
            T* dst = dst_row + xo * co + o0;
            std::memcpy(dst, &a0, sizeof(V));
            std::memcpy(dst + co, &a1, sizeof(V));
            std::memcpy(dst + 2 * co, &a2, sizeof(V));
            std::memcpy(dst + 3 * co, &a3, sizeof(V));
        }
        for (; xo < s.OW; ++xo) {
            V a = bchunk;
            for (int64_t kd = 0; kd < k; ++kd) {
                for (int64_t kh = 0; kh < k; ++kh) {
                    const T* xr = xbase + kd * x_plane + kh * x_row + xo * ci;
                    const T* wr = wd + (kd * k + kh) * w_kh + o0;
                    for (int64_t j = 0; j < kci; ++j) {
                        V w;
                        std::memcpy(&w, wr + j * co, sizeof(V));
                        a += xr[j] * w;
                    }
                }
            }
            std::memcpy(dst_row + xo * co + o0, &a, sizeof(V));
        }
    }

    for (; o0 < co; ++o0) {
        const T bv = bias ? bias[o0] : T(0);
        int64_t xo = 0;
        for (; xo + 4 <= s.OW; xo += 4) {
            T a0 = bv, a1 = bv, a2 = bv, a3 = bv;
            for (int64_t kd = 0; kd < k; ++kd) {
                for (int64_t kh = 0; kh < k; ++kh) {
                    const T* xr = xbase + kd * x_plane + kh * x_row + xo * ci;
                    const T* wr = wd + (kd * k + kh) * w_kh + o0;
                    for (int64_t j = 0; j < kci; ++j) {
                        const T w = wr[j * co];
                        a0 += xr[j] * w;
                        a1 += xr[j + ci] * w;
                        a2 += xr[j + 2 * ci] * w;
                        a3 += xr[j + 3 * ci] * w;
                    }
                }
            }
            dst_row[xo * co + o0] = a0;
            dst_row[(xo + 1) * co + o0] = a1;
            dst_row[(xo + 2) * co + o0] = a2;
            dst_row[(xo + 3) * co + o0] = a3;
        }
        for (; xo < s.OW; ++xo) {
            T a = bv;
            for (int64_t kd = 0; kd < k; ++kd) {
                for (int64_t kh = 0; kh < k; ++kh) {
                    const T* xr = xbase + kd * x_plane + kh * x_row + xo * ci;
                    const T* wr = wd + (kd * k + kh) * w_kh + o0;
                    for (int64_t j = 0; j < kci; ++j) a += xr[j] * wr[j * co];
                }
            }
            dst_row[xo * co + o0] = a;
        }
    }
}

template <typename T>
void correlate(const T* xd, const T* wd, const T* bias, T* od, const CorrShape& s) {
    parallel_for(s.B * s.OD, [&](int64_t begin, int64_t end) {
        for (int64_t t = begin; t < end; ++t) {
            const int64_t b = t / s.OD, zo = t % s.OD;
            for (int64_t yo = 0; yo < s.OH; ++yo) corr_row<T>(xd, wd, bias, od, s, b, zo, yo);
        }
    });
}

// Weight-gradient contribution of one output row for a fixed kernel offset:
// gw[i, o] += sum_xo xrow[xo*ci + i] * gyrow[xo*co + o], xo ascending. TILE
// input channels are carried in registers across the whole row.
template <typename T, int TILE>
void gradw_row_tile(const T* xrow, const T* gyrow, T* gw, int64_t i0, int64_t ci, int64_t co,
                    int64_t ow) {
    using V = typename VecTraits<T>::V;
    constexpr int64_t VW = VecTraits<T>::width;
    const int64_t co_vec = co - co % VW;

    int64_t o0 = 0;
    for (; o0 < co_vec; o0 += VW) {
        V acc[TILE];
        for (int t = 0; t < TILE; ++t) std::memcpy(&acc[t], gw + (i0 + t) * co + o0, sizeof(V));
        for (int64_t xo = 0; xo < ow; ++xo) {
            V gyv;
            std::memcpy(&gyv, gyrow + xo * co + o0, sizeof(V));
            const T* xr = xrow + xo * ci + i0;
            for (int t = 0; t < TILE; ++t) acc[t] += xr[t] * gyv;
        }
        for (int t = 0; t < TILE; ++t) std::memcpy(gw + (i0 + t) * co + o0, &acc[t], sizeof(V));
    }
    for (; o0 < co; ++o0) {
        T acc[TILE];
        for (int t = 0; t < TILE; ++t) acc[t] = gw[(i0 + t) * co + o0];
        for (int64_t xo = 0; xo < ow; ++xo) {
            const T gyv = gyrow[xo * co + o0];
            const T* xr = xrow + xo * ci + i0;
            for (int t = 0; t < TILE; ++t) acc[t] += xr[t] * gyv;
        }
        for (int t = 0; t < TILE; ++t) gw[(i0 + t) * co + o0] = acc[t];
    }
}

template <typename T>
void gradw_rows(const T* xrow, const T* gyrow, T* gw, int64_t ci, int64_t co, int64_t ow) {
    int64_t i0 = 0;
    for (; i0 + 8 <= ci; i0 += 8) gradw_row_tile<T, 8>(xrow, gyrow, gw, i0, ci, co, ow);
    switch (ci - i0) {
        case 7: gradw_row_tile<T, 7>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 6: gradw_row_tile<T, 6>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 5: gradw_row_tile<T, 5>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 4: gradw_row_tile<T, 4>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 3: gradw_row_tile<T, 3>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 2: gradw_row_tile<T, 2>(xrow, gyrow, gw, i0, ci, co, ow); break;
        case 1: gradw_row_tile<T, 1>(xrow, gyrow, gw, i0, ci, co, ow); break;
        default: break;
    }
}

}  // namespace

template <typename T>
TensorT<T> conv3d_forward(const TensorT<T>& x, const ConvParams<T>& p) {
    check_activation_5d(x.shape(), "conv3d_forward");
    const int64_t k = p.k(), ci = p.in_ch(), co = p.out_ch();
    require(x.dim(4) == ci, "conv3d_forward: input channels do not match the kernel");
    const int64_t B = x.dim(0), D = x.dim(1), H = x.dim(2), W = x.dim(3);
    require(D >= k && H >= k && W >= k, "conv3d_forward: spatial dims smaller than the kernel");

    const int64_t OD = D - k + 1, OH = H - k + 1, OW = W - k + 1;
    TensorT<T> out({B, OD, OH, OW, co});
    CorrShape s{B, D, H, W, k, ci, co, OD, OH, OW};
    correlate(x.data(), p.weights.data(), p.bias.data(), out.data(), s);
    return out;
}

template <typename T>
ConvGrads<T> conv3d_backward(const TensorT<T>& x, const ConvParams<T>& p, const TensorT<T>& upstream) {
    check_activation_5d(x.shape(), "conv3d_backward");
    const int64_t k = p.k(), ci = p.in_ch(), co = p.out_ch();
    require(x.dim(4) == ci, "conv3d_backward: input channels do not match the kernel");
    const int64_t B = x.dim(0), D = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int64_t OD = D - k + 1, OH = H - k + 1, OW = W - k + 1;
    std::vector<int64_t> expected{B, OD, OH, OW, co};
    require(upstream.shape() == expected, "conv3d_backward: upstream shape mismatch");

    ConvGrads<T> g{TensorT<T>(x.shape()), TensorT<T>(p.weights.shape()), TensorT<T>(p.bias.shape())};

    const T* xd = x.data();
    const T* wd = p.weights.data();
    const T* gyd = upstream.data();
    const int64_t x_row = W * ci, x_plane = H * x_row, x_vol = D * x_plane;
    const int64_t o_row = OW * co, o_plane = OH * o_row, o_vol = OD * o_plane;

    // grad_x is the correlation of the zero-padded upstream with the kernel
    // transposed (in/out) and flipped in space. The halo contributes exact
    // zero terms, so each cell sums its live terms in ascending output
    // position with the output channel innermost, matching a naive scatter.
    {
        const int64_t pad = k - 1;
        const int64_t PD = OD + 2 * pad, PH = OH + 2 * pad, PW = OW + 2 * pad;
        TensorT<T> padded({B, PD, PH, PW, co});
        T* pd = padded.data();
        const int64_t p_row = PW * co, p_plane = PH * p_row, p_vol = PD * p_plane;
        for (int64_t b = 0; b < B; ++b)
            for (int64_t z = 0; z < OD; ++z)
                for (int64_t y = 0; y < OH; ++y)
                    std::copy_n(gyd + b * o_vol + z * o_plane + y * o_row, o_row,
                                pd + b * p_vol + (z + pad) * p_plane + (y + pad) * p_row + pad * co);

        TensorT<T> flipped({k, k, k, co, ci});
        T* fd = flipped.data();
        for (int64_t kd = 0; kd < k; ++kd)
            for (int64_t kh = 0; kh < k; ++kh)
                for (int64_t kw = 0; kw < k; ++kw)
                    for (int64_t i = 0; i < ci; ++i)
                        for (int64_t o = 0; o < co; ++o)
                            fd[((((k - 1 - kd) * k + (k - 1 - kh)) * k + (k - 1 - kw)) * co + o) * ci + i] =
                                wd[(((kd * k + kh) * k + kw) * ci + i) * co + o];

        CorrShape s{B, PD, PH, PW, k, co, ci, D, H, W};
        correlate(padded.data(), flipped.data(), static_cast<const T*>(nullptr), g.x.data(), s);
    }

    // grad_w[kd,kh,kw,i,o] = sum over batch and output positions of x * gy,
    // accumulated in ascending position order per weight cell. Register tiles
    // of input-channel rows stay live across each output row, so no chain
    // runs through memory.
    T* gwd = g.weights.data();
    parallel_for(k, [&](int64_t kd_begin, int64_t kd_end) {
        for (int64_t kd = kd_begin; kd < kd_end; ++kd) {
            T* gw_kd = gwd + kd * (k * k * ci * co);
            for (int64_t b = 0; b < B; ++b) {
                for (int64_t zo = 0; zo < OD; ++zo) {
                    for (int64_t yo = 0; yo < OH; ++yo) {
                        const T* gyrow = gyd + b * o_vol + zo * o_plane + yo * o_row;
                        for (int64_t kh = 0; kh < k; ++kh) {
                            const T* xrow = xd + b * x_vol + (zo + kd) * x_plane + (yo + kh) * x_row;
                            for (int64_t kw = 0; kw < k; ++kw)
                                gradw_rows<T>(xrow + kw * ci, gyrow,
                                              gw_kd + (kh * k + kw) * ci * co, ci, co, OW);
                        }
                    }
                }
            }
        }
    });

    // grad_bias[o] = sum of upstream over batch and space
    T* gbd = g.bias.data();
    const int64_t positions = B * OD * OH * OW;
    for (int64_t n = 0; n < positions; ++n) {
        const T* gy = gyd + n * co;
        for (int64_t o = 0; o < co; ++o) gbd[o] += gy[o];
    }
    return g;
}

// ---------------------------------------------------------------------------
// maxpool3d
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> maxpool3d_forward(const TensorT<T>& x, int64_t pool) {
    check_activation_5d(x.shape(), "maxpool3d_forward");
    const int64_t B = x.dim(0), D = x.dim(1), H = x.dim(2), W = x.dim(3), C = x.dim(4);
    require(D % pool == 0 && H % pool == 0 && W % pool == 0,
            "maxpool3d_forward: spatial dims must be divisible by the pool size");
    const int64_t OD = D / pool, OH = H / pool, OW = W / pool;
    TensorT<T> out({B, OD, OH, OW, C});

    const T* xd = x.data();
    T* od = out.data();
    const int64_t x_row = W * C, x_plane = H * x_row, x_vol = D * x_plane;
    const int64_t o_row = OW * C, o_plane = OH * o_row, o_vol = OD * o_plane;

    parallel_for(B * OD, [&](int64_t begin, int64_t end) {
        for (int64_t t = begin; t < end; ++t) {
            const int64_t b = t / OD, zo = t % OD;
            for (int64_t yo = 0; yo < OH; ++yo) {
                for (int64_t xo = 0; xo < OW; ++xo) {
                    T* dst = od + b * o_vol + zo * o_plane + yo * o_row + xo * C;
                    for (int64_t c = 0; c < C; ++c) dst[c] = std::numeric_limits<T>::lowest();
                    // x-fastest traversal; strict > keeps the first max on ties
                    for (int64_t dz = 0; dz < pool; ++dz) {
                        for (int64_t dy = 0; dy < pool; ++dy) {
                            for (int64_t dx = 0; dx < pool; ++dx) {
                                const T* src = xd + b * x_vol + (zo * pool + dz) * x_plane +
                                               (yo * pool + dy) * x_row + (xo * pool + dx) * C;
                                for (int64_t c = 0; c < C; ++c)
                                    if (src[c] > dst[c]) dst[c] = src[c];
                            }
                        }
                    }
                }
            }
        }
    });
    return out;
}

template <typename T>
TensorT<T> maxpool3d_backward(const TensorT<T>& x, const TensorT<T>& upstream, int64_t pool) {
    check_activation_5d(x.shape(), "maxpool3d_backward");
    const int64_t B = x.dim(0), D = x.dim(1), H = x.dim(2), W = x.dim(3), C = x.dim(4);
    require(D % pool == 0 && H % pool == 0 && W % pool == 0,
            "maxpool3d_backward: spatial dims must be divisible by the pool size");
    const int64_t OD = D / pool, OH = H / pool, OW = W / pool;
    std::vector<int64_t> expected{B, OD, OH, OW, C};
    require(upstream.shape() == expected, "maxpool3d_backward: upstream shape mismatch");

    TensorT<T> gx(x.shape());
    const T* xd = x.data();
    const T* gyd = upstream.data();
    T* gxd = gx.data();
    const int64_t x_row = W * C, x_plane = H * x_row, x_vol = D * x_plane;
    const int64_t o_row = OW * C, o_plane = OH * o_row, o_vol = OD * o_plane;

    parallel_for(B * OD, [&](int64_t begin, int64_t end) {
        std::vector<int64_t> arg(static_cast<size_t>(C));
        std::vector<T> best(static_cast<size_t>(C));
        for (int64_t t = begin; t < end; ++t) {
            const int64_t b = t / OD, zo = t % OD;
            for (int64_t yo = 0; yo < OH; ++yo) {
                for (int64_t xo = 0; xo < OW; ++xo) {
                    for (int64_t c = 0; c < C; ++c) best[c] = std::numeric_limits<T>::lowest();
                    for (int64_t dz = 0; dz < pool; ++dz) {
                        for (int64_t dy = 0; dy < pool; ++dy) {
                            for (int64_t dx = 0; dx < pool; ++dx) {
                                const int64_t off = b * x_vol + (zo * pool + dz) * x_plane +
                                                    (yo * pool + dy) * x_row + (xo * pool + dx) * C;
                                const T* src = xd + off;
                                for (int64_t c = 0; c < C; ++c) {
                                    if (src[c] > best[c]) {
                                        best[c] = src[c];
                                        arg[c] = off + c;
                                    }
                                }
                            }
                        }
                    }
                    const T* gy = gyd + b * o_vol + zo * o_plane + yo * o_row + xo * C;
                    for (int64_t c = 0; c < C; ++c) gxd[arg[c]] += gy[c];
                }
            }
        }
    });
    return gx;
}

// ---------------------------------------------------------------------------
// relu
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x) {
    TensorT<T> out(x.shape());
    const T* xd = x.data();
    T* od = out.data();
    const int64_t n = x.size();
    for (int64_t i = 0; i < n; ++i) od[i] = xd[i] > T(0) ? xd[i] : T(0);
    return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& x, const TensorT<T>& upstream) {
    require(x.same_shape(upstream), "relu_backward: upstream shape mismatch");
    TensorT<T> gx(x.shape());
    const T* xd = x.data();
    const T* gyd = upstream.data();
    T* gxd = gx.data();
    const int64_t n = x.size();
    for (int64_t i = 0; i < n; ++i) gxd[i] = xd[i] > T(0) ? gyd[i] : T(0);
    return gx;
}

// ---------------------------------------------------------------------------
// dense
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> dense_forward(const TensorT<T>& x, const DenseParams<T>& p) {
    require(x.shape().size() == 2, "dense_forward: expected a 2-D input");
    const int64_t B = x.dim(0), FI = p.in_features(), FO = p.out_features();
    require(x.dim(1) == FI, "dense_forward: feature count mismatch");
    TensorT<T> out({B, FO});
    const T* xd = x.data();
    const T* wd = p.weights.data();
    const T* bd = p.bias.data();
    T* od = out.data();
    for (int64_t b = 0; b < B; ++b) {
        T* dst = od + b * FO;
        for (int64_t o = 0; o < FO; ++o) dst[o] = bd[o];
        const T* xr = xd + b * FI;
        for (int64_t i = 0; i < FI; ++i) {
            const T xv = xr[i];
            const T* wr = wd + i * FO;
            for (int64_t o = 0; o < FO; ++o) dst[o] += xv * wr[o];
        }
    }
    return out;
}

template <typename T>
DenseGrads<T> dense_backward(const TensorT<T>& x, const DenseParams<T>& p, const TensorT<T>& upstream) {
    require(x.shape().size() == 2, "dense_backward: expected a 2-D input");
    const int64_t B = x.dim(0), FI = p.in_features(), FO = p.out_features();
    require(x.dim(1) == FI, "dense_backward: feature count mismatch");
    std::vector<int64_t> expected{B, FO};
    require(upstream.shape() == expected, "dense_backward: upstream shape mismatch");

    DenseGrads<T> g{TensorT<T>({B, FI}), TensorT<T>(p.weights.shape()), TensorT<T>(p.bias.shape())};
    const T* xd = x.data();
    const T* wd = p.weights.data();
    const T* gyd = upstream.data();

    T* gxd = g.x.data();
    for (int64_t b = 0; b < B; ++b) {
        const T* gy = gyd + b * FO;
        T* gx = gxd + b * FI;
        for (int64_t i = 0; i < FI; ++i) {
            T acc = 0;
            const T* wr = wd + i * FO;
            for (int64_t o = 0; o < FO; ++o) acc += gy[o] * wr[o];
            gx[i] = acc;
        }
    }

    T* gwd = g.weights.data();
    for (int64_t b = 0; b < B; ++b) {
        const T* xr = xd + b * FI;
        const T* gy = gyd + b * FO;
        for (int64_t i = 0; i < FI; ++i) {
            const T xv = xr[i];
            T* dst = gwd + i * FO;
            for (int64_t o = 0; o < FO; ++o) dst[o] += xv * gy[o];
        }
    }

    T* gbd = g.bias.data();
    for (int64_t b = 0; b < B; ++b) {
        const T* gy = gyd + b * FO;
        for (int64_t o = 0; o < FO; ++o) gbd[o] += gy[o];
    }
    return g;
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> flatten_forward(const TensorT<T>& x) {
    require(x.shape().size() >= 2, "flatten_forward: expected a batched input");
    int64_t features = 1;
    for (size_t i = 1; i < x.shape().size(); ++i) features *= x.shape()[i];
    return x.reshaped({x.dim(0), features});
}

template <typename T>
TensorT<T> flatten_backward(const TensorT<T>& upstream, const std::vector<int64_t>& input_shape) {
    return upstream.reshaped(input_shape);
}

// ---------------------------------------------------------------------------
// batchnorm
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> batchnorm_forward(const TensorT<T>& x, BatchNormParams<T>& p, bool training,
                             BatchNormCache<T>* cache) {
    const int64_t C = p.channels();
    require(!x.shape().empty() && x.shape().back() == C, "batchnorm_forward: channel mismatch");
    const int64_t n = x.size();
    const int64_t rows = n / C;
    if (training && rows < 2)
        raise(ErrorCode::DegenerateBatch, "batchnorm training needs at least 2 values per channel");

    TensorT<T> out(x.shape());
    const T* xd = x.data();
    T* od = out.data();

    std::vector<double> mean(static_cast<size_t>(C), 0.0), var(static_cast<size_t>(C), 0.0);
    if (training) {
        for (int64_t r = 0; r < rows; ++r) {
            const T* xr = xd + r * C;
            for (int64_t c = 0; c < C; ++c) mean[c] += xr[c];
        }
        for (int64_t c = 0; c < C; ++c) mean[c] /= static_cast<double>(rows);
        for (int64_t r = 0; r < rows; ++r) {
            const T* xr = xd + r * C;
            for (int64_t c = 0; c < C; ++c) {
                double d = xr[c] - mean[c];
                var[c] += d * d;
            }
        }
        for (int64_t c = 0; c < C; ++c) var[c] /= static_cast<double>(rows);
        for (int64_t c = 0; c < C; ++c) {
            p.running_mean[c] = static_cast<T>(p.momentum * p.running_mean[c] + (1.0 - p.momentum) * mean[c]);
            p.running_var[c] = static_cast<T>(p.momentum * p.running_var[c] + (1.0 - p.momentum) * var[c]);
        }
    } else {
        for (int64_t c = 0; c < C; ++c) {
            mean[c] = p.running_mean[c];
            var[c] = p.running_var[c];
        }
    }

    std::vector<T> inv_std(static_cast<size_t>(C));
    for (int64_t c = 0; c < C; ++c)
        inv_std[c] = static_cast<T>(1.0 / std::sqrt(var[c] + p.eps));

    TensorT<T> x_hat(x.shape());
    T* xh = x_hat.data();
    for (int64_t r = 0; r < rows; ++r) {
        const T* xr = xd + r * C;
        T* hr = xh + r * C;
        T* orow = od + r * C;
        for (int64_t c = 0; c < C; ++c) {
            hr[c] = static_cast<T>((xr[c] - mean[c]) * inv_std[c]);
            orow[c] = p.gamma[c] * hr[c] + p.beta[c];
        }
    }
    if (cache) {
        cache->x_hat = std::move(x_hat);
        cache->inv_std = std::move(inv_std);
    }
    return out;
}

template <typename T>
BatchNormGrads<T> batchnorm_backward(const TensorT<T>& x, const BatchNormParams<T>& p,
                                     const BatchNormCache<T>& cache, const TensorT<T>& upstream) {
    require(x.same_shape(upstream), "batchnorm_backward: upstream shape mismatch");
    const int64_t C = p.channels();
    const int64_t rows = x.size() / C;

    BatchNormGrads<T> g{TensorT<T>(x.shape()), TensorT<T>(p.gamma.shape()), TensorT<T>(p.beta.shape())};
    const T* gyd = upstream.data();
    const T* xh = cache.x_hat.data();

    std::vector<double> sum_gy(static_cast<size_t>(C), 0.0), sum_gy_xh(static_cast<size_t>(C), 0.0);
    for (int64_t r = 0; r < rows; ++r) {
        const T* gy = gyd + r * C;
        const T* hr = xh + r * C;
        for (int64_t c = 0; c < C; ++c) {
            sum_gy[c] += gy[c];
            sum_gy_xh[c] += static_cast<double>(gy[c]) * hr[c];
        }
    }
    for (int64_t c = 0; c < C; ++c) {
        g.beta[c] = static_cast<T>(sum_gy[c]);
        g.gamma[c] = static_cast<T>(sum_gy_xh[c]);
    }

    T* gxd = g.x.data();
    const double inv_rows = 1.0 / static_cast<double>(rows);
    for (int64_t r = 0; r < rows; ++r) {
        const T* gy = gyd + r * C;
        const T* hr = xh + r * C;
        T* gx = gxd + r * C;
        for (int64_t c = 0; c < C; ++c) {
            double centered = gy[c] - sum_gy[c] * inv_rows - hr[c] * sum_gy_xh[c] * inv_rows;
            gx[c] = static_cast<T>(p.gamma[c] * cache.inv_std[c] * centered);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// explicit instantiations: float for the engine, double for verification
// ---------------------------------------------------------------------------

#define VCNN_INSTANTIATE_LAYERS(T)                                                                   \
    template TensorT<T> conv3d_forward<T>(const TensorT<T>&, const ConvParams<T>&);                  \
    template ConvGrads<T> conv3d_backward<T>(const TensorT<T>&, const ConvParams<T>&,                \
                                             const TensorT<T>&);                                     \
    template TensorT<T> maxpool3d_forward<T>(const TensorT<T>&, int64_t);                            \
    template TensorT<T> maxpool3d_backward<T>(const TensorT<T>&, const TensorT<T>&, int64_t);        \
    template TensorT<T> relu_forward<T>(const TensorT<T>&);                                          \
    template TensorT<T> relu_backward<T>(const TensorT<T>&, const TensorT<T>&);                      \
    template TensorT<T> dense_forward<T>(const TensorT<T>&, const DenseParams<T>&);                  \
    template DenseGrads<T> dense_backward<T>(const TensorT<T>&, const DenseParams<T>&,               \
                                             const TensorT<T>&);                                     \
    template TensorT<T> flatten_forward<T>(const TensorT<T>&);                                       \
    template TensorT<T> flatten_backward<T>(const TensorT<T>&, const std::vector<int64_t>&);         \
    template TensorT<T> batchnorm_forward<T>(const TensorT<T>&, BatchNormParams<T>&, bool,           \
                                             BatchNormCache<T>*);                                    \
    template BatchNormGrads<T> batchnorm_backward<T>(const TensorT<T>&, const BatchNormParams<T>&,   \
                                                     const BatchNormCache<T>&, const TensorT<T>&);

VCNN_INSTANTIATE_LAYERS(float)
VCNN_INSTANTIATE_LAYERS(double)

#undef VCNN_INSTANTIATE_LAYERS

}  // namespace vcnn::nn
