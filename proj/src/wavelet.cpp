#include "ctdn/wavelet.hpp"

#include <stdexcept>

namespace ctdn {

namespace {

TensorPtr make_band(std::vector<int> shape, const std::vector<TensorPtr>& parents) {
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->values.assign(static_cast<std::size_t>(shape_numel(t->shape)), 0.0);
    for (const auto& p : parents) {
        if (p->requires_grad) {
            t->requires_grad = true;
            t->parents = parents;
            break;
        }
    }
    return t;
}

} // namespace

Subbands wave_dec(const TensorPtr& x) {
    if (x->rank() != 4) {
        throw std::invalid_argument("wave_dec: input must be [N,C,H,W], got " +
                                    shape_string(x->shape));
    }
    const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
    if (h % 2 != 0 || w % 2 != 0) {
        throw std::invalid_argument("wave_dec: extents must be even (got " +
                                    shape_string(x->shape) + "); pad upstream");
    }
    const int h2 = h / 2, w2 = w / 2;
    Subbands s;
    s.ll = make_band({n, c, h2, w2}, {x});
    s.lh = make_band({n, c, h2, w2}, {x});
    s.hl = make_band({n, c, h2, w2}, {x});
    s.hh = make_band({n, c, h2, w2}, {x});

    const double* in = x->values.data();
    const std::int64_t plane = static_cast<std::int64_t>(h) * w;
    const std::int64_t plane2 = static_cast<std::int64_t>(h2) * w2;
    for (std::int64_t nc = 0; nc < static_cast<std::int64_t>(n) * c; ++nc) {
        const double* p = in + nc * plane;
        double* pll = s.ll->values.data() + nc * plane2;
        double* plh = s.lh->values.data() + nc * plane2;
        double* phl = s.hl->values.data() + nc * plane2;
        double* phh = s.hh->values.data() + nc * plane2;
        for (int i = 0; i < h2; ++i) {
            const double* r0 = p + static_cast<std::int64_t>(2 * i) * w;
            const double* r1 = r0 + w;
            for (int j = 0; j < w2; ++j) {
                const double a = r0[2 * j], b = r0[2 * j + 1];
                const double cc = r1[2 * j], d = r1[2 * j + 1];
                const std::int64_t o = static_cast<std::int64_t>(i) * w2 + j;
                pll[o] = 0.5 * (a + b + cc + d);
                plh[o] = 0.5 * (a - b + cc - d);
                phl[o] = 0.5 * (a + b - cc - d);
                phh[o] = 0.5 * (a - b - cc + d);
            }
        }
    }

    if (x->requires_grad || !x->is_leaf()) {
        // Each subband's adjoint scatters through the matching synthesis filter.
        auto attach = [&](const TensorPtr& band, double sa, double sb, double sc, double sd) {
            if (!band->requires_grad) return;
            Tensor* bn = band.get();
            band->backprop = [bn, x, sa, sb, sc, sd, n, c, h, w] {
                x->ensure_grad();
                const int h2 = h / 2, w2 = w / 2;
                const std::int64_t plane = static_cast<std::int64_t>(h) * w;
                const std::int64_t plane2 = static_cast<std::int64_t>(h2) * w2;
                for (std::int64_t nc = 0; nc < static_cast<std::int64_t>(n) * c; ++nc) {
                    const double* g = bn->grad.data() + nc * plane2;
                    double* gx = x->grad.data() + nc * plane;
                    for (int i = 0; i < h2; ++i) {
                        double* r0 = gx + static_cast<std::int64_t>(2 * i) * w;
                        double* r1 = r0 + w;
                        for (int j = 0; j < w2; ++j) {
                            const double gv = 0.5 * g[static_cast<std::int64_t>(i) * w2 + j];
                            r0[2 * j] += sa * gv;
                            r0[2 * j + 1] += sb * gv;
                            r1[2 * j] += sc * gv;
                            r1[2 * j + 1] += sd * gv;
                        }
                    }
                }
            };
        };
        attach(s.ll, 1, 1, 1, 1);
        attach(s.lh, 1, -1, 1, -1);
        attach(s.hl, 1, 1, -1, -1);
        attach(s.hh, 1, -1, -1, 1);
    }
    return s;
}

TensorPtr wave_rec(const Subbands& s) {
    const TensorPtr& ll = s.ll;
    for (const TensorPtr* b : {&s.lh, &s.hl, &s.hh}) {
        if ((*b)->shape != ll->shape) {
            throw std::invalid_argument("wave_rec: subband shape mismatch " +
                                        shape_string(ll->shape) + " vs " +
                                        shape_string((*b)->shape));
        }
    }
    if (ll->rank() != 4) throw std::invalid_argument("wave_rec: subbands must be [N,C,H,W]");
    const int n = ll->dim(0), c = ll->dim(1), h2 = ll->dim(2), w2 = ll->dim(3);
    const int h = 2 * h2, w = 2 * w2;

    auto out = make_band({n, c, h, w}, {s.ll, s.lh, s.hl, s.hh});
    const std::int64_t plane = static_cast<std::int64_t>(h) * w;
    const std::int64_t plane2 = static_cast<std::int64_t>(h2) * w2;
    for (std::int64_t nc = 0; nc < static_cast<std::int64_t>(n) * c; ++nc) {
        const double* pll = s.ll->values.data() + nc * plane2;
        const double* plh = s.lh->values.data() + nc * plane2;
        const double* phl = s.hl->values.data() + nc * plane2;
        const double* phh = s.hh->values.data() + nc * plane2;
        double* q = out->values.data() + nc * plane;
        for (int i = 0; i < h2; ++i) {
            double* r0 = q + static_cast<std::int64_t>(2 * i) * w;
            double* r1 = r0 + w;
            for (int j = 0; j < w2; ++j) {
                const std::int64_t o = static_cast<std::int64_t>(i) * w2 + j;
                const double vll = pll[o], vlh = plh[o], vhl = phl[o], vhh = phh[o];
                r0[2 * j] = 0.5 * (vll + vlh + vhl + vhh);
                r0[2 * j + 1] = 0.5 * (vll - vlh + vhl - vhh);
                r1[2 * j] = 0.5 * (vll + vlh - vhl - vhh);
                r1[2 * j + 1] = 0.5 * (vll - vlh - vhl + vhh);
            }
        }
    }

    if (out->requires_grad) {
        Tensor* o = out.get();
        Subbands bands = s;
        out->backprop = [o, bands, n, c, h2, w2] {
            bands.ll->ensure_grad();
            bands.lh->ensure_grad();
            bands.hl->ensure_grad();
            bands.hh->ensure_grad();
            const int h = 2 * h2, w = 2 * w2;
            const std::int64_t plane = static_cast<std::int64_t>(h) * w;
            const std::int64_t plane2 = static_cast<std::int64_t>(h2) * w2;
            for (std::int64_t nc = 0; nc < static_cast<std::int64_t>(n) * c; ++nc) {
                const double* g = o->grad.data() + nc * plane;
                double* gll = bands.ll->grad.data() + nc * plane2;
                double* glh = bands.lh->grad.data() + nc * plane2;
                double* ghl = bands.hl->grad.data() + nc * plane2;
                double* ghh = bands.hh->grad.data() + nc * plane2;
                for (int i = 0; i < h2; ++i) {
                    const double* r0 = g + static_cast<std::int64_t>(2 * i) * w;
                    const double* r1 = r0 + w;
                    for (int j = 0; j < w2; ++j) {
                        const double a = r0[2 * j], b = r0[2 * j + 1];
                        const double cc = r1[2 * j], d = r1[2 * j + 1];
                        const std::int64_t oo = static_cast<std::int64_t>(i) * w2 + j;
                        gll[oo] += 0.5 * (a + b + cc + d);
                        glh[oo] += 0.5 * (a - b + cc - d);
                        ghl[oo] += 0.5 * (a + b - cc - d);
                        ghh[oo] += 0.5 * (a - b - cc + d);
                    }
                }
            }
        };
    }
    return out;
}

} // namespace ctdn
