// Orthonormal single-level 2-D Haar decomposition and recomposition on
// [N,C,H,W] tensors. Both directions are differentiable; each is the
// adjoint of the other, so Parseval holds exactly.
#pragma once

#include "ctdn/tensor.hpp"

namespace ctdn {

struct Subbands {
    TensorPtr ll, lh, hl, hh; // each [N,C,H/2,W/2]
};

// Per non-overlapping 2x2 block [a b; c d]:
//   ll=(a+b+c+d)/2, lh=(a-b+c-d)/2, hl=(a+b-c-d)/2, hh=(a-b-c+d)/2.
// H and W must be even.
Subbands wave_dec(const TensorPtr& x);

// Exact inverse of wave_dec.
TensorPtr wave_rec(const Subbands& s);

} // namespace ctdn
