#pragma once

#include <span>
#include <vector>

#include "olrg/rng.hpp"
#include "olrg/tape.hpp"
#include "olrg/types.hpp"

namespace olrg::nn {

/// Fully connected network: ReLU on hidden layers, affine final layer.
struct Shape {
  int in = 0;
  std::vector<int> hidden;
  int out = 0;
};

struct LayerView {
  int w_offset = 0;
  int rows = 0;
  int cols = 0;
  int b_offset = 0;
};

/// Offsets of each layer's row-major weight matrix and bias vector inside a
/// flat parameter vector.
struct Layout {
  std::vector<LayerView> layers;
  int begin = 0;
  int size = 0;
};

int param_count(const Shape& shape);
Layout make_layout(const Shape& shape, int base_offset);

/// He-initialised weights (biases zero), appended to `params`.
void init_params(const Shape& shape, Rng& rng, std::vector<double>& params);

RealVector forward(const Shape& shape, const Layout& layout,
                   std::span<const double> params, const RealVector& input);

ad::Tape::Id forward(ad::Tape& tape, const Shape& shape, const Layout& layout,
                     ad::Tape::Id input);

}  // namespace olrg::nn
