#include "olrg/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace olrg::nn {

namespace {

std::vector<int> widths(const Shape& shape) {
  std::vector<int> w{shape.in};
  w.insert(w.end(), shape.hidden.begin(), shape.hidden.end());
  w.push_back(shape.out);
  return w;
}

}  // namespace

int param_count(const Shape& shape) {
  const auto w = widths(shape);
  int count = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    count += w[i + 1] * w[i] + w[i + 1];
  return count;
}

Layout make_layout(const Shape& shape, int base_offset) {
  const auto w = widths(shape);
  Layout layout;
  layout.begin = base_offset;
  int offset = base_offset;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    LayerView lv;
    lv.rows = w[i + 1];
    lv.cols = w[i];
    lv.w_offset = offset;
    offset += lv.rows * lv.cols;
    lv.b_offset = offset;
    offset += lv.rows;
    layout.layers.push_back(lv);
  }
  layout.size = offset - base_offset;
  return layout;
}

void init_params(const Shape& shape, Rng& rng, std::vector<double>& params) {
  const auto w = widths(shape);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double std_dev = std::sqrt(2.0 / static_cast<double>(w[i]));
    for (int k = 0; k < w[i + 1] * w[i]; ++k)
      params.push_back(std_dev * rng.normal());
    for (int k = 0; k < w[i + 1]; ++k) params.push_back(0.0);
  }
}

RealVector forward(const Shape& shape, const Layout& layout,
                   std::span<const double> params, const RealVector& input) {
  if (input.size() != shape.in)
    throw std::invalid_argument("nn::forward: input size mismatch");
  RealVector x = input;
  for (std::size_t i = 0; i < layout.layers.size(); ++i) {
    const auto& lv = layout.layers[i];
    using RowMajor =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> w(params.data() + lv.w_offset, lv.rows, lv.cols);
    Eigen::Map<const RealVector> b(params.data() + lv.b_offset, lv.rows);
    x = w * x + b;
    if (i + 1 < layout.layers.size()) x = x.cwiseMax(0.0);
  }
  return x;
}

ad::Tape::Id forward(ad::Tape& tape, const Shape& shape, const Layout& layout,
                     ad::Tape::Id input) {
  ad::Tape::Id x = input;
  for (std::size_t i = 0; i < layout.layers.size(); ++i) {
    const auto& lv = layout.layers[i];
    const auto w = tape.parameter(lv.w_offset, lv.rows, lv.cols);
    const auto b = tape.parameter(lv.b_offset, lv.rows, 1);
    x = tape.add(tape.matmul(w, x), b);
    if (i + 1 < layout.layers.size()) x = tape.relu(x);
  }
  return x;
}

}  // namespace olrg::nn
