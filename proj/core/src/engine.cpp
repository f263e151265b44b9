#include "cvconv/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cvconv {

int argmax_label(std::span<const int32_t> logits) {
  if (logits.empty()) throw std::invalid_argument("argmax: empty logits");
  int best = 0;
  for (int i = 1; i < int(logits.size()); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

ConvWindows gather_conv_windows(const QTensor& input, int kernel, int stride, Padding padding) {
  if (input.rank() != 3) throw std::invalid_argument("conv: expected HWC input");
  const int h = input.dim(0);
  const int w = input.dim(1);
  const int c = input.dim(2);

  int out_h, out_w, pad_top = 0, pad_left = 0;
  if (padding == Padding::Same) {
    out_h = (h + stride - 1) / stride;
    out_w = (w + stride - 1) / stride;
    const int pad_h = std::max((out_h - 1) * stride + kernel - h, 0);
    const int pad_w = std::max((out_w - 1) * stride + kernel - w, 0);
    pad_top = pad_h / 2;
    pad_left = pad_w / 2;
  } else {
    if (h < kernel || w < kernel) throw std::invalid_argument("conv: input smaller than kernel");
    out_h = (h - kernel) / stride + 1;
    out_w = (w - kernel) / stride + 1;
  }

  ConvWindows cw;
  cw.out_h = out_h;
  cw.out_w = out_w;
  cw.k = kernel * kernel * c;
  cw.data.assign(size_t(out_h) * out_w * cw.k, 0);

  size_t pos = 0;
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const int y0 = oy * stride - pad_top;
      const int x0 = ox * stride - pad_left;
      for (int ky = 0; ky < kernel; ++ky) {
        const int y = y0 + ky;
        for (int kx = 0; kx < kernel; ++kx) {
          const int x = x0 + kx;
          if (y >= 0 && y < h && x >= 0 && x < w) {
            const int64_t src = (int64_t(y) * w + x) * c;
            for (int ch = 0; ch < c; ++ch) {
              cw.data[pos + size_t((ky * kernel + kx) * c + ch)] = input.at(src + ch);
            }
          }
        }
      }
      pos += size_t(cw.k);
    }
  }
  return cw;
}

QTensor apply_relu(const QTensor& in) {
  std::vector<int32_t> out(in.data());
  for (int32_t& v : out) v = std::max(v, 0);
  return QTensor(in.shape(), std::move(out), in.role());
}

QTensor apply_maxpool(const QTensor& in, int window, int stride) {
  if (in.rank() != 3) throw std::invalid_argument("maxpool: expected HWC input");
  const int h = in.dim(0), w = in.dim(1), c = in.dim(2);
  const int out_h = (h - window) / stride + 1;
  const int out_w = (w - window) / stride + 1;

  QTensor out = QTensor::zeros({out_h, out_w, c}, in.role());
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      for (int ch = 0; ch < c; ++ch) {
        int32_t best = INT32_MIN;
        for (int ky = 0; ky < window; ++ky) {
          for (int kx = 0; kx < window; ++kx) {
            const int y = oy * stride + ky;
            const int x = ox * stride + kx;
            best = std::max(best, in.at((int64_t(y) * w + x) * c + ch));
          }
        }
        out.at((int64_t(oy) * out_w + ox) * c + ch) = best;
      }
    }
  }
  return out;
}

QTensor apply_requantize(const QTensor& in, int shift) {
  std::vector<int32_t> out(in.data());
  for (int32_t& v : out) v = requantize_value(v, shift);
  return QTensor(in.shape(), std::move(out), Role::Activation);
}

namespace {

// Shared accurate/approximate MAC layer evaluation; cfg == nullptr selects
// the accurate path.
QTensor apply_mac_layer(const LayerSpec& l, const QTensor& in, const PerforationConfig* cfg) {
  std::vector<int32_t> acc;
  std::vector<int> out_shape;

  auto eval = [&](const ConvFilter& f, std::span<const int32_t> window) {
    return cfg ? conv_approx(f, window, *cfg).g_star : conv_accurate(f, window);
  };

  if (l.kind == LayerKind::Conv2D) {
    const ConvWindows cw = gather_conv_windows(in, l.kernel, l.stride, l.padding);
    const int cout = int(l.filters.size());
    acc.resize(size_t(cw.positions()) * cout);
    for (int p = 0; p < cw.positions(); ++p) {
      const auto window = cw.window(p);
      for (int f = 0; f < cout; ++f) {
        acc[size_t(p) * cout + f] = eval(l.filters[f], window);
      }
    }
    out_shape = {cw.out_h, cw.out_w, cout};
  } else {
    std::span<const int32_t> window(in.data());
    acc.resize(l.filters.size());
    for (size_t f = 0; f < l.filters.size(); ++f) {
      acc[f] = eval(l.filters[f], window);
    }
    out_shape = {int(l.filters.size())};
  }

  QTensor out(std::move(out_shape), std::move(acc), Role::Accumulator);
  if (l.shift) return apply_requantize(out, *l.shift);
  return out;
}

InferenceResult run_model(const QuantModel& model, const QTensor& input,
                          const PerforationConfig* cfg) {
  if (input.shape() != model.input_shape()) {
    throw std::invalid_argument("input shape does not match model input shape");
  }
  if (input.role() != Role::Activation) {
    throw std::invalid_argument("model input must be an activation tensor");
  }

  QTensor t = input;
  for (const LayerSpec& l : model.layers()) {
    switch (l.kind) {
      case LayerKind::Conv2D:
      case LayerKind::Dense:
        t = apply_mac_layer(l, t, cfg);
        break;
      case LayerKind::ReLU:
        t = apply_relu(t);
        break;
      case LayerKind::MaxPool:
        t = apply_maxpool(t, l.window, l.stride);
        break;
      case LayerKind::Requantize:
        t = apply_requantize(t, *l.shift);
        break;
    }
  }

  InferenceResult r;
  r.logits = t.data();
  r.label = argmax_label(r.logits);
  return r;
}

}  // namespace

InferenceResult run_model_accurate(const QuantModel& model, const QTensor& input) {
  return run_model(model, input, nullptr);
}

InferenceResult run_model_approx(const QuantModel& model, const QTensor& input,
                                 const PerforationConfig& cfg) {
  cfg.check();
  return run_model(model, input, &cfg);
}

}  // namespace cvconv
