#include <cmath>

#include "haur/error.hpp"
#include "haur/fusion.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

Matrix add_bias(Matrix x, const Matrix& b) {
  require(b.rows() == 1 && b.cols() == x.cols(), "bias width differs");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) += b(0, c);
  }
  return x;
}

Matrix mean_rows(const Matrix& x) {
  Matrix out(1, x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
  }
  for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) /= static_cast<double>(x.rows());
  return out;
}

Matrix column_sums(const Matrix& x) {
  Matrix out(1, x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
  }
  return out;
}

LayerCache attend(const Matrix& x_q, const Matrix& x_kv, const AttentionLayerParams& p) {
  require(x_q.cols() == p.w_q.rows() && x_kv.cols() == p.w_k.rows() && x_kv.cols() == p.w_v.rows(),
          "attention input width differs from projections");
  LayerCache c;
  c.x_q = x_q;
  c.x_kv = x_kv;
  c.q = matmul(x_q, p.w_q);
  c.k = matmul(x_kv, p.w_k);
  c.v = matmul(x_kv, p.w_v);
  require(c.q.cols() == c.k.cols(), "query and key widths differ");
  Matrix scores = matmul_nt(c.q, c.k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(c.k.cols()));
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] *= scale;
  c.p = softmax_rows(scores);
  c.mixed = matmul(c.p, c.v);
  return c;
}

std::pair<const Matrix*, const Matrix*> route(const Matrix& f_in, const Matrix& f_img, Direction d) {
  if (d == Direction::TextImageImage) return {&f_in, &f_img};
  return {&f_img, &f_in};
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::TextImageImage ? "tii" : "itt";
}

Direction parse_direction(const std::string& name) {
  if (name == "tii") return Direction::TextImageImage;
  if (name == "itt") return Direction::ImageTextText;
  throw Error(ErrorCode::InvalidArgument, "direction must be tii or itt");
}

std::vector<std::pair<std::string, Matrix*>> FusionModel::parameters() {
  std::vector<std::pair<std::string, Matrix*>> out;
  out.emplace_back("embedding", &embedding.weights);
  for (auto& l : stack.layers) {
    out.emplace_back("W_Q", &l.w_q);
    out.emplace_back("W_K", &l.w_k);
    out.emplace_back("W_V", &l.w_v);
    out.emplace_back("W_fc", &l.w_fc);
    out.emplace_back("b_fc", &l.b_fc);
  }
  if (stack.layers.empty()) {
    out.emplace_back("concat_W", &stack.concat_fc.w);
    out.emplace_back("concat_b", &stack.concat_fc.b);
  }
  out.emplace_back("W_out", &w_out);
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> FusionModel::parameters() const {
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (const auto& [name, m] : const_cast<FusionModel*>(this)->parameters()) out.emplace_back(name, m);
  return out;
}

FusionModel init_model(const FusionConfig& config) {
  if (config.d == 0 || config.d_k == 0 || config.vocab == 0 || config.grid == 0) {
    throw Error(ErrorCode::InvalidArgument, "fusion dimensions must be positive");
  }
  if (config.grid * config.grid > kPatchCap) {
    throw Error(ErrorCode::InvalidArgument, "grid exceeds the patch budget");
  }
  Rng rng(config.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.d));
  FusionModel m;
  m.config = config;
  m.embedding.weights = Matrix::uniform(config.vocab, config.d, bound, rng);
  m.stack.direction = config.direction;
  for (std::size_t n = 0; n < config.layers; ++n) {
    AttentionLayerParams l;
    l.w_q = Matrix::uniform(config.d, config.d_k, bound, rng);
    l.w_k = Matrix::uniform(config.d, config.d_k, bound, rng);
    l.w_v = Matrix::uniform(config.d, config.d_k, bound, rng);
    l.w_fc = Matrix::uniform(config.d_k, config.d, bound, rng);
    l.b_fc = Matrix::uniform(1, config.d, bound, rng);
    m.stack.layers.push_back(std::move(l));
  }
  m.stack.concat_fc.w = Matrix::uniform(2 * config.d, config.d, bound, rng);
  m.stack.concat_fc.b = Matrix::uniform(1, config.d, bound, rng);
  m.w_out = Matrix::uniform(config.d, config.vocab, bound, rng);
  m.image_proj = Matrix::uniform(kCellFeatures, config.d, 1.0, rng);
  return m;
}

FusionModel zeros_like(const FusionModel& model) {
  FusionModel z = model;
  for (auto& [name, m] : z.parameters()) *m = Matrix(m->rows(), m->cols());
  return z;
}

Matrix embed_text(const std::vector<int>& ids, const EmbeddingTable& table) {
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "empty token sequence");
  Matrix out(ids.size(), table.weights.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= table.weights.rows()) {
      throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(ids[i]) + " outside vocabulary");
    }
    for (std::size_t c = 0; c < out.cols(); ++c) out(i, c) = table.weights(static_cast<std::size_t>(ids[i]), c);
  }
  return out;
}

Matrix cell_features(const Image& image, std::size_t grid) {
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
  if (grid == 0 || grid * grid > kPatchCap) throw Error(ErrorCode::InvalidArgument, "bad grid size");
  Matrix out(grid * grid, kCellFeatures);
  const auto h = static_cast<std::size_t>(image.height());
  const auto w = static_cast<std::size_t>(image.width());
  for (std::size_t r = 0; r < grid; ++r) {
    for (std::size_t c = 0; c < grid; ++c) {
      const std::size_t y0 = r * h / grid, y1 = (r + 1) * h / grid;
      const std::size_t x0 = c * w / grid, x1 = (c + 1) * w / grid;
      double sum[3] = {0, 0, 0};
      std::size_t n = 0;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) {
          const auto px = image.at(static_cast<int>(x), static_cast<int>(y));
          sum[0] += px.r;
          sum[1] += px.g;
          sum[2] += px.b;
          ++n;
        }
      }
      const std::size_t row = r * grid + c;
      for (std::size_t k = 0; k < 3; ++k) out(row, k) = n > 0 ? sum[k] / (255.0 * static_cast<double>(n)) : 0.0;
      out(row, 3) = (static_cast<double>(r) + 0.5) / static_cast<double>(grid);
      out(row, 4) = (static_cast<double>(c) + 0.5) / static_cast<double>(grid);
    }
  }
  return out;
}

Matrix toy_image_features(const Image& image, const Matrix& proj, std::size_t grid) {
  return matmul(cell_features(image, grid), proj);
}

Matrix cross_attention(const Matrix& f_in, const Matrix& f_img, const AttentionLayerParams& params,
                       Direction direction) {
  const auto [x_q, x_kv] = route(f_in, f_img, direction);
  return attend(*x_q, *x_kv, params).mixed;
}

Matrix fc_transform(const Matrix& f_mixed, const Matrix& w, const Matrix& b) {
  return add_bias(matmul(f_mixed, w), b);
}

Matrix decode_logits(const Matrix& f, const Matrix& w_out) { return matmul(f, w_out); }

double cross_entropy(const Matrix& logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.cols()) {
    throw Error(ErrorCode::IdOutOfRange, "target outside vocabulary");
  }
  double total = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double peak = -INFINITY;
    for (std::size_t c = 0; c < logits.cols(); ++c) peak = std::max(peak, logits(r, c));
    double z = 0;
    for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c) - peak);
    total += std::log(z) + peak - logits(r, static_cast<std::size_t>(target));
  }
  return total / static_cast<double>(logits.rows());
}

Matrix cross_entropy_grad(const Matrix& logits, int target) {
  Matrix g = softmax_rows(logits);
  const double inv = 1.0 / static_cast<double>(logits.rows());
  for (std::size_t r = 0; r < g.rows(); ++r) {
    g(r, static_cast<std::size_t>(target)) -= 1.0;
    for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) *= inv;
  }
  return g;
}

ForwardCache forward(const FusionModel& model, const std::vector<int>& ids, const Matrix& f_img) {
  ForwardCache cache;
  cache.ids = ids;
  cache.text = embed_text(ids, model.embedding);
  cache.image = f_img;
  require(f_img.cols() == cache.text.cols(), "image and text feature widths differ");
  const auto& stack = model.stack;
  if (stack.layers.empty()) {
    const Matrix t = mean_rows(cache.text);
    const Matrix i = mean_rows(f_img);
    cache.pooled = Matrix(1, t.cols() + i.cols());
    for (std::size_t c = 0; c < t.cols(); ++c) cache.pooled(0, c) = t(0, c);
    for (std::size_t c = 0; c < i.cols(); ++c) cache.pooled(0, t.cols() + c) = i(0, c);
    cache.fused = fc_transform(cache.pooled, stack.concat_fc.w, stack.concat_fc.b);
  } else {
    Matrix ca = cache.text;
    for (const auto& layer : stack.layers) {
      const auto [x_q, x_kv] = route(ca, f_img, stack.direction);
      cache.layers.push_back(attend(*x_q, *x_kv, layer));
      ca = fc_transform(cache.layers.back().mixed, layer.w_fc, layer.b_fc);
    }
    cache.fused = std::move(ca);
  }
  cache.logits = decode_logits(cache.fused, model.w_out);
  return cache;
}

Matrix fusion_forward(const Matrix& f_text, const Matrix& f_img, const FusionStack& stack) {
  if (stack.layers.empty()) {
    const Matrix t = mean_rows(f_text);
    const Matrix i = mean_rows(f_img);
    Matrix pooled(1, t.cols() + i.cols());
    for (std::size_t c = 0; c < t.cols(); ++c) pooled(0, c) = t(0, c);
    for (std::size_t c = 0; c < i.cols(); ++c) pooled(0, t.cols() + c) = i(0, c);
    return fc_transform(pooled, stack.concat_fc.w, stack.concat_fc.b);
  }
  Matrix ca = f_text;
  for (const auto& layer : stack.layers) {
    ca = fc_transform(cross_attention(ca, f_img, layer, stack.direction), layer.w_fc, layer.b_fc);
  }
  return ca;
}

Gradients fusion_backward(const FusionModel& model, const ForwardCache& cache,
                          const Matrix& d_logits) {
  Gradients g;
  g.params = zeros_like(model);
  g.d_image = Matrix(cache.image.rows(), cache.image.cols());
  g.params.w_out = matmul_tn(cache.fused, d_logits);
  Matrix d_ca = matmul_nt(d_logits, model.w_out);

  const auto& stack = model.stack;
  if (stack.layers.empty()) {
    const auto d = cache.text.cols();
    g.params.stack.concat_fc.w = matmul_tn(cache.pooled, d_ca);
    g.params.stack.concat_fc.b = column_sums(d_ca);
    const Matrix d_pooled = matmul_nt(d_ca, stack.concat_fc.w);
    g.d_text = Matrix(cache.text.rows(), d);
    for (std::size_t r = 0; r < cache.text.rows(); ++r) {
      for (std::size_t c = 0; c < d; ++c) g.d_text(r, c) = d_pooled(0, c) / static_cast<double>(cache.text.rows());
    }
    for (std::size_t r = 0; r < cache.image.rows(); ++r) {
      for (std::size_t c = 0; c < cache.image.cols(); ++c) {
        g.d_image(r, c) = d_pooled(0, d + c) / static_cast<double>(cache.image.rows());
      }
    }
  } else {
    for (std::size_t n = stack.layers.size(); n-- > 0;) {
      const auto& layer = stack.layers[n];
      const auto& lc = cache.layers[n];
      auto& lg = g.params.stack.layers[n];
      lg.w_fc = matmul_tn(lc.mixed, d_ca);
      lg.b_fc = column_sums(d_ca);
      const Matrix d_mixed = matmul_nt(d_ca, layer.w_fc);
      const Matrix d_p = matmul_nt(d_mixed, lc.v);
      const Matrix d_v = matmul_tn(lc.p, d_mixed);
      Matrix d_s(lc.p.rows(), lc.p.cols());
      const double scale = 1.0 / std::sqrt(static_cast<double>(lc.k.cols()));
      for (std::size_t r = 0; r < d_s.rows(); ++r) {
        double dot = 0;
        for (std::size_t c = 0; c < d_s.cols(); ++c) dot += d_p(r, c) * lc.p(r, c);
        for (std::size_t c = 0; c < d_s.cols(); ++c) d_s(r, c) = lc.p(r, c) * (d_p(r, c) - dot) * scale;
      }
      const Matrix d_q = matmul(d_s, lc.k);
      const Matrix d_k = matmul_tn(d_s, lc.q);
      lg.w_q = matmul_tn(lc.x_q, d_q);
      lg.w_k = matmul_tn(lc.x_kv, d_k);
      lg.w_v = matmul_tn(lc.x_kv, d_v);
      const Matrix d_xq = matmul_nt(d_q, layer.w_q);
      Matrix d_xkv = matmul_nt(d_k, layer.w_k);
      add_in_place(d_xkv, matmul_nt(d_v, layer.w_v));
      if (stack.direction == Direction::TextImageImage) {
        add_in_place(g.d_image, d_xkv);
        d_ca = d_xq;
      } else {
        add_in_place(g.d_image, d_xq);
        d_ca = std::move(d_xkv);
      }
    }
    g.d_text = std::move(d_ca);
  }

  auto& emb = g.params.embedding.weights;
  for (std::size_t i = 0; i < cache.ids.size(); ++i) {
    const auto row = static_cast<std::size_t>(cache.ids[i]);
    for (std::size_t c = 0; c < emb.cols(); ++c) emb(row, c) += g.d_text(i, c);
  }
  return g;
}

}  // namespace haur
