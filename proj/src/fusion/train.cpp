#include <algorithm>
#include <cmath>
#include <map>

#include "haur/error.hpp"
#include "haur/fusion.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

constexpr double kRelErrorFloor = 1e-6;
constexpr std::size_t kGradcheckTokens = 5;
constexpr int kFirstLetter = 'a';
constexpr int kLetters = 26;

// Cross-entropy accumulated in extended precision so that the central
// difference is limited by the logits, not by rounding of the loss itself.
long double loss_of(const FusionModel& model, const std::vector<int>& ids, const Matrix& img, int target) {
  const auto logits = forward(model, ids, img).logits;
  long double total = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    long double peak = logits(r, 0);
    for (std::size_t c = 1; c < logits.cols(); ++c) peak = std::max<long double>(peak, logits(r, c));
    long double z = 0;
    for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c) - peak);
    total += std::log(z) + peak - logits(r, static_cast<std::size_t>(target));
  }
  return total / static_cast<long double>(logits.rows());
}

// Re-draws every parameter at fan-in scale (the training init shrinks a deep
// stack's gradients below finite-difference round-off).
void draw_probe_point(FusionModel& model, Rng& rng) {
  for (auto& [name, m] : model.parameters()) {
    const double bound = name == "embedding" ? 1.0 : 1.0 / std::sqrt(static_cast<double>(m->rows()));
    *m = Matrix::uniform(m->rows(), m->cols(), bound, rng);
  }
}

double rel_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kRelErrorFloor});
}

// Fully saturated color at hue index / count of the color wheel.
Rgb hue_color(std::size_t index, std::size_t count) {
  const double h = 6.0 * static_cast<double>(index) / static_cast<double>(count);
  const int sector = static_cast<int>(h);
  const auto rise = static_cast<std::uint8_t>(std::lround(255.0 * (h - sector)));
  const auto fall = static_cast<std::uint8_t>(255 - rise);
  switch (sector) {
    case 0: return {255, rise, 0};
    case 1: return {fall, 255, 0};
    case 2: return {0, 255, rise};
    case 3: return {0, fall, 255};
    case 4: return {rise, 0, 255};
    default: return {255, 0, fall};
  }
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

FusionConfig gradcheck_config(const FusionConfig& base) {
  FusionConfig small = base;
  small.d = 12;
  small.d_k = 10;
  small.vocab = 24;
  small.grid = 3;
  return small;
}

GradcheckReport gradcheck(const FusionConfig& base, const std::vector<std::uint64_t>& seeds,
                          double eps, std::size_t samples_per_class) {
  GradcheckReport report;
  std::map<std::string, double> worst;
  std::vector<std::string> order;
  auto record = [&](const std::string& name, double err) {
    if (!worst.count(name)) order.push_back(name);
    worst[name] = std::max(worst[name], err);
    report.max_rel_error = std::max(report.max_rel_error, err);
    ++report.checked;
  };

  for (const auto seed : seeds) {
    FusionConfig cfg = base;
    cfg.seed = seed;
    FusionModel model = init_model(cfg);
    Rng rng(mix_seed(seed, 0x6763));
    draw_probe_point(model, rng);
    std::vector<int> ids(kGradcheckTokens);
    for (auto& id : ids) id = static_cast<int>(rng.below(cfg.vocab));
    Matrix img = Matrix::uniform(cfg.grid * cfg.grid, cfg.d, 1.0, rng);
    const int target = static_cast<int>(rng.below(cfg.vocab));

    const auto cache = forward(model, ids, img);
    const auto grads = fusion_backward(model, cache, cross_entropy_grad(cache.logits, target));
    auto analytic = grads.params;

    // Group matrices of the same class across layers.
    std::map<std::string, std::vector<std::pair<Matrix*, const Matrix*>>> classes;
    auto params = model.parameters();
    auto grad_params = analytic.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      classes[params[i].first].emplace_back(params[i].second, grad_params[i].second);
    }
    for (auto& [name, mats] : classes) {
      for (std::size_t s = 0; s < samples_per_class; ++s) {
        auto& [param, grad] = mats[rng.below(mats.size())];
        std::size_t index;
        if (name == "embedding") {
          const auto row = static_cast<std::size_t>(ids[rng.below(ids.size())]);
          index = row * param->cols() + rng.below(param->cols());
        } else {
          index = rng.below(param->size());
        }
        const double saved = (*param)[index];
        (*param)[index] = saved + eps;
        const long double up = loss_of(model, ids, img, target);
        (*param)[index] = saved - eps;
        const long double down = loss_of(model, ids, img, target);
        (*param)[index] = saved;
        record(name, rel_error((*grad)[index], static_cast<double>((up - down) / (2 * eps))));
      }
    }
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      const auto index = rng.below(img.size());
      const double saved = img[index];
      img[index] = saved + eps;
      const long double up = loss_of(model, ids, img, target);
      img[index] = saved - eps;
      const long double down = loss_of(model, ids, img, target);
      img[index] = saved;
      record("F_i", rel_error(grads.d_image[index], static_cast<double>((up - down) / (2 * eps))));
    }
  }
  for (const auto& name : order) report.per_class.emplace_back(name, worst[name]);
  return report;
}

std::vector<TrainExample> marked_token_fixture(const FusionModel& model, std::size_t examples,
                                               std::size_t tokens, std::uint64_t seed) {
  const auto g = model.config.grid;
  if (tokens == 0 || tokens > g) {
    throw Error(ErrorCode::InvalidArgument, "token count must fit in the grid width");
  }
  const int cell_px = 4;
  const int size = static_cast<int>(g) * cell_px;
  Rng rng(seed);
  std::vector<TrainExample> data;
  for (std::size_t i = 0; i < examples; ++i) {
    TrainExample ex;
    for (std::size_t j = 0; j < tokens; ++j) {
      const int letter = kFirstLetter + static_cast<int>(rng.below(kLetters));
      ex.ids.push_back(std::min(letter, static_cast<int>(model.config.vocab) - 1));
    }
    const auto marked = i % tokens;
    Image img(size, size, Rgb{0, 0, 0});
    fill_rect(img, {static_cast<int>(marked) * cell_px, 0, cell_px, size}, hue_color(marked, tokens));
    ex.image_features = toy_image_features(img, model.image_proj, g);
    ex.target = ex.ids[marked];
    data.push_back(std::move(ex));
  }
  return data;
}

std::vector<TrainExample> demo_fixture(const FusionModel& model) {
  return marked_token_fixture(model, 8, 8, mix_seed(model.config.seed, 7));
}

TrainTrace micro_train(FusionModel& model, const std::vector<TrainExample>& data, std::size_t steps,
                       double learning_rate) {
  if (data.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
  TrainTrace trace;
  const double inv = 1.0 / static_cast<double>(data.size());
  for (std::size_t step = 0; step < steps; ++step) {
    FusionModel total = zeros_like(model);
    double loss = 0;
    for (const auto& ex : data) {
      const auto cache = forward(model, ex.ids, ex.image_features);
      loss += cross_entropy(cache.logits, ex.target);
      const auto g = fusion_backward(model, cache, cross_entropy_grad(cache.logits, ex.target));
      auto dst = total.parameters();
      const auto src = g.params.parameters();
      for (std::size_t i = 0; i < dst.size(); ++i) add_in_place(*dst[i].second, *src[i].second);
    }
    loss *= inv;
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::DivergenceDetected, "loss became non-finite at step " + std::to_string(step));
    }
    trace.loss.push_back(loss);
    auto params = model.parameters();
    const auto grads = total.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      add_in_place(*params[i].second, *grads[i].second, -learning_rate * inv);
    }
  }
  return trace;
}

}  // namespace haur
