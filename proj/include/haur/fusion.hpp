#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "haur/image.hpp"

namespace haur {

class Rng;

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const std::vector<double>& values() const { return data_; }

  static Matrix uniform(std::size_t rows, std::size_t cols, double bound, Rng& rng);

  bool all_finite() const;
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// All throw ShapeMismatch on incompatible operands.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a b^T
Matrix transpose(const Matrix& a);
void add_in_place(Matrix& dst, const Matrix& src, double scale = 1.0);
Matrix softmax_rows(const Matrix& logits);

enum class Direction { TextImageImage, ImageTextText };

const char* to_string(Direction d);
Direction parse_direction(const std::string& name);  // "tii" | "itt"

inline constexpr std::size_t kPatchCap = 2048;

struct FusionConfig {
  std::size_t d = 64;
  std::size_t d_k = 64;
  std::size_t vocab = 256;
  std::size_t layers = 4;
  Direction direction = Direction::TextImageImage;
  std::size_t grid = 8;
  std::uint64_t seed = 0;
};

struct EmbeddingTable {
  Matrix weights;  // vocab x d
};

struct AttentionLayerParams {
  Matrix w_q, w_k, w_v;  // d x d_k
  Matrix w_fc;           // d_k x d
  Matrix b_fc;           // 1 x d
};

struct ConcatFc {
  Matrix w;  // 2d x d
  Matrix b;  // 1 x d
};

struct FusionStack {
  Direction direction = Direction::TextImageImage;
  std::vector<AttentionLayerParams> layers;
  ConcatFc concat_fc;
};

// Trainable parameters plus the fixed image projection.
struct FusionModel {
  FusionConfig config;
  EmbeddingTable embedding;
  FusionStack stack;
  Matrix w_out;       // d x vocab
  Matrix image_proj;  // kCellFeatures x d, not trained

  // Named views of every trainable matrix, in a fixed order.
  std::vector<std::pair<std::string, Matrix*>> parameters();
  std::vector<std::pair<std::string, const Matrix*>> parameters() const;
};

// Parameters uniform in [-1/sqrt(d), 1/sqrt(d)] drawn from config.seed.
FusionModel init_model(const FusionConfig& config);

// Same shapes as `model`, every entry zero.
FusionModel zeros_like(const FusionModel& model);

// Throws IdOutOfRange.
Matrix embed_text(const std::vector<int>& ids, const EmbeddingTable& table);

// Per grid cell: mean red, green and blue in [0,1], (row+0.5)/g, (col+0.5)/g.
inline constexpr std::size_t kCellFeatures = 5;
Matrix cell_features(const Image& image, std::size_t grid);

// cell_features projected by `proj` (kCellFeatures x d).
Matrix toy_image_features(const Image& image, const Matrix& proj, std::size_t grid);

// softmax(Q K^T / sqrt(d_k)) V. With TextImageImage the queries come from
// f_in and keys/values from f_img; ImageTextText swaps the roles.
Matrix cross_attention(const Matrix& f_in, const Matrix& f_img, const AttentionLayerParams& params,
                       Direction direction);

Matrix fc_transform(const Matrix& f_mixed, const Matrix& w, const Matrix& b);

Matrix fusion_forward(const Matrix& f_text, const Matrix& f_img, const FusionStack& stack);

Matrix decode_logits(const Matrix& f, const Matrix& w_out);

// Mean over rows of -log softmax(logits)[target].
double cross_entropy(const Matrix& logits, int target);

struct LayerCache {
  Matrix x_q, x_kv, q, k, v, p, mixed;
};

struct ForwardCache {
  std::vector<int> ids;
  Matrix text;   // F_t
  Matrix image;  // F_i
  std::vector<LayerCache> layers;
  Matrix pooled;  // 1 x 2d, N = 0 only
  Matrix fused;
  Matrix logits;
};

ForwardCache forward(const FusionModel& model, const std::vector<int>& ids, const Matrix& f_img);

struct Gradients {
  FusionModel params;  // same layout as the model
  Matrix d_text;
  Matrix d_image;
};

// Analytic gradients from dL/dlogits.
Gradients fusion_backward(const FusionModel& model, const ForwardCache& cache,
                          const Matrix& d_logits);

// dL/dlogits of cross_entropy.
Matrix cross_entropy_grad(const Matrix& logits, int target);

struct GradcheckReport {
  double max_rel_error = 0;
  std::vector<std::pair<std::string, double>> per_class;  // worst error per parameter class
  std::size_t checked = 0;
};

// Shrinks `base` to the width used for finite-difference checks (d=12,
// d_k=10, vocab=24, grid=3), keeping depth, direction and seed.
FusionConfig gradcheck_config(const FusionConfig& base);

// Central differences against the analytic gradient on sampled entries of every
// parameter class and both inputs, for each seed in `seeds`.
GradcheckReport gradcheck(const FusionConfig& base, const std::vector<std::uint64_t>& seeds,
                          double eps = 1e-5, std::size_t samples_per_class = 6);

struct TrainExample {
  std::vector<int> ids;
  Matrix image_features;
  int target = 0;
};

// "Marked-token selection": example i marks token j = i mod t by painting grid
// column j in a hue unique to j; the target is the marked token's id. t must
// not exceed the grid width.
std::vector<TrainExample> marked_token_fixture(const FusionModel& model, std::size_t examples,
                                               std::size_t tokens, std::uint64_t seed);

inline constexpr double kDefaultLearningRate = 0.1;
inline constexpr std::size_t kDefaultTrainSteps = 200;

// Eight examples over eight tokens, drawn from the model's seed.
std::vector<TrainExample> demo_fixture(const FusionModel& model);

struct TrainTrace {
  std::vector<double> loss;  // full-batch loss before each update
};

// Plain full-batch gradient descent. Throws DivergenceDetected on a
// non-finite loss.
TrainTrace micro_train(FusionModel& model, const std::vector<TrainExample>& data, std::size_t steps,
                       double learning_rate);

double median(std::vector<double> values);

}  // namespace haur
