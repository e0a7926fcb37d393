// Copyright 2026 The SheepDog Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sheepdog/trainer.h"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sheepdog/error.h"
#include "sheepdog/rng.h"
#include "sheepdog/util.h"

namespace sheepdog {
namespace {

constexpr uint64_t kShuffleStream = 0x5851f42d4c957f2dULL;
constexpr uint64_t kPairStream = 0x14057b7ef767814fULL;

bool ParseBool(std::string_view key, std::string_view value) {
  const std::string v = ToLowerAscii(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kInvalidArgument,
              "config key '" + std::string(key) + "' expects a boolean, got '" + std::string(value) + "'");
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  T out{};
  in >> out;
  if (!in || !in.eof()) {
    throw Error(ErrorCode::kInvalidArgument,
                "config key '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string_view Bool(bool b) { return b ? "true" : "false"; }

void ValidateConfig(const TrainConfig& c) {
  if (c.epochs <= 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be positive");
  if (c.batch_size <= 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  if (!(c.learning_rate > 0)) throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
}

void ValidateArticles(const std::vector<NewsArticle>& articles) {
  if (articles.empty()) throw Error(ErrorCode::kInvalidArgument, "no training articles");
  for (const auto& a : articles) {
    if (!a.labeled()) {
      throw Error(ErrorCode::kInvalidArgument, "training article '" + a.id + "' has no label");
    }
  }
}

// Per-article inputs prepared once and reused across epochs.
struct Example {
  const NewsArticle* article = nullptr;
  EncoderInput original;
  std::map<Tone, EncoderInput> reframed;
  AttributionVector original_bits;
  std::map<Tone, AttributionVector> reframed_bits;
};

const PseudoLabel& RequireLabel(const PseudoLabelStore& labels, const std::string& id, Variant variant,
                                std::optional<Tone> tone) {
  const PseudoLabel* label = labels.Find(id, variant, tone);
  if (label == nullptr) {
    std::string what = "no pseudo-label for article '" + id + "' variant " + std::string(VariantName(variant));
    if (tone) what += " tone " + std::string(ToneName(*tone));
    throw Error(ErrorCode::kMissingArtifact, what);
  }
  return *label;
}

std::vector<Example> PrepareExamples(const TrainConfig& config, const TextEncoder& encoder,
                                     const std::vector<NewsArticle>& articles,
                                     const ReframingStore* reframings, const PseudoLabelStore* labels) {
  const ToneSet tone_set = MakeToneSet(config.tone_set);
  std::vector<Example> examples(articles.size());
  for (size_t i = 0; i < articles.size(); ++i) {
    const NewsArticle& a = articles[i];
    Example& ex = examples[i];
    ex.article = &a;
    ex.original = encoder.Prepare(a.text);
    if (!config.ablate_attribution) {
      ex.original_bits = RequireLabel(*labels, a.id, Variant::kOriginal, std::nullopt).bits;
    }
    if (config.ablate_reframing) continue;
    for (Tone tone : tone_set.all()) {
      const Reframing* r = reframings->Find(a.id, tone);
      if (r == nullptr) {
        throw Error(ErrorCode::kMissingReframing, "article '" + a.id + "' has no " +
                                                      std::string(ToneName(tone)) + " reframing");
      }
      ex.reframed.emplace(tone, encoder.Prepare(r->text));
      if (!config.ablate_attribution) {
        const Variant v = ToneStyleClass(tone) == StyleClass::kReliable ? Variant::kReliable
                                                                         : Variant::kUnreliable;
        ex.reframed_bits.emplace(tone, RequireLabel(*labels, a.id, v, tone).bits);
      }
    }
  }
  return examples;
}

// Shared epoch/batch scaffolding: shuffles with the shuffle stream and calls
// `step` with the indices of each batch.
void RunEpochs(const TrainConfig& config, size_t n,
               const std::function<void(int epoch)>& on_epoch_start,
               const std::function<LossComponents(const std::vector<size_t>&)>& step,
               std::vector<LossTraceRow>& trace) {
  Rng shuffle_rng(config.seed ^ kShuffleStream);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    on_epoch_start(epoch);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    shuffle_rng.shuffle(order);
    int batch = 0;
    for (size_t start = 0; start < n; start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(n, start + static_cast<size_t>(config.batch_size));
      const std::vector<size_t> indices(order.begin() + static_cast<std::ptrdiff_t>(start),
                                        order.begin() + static_cast<std::ptrdiff_t>(end));
      trace.push_back({epoch, ++batch, step(indices)});
    }
    spdlog::debug("epoch {} done, last total {}", epoch, trace.back().loss.total);
  }
}

std::unique_ptr<DetectorModel> NewModel(const TrainConfig& config) {
  auto model = std::make_unique<DetectorModel>(config.encoder, config.head, config.seed);
  model->info().tone_set = std::string(ToneSetLabel(config.tone_set));
  model->info().attribution_trained = !config.ablate_attribution;
  return model;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainConfig

void TrainConfig::Set(std::string_view key, std::string_view value) {
  const std::string k(key);
  if (k == "epochs") {
    epochs = ParseNumber<int>(key, value);
  } else if (k == "batch_size") {
    batch_size = ParseNumber<int>(key, value);
  } else if (k == "learning_rate") {
    learning_rate = ParseNumber<double>(key, value);
  } else if (k == "seed") {
    seed = ParseNumber<uint64_t>(key, value);
  } else if (k == "ablate_reframing") {
    ablate_reframing = ParseBool(key, value);
  } else if (k == "ablate_attribution") {
    ablate_attribution = ParseBool(key, value);
  } else if (k == "tone_set") {
    tone_set = ToneSetFromName(value).name;
  } else if (k == "loss_weight_style") {
    loss_weights.style = ParseNumber<double>(key, value);
  } else if (k == "loss_weight_news") {
    loss_weights.news = ParseNumber<double>(key, value);
  } else if (k == "loss_weight_attr") {
    loss_weights.attr = ParseNumber<double>(key, value);
  } else if (k == "kl_direction") {
    kl_direction = KlDirectionFromName(value);
  } else if (k == "resample_per_epoch") {
    resample_per_epoch = ParseBool(key, value);
  } else if (k == "encoder") {
    encoder.kind = EncoderKindFromName(value);
  } else if (k == "max_sequence_tokens") {
    encoder.max_sequence_tokens = ParseNumber<int>(key, value);
  } else if (k == "embedding_dim") {
    encoder.embedding_dim = ParseNumber<int>(key, value);
  } else if (k == "hash_buckets") {
    encoder.hash_buckets = ParseNumber<int>(key, value);
  } else if (k == "max_ngram") {
    encoder.max_ngram = ParseNumber<int>(key, value);
  } else if (k == "hash_seed") {
    encoder.hash_seed = ParseNumber<uint64_t>(key, value);
  } else if (k == "worker_command") {
    encoder.worker_command = std::string(value);
  } else if (k == "pretrained_name") {
    encoder.pretrained_name = std::string(value);
  } else if (k == "head_layers") {
    head.layers = ParseNumber<int>(key, value);
  } else if (k == "head_hidden_dim") {
    head.hidden_dim = ParseNumber<int>(key, value);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + k + "'");
  }
}

TrainConfig TrainConfig::FromText(std::string_view text) {
  TrainConfig config;
  int line_no = 0;
  for (const std::string& raw : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = TrimWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + " is not 'key = value'");
    }
    config.Set(TrimWhitespace(line.substr(0, eq)), TrimWhitespace(line.substr(eq + 1)));
  }
  ValidateConfig(config);
  return config;
}

TrainConfig TrainConfig::FromFile(const std::filesystem::path& path) { return FromText(ReadFile(path)); }

std::string TrainConfig::ToText() const {
  std::ostringstream out;
  out << "epochs = " << epochs << "\n"
      << "batch_size = " << batch_size << "\n"
      << "learning_rate = " << FormatDouble(learning_rate) << "\n"
      << "seed = " << seed << "\n"
      << "ablate_reframing = " << Bool(ablate_reframing) << "\n"
      << "ablate_attribution = " << Bool(ablate_attribution) << "\n"
      << "tone_set = " << ToneSetLabel(tone_set) << "\n"
      << "loss_weight_style = " << FormatDouble(loss_weights.style) << "\n"
      << "loss_weight_news = " << FormatDouble(loss_weights.news) << "\n"
      << "loss_weight_attr = " << FormatDouble(loss_weights.attr) << "\n"
      << "kl_direction = " << KlDirectionName(kl_direction) << "\n"
      << "resample_per_epoch = " << Bool(resample_per_epoch) << "\n"
      << "encoder = " << EncoderKindName(encoder.kind) << "\n"
      << "max_sequence_tokens = " << encoder.max_sequence_tokens << "\n"
      << "embedding_dim = " << encoder.embedding_dim << "\n"
      << "hash_buckets = " << encoder.hash_buckets << "\n"
      << "max_ngram = " << encoder.max_ngram << "\n"
      << "hash_seed = " << encoder.hash_seed << "\n"
      << "worker_command = " << encoder.worker_command << "\n"
      << "pretrained_name = " << encoder.pretrained_name << "\n"
      << "head_layers = " << head.layers << "\n"
      << "head_hidden_dim = " << head.hidden_dim << "\n";
  return out.str();
}

std::string TrainConfig::Hash() const { return Sha256Hex(ToText()).substr(0, 16); }

// ---------------------------------------------------------------------------
// Loss trace

std::string LossTraceCsv(const std::vector<LossTraceRow>& trace) {
  std::string out = "epoch,batch,style,news,attr,total\n";
  for (const auto& r : trace) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.batch) + "," + FormatDouble(r.loss.style) +
           "," + FormatDouble(r.loss.news) + "," + FormatDouble(r.loss.attr) + "," +
           FormatDouble(r.loss.total) + "\n";
  }
  return out;
}

void WriteLossTraceCsv(const std::vector<LossTraceRow>& trace, const std::filesystem::path& path) {
  WriteFileAtomic(path, LossTraceCsv(trace));
}

std::vector<double> EpochMeanTotals(const std::vector<LossTraceRow>& trace) {
  std::vector<double> sums;
  std::vector<int> counts;
  for (const auto& r : trace) {
    if (static_cast<size_t>(r.epoch) > sums.size()) {
      sums.resize(r.epoch, 0.0);
      counts.resize(r.epoch, 0);
    }
    sums[r.epoch - 1] += r.loss.total;
    counts[r.epoch - 1] += 1;
  }
  for (size_t i = 0; i < sums.size(); ++i) sums[i] /= std::max(counts[i], 1);
  return sums;
}

// ---------------------------------------------------------------------------
// Adam

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamOptimizer::Step(const std::vector<ParamView>& params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.size(), 0.0);
      v_.emplace_back(p.value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw Error(ErrorCode::kInvalidArgument, "optimizer parameter list changed");
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, steps_);
  const double bc2 = 1.0 - std::pow(beta2_, steps_);
  const double step_size = learning_rate_ / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);
  for (size_t i = 0; i < params.size(); ++i) {
    double* value = params[i].value.data();
    const double* grad = params[i].grad.data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    const size_t n = params[i].value.size();
    for (size_t k = 0; k < n; ++k) {
      const double g = grad[k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
      value[k] -= step_size * m[k] / (std::sqrt(v[k]) / sqrt_bc2 + epsilon_);
    }
  }
}

// ---------------------------------------------------------------------------
// Batch objective

LossComponents ComputeBatchLoss(DetectorModel& model, const TrainConfig& config,
                                std::span<const TrainingExample> batch, bool accumulate_grads) {
  const size_t b = batch.size();
  if (b == 0) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  const bool use_reframing = !config.ablate_reframing;
  const bool use_attribution = !config.ablate_attribution;
  const size_t slots = use_reframing ? 3 : 1;
  const LossWeights& w = config.loss_weights;

  // Column layout: originals, then reliable reframings, then unreliable.
  std::vector<const EncoderInput*> inputs;
  std::vector<const AttributionVector*> targets;
  inputs.reserve(b * slots);
  for (size_t slot = 0; slot < slots; ++slot) {
    for (const TrainingExample& ex : batch) {
      const EncoderInput* in = slot == 0 ? ex.original : slot == 1 ? ex.reliable : ex.unreliable;
      const AttributionVector* t =
          slot == 0 ? ex.original_bits : slot == 1 ? ex.reliable_bits : ex.unreliable_bits;
      if (in == nullptr || (use_attribution && t == nullptr)) {
        throw Error(ErrorCode::kInvalidArgument, "training example lacks an input required by the config");
      }
      inputs.push_back(in);
      targets.push_back(t);
    }
  }

  const Eigen::MatrixXd hs = model.encoder().Encode(inputs);
  const size_t cols = inputs.size();
  std::vector<Head::Trace> vtrace(cols), atrace(cols);
  std::vector<Eigen::VectorXd> y(cols), s(cols), gy(cols), gs(cols);
  for (size_t j = 0; j < cols; ++j) {
    const Eigen::VectorXd h = hs.col(static_cast<Eigen::Index>(j));
    y[j] = model.veracity_head().Forward(h, &vtrace[j]);
    if (use_attribution) s[j] = model.attribution_head().Forward(h, &atrace[j]);
  }

  const double inv_b = 1.0 / static_cast<double>(b);
  const double news_scale = w.news / static_cast<double>(b);
  const double style_scale = w.style / static_cast<double>(b);
  const double attr_scale = w.attr / static_cast<double>(b);
  double news_sum = 0.0, style_sum = 0.0, attr_sum = 0.0;
  for (size_t i = 0; i < b; ++i) {
    Eigen::VectorXd g;
    news_sum += DetectionLoss(y[i], batch[i].label, &g);
    gy[i] = news_scale * g;
    if (use_reframing) {
      Eigen::VectorXd go, gr, gu;
      style_sum += StyleAlignmentLoss(y[i], y[b + i], y[2 * b + i], config.kl_direction, &go, &gr, &gu);
      gy[i] += style_scale * go;
      gy[b + i] = style_scale * gr;
      gy[2 * b + i] = style_scale * gu;
    }
    if (use_attribution) {
      std::vector<const Eigen::VectorXd*> lg;
      std::vector<const AttributionVector*> tg;
      for (size_t slot = 0; slot < slots; ++slot) {
        lg.push_back(&s[slot * b + i]);
        tg.push_back(targets[slot * b + i]);
      }
      std::vector<Eigen::VectorXd> ga;
      attr_sum += AttributionLoss(lg, tg, &ga);
      for (size_t slot = 0; slot < slots; ++slot) gs[slot * b + i] = attr_scale * ga[slot];
    }
  }
  LossComponents loss;
  loss.news = news_sum * inv_b;
  loss.style = style_sum * inv_b;
  loss.attr = attr_sum * inv_b;
  loss.total = CombineLosses(loss.style, loss.news, loss.attr, w);
  if (!accumulate_grads) return loss;

  Eigen::MatrixXd grad_h(hs.rows(), hs.cols());
  for (size_t j = 0; j < cols; ++j) {
    Eigen::VectorXd g = model.veracity_head().Backward(vtrace[j], gy[j]);
    if (use_attribution) g += model.attribution_head().Backward(atrace[j], gs[j]);
    grad_h.col(static_cast<Eigen::Index>(j)) = g;
  }
  model.encoder().Backward(inputs, grad_h);
  return loss;
}

// ---------------------------------------------------------------------------
// Joint trainer

TrainResult Train(const TrainConfig& config, const std::vector<NewsArticle>& articles,
                  const ReframingStore* reframings, const PseudoLabelStore* labels) {
  ValidateConfig(config);
  ValidateArticles(articles);
  if (!config.ablate_reframing && reframings == nullptr) {
    throw Error(ErrorCode::kMissingArtifact,
                "training needs reframings unless reframing is ablated");
  }
  if (!config.ablate_attribution && labels == nullptr) {
    throw Error(ErrorCode::kMissingArtifact,
                "training needs attribution pseudo-labels unless attribution is ablated");
  }

  TrainResult result;
  result.model = NewModel(config);
  DetectorModel& model = *result.model;
  TextEncoder& encoder = model.encoder();
  const std::vector<Example> examples = PrepareExamples(config, encoder, articles, reframings, labels);
  const ToneSet tone_set = MakeToneSet(config.tone_set);
  const bool use_reframing = !config.ablate_reframing;
  const bool use_attribution = !config.ablate_attribution;

  Rng pair_rng(config.seed ^ kPairStream);
  std::vector<std::pair<Tone, Tone>> pairs(examples.size());
  auto on_epoch = [&](int epoch) {
    if (!use_reframing || (epoch > 1 && !config.resample_per_epoch)) return;
    for (size_t i = 0; i < examples.size(); ++i) {
      const ReframingPair p = SampleTrainingPair(*reframings, examples[i].article->id, tone_set, pair_rng);
      pairs[i] = {p.reliable->tone, p.unreliable->tone};
    }
  };

  AdamOptimizer adam(config.learning_rate);
  const std::vector<ParamView> params = model.Parameters();
  encoder.SetTraining(true);

  auto step = [&](const std::vector<size_t>& batch) {
    std::vector<TrainingExample> items;
    items.reserve(batch.size());
    for (size_t idx : batch) {
      const Example& ex = examples[idx];
      TrainingExample item;
      item.label = ex.article->label;
      item.original = &ex.original;
      if (use_attribution) item.original_bits = &ex.original_bits;
      if (use_reframing) {
        item.reliable = &ex.reframed.at(pairs[idx].first);
        item.unreliable = &ex.reframed.at(pairs[idx].second);
        if (use_attribution) {
          item.reliable_bits = &ex.reframed_bits.at(pairs[idx].first);
          item.unreliable_bits = &ex.reframed_bits.at(pairs[idx].second);
        }
      }
      items.push_back(item);
    }
    for (const auto& p : params) std::fill(p.grad.begin(), p.grad.end(), 0.0);
    const LossComponents loss = ComputeBatchLoss(model, config, items, true);
    adam.Step(params);
    encoder.Step(config.learning_rate);
    return loss;
  };

  RunEpochs(config, examples.size(), on_epoch, step, result.trace);
  encoder.SetTraining(false);
  return result;
}

// ---------------------------------------------------------------------------
// Plain cross-entropy reference

TrainResult TrainCrossEntropy(const TrainConfig& config, const std::vector<NewsArticle>& articles) {
  ValidateConfig(config);
  ValidateArticles(articles);
  TrainConfig effective = config;
  effective.ablate_reframing = true;
  effective.ablate_attribution = true;

  TrainResult result;
  result.model = NewModel(effective);
  DetectorModel& model = *result.model;
  TextEncoder& encoder = model.encoder();
  std::vector<EncoderInput> prepared;
  prepared.reserve(articles.size());
  for (const auto& a : articles) prepared.push_back(encoder.Prepare(a.text));

  AdamOptimizer adam(config.learning_rate);
  const std::vector<ParamView> params = model.Parameters();
  encoder.SetTraining(true);

  auto step = [&](const std::vector<size_t>& batch) {
    std::vector<const EncoderInput*> inputs;
    for (size_t idx : batch) inputs.push_back(&prepared[idx]);
    for (const auto& p : params) std::fill(p.grad.begin(), p.grad.end(), 0.0);
    const Eigen::MatrixXd hs = encoder.Encode(inputs);
    const double scale = 1.0 / static_cast<double>(batch.size());
    double sum = 0.0;
    Eigen::MatrixXd grad_h(hs.rows(), hs.cols());
    for (size_t j = 0; j < batch.size(); ++j) {
      Head::Trace trace;
      const Eigen::VectorXd logits = model.veracity_head().Forward(hs.col(static_cast<Eigen::Index>(j)), &trace);
      Eigen::VectorXd g;
      sum += DetectionLoss(logits, articles[batch[j]].label, &g);
      grad_h.col(static_cast<Eigen::Index>(j)) = model.veracity_head().Backward(trace, scale * g);
    }
    encoder.Backward(inputs, grad_h);
    adam.Step(params);
    encoder.Step(config.learning_rate);
    LossComponents loss;
    loss.news = sum * scale;
    loss.total = loss.news;
    return loss;
  };

  RunEpochs(effective, articles.size(), [](int) {}, step, result.trace);
  encoder.SetTraining(false);
  return result;
}

}  // namespace sheepdog
