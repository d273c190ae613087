#include "r2f/model.hpp"

#include <algorithm>
#include <cmath>

#include "r2f/error.hpp"
#include "r2f/random.hpp"

namespace r2f {

void ModelConfig::validate() const {
  if (reader.inference_dim == 0) throw Error(ErrorCode::kValidation, "inference dimension must be >= 1");
  if (evidence_slots == 0) throw Error(ErrorCode::kValidation, "evidence slots must be >= 1");
  if (!(init_scale > 0.0)) throw Error(ErrorCode::kValidation, "init scale must be > 0");
  if (fusion == FusionMethod::kKernel) {
    if (kernel_count == 0) throw Error(ErrorCode::kValidation, "kernel count must be >= 1");
    if (!(kernel_width > 0.0)) throw Error(ErrorCode::kValidation, "kernel width must be > 0");
  }
}

Model Model::create(const ModelConfig& config, Rng& rng) {
  config.validate();
  Model model;
  model.reader = ReaderParams::create(config.reader);
  model.reader.init_uniform(rng, config.init_scale, false);
  model.fusion = config.fusion;
  model.features.evidence_slots = config.evidence_slots;
  if (config.fusion == FusionMethod::kKernel) {
    model.bank = config.random_kernel_means
                     ? KernelBank::uniform(config.kernel_count, config.kernel_width, rng)
                     : KernelBank::linspace(config.kernel_count, config.kernel_width);
    std::vector<std::size_t> widths{config.kernel_count};
    widths.insert(widths.end(), config.kernel_head_hidden.begin(), config.kernel_head_hidden.end());
    widths.push_back(1);
    model.kernel_head = Mlp(widths, Activation::kIdentity);
    model.kernel_head.init_uniform(rng, config.init_scale, false);
  }
  return model;
}

Model Model::zeros_like() const {
  Model out = *this;
  out.reader.encoder.zero();
  out.reader.head.zero();
  out.kernel_head.zero();
  return out;
}

std::vector<TensorRef> Model::tensors() {
  std::vector<TensorRef> out;
  reader.encoder.append_tensors("reader.encoder", out);
  reader.head.append_tensors("reader.head", out);
  if (!kernel_head.empty()) kernel_head.append_tensors("fusion.kernel_head", out);
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Mlp* mlp : {&reader.encoder, &reader.head, &kernel_head}) {
    for (const auto& layer : mlp->layers()) n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

void Model::validate() const {
  reader.validate();
  if (fusion == FusionMethod::kKernel) {
    bank.validate();
    if (kernel_head.input_dim() != bank.size() || kernel_head.output_dim() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "kernel head does not match the kernel bank");
    }
  }
}

void GradientTape::zero() {
  for (auto& t : tensors()) std::fill(t.values->begin(), t.values->end(), 0.0);
}

void GradientTape::scale(double factor) {
  for (auto& t : tensors()) {
    for (auto& v : *t.values) v *= factor;
  }
}

ForwardPass forward(const Model& model, const PreparedSample& sample) {
  if (sample.sentences.empty()) {
    throw Error(ErrorCode::kEmptyHypothesis, "sample '" + sample.id + "' has no hypothesis sentences");
  }
  const std::size_t m = sample.sentences.size();
  ForwardPass pass;
  pass.sentence_scores.resize(m);
  pass.vectors.resize(m);
  pass.encoder_traces.resize(m);
  pass.head_traces.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const PreparedSentence& s = sample.sentences[i];
    if (s.is_substring) {
      pass.sentence_scores[i] = 1.0;
      pass.vectors[i] = substring_sentinel(model.reader.inference_dim());
      continue;
    }
    pass.vectors[i] = encode_features(s.features, model.reader, &pass.encoder_traces[i]);
    pass.sentence_scores[i] =
        sigmoid(credibility_logit(pass.vectors[i], model.reader, &pass.head_traces[i]));
  }
  switch (model.fusion) {
    case FusionMethod::kScoreMin:
      pass.fusion = fuse_score_min(pass.sentence_scores);
      break;
    case FusionMethod::kVectorMin:
      pass.fusion = fuse_vector_min(pass.vectors, model.reader.head, pass.sentence_scores);
      model.reader.head.forward(pass.fusion.pooled, &pass.fusion_trace);
      break;
    case FusionMethod::kKernel:
      for (double score : pass.sentence_scores) {
        pass.kernel_vectors.push_back(kernel_vector(score, model.bank));
      }
      pass.fusion = fuse_kernel(pass.sentence_scores, model.bank, model.kernel_head);
      model.kernel_head.forward(pass.fusion.pooled, &pass.fusion_trace);
      break;
  }
  return pass;
}

namespace {

// Pushes d(loss)/d(score_i) of one read sentence through head and encoder.
void backward_sentence(const Model& model, const ForwardPass& pass, std::size_t i,
                       double grad_score, GradientTape& tape) {
  const double s = pass.sentence_scores[i];
  const double grad_logit = grad_score * s * (1.0 - s);
  const auto grad_h =
      model.reader.head.backward(pass.head_traces[i], {&grad_logit, 1}, tape.grads.reader.head);
  model.reader.encoder.backward(pass.encoder_traces[i], grad_h, tape.grads.reader.encoder);
}

bool is_read(const ForwardPass& pass, std::size_t i) {
  return !pass.encoder_traces[i].activations.empty();
}

}  // namespace

void backward(const Model& model, const ForwardPass& pass, double grad_score, GradientTape& tape) {
  if (grad_score == 0.0) return;
  const std::size_t m = pass.sentence_scores.size();
  switch (model.fusion) {
    case FusionMethod::kScoreMin: {
      const std::size_t a = *pass.fusion.argmin_index;
      if (is_read(pass, a)) backward_sentence(model, pass, a, grad_score, tape);
      break;
    }
    case FusionMethod::kVectorMin: {
      const double s = pass.fusion.sample_score;
      const double grad_logit = grad_score * s * (1.0 - s);
      const auto grad_pooled =
          model.reader.head.backward(pass.fusion_trace, {&grad_logit, 1}, tape.grads.reader.head);
      std::vector<std::vector<double>> grad_h(m);
      for (std::size_t j = 0; j < grad_pooled.size(); ++j) {
        const std::size_t owner = pass.fusion.pooled_argmin[j];
        if (!is_read(pass, owner)) continue;
        if (grad_h[owner].empty()) grad_h[owner].assign(grad_pooled.size(), 0.0);
        grad_h[owner][j] += grad_pooled[j];
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (grad_h[i].empty()) continue;
        model.reader.encoder.backward(pass.encoder_traces[i], grad_h[i], tape.grads.reader.encoder);
      }
      break;
    }
    case FusionMethod::kKernel: {
      const double s = pass.fusion.sample_score;
      const double grad_logit = grad_score * s * (1.0 - s);
      const auto grad_pooled =
          model.kernel_head.backward(pass.fusion_trace, {&grad_logit, 1}, tape.grads.kernel_head);
      const double inv_m = 1.0 / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (!is_read(pass, i)) continue;
        const double score = pass.sentence_scores[i];
        double grad = 0.0;
        for (std::size_t j = 0; j < model.bank.size(); ++j) {
          const double sigma = model.bank.widths[j];
          grad += grad_pooled[j] * inv_m * pass.kernel_vectors[i][j] *
                  (-(score - model.bank.means[j]) / (sigma * sigma));
        }
        backward_sentence(model, pass, i, grad, tape);
      }
      break;
    }
  }
}

double bce_loss(double score, bool label) {
  const double p = std::clamp(score, kLossClamp, 1.0 - kLossClamp);
  return label ? -std::log(p) : -std::log(1.0 - p);
}

double bce_grad(double score, bool label) {
  if (score < kLossClamp || score > 1.0 - kLossClamp) return 0.0;
  return label ? -1.0 / score : 1.0 / (1.0 - score);
}

}  // namespace r2f
