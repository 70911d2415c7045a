#include <cmath>

#include "transnet/domain_unification.hpp"

namespace transnet::unification {

const char* to_string(Domain d) { return d == Domain::source ? "source" : "target"; }

Matrix glorot_uniform(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(static_cast<compute::Index>(in_dim), static_cast<compute::Index>(out_dim));
  for (compute::Index r = 0; r < w.rows(); ++r) {
    for (compute::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
  }
  return w;
}

Linear::Linear(const std::string& name, std::size_t in_dim, std::size_t out_dim, Rng& rng)
    : weight(name + ".weight", glorot_uniform(in_dim, out_dim, rng)),
      bias(name + ".bias", Matrix::Zero(1, static_cast<compute::Index>(out_dim))) {}

Tensor Linear::operator()(const Tensor& x) const { return compute::linear(x, weight, bias); }

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

FeatureEncoder::FeatureEncoder(const std::string& name, std::size_t feature_dim,
                               std::size_t unified_dim, Rng& rng)
    : hidden(name + ".hidden", feature_dim, unified_dim, rng),
      output(name + ".output", unified_dim, unified_dim, rng) {}

Tensor FeatureEncoder::forward(const Tensor& features) const {
  return output(compute::relu(hidden(features)));
}

void FeatureEncoder::collect(std::vector<Parameter*>& out) {
  hidden.collect(out);
  output.collect(out);
}

Propagator::Propagator(const graph::Matrix& a_hat)
    : op_(std::make_shared<const compute::SparseMatrix>(a_hat.sparseView())) {
  if (a_hat.rows() != a_hat.cols()) throw compute::ShapeError("propagator must be square");
}

Propagator Propagator::for_graph(const graph::LabeledGraph& g) {
  return Propagator(graph::normalized_adjacency(g));
}

SharedGnn::SharedGnn(const std::string& name, std::size_t in_dim,
                     const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.empty()) throw std::invalid_argument("SharedGnn needs at least one layer");
  std::size_t prev = in_dim;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    weights.emplace_back(name + ".layer" + std::to_string(l) + ".weight",
                         glorot_uniform(prev, dims[l], rng));
    prev = dims[l];
  }
}

std::size_t SharedGnn::in_dim() const { return static_cast<std::size_t>(weights.front().value().rows()); }
std::size_t SharedGnn::out_dim() const { return static_cast<std::size_t>(weights.back().value().cols()); }

Tensor SharedGnn::forward(const Tensor& h, const Propagator& a_hat) const {
  if (static_cast<std::size_t>(h.rows()) != a_hat.size()) {
    throw compute::ShapeError("encode_structure: " + std::to_string(h.rows()) +
                              " node rows but propagator of size " + std::to_string(a_hat.size()));
  }
  Tensor x = h;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    x = compute::propagate(a_hat.op(), compute::matmul(x, weights[l].tensor()));
    if (l + 1 < weights.size()) x = compute::relu(x);
  }
  return x;
}

void SharedGnn::collect(std::vector<Parameter*>& out) {
  for (auto& w : weights) out.push_back(&w);
}

DomainDiscriminator::DomainDiscriminator(const std::string& name, std::size_t input_dim, Rng& rng)
    : hidden(name + ".hidden", input_dim, kHiddenWidth, rng),
      output(name + ".output", kHiddenWidth, 1, rng) {}

Tensor DomainDiscriminator::logits(const Tensor& x) const {
  return output(compute::relu(hidden(compute::tanh(x))));
}

void DomainDiscriminator::collect(std::vector<Parameter*>& out) {
  hidden.collect(out);
  output.collect(out);
}

}  // namespace transnet::unification
