#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "retecs/errors.hpp"
#include "retecs/rng.hpp"

namespace retecs {

// Single hidden layer regressor: tanh hidden units, linear output.
//
//   hidden_j = tanh(sum_i hidden_weights[j, i] * x_i + hidden_bias_j)
//   output   = sum_j output_weights_j * hidden_j + output_bias
struct NetworkMemory {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  std::vector<double> hidden_weights;  // hidden_size x input_size, row-major
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
  double exploration_rate = 0.1;  // sigma of the Gaussian action noise
  double learning_rate = 0.05;

  bool operator==(const NetworkMemory&) const = default;

  NetworkMemory() = default;

  // All parameters zero.
  NetworkMemory(std::size_t inputs, std::size_t hidden)
      : input_size(inputs),
        hidden_size(hidden),
        hidden_weights(inputs * hidden, 0.0),
        hidden_bias(hidden, 0.0),
        output_weights(hidden, 0.0) {
    if (inputs == 0 || hidden == 0) {
      throw PreconditionError("network needs at least one input and hidden unit");
    }
  }

  // Every layer drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static NetworkMemory initialized(std::size_t inputs, std::size_t hidden,
                                   Rng& rng) {
    NetworkMemory net(inputs, hidden);
    const double a = 1.0 / std::sqrt(static_cast<double>(inputs));
    for (double& w : net.hidden_weights) w = rng.uniform(-a, a);
    for (double& b : net.hidden_bias) b = rng.uniform(-a, a);
    const double c = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& w : net.output_weights) w = rng.uniform(-c, c);
    net.output_bias = rng.uniform(-c, c);
    return net;
  }

  std::size_t parameter_count() const {
    return hidden_weights.size() + hidden_bias.size() + output_weights.size() + 1;
  }

  // Flat layout: hidden weights, hidden biases, output weights, output bias.
  std::vector<double> parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    flat.insert(flat.end(), hidden_weights.begin(), hidden_weights.end());
    flat.insert(flat.end(), hidden_bias.begin(), hidden_bias.end());
    flat.insert(flat.end(), output_weights.begin(), output_weights.end());
    flat.push_back(output_bias);
    return flat;
  }

  void set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
      throw PreconditionError("parameter vector has the wrong length");
    }
    auto it = flat.begin();
    for (double& w : hidden_weights) w = *it++;
    for (double& b : hidden_bias) b = *it++;
    for (double& w : output_weights) w = *it++;
    output_bias = *it;
  }

  bool finite() const {
    for (double v : parameters()) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

namespace detail {

inline void check_input(const NetworkMemory& net, std::span<const double> state) {
  if (state.size() != net.input_size) {
    throw PreconditionError("network expects " + std::to_string(net.input_size) +
                            " inputs, got " + std::to_string(state.size()));
  }
}

// Fills `hidden` with the activations and returns the output.
inline double forward(const NetworkMemory& net, std::span<const double> state,
                      std::span<double> hidden) {
  double out = net.output_bias;
  for (std::size_t j = 0; j < net.hidden_size; ++j) {
    const double* row = net.hidden_weights.data() + j * net.input_size;
    double z = net.hidden_bias[j];
    for (std::size_t i = 0; i < net.input_size; ++i) z += row[i] * state[i];
    hidden[j] = std::tanh(z);
    out += net.output_weights[j] * hidden[j];
  }
  return out;
}

}  // namespace detail

inline double network_forward(const NetworkMemory& net,
                              std::span<const double> state) {
  detail::check_input(net, state);
  std::vector<double> hidden(net.hidden_size);
  return detail::forward(net, state, hidden);
}

// Policy output plus N(0, sigma^2) exploration noise. Always consumes two
// draws so the rng stream does not depend on sigma.
inline double network_act(const NetworkMemory& net, std::span<const double> state,
                          Rng& rng) {
  if (!(net.exploration_rate >= 0.0)) {
    throw PreconditionError("exploration rate must be non-negative");
  }
  const double noise = rng.normal();
  return network_forward(net, state) + net.exploration_rate * noise;
}

struct Experience {
  std::vector<double> state;
  double action = 0.0;  // priority that was actually emitted
  double reward = 0.0;

  bool operator==(const Experience&) const = default;
};

// Mean squared error over the batch, halved: 1/(2N) * sum (output - reward)^2.
inline double network_loss(const NetworkMemory& net,
                           std::span<const Experience> batch) {
  if (batch.empty()) throw PreconditionError("empty batch");
  double sum = 0.0;
  for (const auto& e : batch) {
    const double err = network_forward(net, e.state) - e.reward;
    sum += err * err;
  }
  return sum / (2.0 * static_cast<double>(batch.size()));
}

// Backpropagated gradient of network_loss, in the flat parameter layout.
inline std::vector<double> loss_gradient(const NetworkMemory& net,
                                         std::span<const Experience> batch) {
  if (batch.empty()) throw PreconditionError("empty batch");
  const std::size_t n_in = net.input_size;
  const std::size_t n_hidden = net.hidden_size;
  const std::size_t off_hb = n_hidden * n_in;
  const std::size_t off_ow = off_hb + n_hidden;
  const std::size_t off_ob = off_ow + n_hidden;
  std::vector<double> grad(net.parameter_count(), 0.0);
  std::vector<double> hidden(n_hidden);
  const double scale = 1.0 / static_cast<double>(batch.size());

  for (const auto& e : batch) {
    detail::check_input(net, e.state);
    const double err = (detail::forward(net, e.state, hidden) - e.reward) * scale;
    grad[off_ob] += err;
    for (std::size_t j = 0; j < n_hidden; ++j) {
      grad[off_ow + j] += err * hidden[j];
      const double dz = err * net.output_weights[j] * (1.0 - hidden[j] * hidden[j]);
      grad[off_hb + j] += dz;
      double* row = grad.data() + j * n_in;
      for (std::size_t i = 0; i < n_in; ++i) row[i] += dz * e.state[i];
    }
  }
  return grad;
}

// One stochastic gradient descent pass: a step of size learning_rate on each
// experience's squared error, in batch order. The reward is the regression
// target; the stored action does not enter the loss.
inline void network_train(NetworkMemory& net, std::span<const Experience> batch) {
  if (batch.empty()) throw PreconditionError("empty batch");
  const std::size_t n_in = net.input_size;
  std::vector<double> hidden(net.hidden_size);
  for (const auto& e : batch) {
    detail::check_input(net, e.state);
    const double err =
        (detail::forward(net, e.state, hidden) - e.reward) * net.learning_rate;
    for (std::size_t j = 0; j < net.hidden_size; ++j) {
      const double dz = err * net.output_weights[j] * (1.0 - hidden[j] * hidden[j]);
      net.output_weights[j] -= err * hidden[j];
      net.hidden_bias[j] -= dz;
      double* row = net.hidden_weights.data() + j * n_in;
      for (std::size_t i = 0; i < n_in; ++i) row[i] -= dz * e.state[i];
    }
    net.output_bias -= err;
  }
  if (!net.finite()) throw Error("network weights diverged during training");
}

// Bounded FIFO of experiences; the oldest entry is evicted first.
struct ReplayBuffer {
  std::size_t capacity = 10000;
  std::size_t batch_size = 1000;
  std::deque<Experience> experiences;

  bool operator==(const ReplayBuffer&) const = default;

  ReplayBuffer(std::size_t cap = 10000, std::size_t batch = 1000)
      : capacity(cap), batch_size(batch) {
    if (cap == 0 || batch == 0) {
      throw PreconditionError("replay capacity and batch size must be positive");
    }
  }

  std::size_t size() const { return experiences.size(); }
};

inline void replay_store(ReplayBuffer& buffer, Experience experience) {
  if (buffer.experiences.size() == buffer.capacity) buffer.experiences.pop_front();
  buffer.experiences.push_back(std::move(experience));
}

// min(batch_size, size) experiences drawn uniformly without replacement.
inline std::vector<Experience> replay_sample(const ReplayBuffer& buffer, Rng& rng) {
  const std::size_t n = buffer.experiences.size();
  const std::size_t k = std::min(buffer.batch_size, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Experience> batch;
  batch.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + rng.index(n - i)]);
    batch.push_back(buffer.experiences[idx[i]]);
  }
  return batch;
}

}  // namespace retecs
