#include "idepnn/sequence.hpp"

#include <cmath>

#include "idepnn/errors.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

namespace {

Eigen::MatrixXd fan_uniform(int rows, int cols, Rng& rng) {
  const double scale = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
  }
  return m;
}

}  // namespace

SequenceParams init_sequence_params(int input_dim, int hidden_dim, int label_count,
                                    std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || label_count < 1) {
    throw DataError("init_sequence_params: dimensions must be positive");
  }
  Rng rng(seed);
  SequenceParams params;
  params.input_transform = fan_uniform(hidden_dim, input_dim, rng);
  params.recurrent = Eigen::MatrixXd::Identity(hidden_dim, hidden_dim);
  params.output_transform = fan_uniform(label_count, hidden_dim, rng);
  params.output_bias = Eigen::VectorXd::Zero(label_count);
  return params;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - peak).exp();
  return e / e.sum();
}

int argmax_label(const Eigen::VectorXd& distribution) {
  int best = 0;
  for (int i = 1; i < distribution.size(); ++i) {
    if (distribution[i] > distribution[best]) best = i;
  }
  return best;
}

EncoderStates sequence_forward(const std::vector<Eigen::VectorXd>& inputs,
                               const SequenceParams& params) {
  const int n = static_cast<int>(inputs.size());
  if (n == 0) throw DataError("sequence_forward: empty input sequence");
  const int in_dim = params.input_dim();
  const int hidden = params.hidden_dim();
  for (const Eigen::VectorXd& v : inputs) {
    if (v.size() != in_dim) {
      throw InternalError("sequence_forward: input dimension " + std::to_string(v.size()) +
                          " does not match V (" + std::to_string(in_dim) + ")");
    }
  }

  EncoderStates st;
  st.inputs = inputs;
  st.forward_h.resize(n);
  st.backward_h.resize(n);
  st.combined_h.resize(n);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(hidden);

  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd& prev = t > 0 ? st.forward_h[t - 1] : zero;
    st.forward_h[t] =
        (params.input_transform * inputs[t] + params.recurrent * prev).array().tanh();
  }
  for (int t = n - 1; t >= 0; --t) {
    const Eigen::VectorXd& next = t + 1 < n ? st.backward_h[t + 1] : zero;
    st.backward_h[t] =
        (params.input_transform * inputs[t] + params.recurrent * next).array().tanh();
  }
  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd& prev = t > 0 ? st.combined_h[t - 1] : zero;
    st.combined_h[t] =
        (st.forward_h[t] + st.backward_h[t] + params.recurrent * prev).array().tanh();
  }
  if (!st.combined_h.back().allFinite()) {
    throw InternalError("numeric overflow in sequence encoder");
  }
  st.distribution = softmax(params.output_transform * st.combined_h.back() + params.output_bias);
  return st;
}

SequenceGrads SequenceGrads::zeros_like(const SequenceParams& params, int length) {
  SequenceGrads g;
  g.input_transform = Eigen::MatrixXd::Zero(params.input_transform.rows(),
                                            params.input_transform.cols());
  g.recurrent = Eigen::MatrixXd::Zero(params.recurrent.rows(), params.recurrent.cols());
  g.output_transform = Eigen::MatrixXd::Zero(params.output_transform.rows(),
                                             params.output_transform.cols());
  g.output_bias = Eigen::VectorXd::Zero(params.output_bias.size());
  g.inputs.assign(length, Eigen::VectorXd::Zero(params.input_dim()));
  return g;
}

SequenceGrads sequence_backward(const EncoderStates& states, int gold_label,
                                const SequenceParams& params) {
  const int n = states.length();
  if (gold_label < 0 || gold_label >= params.label_count()) {
    throw DataError("sequence_backward: gold label " + std::to_string(gold_label) +
                    " not in label list of size " + std::to_string(params.label_count()));
  }
  SequenceGrads g = SequenceGrads::zeros_like(params, n);

  // Softmax + cross-entropy head: dL/dlogits = y - onehot(gold).
  Eigen::VectorXd dlogits = states.distribution;
  dlogits[gold_label] -= 1.0;
  g.output_transform = dlogits * states.final_state().transpose();
  g.output_bias = dlogits;

  const int hidden = params.hidden_dim();
  std::vector<Eigen::VectorXd> d_forward(n, Eigen::VectorXd::Zero(hidden));
  std::vector<Eigen::VectorXd> d_backward(n, Eigen::VectorXd::Zero(hidden));
  std::vector<Eigen::VectorXd> d_combined(n, Eigen::VectorXd::Zero(hidden));
  d_combined[n - 1] = params.output_transform.transpose() * dlogits;

  // Combination chain, walked from the end so each d_combined is complete.
  for (int t = n - 1; t >= 0; --t) {
    const Eigen::VectorXd dz =
        (d_combined[t].array() * (1.0 - states.combined_h[t].array().square())).matrix();
    d_forward[t] += dz;
    d_backward[t] += dz;
    if (t > 0) {
      g.recurrent += dz * states.combined_h[t - 1].transpose();
      d_combined[t - 1] += params.recurrent.transpose() * dz;
    }
  }
  // Forward chain.
  for (int t = n - 1; t >= 0; --t) {
    const Eigen::VectorXd dz =
        (d_forward[t].array() * (1.0 - states.forward_h[t].array().square())).matrix();
    g.input_transform += dz * states.inputs[t].transpose();
    g.inputs[t] += params.input_transform.transpose() * dz;
    if (t > 0) {
      g.recurrent += dz * states.forward_h[t - 1].transpose();
      d_forward[t - 1] += params.recurrent.transpose() * dz;
    }
  }
  // Backward chain runs right-to-left, so its gradient flows left-to-right.
  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd dz =
        (d_backward[t].array() * (1.0 - states.backward_h[t].array().square())).matrix();
    g.input_transform += dz * states.inputs[t].transpose();
    g.inputs[t] += params.input_transform.transpose() * dz;
    if (t + 1 < n) {
      g.recurrent += dz * states.backward_h[t + 1].transpose();
      d_backward[t + 1] += params.recurrent.transpose() * dz;
    }
  }
  return g;
}

}  // namespace idepnn
