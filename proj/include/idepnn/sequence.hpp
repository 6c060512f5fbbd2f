#ifndef IDEPNN_SEQUENCE_HPP
#define IDEPNN_SEQUENCE_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace idepnn {

// Bidirectional recurrent encoder with a combination layer and softmax head.
// One recurrent matrix W is shared by the forward pass, the backward pass and
// the combination recurrence:
//   hf_t = tanh(V i_t + W hf_{t-1})
//   hb_t = tanh(V i_t + W hb_{t+1})        (right-to-left scan)
//   h_t  = tanh(hf_t + hb_t + W h_{t-1})
// with zero boundary states, and y = softmax(U h_N + b_y).
struct SequenceParams {
  Eigen::MatrixXd input_transform;   // V: hidden x input_dim
  Eigen::MatrixXd recurrent;         // W: hidden x hidden, shared three ways
  Eigen::MatrixXd output_transform;  // U: labels x hidden
  Eigen::VectorXd output_bias;       // b_y

  int hidden_dim() const { return static_cast<int>(recurrent.rows()); }
  int input_dim() const { return static_cast<int>(input_transform.cols()); }
  int label_count() const { return static_cast<int>(output_transform.rows()); }
};

// V and U fan-based uniform, W identity, b_y zero.
SequenceParams init_sequence_params(int input_dim, int hidden_dim, int label_count,
                                    std::uint64_t seed);

struct EncoderStates {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> forward_h;   // hf_1..hf_N
  std::vector<Eigen::VectorXd> backward_h;  // hb_1..hb_N
  std::vector<Eigen::VectorXd> combined_h;  // h_1..h_N
  Eigen::VectorXd distribution;             // softmax over labels

  int length() const { return static_cast<int>(inputs.size()); }
  const Eigen::VectorXd& final_state() const { return combined_h.back(); }
};

// Runs the three recurrences and the softmax head. Throws DataError on an
// empty sequence, InternalError on dimension mismatches.
EncoderStates sequence_forward(const std::vector<Eigen::VectorXd>& inputs,
                               const SequenceParams& params);

struct SequenceGrads {
  Eigen::MatrixXd input_transform;
  Eigen::MatrixXd recurrent;
  Eigen::MatrixXd output_transform;
  Eigen::VectorXd output_bias;
  std::vector<Eigen::VectorXd> inputs;  // dL/d i_t

  static SequenceGrads zeros_like(const SequenceParams& params, int length);
};

// Gradients of the cross-entropy loss -ln y[gold] through the whole encoder;
// W accumulates contributions from all three of its roles.
SequenceGrads sequence_backward(const EncoderStates& states, int gold_label,
                                const SequenceParams& params);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Argmax with lowest-index tie-break.
int argmax_label(const Eigen::VectorXd& distribution);

}  // namespace idepnn

#endif
