#ifndef SEMSYNGTN_TAPE_HPP_
#define SEMSYNGTN_TAPE_HPP_

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "semsyngtn/tensor.hpp"

namespace semsyngtn {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr && id >= 0; }
};

// Gradients keyed by parameter name after Tape::backward().
using GradMap = std::map<std::string, Tensor>;

// Reverse-mode differentiation over dense tensors. Nodes are recorded in
// topological (creation) order; backward() walks them once in reverse.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that receives no gradient (inputs, frozen tables, structure constants).
  Var constant(Tensor value);
  // Leaf bound to a named parameter; gradients accumulate under that name.
  // Repeated calls with one name return the same node.
  Var parameter(const std::string& name, Tensor value);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // Seeds d(out)=1 and propagates. `out` must hold a single element.
  void backward(Var out);
  // Parameter-name -> accumulated gradient from the last backward().
  GradMap parameter_grads() const;

 private:
  friend struct TapeDetail;

  struct Node {
    Tensor value;
    Tensor grad;
    bool grad_set = false;
    std::string param;  // empty unless a parameter leaf
    std::function<void(Tape&, int)> backprop;
  };

  std::deque<Node> nodes_;  // deque: value()/grad() references stay valid as nodes append
  std::map<std::string, int> param_nodes_;
};

// ---- differentiable primitives ------------------------------------------
// Shape errors throw std::invalid_argument naming the op and both shapes.

Var matmul(Var a, Var b);               // (n x k) . (k x m) -> (n x m)
Var transpose(Var a);                   // (n x m) -> (m x n)
Var add(Var a, Var b);                  // elementwise, same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var add_const(Var a, double c);
Var mul_const(Var a, double c);
Var sigmoid(Var a);
Var tanh_op(Var a);
Var relu(Var a);
Var exp_op(Var a);
Var log_op(Var a);
Var abs_op(Var a);
Var softplus(Var a);                    // log(1 + e^x), overflow-safe
Var softmax(Var a, int axis);           // rank-2; axis 1 = per row, 0 = per column
Var concat(const std::vector<Var>& xs, int axis);  // rank-2, axis 0 or 1
Var slice_rows(Var a, int r0, int r1);  // rows [r0, r1)
Var slice_cols(Var a, int c0, int c1);  // cols [c0, c1)
Var reshape(Var a, std::vector<int> shape);
Var row_sum(Var a);                     // (n x m) -> (n x 1)
Var sum_all(Var a);                     // (n x m) -> (1 x 1)
Var maxpool_rows(Var a);                // (n x m) -> (1 x m); ties go to the lowest row
Var gather_rows(Var a, std::vector<int> rows);  // scatter-add adjoint; embedding lookup
Var clamp_min(Var a, double floor);     // max(x, floor); gradient blocked at/below floor
Var scale_by(Var a, Var s);             // s is 1x1
Var add_row_broadcast(Var a, Var b);    // (n x m) + (1 x m) per row
Var mul_row_broadcast(Var a, Var b);    // (n x m) * (1 x m) per row
Var div_col_broadcast(Var a, Var s);    // (n x m) / (n x 1) per column

// Fused LSTM step. Inputs: x_t (1 x d_x), state (1 x 2*h2 holding [h, c]),
// w (4*h2 x (d_x + h2)) with gate blocks [input, forget, output, candidate],
// b (1 x 4*h2). Output: the next [h, c] row. One node instead of ~17.
Var lstm_cell(Var x_t, Var state, Var w, Var b);

inline Var row(Var a, int i) { return slice_rows(a, i, i + 1); }

}  // namespace semsyngtn

#endif  // SEMSYNGTN_TAPE_HPP_
