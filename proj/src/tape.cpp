#include "semsyngtn/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace semsyngtn {

struct TapeDetail {
  static Var make_node(Tape& t, const char* op, Tensor value,
                       std::function<void(Tape&, int)> backprop) {
    if (!value.all_finite()) {
      throw std::runtime_error(std::string(op) + ": non-finite result");
    }
    Tape::Node n;
    n.value = std::move(value);
    n.backprop = std::move(backprop);
    t.nodes_.push_back(std::move(n));
    return Var{&t, static_cast<int>(t.nodes_.size()) - 1};
  }

  static const Tensor& val(Tape& t, int id) { return t.nodes_[id].value; }
  static const Tensor& out_grad(Tape& t, int id) { return t.nodes_[id].grad; }

  static Tensor& grad_buf(Tape& t, int id) {
    Tape::Node& n = t.nodes_[id];
    if (!n.grad_set) {
      n.grad = Tensor::zeros(n.value.shape());
      n.grad_set = true;
    }
    return n.grad;
  }

  static void accum(Tape& t, int id, const Tensor& g) {
    Tensor& buf = grad_buf(t, id);
    for (int i = 0; i < g.numel(); ++i) buf[i] += g[i];
  }
};

namespace {

using D = TapeDetail;

void require_rank2(const char* op, const Tensor& t) {
  if (t.rank() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected rank-2 tensor, got " + t.shape_str());
  }
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  }
}

Tape& tape_of(const char* op, Var a) {
  if (!a.valid()) throw std::invalid_argument(std::string(op) + ": invalid var");
  return *a.tape;
}

Tape& tape_of(const char* op, Var a, Var b) {
  Tape& t = tape_of(op, a);
  if (!b.valid() || b.tape != a.tape) {
    throw std::invalid_argument(std::string(op) + ": operands from different tapes");
  }
  return t;
}

// Unary elementwise op: forward f(x), backprop dL/dx = dL/dy * dfdx(x, y).
template <typename F, typename DF>
Var unary_ew(const char* op, Var a, F f, DF dfdx) {
  Tape& t = tape_of(op, a);
  const Tensor& x = t.value(a);
  Tensor y(x.shape());
  for (int i = 0; i < x.numel(); ++i) y[i] = f(x[i]);
  int ida = a.id;
  return D::make_node(t, op, std::move(y), [ida, dfdx](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& xv = D::val(tp, ida);
    const Tensor& yv = D::val(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < g.numel(); ++i) da[i] += g[i] * dfdx(xv[i], yv[i]);
  });
}

}  // namespace

Var Tape::constant(Tensor value) {
  if (!value.all_finite()) throw std::runtime_error("constant: non-finite input");
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(const std::string& name, Tensor value) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return Var{this, it->second};
  if (!value.all_finite()) throw std::runtime_error("parameter " + name + ": non-finite value");
  Node n;
  n.value = std::move(value);
  n.param = name;
  nodes_.push_back(std::move(n));
  int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_[name] = id;
  return Var{this, id};
}

const Tensor& Tape::value(Var v) const { return nodes_.at(v.id).value; }

const Tensor& Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (!n.grad_set) throw std::logic_error("tape: gradient not computed for node");
  return n.grad;
}

void Tape::backward(Var out) {
  if (!out.valid() || out.tape != this) throw std::invalid_argument("backward: var not on this tape");
  Node& last = nodes_.at(out.id);
  if (last.value.numel() != 1) {
    throw std::invalid_argument("backward: output must be scalar, got " + last.value.shape_str());
  }
  for (Node& n : nodes_) {
    n.grad = Tensor();
    n.grad_set = false;
  }
  last.grad = Tensor::full(last.value.shape(), 1.0);
  last.grad_set = true;
  for (int i = out.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad_set && n.backprop) n.backprop(*this, i);
  }
}

GradMap Tape::parameter_grads() const {
  GradMap grads;
  for (const auto& [name, id] : param_nodes_) {
    const Node& n = nodes_[id];
    grads[name] = n.grad_set ? n.grad : Tensor::zeros(n.value.shape());
  }
  return grads;
}


// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = tape_of("matmul", a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_rank2("matmul", A);
  require_rank2("matmul", B);
  if (A.cols() != B.rows()) {
    throw std::invalid_argument("matmul: shape mismatch " + A.shape_str() + " vs " + B.shape_str());
  }
  int n = A.rows(), k = A.cols(), m = B.cols();
  Tensor C({n, m});
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < k; ++l) {
      double av = A.at(i, l);
      if (av == 0.0) continue;
      for (int j = 0; j < m; ++j) C.at(i, j) += av * B.at(l, j);
    }
  }
  int ida = a.id, idb = b.id;
  return D::make_node(t, "matmul", std::move(C), [ida, idb, n, k, m](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& A2 = D::val(tp, ida);
    const Tensor& B2 = D::val(tp, idb);
    {
      Tensor& da = D::grad_buf(tp, ida);  // dA = g . B^T
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          double gv = g.at(i, j);
          if (gv == 0.0) continue;
          for (int l = 0; l < k; ++l) da.at(i, l) += gv * B2.at(l, j);
        }
    }
    {
      Tensor& db = D::grad_buf(tp, idb);  // dB = A^T . g
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < k; ++l) {
          double av = A2.at(i, l);
          if (av == 0.0) continue;
          for (int j = 0; j < m; ++j) db.at(l, j) += av * g.at(i, j);
        }
    }
  });
}

Var transpose(Var a) {
  Tape& t = tape_of("transpose", a);
  const Tensor& A = t.value(a);
  require_rank2("transpose", A);
  int n = A.rows(), m = A.cols();
  Tensor C({m, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) C.at(j, i) = A.at(i, j);
  int ida = a.id;
  return D::make_node(t, "transpose", std::move(C), [ida, n, m](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) da.at(i, j) += g.at(j, i);
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of("add", a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_same_shape("add", A, B);
  Tensor C(A.shape());
  for (int i = 0; i < A.numel(); ++i) C[i] = A[i] + B[i];
  int ida = a.id, idb = b.id;
  return D::make_node(t, "add", std::move(C), [ida, idb](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    D::accum(tp, ida, g);
    D::accum(tp, idb, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of("sub", a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_same_shape("sub", A, B);
  Tensor C(A.shape());
  for (int i = 0; i < A.numel(); ++i) C[i] = A[i] - B[i];
  int ida = a.id, idb = b.id;
  return D::make_node(t, "sub", std::move(C), [ida, idb](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    D::accum(tp, ida, g);
    Tensor& db = D::grad_buf(tp, idb);
    for (int i = 0; i < g.numel(); ++i) db[i] -= g[i];
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of("mul", a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_same_shape("mul", A, B);
  Tensor C(A.shape());
  for (int i = 0; i < A.numel(); ++i) C[i] = A[i] * B[i];
  int ida = a.id, idb = b.id;
  return D::make_node(t, "mul", std::move(C), [ida, idb](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& A2 = D::val(tp, ida);
    const Tensor& B2 = D::val(tp, idb);
    Tensor& da = D::grad_buf(tp, ida);
    Tensor& db = D::grad_buf(tp, idb);
    for (int i = 0; i < g.numel(); ++i) {
      da[i] += g[i] * B2[i];
      db[i] += g[i] * A2[i];
    }
  });
}

Var add_const(Var a, double c) {
  return unary_ew("add_const", a, [c](double x) { return x + c; },
                  [](double, double) { return 1.0; });
}

Var mul_const(Var a, double c) {
  return unary_ew("mul_const", a, [c](double x) { return x * c; },
                  [c](double, double) { return c; });
}

Var sigmoid(Var a) {
  return unary_ew("sigmoid", a,
                  [](double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                                 : std::exp(x) / (1.0 + std::exp(x)); },
                  [](double, double y) { return y * (1.0 - y); });
}

Var tanh_op(Var a) {
  return unary_ew("tanh", a, [](double x) { return std::tanh(x); },
                  [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
  return unary_ew("relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
                  [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp_op(Var a) {
  return unary_ew("exp", a, [](double x) { return std::exp(x); },
                  [](double, double y) { return y; });
}

Var log_op(Var a) {
  return unary_ew("log", a, [](double x) { return std::log(x); },
                  [](double x, double) { return 1.0 / x; });
}

Var abs_op(Var a) {
  return unary_ew("abs", a, [](double x) { return std::fabs(x); },
                  [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var softplus(Var a) {
  return unary_ew("softplus", a,
                  [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); },
                  [](double x, double) {
                    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                    : std::exp(x) / (1.0 + std::exp(x));
                  });
}

Var softmax(Var a, int axis) {
  Tape& t = tape_of("softmax", a);
  const Tensor& X = t.value(a);
  require_rank2("softmax", X);
  if (axis != 0 && axis != 1) throw std::invalid_argument("softmax: axis must be 0 or 1");
  int n = X.rows(), m = X.cols();
  Tensor Y({n, m});
  int groups = axis == 1 ? n : m;
  int len = axis == 1 ? m : n;
  auto idx = [&](int grp, int k) { return axis == 1 ? std::pair{grp, k} : std::pair{k, grp}; };
  for (int grp = 0; grp < groups; ++grp) {
    double mx = -1e300;
    for (int k = 0; k < len; ++k) {
      auto [i, j] = idx(grp, k);
      mx = std::max(mx, X.at(i, j));
    }
    double sum = 0.0;
    for (int k = 0; k < len; ++k) {
      auto [i, j] = idx(grp, k);
      double e = std::exp(X.at(i, j) - mx);
      Y.at(i, j) = e;
      sum += e;
    }
    for (int k = 0; k < len; ++k) {
      auto [i, j] = idx(grp, k);
      Y.at(i, j) /= sum;
    }
  }
  int ida = a.id;
  return D::make_node(t, "softmax", std::move(Y), [ida, axis, groups, len](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& Y2 = D::val(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    auto bidx = [axis](int grp, int k) { return axis == 1 ? std::pair{grp, k} : std::pair{k, grp}; };
    for (int grp = 0; grp < groups; ++grp) {
      double dot = 0.0;
      for (int k = 0; k < len; ++k) {
        auto [i, j] = bidx(grp, k);
        dot += g.at(i, j) * Y2.at(i, j);
      }
      for (int k = 0; k < len; ++k) {
        auto [i, j] = bidx(grp, k);
        da.at(i, j) += Y2.at(i, j) * (g.at(i, j) - dot);
      }
    }
  });
}

Var concat(const std::vector<Var>& xs, int axis) {
  if (xs.empty()) throw std::invalid_argument("concat: empty input list");
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
  Tape& t = tape_of("concat", xs[0]);
  int rows0 = t.value(xs[0]).rows(), cols0 = t.value(xs[0]).cols();
  int total = 0;
  for (Var v : xs) {
    const Tensor& x = tape_of("concat", xs[0], v).value(v);
    require_rank2("concat", x);
    if (axis == 0) {
      if (x.cols() != cols0)
        throw std::invalid_argument("concat: shape mismatch " + t.value(xs[0]).shape_str() +
                                    " vs " + x.shape_str());
      total += x.rows();
    } else {
      if (x.rows() != rows0)
        throw std::invalid_argument("concat: shape mismatch " + t.value(xs[0]).shape_str() +
                                    " vs " + x.shape_str());
      total += x.cols();
    }
  }
  Tensor C(axis == 0 ? std::vector<int>{total, cols0} : std::vector<int>{rows0, total});
  std::vector<int> ids;
  std::vector<int> offsets;
  int off = 0;
  for (Var v : xs) {
    const Tensor& x = t.value(v);
    ids.push_back(v.id);
    offsets.push_back(off);
    if (axis == 0) {
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) C.at(off + i, j) = x.at(i, j);
      off += x.rows();
    } else {
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) C.at(i, off + j) = x.at(i, j);
      off += x.cols();
    }
  }
  return D::make_node(t, "concat", std::move(C), [ids, offsets, axis](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    for (size_t s = 0; s < ids.size(); ++s) {
      const Tensor& x = D::val(tp, ids[s]);
      Tensor& dx = D::grad_buf(tp, ids[s]);
      int off2 = offsets[s];
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
          dx.at(i, j) += axis == 0 ? g.at(off2 + i, j) : g.at(i, off2 + j);
    }
  });
}

Var slice_rows(Var a, int r0, int r1) {
  Tape& t = tape_of("slice_rows", a);
  const Tensor& X = t.value(a);
  require_rank2("slice_rows", X);
  if (r0 < 0 || r1 > X.rows() || r0 >= r1) {
    throw std::invalid_argument("slice_rows: range [" + std::to_string(r0) + "," +
                                std::to_string(r1) + ") out of " + X.shape_str());
  }
  Tensor C({r1 - r0, X.cols()});
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < X.cols(); ++j) C.at(i - r0, j) = X.at(i, j);
  int ida = a.id;
  return D::make_node(t, "slice_rows", std::move(C), [ida, r0](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) da.at(r0 + i, j) += g.at(i, j);
  });
}

Var slice_cols(Var a, int c0, int c1) {
  Tape& t = tape_of("slice_cols", a);
  const Tensor& X = t.value(a);
  require_rank2("slice_cols", X);
  if (c0 < 0 || c1 > X.cols() || c0 >= c1) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(c0) + "," +
                                std::to_string(c1) + ") out of " + X.shape_str());
  }
  Tensor C({X.rows(), c1 - c0});
  for (int i = 0; i < X.rows(); ++i)
    for (int j = c0; j < c1; ++j) C.at(i, j - c0) = X.at(i, j);
  int ida = a.id;
  return D::make_node(t, "slice_cols", std::move(C), [ida, c0](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) da.at(i, c0 + j) += g.at(i, j);
  });
}

Var reshape(Var a, std::vector<int> shape) {
  Tape& t = tape_of("reshape", a);
  const Tensor& X = t.value(a);
  Tensor C(std::move(shape), X.data());
  if (C.numel() != X.numel()) {
    throw std::invalid_argument("reshape: element count mismatch " + X.shape_str() + " vs " +
                                C.shape_str());
  }
  int ida = a.id;
  return D::make_node(t, "reshape", std::move(C), [ida](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < g.numel(); ++i) da[i] += g[i];
  });
}

Var row_sum(Var a) {
  Tape& t = tape_of("row_sum", a);
  const Tensor& X = t.value(a);
  require_rank2("row_sum", X);
  Tensor C({X.rows(), 1});
  for (int i = 0; i < X.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < X.cols(); ++j) s += X.at(i, j);
    C.at(i, 0) = s;
  }
  int ida = a.id;
  return D::make_node(t, "row_sum", std::move(C), [ida](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& x = D::val(tp, ida);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) da.at(i, j) += g.at(i, 0);
  });
}

Var sum_all(Var a) {
  Tape& t = tape_of("sum_all", a);
  const Tensor& X = t.value(a);
  double s = 0.0;
  for (int i = 0; i < X.numel(); ++i) s += X[i];
  int ida = a.id;
  return D::make_node(t, "sum_all", Tensor::scalar(s), [ida](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int i = 0; i < da.numel(); ++i) da[i] += g[0];
  });
}

Var maxpool_rows(Var a) {
  Tape& t = tape_of("maxpool_rows", a);
  const Tensor& X = t.value(a);
  require_rank2("maxpool_rows", X);
  if (X.rows() < 1) throw std::invalid_argument("maxpool_rows: empty input");
  Tensor C({1, X.cols()});
  std::vector<int> arg(X.cols(), 0);
  for (int j = 0; j < X.cols(); ++j) {
    double best = X.at(0, j);
    int bi = 0;
    for (int i = 1; i < X.rows(); ++i) {
      if (X.at(i, j) > best) {  // strict: ties keep the lowest row index
        best = X.at(i, j);
        bi = i;
      }
    }
    C.at(0, j) = best;
    arg[j] = bi;
  }
  int ida = a.id;
  return D::make_node(t, "maxpool_rows", std::move(C), [ida, arg](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (int j = 0; j < g.cols(); ++j) da.at(arg[j], j) += g.at(0, j);
  });
}

Var gather_rows(Var a, std::vector<int> rows) {
  Tape& t = tape_of("gather_rows", a);
  const Tensor& X = t.value(a);
  require_rank2("gather_rows", X);
  for (int r : rows) {
    if (r < 0 || r >= X.rows()) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(r) + " out of " +
                                  X.shape_str());
    }
  }
  Tensor C({static_cast<int>(rows.size()), X.cols()});
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < X.cols(); ++j) C.at(static_cast<int>(i), j) = X.at(rows[i], j);
  int ida = a.id;
  return D::make_node(t, "gather_rows", std::move(C), [ida, rows](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    for (size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < g.cols(); ++j) da.at(rows[i], j) += g.at(static_cast<int>(i), j);
  });
}

Var clamp_min(Var a, double floor) {
  return unary_ew("clamp_min", a, [floor](double x) { return x > floor ? x : floor; },
                  [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Var scale_by(Var a, Var s) {
  Tape& t = tape_of("scale_by", a, s);
  const Tensor& X = t.value(a);
  const Tensor& S = t.value(s);
  if (S.numel() != 1) {
    throw std::invalid_argument("scale_by: scale must be a scalar, got " + S.shape_str());
  }
  Tensor C(X.shape());
  for (int i = 0; i < X.numel(); ++i) C[i] = X[i] * S[0];
  int ida = a.id, ids = s.id;
  return D::make_node(t, "scale_by", std::move(C), [ida, ids](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& X2 = D::val(tp, ida);
    const Tensor& S2 = D::val(tp, ids);
    Tensor& da = D::grad_buf(tp, ida);
    Tensor& ds = D::grad_buf(tp, ids);
    for (int i = 0; i < g.numel(); ++i) {
      da[i] += g[i] * S2[0];
      ds[0] += g[i] * X2[i];
    }
  });
}

Var add_row_broadcast(Var a, Var b) {
  Tape& t = tape_of("add_row_broadcast", a, b);
  const Tensor& X = t.value(a);
  const Tensor& B = t.value(b);
  require_rank2("add_row_broadcast", X);
  if (B.rank() != 2 || B.rows() != 1 || B.cols() != X.cols()) {
    throw std::invalid_argument("add_row_broadcast: shape mismatch " + X.shape_str() + " vs " +
                                B.shape_str());
  }
  Tensor C(X.shape());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) C.at(i, j) = X.at(i, j) + B.at(0, j);
  int ida = a.id, idb = b.id;
  return D::make_node(t, "add_row_broadcast", std::move(C), [ida, idb](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    Tensor& da = D::grad_buf(tp, ida);
    Tensor& db = D::grad_buf(tp, idb);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        da.at(i, j) += g.at(i, j);
        db.at(0, j) += g.at(i, j);
      }
  });
}

Var mul_row_broadcast(Var a, Var b) {
  Tape& t = tape_of("mul_row_broadcast", a, b);
  const Tensor& X = t.value(a);
  const Tensor& B = t.value(b);
  require_rank2("mul_row_broadcast", X);
  if (B.rank() != 2 || B.rows() != 1 || B.cols() != X.cols()) {
    throw std::invalid_argument("mul_row_broadcast: shape mismatch " + X.shape_str() + " vs " +
                                B.shape_str());
  }
  Tensor C(X.shape());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) C.at(i, j) = X.at(i, j) * B.at(0, j);
  int ida = a.id, idb = b.id;
  return D::make_node(t, "mul_row_broadcast", std::move(C), [ida, idb](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& X2 = D::val(tp, ida);
    const Tensor& B2 = D::val(tp, idb);
    Tensor& da = D::grad_buf(tp, ida);
    Tensor& db = D::grad_buf(tp, idb);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        da.at(i, j) += g.at(i, j) * B2.at(0, j);
        db.at(0, j) += g.at(i, j) * X2.at(i, j);
      }
  });
}

Var div_col_broadcast(Var a, Var s) {
  Tape& t = tape_of("div_col_broadcast", a, s);
  const Tensor& X = t.value(a);
  const Tensor& S = t.value(s);
  require_rank2("div_col_broadcast", X);
  if (S.rank() != 2 || S.cols() != 1 || S.rows() != X.rows()) {
    throw std::invalid_argument("div_col_broadcast: shape mismatch " + X.shape_str() + " vs " +
                                S.shape_str());
  }
  Tensor C(X.shape());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) C.at(i, j) = X.at(i, j) / S.at(i, 0);
  int ida = a.id, ids = s.id;
  return D::make_node(t, "div_col_broadcast", std::move(C), [ida, ids](Tape& tp, int out) {
    const Tensor& g = D::out_grad(tp, out);
    const Tensor& X2 = D::val(tp, ida);
    const Tensor& S2 = D::val(tp, ids);
    Tensor& da = D::grad_buf(tp, ida);
    Tensor& ds = D::grad_buf(tp, ids);
    for (int i = 0; i < g.rows(); ++i) {
      double inv = 1.0 / S2.at(i, 0);
      for (int j = 0; j < g.cols(); ++j) {
        da.at(i, j) += g.at(i, j) * inv;
        ds.at(i, 0) -= g.at(i, j) * X2.at(i, j) * inv * inv;
      }
    }
  });
}

Var lstm_cell(Var x_t, Var state, Var w, Var b) {
  Tape& t = tape_of("lstm_cell", x_t, state);
  tape_of("lstm_cell", x_t, w);
  tape_of("lstm_cell", x_t, b);
  const Tensor& X = t.value(x_t);
  const Tensor& S = t.value(state);
  const Tensor& W = t.value(w);
  const Tensor& B = t.value(b);
  if (X.rank() != 2 || X.rows() != 1 || S.rank() != 2 || S.rows() != 1 || S.cols() % 2 != 0) {
    throw std::invalid_argument("lstm_cell: shape mismatch " + X.shape_str() + " vs " +
                                S.shape_str());
  }
  int h2 = S.cols() / 2;
  int dx = X.cols();
  if (W.rank() != 2 || W.rows() != 4 * h2 || W.cols() != dx + h2 || B.rank() != 2 ||
      B.rows() != 1 || B.cols() != 4 * h2) {
    throw std::invalid_argument("lstm_cell: shape mismatch " + W.shape_str() + " vs " +
                                B.shape_str());
  }
  auto sigm = [](double v) {
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  };
  // pre = [x, h_prev] . W^T + b, gates in blocks [i, f, o, g]
  std::vector<double> pre(4 * h2);
  for (int j = 0; j < 4 * h2; ++j) {
    double z = B.at(0, j);
    for (int k = 0; k < dx; ++k) z += W.at(j, k) * X.at(0, k);
    for (int k = 0; k < h2; ++k) z += W.at(j, dx + k) * S.at(0, k);
    pre[j] = z;
  }
  Tensor out({1, 2 * h2});
  std::vector<double> gates(4 * h2);
  for (int k = 0; k < h2; ++k) {
    double gi = sigm(pre[k]);
    double gf = sigm(pre[h2 + k]);
    double go = sigm(pre[2 * h2 + k]);
    double gc = std::tanh(pre[3 * h2 + k]);
    gates[k] = gi;
    gates[h2 + k] = gf;
    gates[2 * h2 + k] = go;
    gates[3 * h2 + k] = gc;
    double c_new = gf * S.at(0, h2 + k) + gi * gc;
    out.at(0, h2 + k) = c_new;
    out.at(0, k) = go * std::tanh(c_new);
  }
  int idx = x_t.id, ids = state.id, idw = w.id, idb = b.id;
  return D::make_node(
      t, "lstm_cell", std::move(out), [idx, ids, idw, idb, h2, dx, gates](Tape& tp, int node) {
        const Tensor& g = D::out_grad(tp, node);
        const Tensor& X2 = D::val(tp, idx);
        const Tensor& S2 = D::val(tp, ids);
        const Tensor& W2 = D::val(tp, idw);
        const Tensor& C = D::val(tp, node);
        Tensor& dx_t = D::grad_buf(tp, idx);
        Tensor& dstate = D::grad_buf(tp, ids);
        Tensor& dw = D::grad_buf(tp, idw);
        Tensor& db = D::grad_buf(tp, idb);
        std::vector<double> dpre(4 * h2);
        for (int k = 0; k < h2; ++k) {
          double gi = gates[k], gf = gates[h2 + k], go = gates[2 * h2 + k], gc = gates[3 * h2 + k];
          double c_new = C.at(0, h2 + k);
          double tc = std::tanh(c_new);
          double dh = g.at(0, k);
          double dc = g.at(0, h2 + k) + dh * go * (1.0 - tc * tc);
          double d_go = dh * tc;
          double d_gf = dc * S2.at(0, h2 + k);
          double d_gi = dc * gc;
          double d_gc = dc * gi;
          dstate.at(0, h2 + k) += dc * gf;  // d c_prev
          dpre[k] = d_gi * gi * (1.0 - gi);
          dpre[h2 + k] = d_gf * gf * (1.0 - gf);
          dpre[2 * h2 + k] = d_go * go * (1.0 - go);
          dpre[3 * h2 + k] = d_gc * (1.0 - gc * gc);
        }
        for (int j = 0; j < 4 * h2; ++j) {
          double dp = dpre[j];
          if (dp == 0.0) continue;
          db.at(0, j) += dp;
          for (int k = 0; k < dx; ++k) {
            dw.at(j, k) += dp * X2.at(0, k);
            dx_t.at(0, k) += dp * W2.at(j, k);
          }
          for (int k = 0; k < h2; ++k) {
            dw.at(j, dx + k) += dp * S2.at(0, k);
            dstate.at(0, k) += dp * W2.at(j, dx + k);  // d h_prev
          }
        }
      });
}

}  // namespace semsyngtn
