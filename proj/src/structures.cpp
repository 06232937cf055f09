#include "semsyngtn/structures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semsyngtn/corpus.hpp"

namespace semsyngtn {

Tensor dep_adjacency(const std::vector<int>& heads) {
  int n = static_cast<int>(heads.size());
  Tensor a({n, n});
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    int h = heads[i];
    if (h == -1) {
      ++roots;
      continue;
    }
    if (h < 0 || h >= n || h == i) throw std::invalid_argument("dep_adjacency: invalid tree");
    a.at(i, h) = 1.0;
    a.at(h, i) = 1.0;
  }
  if (roots != 1) throw std::invalid_argument("dep_adjacency: invalid tree");
  return a;
}

std::vector<int> length_rows(const std::vector<int>& lengths, int len_max) {
  std::vector<int> rows(lengths.size());
  for (size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 0) throw std::invalid_argument("length_rows: negative path length");
    rows[i] = std::min(lengths[i], len_max);
  }
  return rows;
}

Var anchor_syntax_structure(Tape& tape, const ParameterStore& store, const std::string& ff_prefix,
                            const std::vector<int>& lengths, int len_max) {
  int n = static_cast<int>(lengths.size());
  Var table = store.on(tape, "str.len_table");
  Var embedded = gather_rows(table, length_rows(lengths, len_max));  // n x d_len
  std::vector<int> ii(n * n), jj(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ii[i * n + j] = i;
      jj[i * n + j] = j;
    }
  }
  Var di = gather_rows(embedded, ii);
  Var dj = gather_rows(embedded, jj);
  Var features = concat({di, dj, mul(di, dj), abs_op(sub(di, dj)), add(di, dj)}, 1);
  Var hidden = relu(add_row_broadcast(matmul(features, transpose(store.on(tape, ff_prefix + ".W1"))),
                                      store.on(tape, ff_prefix + ".b1")));
  Var scores = add_row_broadcast(matmul(hidden, transpose(store.on(tape, ff_prefix + ".W2"))),
                                 store.on(tape, ff_prefix + ".b2"));
  return sigmoid(reshape(scores, {n, n}));
}

namespace {

Var semantic_softmax(Var keys, Var queries) {
  return softmax(matmul(keys, transpose(queries)), 1);
}

}  // namespace

Var semantic_structure_plain(Tape& tape, const ParameterStore& store, Var h) {
  Var keys = matmul(h, transpose(store.on(tape, "str.Uk")));
  Var queries = matmul(h, transpose(store.on(tape, "str.Uq")));
  return semantic_softmax(keys, queries);
}

Var semantic_structure_customized(Tape& tape, const ParameterStore& store, Var h, int a, int e) {
  int n = tape.value(h).rows();
  if (a < 0 || a >= n || e < 0 || e >= n) {
    throw std::invalid_argument("semantic_structure_customized: anchor out of range");
  }
  Var keys = matmul(h, transpose(store.on(tape, "str.Uk")));
  Var queries = matmul(h, transpose(store.on(tape, "str.Uq")));
  Var anchors = concat({row(h, a), row(h, e)}, 1);  // [h_a, h_e]
  Var ck = sigmoid(matmul(anchors, transpose(store.on(tape, "str.Vk"))));
  Var cq = sigmoid(matmul(anchors, transpose(store.on(tape, "str.Vq"))));
  return semantic_softmax(mul_row_broadcast(keys, ck), mul_row_broadcast(queries, cq));
}

StructureSet build_structure_set(Tensor a_dep, Tensor a_arg, Tensor a_trig, Tensor a_sem, int n) {
  for (const Tensor* t : {&a_dep, &a_arg, &a_trig, &a_sem}) {
    if (t->rank() != 2 || t->rows() != n || t->cols() != n) {
      throw std::invalid_argument("structure set: expected " + std::to_string(n) + "x" +
                                  std::to_string(n) + " matrix, got " + t->shape_str());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (a_dep.at(i, i) != 0.0) throw std::invalid_argument("structure set: A^d diagonal not zero");
    for (int j = 0; j < n; ++j) {
      double v = a_dep.at(i, j);
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("structure set: A^d not binary");
      if (v != a_dep.at(j, i)) throw std::invalid_argument("structure set: A^d not symmetric");
    }
  }
  for (const Tensor* t : {&a_arg, &a_trig}) {
    for (int i = 0; i < t->numel(); ++i) {
      if ((*t)[i] <= 0.0 || (*t)[i] >= 1.0) {
        throw std::invalid_argument("structure set: syntactic scores must lie in (0,1)");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double v = a_sem.at(i, j);
      if (v < 0.0) throw std::invalid_argument("structure set: A^s has a negative entry");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("structure set: A^s row does not sum to 1");
    }
  }
  StructureSet set;
  set.a_dep = std::move(a_dep);
  set.a_arg = std::move(a_arg);
  set.a_trig = std::move(a_trig);
  set.a_sem = std::move(a_sem);
  set.identity = Tensor::identity(n);
  return set;
}

}  // namespace semsyngtn
