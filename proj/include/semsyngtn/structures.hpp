#ifndef SEMSYNGTN_STRUCTURES_HPP_
#define SEMSYNGTN_STRUCTURES_HPP_

#include <string>
#include <vector>

#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"
#include "semsyngtn/tensor.hpp"

namespace semsyngtn {

// Symmetric binary adjacency of the dependency tree, zero diagonal.
Tensor dep_adjacency(const std::vector<int>& heads);

// Clamped path-length lookup rows for the shared length table (str.len_table).
std::vector<int> length_rows(const std::vector<int>& lengths, int len_max);

// Anchor-specific syntactic structure: cell (i,j) scores sigmoid(FF(F_ij))
// over F_ij = [d_i, d_j, d_i*d_j, |d_i - d_j|, d_i + d_j] of length embeddings.
// ff_prefix selects the scorer weights (str.ffa for A^a, str.ffe for A^e);
// both share the single table str.len_table.
Var anchor_syntax_structure(Tape& tape, const ParameterStore& store, const std::string& ff_prefix,
                            const std::vector<int>& lengths, int len_max);

// Key/query semantic attention, row-stochastic: softmax_j(k_i . q_j) with
// k = H U_k^T, q = H U_q^T (str.Uk / str.Uq, biases omitted).
Var semantic_structure_plain(Tape& tape, const ParameterStore& store, Var h);

// Task-customized variant: control vectors c_k = sigmoid(V_k [h_a, h_e]) and
// c_q = sigmoid(V_q [h_a, h_e]) filter the keys/queries elementwise before
// the same row softmax (str.Vk / str.Vq; U_k, U_q shared with the plain form).
Var semantic_structure_customized(Tape& tape, const ParameterStore& store, Var h, int a, int e);

// The five initial structures for one instance, validated.
struct StructureSet {
  Tensor a_dep;    // A^d
  Tensor a_arg;    // A^a
  Tensor a_trig;   // A^e
  Tensor a_sem;    // A^s
  Tensor identity;

  int size() const { return a_dep.rows(); }
  std::vector<const Tensor*> all() const { return {&a_dep, &a_arg, &a_trig, &a_sem, &identity}; }
};

// Verifies every StructureSet invariant; throws std::invalid_argument.
StructureSet build_structure_set(Tensor a_dep, Tensor a_arg, Tensor a_trig, Tensor a_sem, int n);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_STRUCTURES_HPP_
