#pragma once

#include "privhc/gc/circuit.hpp"

namespace privhc::gc {

// Garbler inputs R[0..n) (kappa bits), evaluator inputs V[0..n) (kappa+1
// bits); outputs the position of the first minimum of the low lambda bits of
// V_i - R_i on max(1, ceil(log2 n)) wires.
circuit_spec build_argmin(std::size_t n, unsigned lambda, unsigned kappa);

// Garbler inputs (r1, r2, r') (kappa bits), evaluator inputs (u, v)
// (kappa+1 bits); outputs min(u - r1, v - r2) + r' on kappa+1 wires.
circuit_spec build_mindist(unsigned lambda, unsigned kappa);
circuit_spec build_maxdist(unsigned lambda, unsigned kappa);

// Blinded value that never wins an argmin: blind + 2^lambda - 1.
inline word_t bottom_value(word_t blind, unsigned lambda) { return blind + word_mask(lambda); }

inline unsigned index_bits(std::size_t n) { return n <= 2 ? 1 : ceil_log2(n); }

} // namespace privhc::gc
