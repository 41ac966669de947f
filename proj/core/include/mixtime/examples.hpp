#ifndef MIXTIME_EXAMPLES_HPP
#define MIXTIME_EXAMPLES_HPP

#include <optional>
#include <string>

#include "mixtime/bottleneck.hpp"
#include "mixtime/chain.hpp"
#include "mixtime/rough_isometry.hpp"

namespace mixtime {

enum class Family { path, cycle, star2, wpath3, hamclique, bintree, dingperes, prodchain };

Family family_from_string(const std::string& name);  // throws on unknown
std::string family_to_string(Family f);

struct ExampleSpec {
  Family family = Family::path;
  int n = 0;              // PATH, CYCLE, STAR2, WPATH3, HAMCLIQUE, PRODCHAIN
  int k = 0;              // PRODCHAIN clique size
  int K = 0;              // BINTREE, DINGPERES height
  unsigned seed = 0;      // DINGPERES attachment / conductance perturbation
  bool doubled_left = false;  // DINGPERES: conductance 2 on edges into left children
  bool perturb = false;       // multiply every conductance by a seeded factor in [1/2, 2]
};

struct GeneratedExample {
  Chain chain;
  std::optional<Chain> companion_tree;          // STAR2 and PRODCHAIN pairs
  std::optional<Correspondence> correspondence;
};

// Deterministic generator; throws on out-of-range parameters
// (DINGPERES is capped at K <= 8).
GeneratedExample generate(const ExampleSpec& spec);

// The hand-analyzed sequence for STAR2, PRODCHAIN, DINGPERES. theta is set
// to the measured maximum supported by the flow conditions. chain must come
// from generate(spec).
BottleneckSequence canonical_bottleneck(const Chain& chain, const ExampleSpec& spec);

// One block per copy of the product chain, for BlockDasher.
std::vector<VertexSet> prodchain_blocks(const Chain& chain, const ExampleSpec& spec);

}  // namespace mixtime

#endif
