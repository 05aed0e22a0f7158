#pragma once

#include <cstdint>

#include "cfmgml/graph.hpp"

namespace cfmgml {

// Synthetic multi-graph multi-label data with planted per-graph classes.
// Each class has a fixed motif (a small ring with a class-specific label
// pattern, or class-specific attribute centroids); every graph in a bag is a
// perturbed copy of its planted class's motif, and the bag's label set is
// exactly the set of planted classes. Deterministic given the seed.
struct SynthConfig {
  int num_classes = 4;         // C >= 2
  int num_bags = 20;           // >= 1
  int graphs_min = 2;          // graphs per bag, raised to the label count
  int graphs_max = 5;
  int labels_max = 2;          // labels per bag drawn from [1, labels_max <= C-1]
  int motif_min = 4;           // motif vertex counts
  int motif_max = 7;
  double edge_noise = 0.0;     // per-vertex-pair edge flip probability, [0,1)
  VertexVariant variant = VertexVariant::label;
  int attr_dim = 3;            // attribute variant only
  double attr_noise = 0.1;     // attribute perturbation stddev
  // Extra classless graphs per bag (graph label -1, excluded from bag label
  // sets and from graph-accuracy scoring). Off by default: with them the
  // bag-equals-union-of-planted-labels property no longer holds.
  int background_per_bag = 0;
  std::uint64_t seed = 0;
};

// Unperturbed motif for a class. cls == num_classes selects the background
// palette.
Graph motif_graph(const SynthConfig& cfg, int cls, int size);

// Throws std::invalid_argument on a config violating the ranges above.
Dataset generate(const SynthConfig& cfg);

}  // namespace cfmgml
