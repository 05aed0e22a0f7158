#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfmgml/graph.hpp"
#include "cfmgml/kernels.hpp"

namespace cfmgml {

// Dual-form classifier. The class-c weight is the kernel expansion
//   w_c = sum_i scale[i] * coeff[c][i] * phi(repr_graphs[i][c])
// so any graph can be scored from kernel evaluations alone:
//   f_c(g) = sum_i scale[i] * coeff[c][i] * K(repr_graphs[i][c], g).
// scale[i] folds in the final iteration count; coeff holds the per-class,
// per-bag aggregate counter sums produced by training.
struct DualModel {
  int num_classes = 0;
  double lambda = 0.0;
  long long t_final = 0;
  KernelConfig kernel;
  std::vector<std::vector<double>> coeff;       // num_classes x n
  std::vector<double> scale;                    // n, positive
  std::vector<std::vector<int>> repr;           // n x num_classes, in-bag indices
  std::vector<std::vector<Graph>> repr_graphs;  // n x num_classes

  int num_bags() const { return static_cast<int>(scale.size()); }

  friend bool operator==(const DualModel&, const DualModel&) = default;
};

// f_c(g) given kernel_row[i] = K(repr_graphs[i][c], g).
// Throws std::invalid_argument when the row length is not num_bags.
double score_graph(const DualModel& m, int cls,
                   std::span<const double> kernel_row);

// Bag score max_j f_c(g_j) and the graph index attaining it; ties break to
// the lowest index. rows[j] is the kernel row for the bag's j-th graph.
std::pair<double, int> score_bag(const DualModel& m, int cls,
                                 const std::vector<std::vector<double>>& rows);

// Kernel values between representative graphs, per class:
// at(c, h, i) = K(repr of bag h for class c, repr of bag i for class c).
struct ReprGram {
  int num_bags = 0;
  std::vector<std::vector<double>> per_class;  // [c][h * num_bags + i]

  double at(int c, int h, int i) const {
    return per_class[static_cast<std::size_t>(c)]
                    [static_cast<std::size_t>(h) * num_bags + i];
  }
};

ReprGram repr_gram_from_cache(const GramCache& gram,
                              const std::vector<std::vector<int>>& repr,
                              int num_classes);
// For standalone (loaded) models: recomputes the values from the embedded
// representative graphs.
ReprGram repr_gram_from_model(const DualModel& m);

// Squared Frobenius norm of the induced weights, as the full bilinear form
//   sum_c sum_h sum_i scale[h] coeff[c][h] scale[i] coeff[c][i] at(c,h,i).
// Non-negative up to rounding.
double model_norm_sq(const DualModel& m, const ReprGram& rg);

// Line-delimited model file: header, coefficient matrix, scale vector,
// representative indices, then one record per bag with the embedded
// representative graphs. Round-trips exactly.
void save_model(const DualModel& m, const std::string& path);
DualModel load_model(const std::string& path);

}  // namespace cfmgml
