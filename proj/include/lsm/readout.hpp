#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lsm/dynamics.hpp"

namespace lsm {

struct ReadoutConfig {
  double k = 1000.0;
  double w_lim = 8.0;
  /// Relative ridge: the solve adds ridge * trace(R R^T) / n_neurons to the
  /// diagonal of the normal equations.
  double ridge = 1e-6;
  std::size_t n_classes = 10;

  void validate() const;
  bool operator==(const ReadoutConfig&) const = default;
};

void to_json(nlohmann::json& j, const ReadoutConfig& c);
void from_json(const nlohmann::json& j, ReadoutConfig& c);

/// n_classes x n_neurons output weights.
struct ReadoutWeights {
  Eigen::MatrixXd w;
};

/// Column j holds the rate vector of sample j (n_neurons x n_samples).
Eigen::MatrixXd assemble_responses(std::span<const SampleRecord> records);

/// One-hot targets, n_classes x n_samples.
Eigen::MatrixXd target_matrix(std::span<const int> labels, std::size_t n_classes);

/// Least-squares weights K * y_T * R^T (R R^T + ridge I)^-1 without clipping.
/// Throws SingularSystemError when the normal equations are not positive definite.
Eigen::MatrixXd solve_readout(const Eigen::MatrixXd& responses, std::span<const int> labels,
                              const ReadoutConfig& config);

void clip_weights(Eigen::MatrixXd& w, double w_lim);

/// solve_readout followed by clipping to [-w_lim, w_lim].
ReadoutWeights train_readout(const Eigen::MatrixXd& responses, std::span<const int> labels,
                             const ReadoutConfig& config);

/// argmax_c (W r)_c, ties broken by the lowest class index.
int classify(const Eigen::MatrixXd& weights, const Eigen::VectorXd& response);
inline int classify(const ReadoutWeights& weights, const Eigen::VectorXd& response) {
  return classify(weights.w, response);
}

/// Test-index sets of a stratified k-fold split: samples of each class are
/// shuffled with the seed and dealt rank-major, and the resulting order is cut
/// into contiguous blocks whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> kfold_partition(std::span<const int> labels,
                                                      std::size_t n_classes, std::size_t n_folds,
                                                      std::uint64_t seed);

struct KFoldResult {
  std::vector<double> fold_accuracy;
  std::vector<std::size_t> fold_sizes;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted], summed over folds

  double error() const { return 1.0 - mean_accuracy; }
};

KFoldResult kfold_evaluate(const Eigen::MatrixXd& responses, std::span<const int> labels,
                           const ReadoutConfig& config, std::size_t n_folds, std::uint64_t seed);

KFoldResult kfold_evaluate(std::span<const SampleRecord> records, std::span<const int> labels,
                           const ReadoutConfig& config, std::size_t n_folds, std::uint64_t seed);

nlohmann::json weights_to_json(const ReadoutWeights& weights, const ReadoutConfig& config,
                               std::uint64_t seed);

}  // namespace lsm
