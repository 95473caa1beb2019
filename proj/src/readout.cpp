#include "lsm/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsm/errors.hpp"
#include "lsm/rng.hpp"

namespace lsm {

void ReadoutConfig::validate() const {
  if (!(k > 0.0)) throw ValidationError("readout k must be positive");
  if (!(w_lim > 0.0)) throw ValidationError("readout w_lim must be positive");
  if (!(ridge >= 0.0)) throw ValidationError("readout ridge must be >= 0");
  if (n_classes == 0) throw ValidationError("readout n_classes must be positive");
}

void to_json(nlohmann::json& j, const ReadoutConfig& c) {
  j = nlohmann::json{{"k", c.k}, {"w_lim", c.w_lim}, {"ridge", c.ridge}, {"n_classes", c.n_classes}};
}

void from_json(const nlohmann::json& j, ReadoutConfig& c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "k") {
      c.k = value.get<double>();
    } else if (key == "w_lim") {
      c.w_lim = value.get<double>();
    } else if (key == "ridge") {
      c.ridge = value.get<double>();
    } else if (key == "n_classes") {
      c.n_classes = value.get<std::size_t>();
    } else {
      throw ValidationError("unknown readout key '" + key + "'");
    }
  }
}

Eigen::MatrixXd assemble_responses(std::span<const SampleRecord> records) {
  if (records.empty()) throw ValidationError("assemble_responses needs at least one record");
  const auto n = static_cast<Eigen::Index>(records.front().rates.size());
  Eigen::MatrixXd r(n, static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (static_cast<Eigen::Index>(records[j].rates.size()) != n) {
      throw ValidationError("records disagree on neuron count");
    }
    r.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(records[j].rates.data(), n);
  }
  return r;
}

Eigen::MatrixXd target_matrix(std::span<const int> labels, std::size_t n_classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_classes),
                                            static_cast<Eigen::Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0 || static_cast<std::size_t>(labels[j]) >= n_classes) {
      throw ValidationError("label " + std::to_string(labels[j]) + " out of range");
    }
    y(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return y;
}

Eigen::MatrixXd solve_readout(const Eigen::MatrixXd& responses, std::span<const int> labels,
                              const ReadoutConfig& config) {
  config.validate();
  if (responses.cols() == 0) throw ValidationError("readout needs at least one sample");
  if (static_cast<std::size_t>(responses.cols()) != labels.size()) {
    throw ValidationError("responses and labels disagree on sample count");
  }
  const Eigen::MatrixXd y = target_matrix(labels, config.n_classes);
  const auto n = responses.rows();

  Eigen::MatrixXd gram = responses * responses.transpose();
  const double trace = gram.trace();
  if (config.ridge > 0.0 && trace == 0.0) {
    // Silent reservoir: the regularized solution is exactly zero.
    return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(config.n_classes), n);
  }
  const double lambda = config.ridge * trace / static_cast<double>(n);
  gram.diagonal().array() += lambda;

  const Eigen::MatrixXd rhs = config.k * (responses * y.transpose());  // n x classes
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("readout normal equations are singular (rank-deficient responses)");
  }
  // Reject numerically singular systems: the Cholesky diagonal bounds the
  // condition number.
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  if (lambda == 0.0 && !(ratio * ratio > 1e-14)) {
    throw SingularSystemError("readout normal equations are ill-conditioned");
  }
  return llt.solve(rhs).transpose();
}

void clip_weights(Eigen::MatrixXd& w, double w_lim) { w = w.cwiseMax(-w_lim).cwiseMin(w_lim); }

ReadoutWeights train_readout(const Eigen::MatrixXd& responses, std::span<const int> labels,
                             const ReadoutConfig& config) {
  ReadoutWeights out{solve_readout(responses, labels, config)};
  clip_weights(out.w, config.w_lim);
  return out;
}

int classify(const Eigen::MatrixXd& weights, const Eigen::VectorXd& response) {
  if (weights.cols() != response.size()) throw ValidationError("classify: dimension mismatch");
  const Eigen::VectorXd scores = weights * response;
  int best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = static_cast<int>(c);
  }
  return best;
}

std::vector<std::vector<std::size_t>> kfold_partition(std::span<const int> labels,
                                                      std::size_t n_classes, std::size_t n_folds,
                                                      std::uint64_t seed) {
  if (n_folds == 0) throw ValidationError("n_folds must be positive");
  if (n_folds > labels.size()) throw ValidationError("n_folds exceeds the number of samples");

  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
      throw ValidationError("label " + std::to_string(labels[i]) + " out of range");
    }
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  Rng rng(derive_seed(seed, stream::kFolds));
  std::size_t longest = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    longest = std::max(longest, members.size());
  }
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (std::size_t rank = 0; rank < longest; ++rank) {
    for (const auto& members : by_class) {
      if (rank < members.size()) order.push_back(members[rank]);
    }
  }

  std::vector<std::vector<std::size_t>> folds(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t begin = order.size() * f / n_folds;
    const std::size_t end = order.size() * (f + 1) / n_folds;
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                    order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(folds[f].begin(), folds[f].end());
  }
  return folds;
}

KFoldResult kfold_evaluate(const Eigen::MatrixXd& responses, std::span<const int> labels,
                           const ReadoutConfig& config, std::size_t n_folds, std::uint64_t seed) {
  const auto folds = kfold_partition(labels, config.n_classes, n_folds, seed);
  const std::size_t n_samples = labels.size();

  KFoldResult result;
  result.confusion.assign(config.n_classes, std::vector<std::size_t>(config.n_classes, 0));
  std::vector<char> is_test(n_samples);
  for (const auto& test : folds) {
    std::fill(is_test.begin(), is_test.end(), 0);
    for (auto i : test) is_test[i] = 1;
    std::vector<Eigen::Index> train_cols;
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (!is_test[i]) {
        train_cols.push_back(static_cast<Eigen::Index>(i));
        train_labels.push_back(labels[i]);
      }
    }
    const Eigen::MatrixXd train = responses(Eigen::all, train_cols);
    const auto weights = train_readout(train, train_labels, config);
    std::size_t correct = 0;
    for (auto i : test) {
      const int predicted = classify(weights, responses.col(static_cast<Eigen::Index>(i)));
      correct += predicted == labels[i];
      ++result.confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predicted)];
    }
    result.fold_sizes.push_back(test.size());
    result.fold_accuracy.push_back(test.empty() ? 0.0
                                                : static_cast<double>(correct) /
                                                      static_cast<double>(test.size()));
  }
  const double nf = static_cast<double>(n_folds);
  result.mean_accuracy =
      std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) / nf;
  double ss = 0.0;
  for (double a : result.fold_accuracy) ss += (a - result.mean_accuracy) * (a - result.mean_accuracy);
  result.std_accuracy = std::sqrt(ss / nf);
  return result;
}

KFoldResult kfold_evaluate(std::span<const SampleRecord> records, std::span<const int> labels,
                           const ReadoutConfig& config, std::size_t n_folds, std::uint64_t seed) {
  return kfold_evaluate(assemble_responses(records), labels, config, n_folds, seed);
}

nlohmann::json weights_to_json(const ReadoutWeights& weights, const ReadoutConfig& config,
                               std::uint64_t seed) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index c = 0; c < weights.w.rows(); ++c) {
    std::vector<double> row(weights.w.row(c).begin(), weights.w.row(c).end());
    rows.push_back(row);
  }
  return nlohmann::json{{"config", config}, {"seed", seed}, {"weights", rows}};
}

}  // namespace lsm
