#include "bnn/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "bnn/error.hpp"

namespace bnn {

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : k_(n_classes), counts_(n_classes * n_classes, 0) {
  if (k_ == 0) throw InvalidInput("confusion matrix needs >= 1 class");
}

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes,
                                 std::vector<std::size_t> counts)
    : k_(n_classes), counts_(std::move(counts)) {
  if (k_ == 0 || counts_.size() != k_ * k_) {
    throw InvalidInput("confusion matrix counts must be K x K");
  }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= k_ || predicted >= k_) {
    throw InvalidInput("label " + std::to_string(std::max(truth, predicted)) +
                       " is not < K = " + std::to_string(k_));
  }
  ++counts_[truth * k_ + predicted];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += at(truth, j);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, predicted);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true,
                                 std::span<const std::size_t> y_pred,
                                 std::size_t n_classes) {
  if (y_true.size() != y_pred.size()) {
    throw InvalidInput("y_true and y_pred differ in length");
  }
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(y_true[i], y_pred[i]);
  return cm;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw InvalidInput("confusion matrix holds no samples");
  const std::size_t k = cm.n_classes();
  MetricsReport report;
  report.accuracy =
      static_cast<double>(cm.trace()) / static_cast<double>(total);
  report.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = report.per_class[c];
    const std::size_t tp = cm.at(c, c);
    const std::size_t predicted = cm.col_sum(c);
    const std::size_t actual = cm.row_sum(c);
    m.support = actual;
    if (predicted == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(actual);
    }
    m.f1 = f1_score(m.precision, m.recall);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
  }
  report.macro_precision /= static_cast<double>(k);
  report.macro_recall /= static_cast<double>(k);
  report.macro_f1 /= static_cast<double>(k);
  return report;
}

namespace {

struct BinaryCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

BinaryCounts check_binary(std::span<const double> scores,
                          std::span<const std::size_t> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidInput("scores and labels differ in length");
  }
  BinaryCounts c;
  for (std::size_t y : labels) {
    if (y > 1) throw InvalidInput("ROC labels must be 0 or 1");
    (y == 1 ? c.pos : c.neg)++;
  }
  if (c.pos == 0 || c.neg == 0) {
    throw InvalidInput("ROC/AUC undefined: labels contain a single class");
  }
  return c;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores,
                   std::span<const std::size_t> labels) {
  const BinaryCounts totals = check_binary(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  const double p = static_cast<double>(totals.pos);
  const double n = static_cast<double>(totals.neg);
  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  // Trapezoid areas accumulate in count units (fp x tp) and are normalized
  // once at the end.
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area2 = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::size_t tp_prev = tp;
    const std::size_t fp_prev = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (labels[order[i]] == 1 ? tp : fp)++;
    }
    area2 += static_cast<double>(fp - fp_prev) *
             static_cast<double>(tp + tp_prev);
    curve.points.push_back({threshold, static_cast<double>(fp) / n,
                            static_cast<double>(tp) / p});
  }
  curve.auc = area2 / (2.0 * p * n);
  return curve;
}

double auc_mann_whitney(std::span<const double> scores,
                        std::span<const std::size_t> labels) {
  const BinaryCounts totals = check_binary(scores, labels);
  double wins = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(totals.pos) * static_cast<double>(totals.neg));
}

OneVsRestRoc one_vs_rest_roc(std::span<const double> probs,
                             std::span<const std::size_t> labels,
                             std::size_t n_classes) {
  if (n_classes < 2) throw InvalidInput("one-vs-rest ROC needs K >= 2");
  if (probs.size() != labels.size() * n_classes) {
    throw InvalidInput("probability matrix is not n x K");
  }
  OneVsRestRoc out;
  std::vector<double> scores(labels.size());
  std::vector<std::size_t> binary(labels.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      scores[i] = probs[i * n_classes + c];
      binary[i] = labels[i] == c ? 1 : 0;
    }
    out.curves.push_back(roc_curve(scores, binary));
    out.macro_auc += out.curves.back().auc;
  }
  out.macro_auc /= static_cast<double>(n_classes);
  return out;
}

}  // namespace bnn
