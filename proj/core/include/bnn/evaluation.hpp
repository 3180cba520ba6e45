#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bnn {

/// K x K counts; entry (i, j) = samples of true class i predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes);
  ConfusionMatrix(std::size_t n_classes, std::vector<std::size_t> counts);

  std::size_t n_classes() const { return k_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * k_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted);

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t predicted) const;
  const std::vector<std::size_t>& counts() const { return counts_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

/// Throws InvalidInput on length mismatch or any label >= n_classes.
ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true,
                                 std::span<const std::size_t> y_pred,
                                 std::size_t n_classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when the denominator was zero and the value was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// 2PR / (P + R), or 0 when P + R = 0.
double f1_score(double precision, double recall);

/// Throws InvalidInput for a matrix with no samples.
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold = 0.0;  // +inf for the (0, 0) anchor
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Binary ROC. Labels must be 0 (negative) or 1 (positive) and both classes
/// present. Thresholds are the distinct scores in descending order, a point
/// is emitted after each tie group, and the curve starts at (0, 0) with an
/// infinite threshold. AUC by the trapezoidal rule.
RocCurve roc_curve(std::span<const double> scores,
                   std::span<const std::size_t> labels);

/// P(score_pos > score_neg) + 0.5 P(tie) by direct pair enumeration.
double auc_mann_whitney(std::span<const double> scores,
                        std::span<const std::size_t> labels);

struct OneVsRestRoc {
  std::vector<RocCurve> curves;  // one per class
  double macro_auc = 0.0;
};

/// One-vs-rest curves for class-probability rows (n x K, row-major). Each
/// class uses its own probability column as the score. Every class must have
/// at least one positive and one negative sample.
OneVsRestRoc one_vs_rest_roc(std::span<const double> probs,
                             std::span<const std::size_t> labels,
                             std::size_t n_classes);

}  // namespace bnn
