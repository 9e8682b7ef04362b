#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "goosead/autoencoder.hpp"
#include "goosead/evt.hpp"
#include "goosead/features.hpp"

namespace goosead {

// Both trained views with their calibrated thresholds.
struct DetectorProfile {
  AeModel seq;
  AeModel temp;
  EvtThreshold seq_threshold;
  EvtThreshold temp_threshold;

  const AeModel& model(View v) const { return v == View::kSeq ? seq : temp; }
  const EvtThreshold& threshold(View v) const { return v == View::kSeq ? seq_threshold : temp_threshold; }
  // A profile trained for a single view leaves the other model empty.
  bool has(View v) const { return !model(v).dims.empty(); }

  bool operator==(const DetectorProfile&) const = default;
};

struct Verdict {
  RowMeta meta;
  double e_seq = 0.0;
  double e_temp = 0.0;
  bool over_seq = false;
  bool over_temp = false;
  bool anomalous = false;
  // Squared scaled reconstruction error per feature, registry order.
  std::array<double, kNumFeatures> contribution{};
  // contribution / sum of contributions within the feature's view (0 when the sum is 0).
  std::array<double, kNumFeatures> share{};

  // Registry index of the largest contribution within a view.
  std::size_t top_feature(View view) const;
};

// Scores every row. Throws Error(kSchema) "SchemaMismatch" if either model
// is missing or does not match its view's width.
std::vector<Verdict> score(const DetectorProfile& profile, const FeatureMatrix& x);

enum class EvalView { kSeq, kTemp, kFused };
std::string_view eval_view_name(EvalView v);  // "seq", "temp", "fused"

struct EvalRow {
  Label kind = Label::kMS;
  EvalView view = EvalView::kFused;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double recall = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  bool no_positives = false;  // recall undefined
};

// Metric arithmetic from a confusion count; 0/0 ratios are 0.
EvalRow metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

struct EvalReport {
  std::vector<EvalRow> rows;        // per (kind, view)
  std::size_t total_windows = 0;
  std::size_t normal_windows = 0;
  std::size_t fused_false_positives = 0;
  double fp_share_total = 0.0;      // fused FP / all windows
  double fp_rate_normal = 0.0;      // fused FP / normal windows
};

// Positives: windows labelled `positive_kind`. Negatives: normal windows.
// Throws Error(kSchema) if any verdict is unlabelled.
EvalRow evaluate(const std::vector<Verdict>& verdicts, Label positive_kind, EvalView view);

// Rows for MS, DM and DoS under each of seq, temp and fused, plus FP shares.
EvalReport evaluate_all(const std::vector<Verdict>& verdicts);

struct IntervalHit {
  AttackInterval interval;
  std::size_t windows = 0;  // windows of the interval's kind that meet it
  std::size_t flagged = 0;  // of which anomalous
  bool detected() const { return flagged > 0; }
};

// Interval-level detection: an attack interval counts as detected when at
// least one window carrying its label and overlapping it is anomalous.
std::vector<IntervalHit> interval_detection(const std::vector<Verdict>& verdicts,
                                            const std::vector<AttackInterval>& intervals);

}  // namespace goosead
