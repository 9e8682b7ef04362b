#include "goosead/detector.hpp"

#include <algorithm>

#include "goosead/error.hpp"

namespace goosead {

namespace {

bool flagged(const Verdict& v, EvalView view) {
  switch (view) {
    case EvalView::kSeq: return v.over_seq;
    case EvalView::kTemp: return v.over_temp;
    case EvalView::kFused: return v.anomalous;
  }
  return false;
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

std::size_t Verdict::top_feature(View view) const {
  const std::size_t off = view_offset(view);
  std::size_t best = off;
  for (std::size_t j = off; j < off + view_width(view); ++j) {
    if (contribution[j] > contribution[best]) best = j;
  }
  return best;
}

std::vector<Verdict> score(const DetectorProfile& profile, const FeatureMatrix& x) {
  for (View v : {View::kSeq, View::kTemp}) {
    if (!profile.has(v)) {
      throw Error(ErrorKind::kSchema, "SchemaMismatch: profile has no " + std::string(view_name(v)) + " model");
    }
    const AeModel& m = profile.model(v);
    if (m.input_width() != view_width(v) || m.scaler.width() != view_width(v)) {
      throw Error(ErrorKind::kSchema, "SchemaMismatch: " + std::string(view_name(v)) +
                                          " model expects " + std::to_string(m.input_width()) +
                                          " features, view has " + std::to_string(view_width(v)));
    }
  }

  std::vector<Verdict> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Verdict& vd = out[i];
    vd.meta = x.meta[i];
    for (View v : {View::kSeq, View::kTemp}) {
      const AeModel& m = profile.model(v);
      const std::size_t off = view_offset(v), width = view_width(v);
      const std::vector<double> scaled =
          scale(m.scaler, std::span<const double>(x.rows[i]).subspan(off, width));
      const ForwardResult fw = forward(m, scaled);
      double sum = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const double d = scaled[j] - fw.output[j];
        vd.contribution[off + j] = d * d;
        sum += d * d;
      }
      for (std::size_t j = 0; j < width; ++j) {
        vd.share[off + j] = sum > 0.0 ? vd.contribution[off + j] / sum : 0.0;
      }
      const double e = mse(scaled, fw.output);
      const bool over = e > profile.threshold(v).z_star;
      if (v == View::kSeq) {
        vd.e_seq = e;
        vd.over_seq = over;
      } else {
        vd.e_temp = e;
        vd.over_temp = over;
      }
    }
    vd.anomalous = vd.over_seq || vd.over_temp;
  }
  return out;
}

std::string_view eval_view_name(EvalView v) {
  switch (v) {
    case EvalView::kSeq: return "seq";
    case EvalView::kTemp: return "temp";
    case EvalView::kFused: return "fused";
  }
  return "fused";
}

EvalRow metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  EvalRow r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.recall = ratio(tp, tp + fn);
  r.specificity = ratio(tn, tn + fp);
  r.precision = ratio(tp, tp + fp);
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.no_positives = tp + fn == 0;
  return r;
}

EvalRow evaluate(const std::vector<Verdict>& verdicts, Label positive_kind, EvalView view) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& v : verdicts) {
    if (v.meta.label == Label::kUnlabeled) {
      throw Error(ErrorKind::kSchema, "evaluation needs labelled verdicts");
    }
    const bool hit = flagged(v, view);
    if (v.meta.label == positive_kind) {
      hit ? ++tp : ++fn;
    } else if (v.meta.label == Label::kNormal) {
      hit ? ++fp : ++tn;
    }
  }
  EvalRow r = metrics_from_counts(tp, fp, tn, fn);
  r.kind = positive_kind;
  r.view = view;
  return r;
}

EvalReport evaluate_all(const std::vector<Verdict>& verdicts) {
  EvalReport report;
  for (Label kind : {Label::kMS, Label::kDM, Label::kDoS}) {
    for (EvalView view : {EvalView::kSeq, EvalView::kTemp, EvalView::kFused}) {
      report.rows.push_back(evaluate(verdicts, kind, view));
    }
  }
  report.total_windows = verdicts.size();
  for (const auto& v : verdicts) {
    if (v.meta.label != Label::kNormal) continue;
    ++report.normal_windows;
    if (v.anomalous) ++report.fused_false_positives;
  }
  report.fp_share_total = ratio(report.fused_false_positives, report.total_windows);
  report.fp_rate_normal = ratio(report.fused_false_positives, report.normal_windows);
  return report;
}

std::vector<IntervalHit> interval_detection(const std::vector<Verdict>& verdicts,
                                            const std::vector<AttackInterval>& intervals) {
  std::vector<IntervalHit> hits;
  for (const auto& iv : intervals) {
    IntervalHit h{iv};
    const TimestampUs a = from_seconds(iv.start_s), b = from_seconds(iv.end_s);
    for (const auto& v : verdicts) {
      if (v.meta.label != iv.kind) continue;
      if (v.meta.t_start >= b || v.meta.t_start + v.meta.t_w <= a) continue;
      ++h.windows;
      if (v.anomalous) ++h.flagged;
    }
    hits.push_back(h);
  }
  return hits;
}

}  // namespace goosead
