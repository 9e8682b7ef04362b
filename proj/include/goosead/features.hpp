#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "goosead/windowing.hpp"

namespace goosead {

enum class View { kSeq, kTemp };
std::string_view view_name(View view);  // "seq" / "temp"

inline constexpr std::size_t kNumFeatures = 14;
inline constexpr std::size_t kNumTemp = 8;
inline constexpr std::size_t kNumSeq = 6;

struct FeatureColumn {
  std::string_view name;
  View view;
  bool continuous;  // interpolated when missing; event-based columns are zero-filled
};

// Fixed registry order: the eight temporal columns, then the six sequence columns.
inline constexpr std::array<FeatureColumn, kNumFeatures> kFeatureColumns{{
    {"dt_mean", View::kTemp, true},
    {"dt_std", View::kTemp, true},
    {"rate_mean", View::kTemp, true},
    {"pkt_count", View::kTemp, true},
    {"jitter_mean", View::kTemp, true},
    {"jitter_std", View::kTemp, true},
    {"len_mean", View::kTemp, true},
    {"ttl_mean", View::kTemp, true},
    {"st_changes", View::kSeq, false},
    {"sq_resets", View::kSeq, false},
    {"sq_bigjump", View::kSeq, false},
    {"sq_progress", View::kSeq, false},
    {"st_jump_size_max", View::kSeq, false},
    {"bad_dst_rate", View::kSeq, false},
}};

inline constexpr std::size_t kTempOffset = 0;
inline constexpr std::size_t kSeqOffset = kNumTemp;

inline constexpr std::size_t view_offset(View v) { return v == View::kSeq ? kSeqOffset : kTempOffset; }
inline constexpr std::size_t view_width(View v) { return v == View::kSeq ? kNumSeq : kNumTemp; }

// Index into kFeatureColumns, or kNumFeatures if unknown.
std::size_t feature_index(std::string_view name);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

using TempVector = std::array<double, kNumTemp>;
using SeqVector = std::array<double, kNumSeq>;
using FeatureRow = std::array<double, kNumFeatures>;

// Missing entries are NaN.
TempVector extract_temporal(const FlowWindow& w);
SeqVector extract_sequence(const FlowWindow& w);
FeatureRow extract_features(const FlowWindow& w);

// dt values are clamped below at this floor before inversion.
inline constexpr double kMinDt = 1e-6;
// Columns with variance below this are degenerate at training scope.
inline constexpr double kDegenerateVariance = 1e-12;

struct RowMeta {
  FlowKey flow;
  TimestampUs t_start = 0;
  TimestampUs t_w = 0;
  Label label = Label::kUnlabeled;
};

struct FeatureMatrix {
  std::vector<RowMeta> meta;
  std::vector<FeatureRow> rows;
  std::array<bool, kNumFeatures> degenerate{};

  std::size_t size() const { return rows.size(); }
  // Row-major copy of the columns belonging to one view.
  std::vector<double> view_slice(View view) const;
};

enum class Scope { kTrain, kInfer };

// Extracts raw (possibly missing) features for every window.
FeatureMatrix extract_all(const std::vector<FlowWindow>& windows);

// Cleans an extracted matrix: drops rows with every feature missing, sorts
// rows by (flow, t_start), interpolates continuous columns within each flow
// (nearest value at the edges), zero-fills event-based columns, and at
// training scope flags degenerate columns.
FeatureMatrix assemble(FeatureMatrix raw, Scope scope);

}  // namespace goosead
