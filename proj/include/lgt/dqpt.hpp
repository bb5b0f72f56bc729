#pragma once

// Detection and classification of return-rate nonanalyticities.
//
//   Manifold  - lambda_1^+ and lambda_1^- exchange order;
//   Branch    - lambda_1 and lambda_2 of one manifold touch and separate
//               again (V-shaped closing of the sorted gap), or lambda_1 has a
//               slope discontinuity where no second branch is resolved;
//   DegeneracyStart / DegeneracyEnd - bounds of an interval on which
//               |lambda_1 - lambda_2| < eps_deg for at least min_duration.
//
// All detectors work on the rates alone (branch identity from the magnitude
// ordering), so a series read back from CSV gives the same events.

#include <optional>
#include <string>
#include <vector>

#include "lgt/quench.hpp"

namespace lgt {

enum class EventKind { Branch, Manifold, DegeneracyStart, DegeneracyEnd };

std::string to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct DQPTEvent {
  double time = 0.0;
  EventKind kind = EventKind::Branch;
  std::string manifold;     // "+", "-" or "+-" for Manifold events
  double confidence = 0.0;  // interpolation residual (smaller is sharper)

  bool operator==(const DQPTEvent&) const = default;
};

struct DetectOptions {
  double eps_deg = 1e-3;       // per-site rate units
  double min_duration = 0.5;   // 1/J
  /// Largest residual of the two-sided linear extrapolation accepted as a
  /// gap closing (in addition to a quarter of the smallest sampled gap).
  double crossing_tol = 1e-3;
  /// Smallest slope jump of lambda_1 counted as a kink, and the factor by
  /// which it must exceed the local background of the same estimator.
  double kink_min_jump = 0.1;
  double kink_contrast = 8.0;

  void validate() const;
};

struct DegeneracyInterval {
  double start = 0.0, end = 0.0;
  std::string manifold;
};

/// Manifold and Branch events (no degeneracy bookkeeping), sorted by time.
std::vector<DQPTEvent> detect_crossings(const ReturnRateSeries& series, const DetectOptions& options = {});

/// Maximal intervals with |lambda_1 - lambda_2| < eps_deg lasting at least
/// min_duration, split at kinks of lambda_1.
std::vector<DegeneracyInterval> detect_extended_degeneracy(const ReturnRateSeries& series,
                                                           const DetectOptions& options = {});

/// Full event list: crossings plus paired DegeneracyStart/End events, with
/// Branch events strictly inside an interval removed.
std::vector<DQPTEvent> detect_events(const ReturnRateSeries& series, const DetectOptions& options = {});

/// Times t where the sampled curve has a slope discontinuity (used for the
/// single-branch case and for the total-rate cross-check).
std::vector<double> kink_times(const std::vector<double>& t, const std::vector<double>& y,
                               const DetectOptions& options = {});

struct SpacingStatistics {
  std::vector<double> spacings;
  std::optional<double> mean;
  /// Coefficient of variation of the spacings (0 = perfectly periodic).
  std::optional<double> regularity;
};

/// Consecutive spacings of the events of the given kind (all kinds when empty).
SpacingStatistics spacing_statistics(const std::vector<DQPTEvent>& events,
                                     std::optional<EventKind> kind_filter = std::nullopt);

/// Pointwise min(lambda_1^+, lambda_1^-); throws when the series has no partner.
std::vector<double> total_rate(const ReturnRateSeries& series);

/// Events document: {"schema_version": 1, "manifold_plus", "manifold_minus",
/// "options": {...}, "events": [{time, kind, manifold, confidence}], "counts"}.
std::string events_to_json(const std::vector<DQPTEvent>& events, const ReturnRateSeries& series,
                           const DetectOptions& options);
std::vector<DQPTEvent> events_from_json(const std::string& text);

}  // namespace lgt
