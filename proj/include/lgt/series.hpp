#pragma once

// Plain-text persistence of ReturnRateSeries.
//
// Layout: '#' comment lines carrying units and metadata ("# key: value"),
// then a header row and one row per sample. Columns:
//   t, lambda1_plus, lambda2_plus, lambda1_minus, lambda2_minus,
//   [lambda3_plus, lambda4_plus, lambda3_minus, lambda4_minus,]
//   ex_flux, ex_flux_stag, n_diff, trunc_err, flags
// Numbers use %.12e; non-finite values are written as inf / -inf / nan.

#include <iosfwd>
#include <map>
#include <string>

#include "lgt/quench.hpp"

namespace lgt {

/// Extra "# key: value" lines written after the standard header.
using SeriesMetadata = std::map<std::string, std::string>;

void write_series_csv(std::ostream& out, const ReturnRateSeries& series, const SeriesMetadata& extra = {});
void write_series_csv(const std::string& path, const ReturnRateSeries& series, const SeriesMetadata& extra = {});

/// Parses a file written by write_series_csv. Metadata lines are returned
/// through `metadata` when given.
ReturnRateSeries read_series_csv(std::istream& in, SeriesMetadata* metadata = nullptr);
ReturnRateSeries read_series_csv(const std::string& path, SeriesMetadata* metadata = nullptr);

/// Formats one value the way the CSV writer does.
std::string format_number(double value);

}  // namespace lgt
