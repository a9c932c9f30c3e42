#pragma once

#include <string>

#include "tce/core.hpp"

namespace tce {

// Zone x instant user counts and summed mean traffic, observed and predicted.
struct ZoneSeries {
  Matrix<std::uint64_t> users_real;
  Matrix<std::uint64_t> users_pred;
  Matrix<double> traffic_real;
  Matrix<double> traffic_pred;
};

inline ZoneSeries aggregate(const TraceSet& traces, const LabelTable& labels_real, const LabelTable& labels_pred,
                            std::size_t zone_count) {
  const std::size_t users = traces.user_count();
  const std::size_t instants = traces.instant_count();
  for (const auto* table : {&labels_real, &labels_pred}) {
    if (table->rows() != users || table->cols() != instants)
      throw Error(ErrorKind::invalid_input, "aggregate: label table shape does not match traces");
    for (auto z : table->data())
      if (z >= zone_count) throw Error(ErrorKind::invalid_input, "aggregate: zone id out of range");
  }

  ZoneSeries s{Matrix<std::uint64_t>(zone_count, instants, 0), Matrix<std::uint64_t>(zone_count, instants, 0),
               Matrix<double>(zone_count, instants, 0.0), Matrix<double>(zone_count, instants, 0.0)};
  for (std::size_t u = 0; u < users; ++u) {
    const double rate = traces.mean_traffic(u);
    for (std::size_t t = 0; t < instants; ++t) {
      ++s.users_real(labels_real(u, t), t);
      s.traffic_real(labels_real(u, t), t) += rate;
      ++s.users_pred(labels_pred(u, t), t);
      s.traffic_pred(labels_pred(u, t), t) += rate;
    }
  }
  return s;
}

}  // namespace tce
