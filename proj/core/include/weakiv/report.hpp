#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "weakiv/simulation.hpp"

namespace weakiv {

/// Canonical numeric formatting for emitted tables: 6 significant digits,
/// C locale. Emitted text is the interchange format, so round-tripping a
/// table through parse/print reproduces it byte for byte.
std::string fmt6(double x);

/// Long-format Monte-Carlo summary, one row per estimator. Header:
/// model,n,estimator,reps,n_success,n_failed,q000,q025,q050,q075,q100,median_bias,coverage95,seed
std::string mc_summary_csv(const MCSummary& s, std::string_view model_label);

/// Long-format sweep grid. Header:
/// axis,value,n,estimator,reps,n_success,n_failed,median_bias,seed
std::string sweep_csv(const std::vector<SweepRow>& rows, int reps,
                      std::uint64_t master_seed);

/// Per-replication estimate dump. Header: rep,estimator,ok,beta1,std_error
std::string records_csv(const std::vector<ReplicationRecord>& records);

}  // namespace weakiv
