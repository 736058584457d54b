#include "weakiv/report.hpp"

#include <cstdio>

namespace weakiv {

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string mc_summary_csv(const MCSummary& s, std::string_view model_label) {
  std::string out =
      "model,n,estimator,reps,n_success,n_failed,"
      "q000,q025,q050,q075,q100,median_bias,coverage95,seed\n";
  for (const EstimatorSummary& es : s.estimators) {
    out += model_label;
    out += ',' + std::to_string(s.n);
    out += ',';
    out += estimator_name(es.estimator);
    out += ',' + std::to_string(s.reps);
    out += ',' + std::to_string(es.n_success);
    out += ',' + std::to_string(es.n_failed);
    for (double q : es.quantiles) out += ',' + fmt6(q);
    out += ',' + fmt6(es.median_bias);
    out += ',' + fmt6(es.coverage95);
    out += ',' + std::to_string(s.master_seed) + '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int reps,
                      std::uint64_t master_seed) {
  std::string out =
      "axis,value,n,estimator,reps,n_success,n_failed,median_bias,seed\n";
  for (const SweepRow& r : rows) {
    out += sweep_axis_name(r.axis);
    out += ',' + fmt6(r.value);
    out += ',' + std::to_string(r.n);
    out += ',';
    out += estimator_name(r.estimator);
    out += ',' + std::to_string(reps);
    out += ',' + std::to_string(r.n_success);
    out += ',' + std::to_string(r.n_failed);
    out += ',' + fmt6(r.median_bias);
    out += ',' + std::to_string(master_seed) + '\n';
  }
  return out;
}

std::string records_csv(const std::vector<ReplicationRecord>& records) {
  std::string out = "rep,estimator,ok,beta1,std_error\n";
  for (const ReplicationRecord& r : records) {
    out += std::to_string(r.rep);
    out += ',';
    out += estimator_name(r.estimator);
    out += ',' + std::to_string(r.ok ? 1 : 0);
    out += ',' + fmt6(r.beta1);
    out += ',' + fmt6(r.std_error) + '\n';
  }
  return out;
}

}  // namespace weakiv
