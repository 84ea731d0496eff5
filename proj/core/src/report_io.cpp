#include "csmc/report_io.hpp"

#include <cstdio>

namespace csmc {

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_report_header(std::ostream& out) {
  out << kReportCsvHeader << "\n";
}

void write_report_row(std::ostream& out, const ReplicateReport& rep) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto value = [&](double v) { return rep.failed ? nan : v; };
  out << to_string(rep.scheme) << ',' << rep.model_name << ',' << rep.level
      << ',' << rep.horizon << ',' << rep.n_particles << ','
      << rep.replicate_index << ',' << rep.seed << ','
      << format_double17(value(rep.pred_diff)) << ','
      << format_double17(value(rep.filt_diff)) << ','
      << format_double17(value(rep.mean_sq_dist)) << ','
      << format_double17(value(rep.decouple_frac)) << ','
      << format_double17(value(rep.ess_f)) << ','
      << format_double17(value(rep.ess_c)) << ','
      << format_double17(rep.wall_ms) << "\n";
}

void write_sweep_summary(std::ostream& out, const SweepResult& sweep,
                         SchemeId scheme, const std::string& model_name,
                         int horizon_or_level, long n_particles) {
  out << kSweepSummaryCsvHeader << "\n";
  for (const auto& pt : sweep.points) {
    out << to_string(scheme) << ',' << model_name << ',' << sweep.axis << ','
        << static_cast<long>(pt.axis_value) << ',' << horizon_or_level << ','
        << n_particles << ',' << sweep.replicates << ','
        << format_double17(pt.var_pred_diff) << ','
        << format_double17(pt.nvar) << ',' << format_double17(pt.mean_sq_dist)
        << ',' << format_double17(pt.decouple_frac) << ",,\n";
  }
  out << to_string(scheme) << ',' << model_name << ',' << sweep.axis
      << ",,," << n_particles << ',' << sweep.replicates << ",,,,,"
      << format_double17(sweep.slope) << ','
      << format_double17(sweep.slope_se) << "\n";
}

void write_mlmc_csv(std::ostream& out, const MlmcResult& result,
                    const MlmcPlan& plan, int horizon) {
  out << kMlmcCsvHeader << "\n";
  for (std::size_t l = 0; l < result.level_terms.size(); ++l) {
    const double cost_l = static_cast<double>(plan.n_samples[l]) *
                          static_cast<double>(1L << l) * horizon;
    out << "level_term," << l << ',' << plan.n_samples[l] << ','
        << format_double17(result.level_terms[l]) << ','
        << format_double17(cost_l) << "\n";
  }
  out << "estimate,,," << format_double17(result.estimate) << ','
      << format_double17(result.cost) << "\n";
}

std::uint64_t fnv1a64_bytes(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace csmc
