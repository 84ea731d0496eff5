#pragma once

#include <ostream>
#include <string>

#include "csmc/mlmc.hpp"
#include "csmc/stats.hpp"

namespace csmc {

// The replicate-row CSV contract: exactly these columns in this order,
// 17 significant digits for floats, LF line endings.
inline constexpr const char* kReportCsvHeader =
    "scheme,model,l,n,N,replicate,seed,pred_diff,filt_diff,mean_sq_dist,"
    "decouple_frac,ess_f,ess_c,wall_ms";

std::string format_double17(double v);

void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const ReplicateReport& rep);

// Sweep summary rows (separate file from the raw replicate rows).
inline constexpr const char* kSweepSummaryCsvHeader =
    "scheme,model,axis,point,n,N,R,var_pred_diff,nvar_pred_diff,mean_sq_dist,"
    "decouple_frac,slope,slope_se";

void write_sweep_summary(std::ostream& out, const SweepResult& sweep,
                         SchemeId scheme, const std::string& model_name,
                         int horizon_or_level, long n_particles);

// MLMC rows: one per level term plus the estimate row.
inline constexpr const char* kMlmcCsvHeader = "record,level,N,value,cost";

void write_mlmc_csv(std::ostream& out, const MlmcResult& result,
                    const MlmcPlan& plan, int horizon);

std::uint64_t fnv1a64_bytes(const void* data, std::size_t size);

}  // namespace csmc
