#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvtraffic/estimation.hpp"
#include "mvtraffic/netsim.hpp"
#include "mvtraffic/viewswitch.hpp"

namespace mvtraffic {

// Trace CSV: header `gop,view,pos,type,bytes`, one frame per row in canonical
// order (GOP, then view, then position). Bytes are written as rounded
// nonnegative integers, so writing the same trace twice is byte-identical.
// Readers reject out-of-order rows, label mismatches, malformed counts, and
// traces ending mid-GOP, reporting the offending line number.
void write_trace(const Trace& trace, const std::string& path);
Trace read_trace(const std::string& path, const GopStructure& structure);

// Same format, with the structure inferred from the rows themselves (view
// count, frames per view, labels from the first GOP). Bin counts are not part
// of the CSV, so inferred structures default to 10 bins per position and fps
// to 25; pass an explicit structure when those matter.
Trace read_trace(const std::string& path);

// GOP structure JSON with format_version 1.
void write_structure(const GopStructure& structure, const std::string& path);
GopStructure read_structure(const std::string& path);

// Model JSON with format_version 1: the structure it was fitted against plus
// pi, trans, lambda, the quantization grid, and the emission tables. Readers
// refuse other versions and validate everything before returning.
void write_model(const PhmmParams& params, const GopStructure& structure,
                 const std::string& path);
std::pair<PhmmParams, GopStructure> read_model(const std::string& path);

// View-switching parameters JSON with format_version 1.
void write_vsm(const VsmParams& params, const std::string& path);
VsmParams read_vsm(const std::string& path);

// Simulation configuration JSON. Every key is optional and defaults to the
// SimConfig initializers; a missing or null buffer size means unbounded.
SimConfig read_sim_config(const std::string& path);
void write_sim_config(const SimConfig& config, const std::string& path);

// Fit trajectory CSV: `iteration,log_likelihood`, iterations 1-based.
void write_fit_report_csv(const FitReport& report, const std::string& path);

// Schedule CSV: `view,start_s,end_s` per segment.
void write_schedule_csv(const ViewSchedule& schedule, const std::string& path);

// Analysis CSVs: `lag,acf` and `quantile_a,quantile_b`.
void write_acf_csv(const std::vector<double>& values, const std::string& path);
void write_qq_csv(const std::vector<std::pair<double, double>>& points,
                  const std::string& path);

}  // namespace mvtraffic
