#pragma once

#include <string>
#include <vector>

#include "spinboson/config.hpp"
#include "spinboson/model.hpp"
#include "spinboson/multiscale.hpp"

namespace spinboson {

/// scales.csv: header n,rho_n,re_E,im_E,dE_abs,dE_bound,dP_norm,dP_bound,
/// kappa,residual,rank_trace; full-precision scientific notation so byte
/// comparison of reruns is meaningful.
std::string render_scales_csv(const MultiscaleResult& result);

/// summary.json with stable key order. Every measured audit value is paired
/// with its bound. Wall time is only included on request since it would
/// break byte-level determinism.
std::string render_summary_json(const ModelParams& params, const MultiscaleResult& result,
                                const RestrictionReport& chain, double wall_seconds,
                                bool emit_timing);

std::string render_chain_report(const RestrictionReport& report);

void write_file(const std::string& path, const std::string& contents);

}  // namespace spinboson
