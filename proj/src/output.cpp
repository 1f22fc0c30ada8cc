#include "spinboson/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spinboson {

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace

std::string render_scales_csv(const MultiscaleResult& result) {
    std::ostringstream out;
    out << "n,rho_n,re_E,im_E,dE_abs,dE_bound,dP_norm,dP_bound,kappa,residual,rank_trace\n";
    for (std::size_t n = 0; n < result.table.size(); ++n) {
        const ScaleDiagnostics& d = result.table[n];
        out << n << ',' << sci(result.rhos[n]) << ',' << sci(result.energies[n].real()) << ','
            << sci(result.energies[n].imag()) << ',' << sci(d.dE_abs) << ','
            << sci(d.dE_bound) << ',' << sci(d.dP_norm) << ',' << sci(d.dP_bound) << ','
            << sci(d.kappa) << ',' << sci(d.residual) << ',' << sci(d.trace_re) << '\n';
    }
    return out.str();
}

std::string render_summary_json(const ModelParams& params, const MultiscaleResult& result,
                                const RestrictionReport& chain, double wall_seconds,
                                bool emit_timing) {
    nlohmann::ordered_json j;
    j["e_res"] = {{"re", result.e_res.real()}, {"im", result.e_res.imag()}};
    j["abs_e_minus_2"] = std::abs(result.e_res - Complex(2.0, 0.0));
    j["im_nonpositive"] = result.e_res.imag() <= 0.0;
    j["converged"] = result.converged;
    j["final_residual"] = result.final_residual;
    j["scales_run"] = result.table.size();

    nlohmann::ordered_json audits = nlohmann::ordered_json::object();
    for (const auto& a : result.audits) {
        std::string key = a.name + "@" + std::to_string(a.scale);
        audits[key] = {{"measured", a.measured}, {"bound", a.bound}, {"pass", a.pass}};
    }
    j["audits"] = audits;
    bool audits_pass = true;
    for (const auto& a : result.audits) audits_pass = audits_pass && a.pass;
    j["audits_pass"] = audits_pass;

    nlohmann::ordered_json chain_json = nlohmann::ordered_json::object();
    for (const auto& e : chain.entries)
        chain_json[e.name] = {{"value", e.lhs},
                              {"bound", e.rhs},
                              {"required", e.required},
                              {"pass", e.pass}};
    j["parameter_chain"] = chain_json;
    j["parameter_chain_pass"] = chain.all_pass;

    j["truncation"] = {{"modes_per_shell", params.modes_per_shell},
                       {"modes_outer", params.modes_outer},
                       {"occupancy_cap", params.occupancy_cap},
                       {"total_cap", params.total_cap},
                       {"outer_kmax_factor", params.outer_kmax_factor},
                       {"n_scales", params.n_scales}};
    j["model"] = {{"g", params.g},
                  {"vartheta", params.vartheta},
                  {"lambda_uv", params.lambda_uv},
                  {"rho0", params.rho0},
                  {"gamma", params.gamma}};
    if (emit_timing) j["wall_time_s"] = wall_seconds;
    return j.dump(2) + "\n";
}

std::string render_chain_report(const RestrictionReport& report) {
    std::ostringstream out;
    for (const auto& e : report.entries) {
        out << (e.pass ? "PASS " : "FAIL ") << e.name << ": value " << sci(e.lhs)
            << (e.required ? " < " : " <(informational) ") << sci(e.rhs) << "\n";
    }
    out << (report.all_pass ? "chain: PASS" : "chain: FAIL") << "\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << contents;
}

}  // namespace spinboson
