#ifndef MDWTNN_REPORT_HPP
#define MDWTNN_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdwtnn/io.hpp"
#include "mdwtnn/metrics.hpp"
#include "mdwtnn/noise.hpp"
#include "mdwtnn/solver.hpp"

namespace mdwtnn {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// Quality report CSV, fixed 6-column schema:
//   row,band,psnr_db,ssim,sam_deg,time_s
// one "band" row per band (sam/time cells empty), then one "summary" row
// carrying MPSNR / MSSIM / MSAM / wall time.
inline void write_report_csv(const QualityReport& report, const std::filesystem::path& path) {
    std::string out = "row,band,psnr_db,ssim,sam_deg,time_s\n";
    for (std::size_t k = 0; k < report.psnr_per_band.size(); ++k) {
        out += "band," + std::to_string(k + 1) + "," + detail::fmt_double(report.psnr_per_band[k]) +
               "," + detail::fmt_double(report.ssim_per_band[k]) + ",,\n";
    }
    out += "summary,," + detail::fmt_double(report.mpsnr) + "," + detail::fmt_double(report.mssim) +
           "," + detail::fmt_double(report.msam) + "," +
           detail::fmt_double(report.wall_time_seconds) + "\n";
    detail::atomic_write(path, out);
}

struct ParsedReport {
    std::vector<double> psnr_per_band;
    std::vector<double> ssim_per_band;
    double mpsnr = 0, mssim = 0, msam = 0, time_s = 0;
};

inline ParsedReport parse_report_csv(const std::filesystem::path& path) {
    const std::string text = detail::read_all(path);
    ParsedReport parsed;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "row,band,psnr_db,ssim,sam_deg,time_s")
        throw IoError("report csv: unexpected schema line");
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        cells.resize(6);
        if (cells[0] == "band") {
            parsed.psnr_per_band.push_back(std::stod(cells[2]));
            parsed.ssim_per_band.push_back(std::stod(cells[3]));
        } else if (cells[0] == "summary") {
            parsed.mpsnr = std::stod(cells[2]);
            parsed.mssim = std::stod(cells[3]);
            parsed.msam = std::stod(cells[4]);
            parsed.time_s = std::stod(cells[5]);
        }
    }
    return parsed;
}

// Iteration log CSV: iter,constraint_rel,z_gap_rel,z_s,x_s,s_s,n_s,mult_s
// (step timings are zero unless the run had timing enabled).
inline void write_iteration_log(const std::vector<IterationRecord>& history,
                                const std::filesystem::path& path) {
    std::string out = "iter,constraint_rel,z_gap_rel,z_s,x_s,s_s,n_s,mult_s\n";
    for (const auto& rec : history) {
        out += std::to_string(rec.iter) + "," + detail::fmt_double(rec.constraint_rel) + "," +
               detail::fmt_double(rec.z_gap_rel);
        for (double s : rec.step_seconds) out += "," + detail::fmt_double(s);
        out += "\n";
    }
    detail::atomic_write(path, out);
}

inline nlohmann::json to_json(const Level& lv) {
    if (const auto* f = std::get_if<Fixed>(&lv)) return {{"kind", "fixed"}, {"value", f->value}};
    const auto& u = std::get<PerBandUniform>(lv);
    return {{"kind", "per_band_uniform"}, {"lo", u.lo}, {"hi", u.hi}};
}

inline nlohmann::json to_json(const NoiseSpec& spec) {
    return {{"gaussian", to_json(spec.gaussian)},
            {"impulse", to_json(spec.impulse)},
            {"seed", spec.seed},
            {"clip", spec.clip}};
}

inline const char* trunc_rule_name(TruncRule rule) {
    switch (rule) {
    case TruncRule::max_ratio: return "max-ratio";
    case TruncRule::energy_ratio: return "energy-ratio";
    case TruncRule::none: return "none";
    }
    return "?";
}

inline nlohmann::json to_json(const SolverConfig& cfg, double lambda_effective) {
    nlohmann::json j{{"lambda_effective", lambda_effective},
                     {"tau", cfg.tau_n},
                     {"alpha", cfg.alpha},
                     {"mu0", cfg.mu0},
                     {"beta0", cfg.beta0},
                     {"rho", cfg.rho},
                     {"mu_max", cfg.mu_max},
                     {"tol", cfg.tol},
                     {"max_iter", cfg.max_iter},
                     {"c1", cfg.weights.c1},
                     {"c2", cfg.weights.c2},
                     {"eta", cfg.weights.eta},
                     {"trunc_rule", trunc_rule_name(cfg.weights.trunc_rule)},
                     {"uniform_freq_weights", cfg.weights.uniform_freq},
                     {"refresh_freq_weights", cfg.refresh_freq_weights},
                     {"trunc_refresh_every", cfg.trunc_refresh_every},
                     {"threads", cfg.threads},
                     {"seed", cfg.seed}};
    if (cfg.lambda) j["lambda"] = *cfg.lambda;
    return j;
}

// Complete run snapshot: the effective configuration plus outcome fields.
// Written next to every result so runs are replayable.
inline nlohmann::json run_snapshot(const DenoiseResult& result) {
    nlohmann::json j{{"format", "mdwtnn-run/1"},
                     {"config", to_json(result.config, result.lambda_effective)},
                     {"iterations", result.iterations},
                     {"converged", result.converged},
                     {"final_constraint_rel", result.final_constraint_rel},
                     {"final_z_gap_rel", result.final_z_gap_rel},
                     {"wall_seconds", result.config.timing ? result.wall_seconds : 0.0},
                     {"warnings", result.warnings}};
    for (int p = 0; p < 3; ++p) {
        const std::string key = "mode" + std::to_string(p + 1);
        j["weights_at_exit"][key]["freq"] = result.plan_at_exit.freq_weights[p];
        j["weights_at_exit"][key]["trunc"] = result.plan_at_exit.trunc_counts[p];
    }
    return j;
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    detail::atomic_write(path, j.dump(2) + "\n");
}

} // namespace mdwtnn

#endif
