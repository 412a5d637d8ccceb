//------------------------------------------------------------------------------
// perfmodel.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/perfmodel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace hft::perf {
namespace {

constexpr double kGiga = 1e9;

std::string missing(const HardwareMetrics& hw, const char* field, const char* meaning,
                    std::optional<double> HardwareMetrics::*member) {
    std::string msg = "machine '" + hw.name + "' has no " + field + " (" + meaning + ")";
    std::string have;
    for (const auto& m : machine_table()) {
        if ((m.*member).has_value()) {
            if (!have.empty()) have += ", ";
            have += m.name;
        }
    }
    if (!have.empty()) msg += "; machines providing it: " + have;
    return msg;
}

} // namespace

const std::vector<HardwareMetrics>& machine_table() {
    // Sustained (not theoretical-peak) numbers: Linpack for FLOP rates,
    // vendor bandwidth tests / STREAM for memory, RandomAccess for GUP/s.
    static const std::vector<HardwareMetrics> table = {
        {
            "tsubame2.0", "Xeon X5670", "Tesla M2050",
            /*p_h1c*/ std::nullopt, /*p_h*/ std::nullopt, /*p_d*/ std::nullopt,
            /*bw_h1c*/ std::nullopt, /*bw_h*/ std::nullopt, /*bw_d*/ 108.6,
            /*bw_htod*/ std::nullopt, /*ra_h*/ std::nullopt, /*ra_d*/ std::nullopt,
        },
        {
            "tsubame2.5", "Xeon X5670", "Tesla K20x",
            /*p_h1c*/ 9.50, /*p_h*/ 57.0, /*p_d*/ 1030.0,
            /*bw_h1c*/ 9.80, /*bw_h*/ 20.5, /*bw_d*/ 169.4,
            /*bw_htod*/ 4.32, /*ra_h*/ 0.12, /*ra_d*/ 0.88,
        },
        {
            "piz-daint", "Xeon E5-2670", "Tesla P100",
            /*p_h1c*/ std::nullopt, /*p_h*/ std::nullopt, /*p_d*/ 3900.0,
            /*bw_h1c*/ std::nullopt, /*bw_h*/ 51.2, /*bw_d*/ 499.4,
            /*bw_htod*/ 10.96, /*ra_h*/ std::nullopt, /*ra_d*/ std::nullopt,
        },
        {
            "reedbush-h", "Xeon E5-2695 v4", "Tesla P100",
            /*p_h1c*/ std::nullopt, /*p_h*/ std::nullopt, /*p_d*/ 3900.0,
            /*bw_h1c*/ std::nullopt, /*bw_h*/ 76.8, /*bw_d*/ 499.4,
            /*bw_htod*/ 10.96, /*ra_h*/ std::nullopt, /*ra_d*/ std::nullopt,
        },
        {
            "tsubame3.0", "", "Tesla P100",
            /*p_h1c*/ std::nullopt, /*p_h*/ std::nullopt, /*p_d*/ std::nullopt,
            /*bw_h1c*/ std::nullopt, /*bw_h*/ std::nullopt, /*bw_d*/ 499.4,
            /*bw_htod*/ std::nullopt, /*ra_h*/ std::nullopt, /*ra_d*/ std::nullopt,
        },
    };
    return table;
}

const HardwareMetrics* find_machine(const std::string& name) {
    for (const auto& m : machine_table())
        if (m.name == name) return &m;
    return nullptr;
}

std::string machine_names() {
    std::string out;
    for (const auto& m : machine_table()) {
        if (!out.empty()) out += ", ";
        out += m.name;
    }
    return out;
}

double arithmetic_intensity(double c, double b, double m) { return c / (b * m); }

Calc compute_bound_threshold(const HardwareMetrics& hw) {
    if (!hw.p_d)
        return {0, missing(hw, "P_D", "device FLOP rate", &HardwareMetrics::p_d)};
    if (!hw.bw_d)
        return {0, missing(hw, "BW_D", "device memory bandwidth", &HardwareMetrics::bw_d)};
    return {*hw.p_d / *hw.bw_d, {}};
}

Calc speedup_rhs(const HardwareMetrics& hw) {
    if (!hw.bw_h)
        return {0, missing(hw, "BW_H", "host socket bandwidth", &HardwareMetrics::bw_h)};
    if (!hw.bw_htod)
        return {0, missing(hw, "BW_HtoD", "interconnect bandwidth", &HardwareMetrics::bw_htod)};
    if (!hw.bw_d)
        return {0, missing(hw, "BW_D", "device memory bandwidth", &HardwareMetrics::bw_d)};
    double ratio = *hw.bw_h / *hw.bw_d;
    if (ratio >= 1.0)
        return {0, "machine '" + hw.name +
                       "': host bandwidth is not below device bandwidth; the profitability "
                       "condition does not apply"};
    return {(*hw.bw_h / *hw.bw_htod) / (1.0 - ratio), {}};
}

double speedup_lhs(double n_i, double m, double m_htod) {
    if (m_htod == 0.0) return std::numeric_limits<double>::infinity();
    return n_i * m / m_htod;
}

Calc feasibility(const HardwareMetrics& hw, double n_i, double m, double m_htod,
                 Feasibility& out) {
    Calc rhs = speedup_rhs(hw);
    if (!rhs.ok()) return rhs;
    out.rhs = rhs.value;
    out.lhs = speedup_lhs(n_i, m, m_htod);
    out.feasible = out.lhs > out.rhs;
    return {out.lhs, {}};
}

Calc cpu_model_time(const HardwareMetrics& hw, const ModelParams& p, HostCores cores) {
    const std::optional<double>& bw = cores == HostCores::Single ? hw.bw_h1c : hw.bw_h;
    if (!bw) {
        if (cores == HostCores::Single)
            return {0, missing(hw, "BW_H1C", "single-core bandwidth", &HardwareMetrics::bw_h1c)};
        return {0, missing(hw, "BW_H", "host socket bandwidth", &HardwareMetrics::bw_h)};
    }
    if (!hw.ra_h)
        return {0, missing(hw, "RA_H", "host random-access rate", &HardwareMetrics::ra_h)};
    double points = static_cast<double>(p.nx) * p.ny * p.nz;
    double boundary = static_cast<double>(p.ny) * p.nz;
    double per_step = points * p.b * p.m_sa / (*bw * kGiga) + boundary * p.m_ra / (*hw.ra_h * kGiga);
    return {p.steps * per_step, {}};
}

Calc gpu_model_time(const HardwareMetrics& hw, const ModelParams& p) {
    if (!hw.bw_d)
        return {0, missing(hw, "BW_D", "device memory bandwidth", &HardwareMetrics::bw_d)};
    if (!hw.ra_d)
        return {0, missing(hw, "RA_D", "device random-access rate", &HardwareMetrics::ra_d)};
    if (p.m_htod != 0.0 && !hw.bw_htod)
        return {0, missing(hw, "BW_HtoD", "interconnect bandwidth", &HardwareMetrics::bw_htod)};
    double points = static_cast<double>(p.nx) * p.ny * p.nz;
    double boundary = static_cast<double>(p.ny) * p.nz;
    double per_point = p.b * p.m_sa / (*hw.bw_d * kGiga);
    if (p.m_htod != 0.0) per_point += p.b * p.m_htod / (*hw.bw_htod * kGiga);
    double per_step = points * per_point + boundary * p.m_ra / (*hw.ra_d * kGiga);
    return {p.steps * per_step, {}};
}

std::string format_sig4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace hft::perf
