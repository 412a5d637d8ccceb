//------------------------------------------------------------------------------
// perfmodel.hpp
// Bandwidth-bounded performance model for stencil codes with random-access
// boundary handling, plus the shipped machine metrics table
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hft::perf {

/// Sustained hardware metrics for one machine. Fields are optional because
/// not every published measurement exists for every system; operations that
/// need a missing field report which one and where it is available.
struct HardwareMetrics {
    std::string name;   // lookup key, e.g. "tsubame2.5"
    std::string host;   // host CPU description
    std::string device; // accelerator description

    std::optional<double> p_h1c;   // GFLOP/s, one host core
    std::optional<double> p_h;     // GFLOP/s, one host socket
    std::optional<double> p_d;     // GFLOP/s, device
    std::optional<double> bw_h1c;  // GB/s, one host core
    std::optional<double> bw_h;    // GB/s, one host socket
    std::optional<double> bw_d;    // GB/s, device memory
    std::optional<double> bw_htod; // GB/s, host-to-device interconnect
    std::optional<double> ra_h;    // GUP/s, host random access
    std::optional<double> ra_d;    // GUP/s, device random access
};

const std::vector<HardwareMetrics>& machine_table();
const HardwareMetrics* find_machine(const std::string& name);
/// Comma-separated machine keys, for error messages.
std::string machine_names();

/// Grid/algorithm parameters for the time model.
struct ModelParams {
    long nx = 0, ny = 0, nz = 0;
    long steps = 0;
    double b = 8.0;     // bytes per value (double precision)
    double m_sa = 10.0; // slow memory values moved per point update (4 when
                        // neighbouring reads are cache-resident)
    double m_ra = 4.0;  // random accesses per boundary column per step
    double m_htod = 0.0; // values over the interconnect per point update
};

/// Result of a model calculation; `error` explains a missing metric.
struct Calc {
    double value = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
};

/// FLOP per byte moved: c / (b * m).
double arithmetic_intensity(double c, double b, double m);

/// Device FLOP-per-byte ratio above which a kernel is compute bound.
Calc compute_bound_threshold(const HardwareMetrics& hw);

/// Minimum whole-application speedup required for GPU port profitability
/// when only kernels are ported and data crosses the interconnect each step:
/// (BW_H / BW_HtoD) / (1 - BW_H / BW_D).
Calc speedup_rhs(const HardwareMetrics& hw);

/// Achievable speedup bound n_i * m / m_htod; +infinity when nothing moves
/// over the interconnect.
double speedup_lhs(double n_i, double m, double m_htod);

struct Feasibility {
    double lhs = 0.0, rhs = 0.0;
    bool feasible = false; // lhs > rhs, compared before any rounding
};
Calc feasibility(const HardwareMetrics& hw, double n_i, double m, double m_htod,
                 Feasibility& out);

enum class HostCores { Single, Socket };

/// Seconds for `steps` stencil steps on the host:
/// steps * (nx*ny*nz * b*m_sa / BW + ny*nz * m_ra / RA_H).
Calc cpu_model_time(const HardwareMetrics& hw, const ModelParams& p, HostCores cores);

/// Seconds on the device, including per-step interconnect traffic:
/// steps * (nx*ny*nz * (b*m_sa / BW_D + b*m_htod / BW_HtoD) + ny*nz * m_ra / RA_D).
Calc gpu_model_time(const HardwareMetrics& hw, const ModelParams& p);

/// Format with four significant digits, the precision used by reports.
std::string format_sig4(double v);

} // namespace hft::perf
