//------------------------------------------------------------------------------
// config.hpp
// Build configuration: block sizes, storage orders, backends, line length
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hft/ast.hpp"
#include "hft/diagnostics.hpp"

namespace hft {

/// Parsed from a flat `KEY = value` file. Recognized keys:
///   DEFAULT_BACKEND_CPU = openmp | openacc
///   DEFAULT_BACKEND_GPU = cuda | openacc
///   CUDA_BLOCKSIZE_X / _Y / _Z = positive integer
///   CUDA_BLOCKSIZE_{X,Y,Z}_<TEMPLATE> = per-template override
///   STORAGE_ORDER_CPU_<N>D / STORAGE_ORDER_GPU_<N>D = permutation like 3,2,1
///   MAX_LINE_LENGTH = positive integer
///   OUT_DIR = path
/// Anything else is an error. '#' and '!' start comment lines.
struct BuildConfig {
    std::string backend_cpu = "openmp";
    std::string backend_gpu = "cuda";
    std::array<int, 3> block = {32, 16, 1};
    std::map<std::string, std::array<int, 3>> template_blocks; // by UPPERCASED name
    std::map<int, std::vector<int>> order_cpu; // rank -> permutation (1-based)
    std::map<int, std::vector<int>> order_gpu;
    int max_line_length = 132;
    std::string out_dir;

    /// Block size for a region, honoring template overrides.
    std::array<int, 3> block_for(const std::string& template_name) const;

    /// Storage permutation for `rank` dimensions: configured order, or the
    /// default (full reversal on CPU, identity on GPU).
    std::vector<int> storage_order(ast::Arch arch, int rank) const;
};

BuildConfig parse_build_config(const std::string& text, const std::string& path,
                               Diagnostics& diags);

BuildConfig load_build_config(const std::string& path, Diagnostics& diags);

} // namespace hft
