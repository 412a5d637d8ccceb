//------------------------------------------------------------------------------
// config.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hft {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_int(const std::string& s, int& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    std::size_t pos = 0;
    try {
        long v = std::stol(t, &pos);
        if (pos != t.size() || v < -2147483647L || v > 2147483647L) return false;
        out = static_cast<int>(v);
        return true;
    } catch (...) {
        return false;
    }
}

// "3, 2, 1" -> {3, 2, 1}; must be a permutation of 1..n.
bool parse_permutation(const std::string& s, std::vector<int>& out) {
    out.clear();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        if (!parse_int(item, v)) return false;
        out.push_back(v);
    }
    if (out.empty()) return false;
    std::vector<int> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i) + 1) return false;
    return true;
}

} // namespace

std::array<int, 3> BuildConfig::block_for(const std::string& template_name) const {
    if (!template_name.empty()) {
        auto it = template_blocks.find(upper(template_name));
        if (it != template_blocks.end()) return it->second;
    }
    return block;
}

std::vector<int> BuildConfig::storage_order(ast::Arch arch, int rank) const {
    const auto& table = arch == ast::Arch::Cpu ? order_cpu : order_gpu;
    auto it = table.find(rank);
    if (it != table.end()) return it->second;
    std::vector<int> order(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i)
        order[static_cast<std::size_t>(i)] = arch == ast::Arch::Cpu ? rank - i : i + 1;
    return order;
}

BuildConfig parse_build_config(const std::string& text, const std::string& path,
                               Diagnostics& diags) {
    BuildConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        SourceRef ref{path, lineno};
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == '!') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            diags.error(ref, "expected KEY = value, got '" + line + "'");
            continue;
        }
        std::string key = upper(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            diags.error(ref, "expected KEY = value, got '" + line + "'");
            continue;
        }

        if (key == "DEFAULT_BACKEND_CPU") {
            std::string v = upper(value);
            if (v != "OPENMP" && v != "OPENACC") {
                diags.error(ref, "DEFAULT_BACKEND_CPU must be openmp or openacc, got '" +
                                     value + "'");
                continue;
            }
            cfg.backend_cpu = v == "OPENMP" ? "openmp" : "openacc";
            continue;
        }
        if (key == "DEFAULT_BACKEND_GPU") {
            std::string v = upper(value);
            if (v != "CUDA" && v != "OPENACC") {
                diags.error(ref, "DEFAULT_BACKEND_GPU must be cuda or openacc, got '" +
                                     value + "'");
                continue;
            }
            cfg.backend_gpu = v == "CUDA" ? "cuda" : "openacc";
            continue;
        }
        if (key == "MAX_LINE_LENGTH") {
            int v = 0;
            if (!parse_int(value, v) || v < 40) {
                diags.error(ref, "MAX_LINE_LENGTH must be an integer >= 40, got '" +
                                     value + "'");
                continue;
            }
            cfg.max_line_length = v;
            continue;
        }
        if (key == "OUT_DIR") {
            cfg.out_dir = value;
            continue;
        }
        if (key.rfind("CUDA_BLOCKSIZE_", 0) == 0) {
            std::string rest = key.substr(15); // X, Y, Z, or X_<TEMPLATE>
            if (rest.empty()) {
                diags.error(ref, "unknown configuration key '" + key + "'");
                continue;
            }
            char axis = rest[0];
            int idx = axis == 'X' ? 0 : axis == 'Y' ? 1 : axis == 'Z' ? 2 : -1;
            bool plain = rest.size() == 1;
            bool templated = rest.size() > 2 && rest[1] == '_';
            if (idx < 0 || (!plain && !templated)) {
                diags.error(ref, "unknown configuration key '" + key + "'");
                continue;
            }
            int v = 0;
            if (!parse_int(value, v) || v < 1) {
                diags.error(ref, key + " must be a positive integer, got '" + value + "'");
                continue;
            }
            if (plain) {
                cfg.block[static_cast<std::size_t>(idx)] = v;
            } else {
                std::string name = rest.substr(2);
                auto it = cfg.template_blocks.find(name);
                if (it == cfg.template_blocks.end())
                    it = cfg.template_blocks.emplace(name, cfg.block).first;
                it->second[static_cast<std::size_t>(idx)] = v;
            }
            continue;
        }
        if (key.rfind("STORAGE_ORDER_", 0) == 0) {
            std::string rest = key.substr(14); // CPU_<N>D / GPU_<N>D
            bool cpu = rest.rfind("CPU_", 0) == 0;
            bool gpu = rest.rfind("GPU_", 0) == 0;
            std::string rank_part = cpu || gpu ? rest.substr(4) : std::string{};
            int rank = 0;
            bool shaped = rank_part.size() >= 2 && rank_part.back() == 'D' &&
                          parse_int(rank_part.substr(0, rank_part.size() - 1), rank) &&
                          rank >= 1 && rank <= 7;
            if (!shaped) {
                diags.error(ref, "unknown configuration key '" + key + "'");
                continue;
            }
            std::vector<int> order;
            if (!parse_permutation(value, order) ||
                order.size() != static_cast<std::size_t>(rank)) {
                diags.error(ref, key + " must be a permutation of 1.." +
                                     std::to_string(rank) + ", got '" + value + "'");
                continue;
            }
            (cpu ? cfg.order_cpu : cfg.order_gpu)[rank] = std::move(order);
            continue;
        }
        diags.error(ref, "unknown configuration key '" + key + "'");
    }
    return cfg;
}

BuildConfig load_build_config(const std::string& path, Diagnostics& diags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diags.error(SourceRef{path, 0}, "cannot open configuration file");
        return {};
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_build_config(buf.str(), path, diags);
}

} // namespace hft
