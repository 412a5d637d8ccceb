//------------------------------------------------------------------------------
// diagnostics.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/diagnostics.hpp"

#include <sstream>

namespace hft {

std::string Diagnostics::render() const {
    std::ostringstream out;
    for (const auto& d : items_) {
        if (!d.where.file.empty())
            out << d.where.file << ":";
        if (d.where.line > 0)
            out << d.where.line << ":";
        if (d.where.valid())
            out << " ";
        switch (d.severity) {
        case Severity::Error: out << "error: "; break;
        case Severity::Warning: out << "warning: "; break;
        case Severity::Note: out << "note: "; break;
        }
        out << d.message;
        if (!d.rule.empty())
            out << " [" << d.rule << "]";
        out << "\n";
    }
    return out.str();
}

} // namespace hft
