//------------------------------------------------------------------------------
// diagnostics.hpp
// Diagnostic records, collection and rendering
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

namespace hft {

/// Location of a line in an input file. line is 1-based; 0 means "no line".
struct SourceRef {
    std::string file;
    int line = 0;

    bool valid() const { return !file.empty() || line > 0; }
};

enum class Severity { Error, Warning, Note };

/// One diagnostic. `rule` is a stable machine-readable identifier for checks
/// that tests key on (e.g. "kernel-recursion"); empty for ad-hoc messages.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceRef where;
    std::string rule;
};

/// Sink for diagnostics produced by every pipeline phase. Phases report and
/// continue where recovery is sane; callers check ok() between phases.
class Diagnostics {
public:
    void error(SourceRef where, std::string message, std::string rule = {}) {
        items_.push_back({Severity::Error, std::move(message), std::move(where), std::move(rule)});
    }
    void warning(SourceRef where, std::string message, std::string rule = {}) {
        items_.push_back({Severity::Warning, std::move(message), std::move(where), std::move(rule)});
    }
    void note(SourceRef where, std::string message) {
        items_.push_back({Severity::Note, std::move(message), std::move(where), {}});
    }

    bool ok() const {
        for (const auto& d : items_)
            if (d.severity == Severity::Error) return false;
        return true;
    }
    bool empty() const { return items_.empty(); }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& d : items_)
            if (d.severity == Severity::Error) ++n;
        return n;
    }

    const std::vector<Diagnostic>& all() const { return items_; }

    /// Count of diagnostics carrying the given rule id.
    std::size_t count_rule(const std::string& rule) const {
        std::size_t n = 0;
        for (const auto& d : items_)
            if (d.rule == rule) ++n;
        return n;
    }
    bool has_rule(const std::string& rule) const { return count_rule(rule) > 0; }

    /// "file:line: error: message [rule]" per diagnostic, newline-terminated.
    std::string render() const;

private:
    std::vector<Diagnostic> items_;
};

} // namespace hft
