//------------------------------------------------------------------------------
// preprocessor.hpp
// cpp-style macro pass: #define/#undef, #if/#ifdef conditionals, expansion
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hft/source.hpp"

namespace hft {

struct MacroDef {
    std::string name;
    bool function_like = false;
    std::vector<std::string> params;
    std::string body;
};

/// Definition table threaded through a preprocessing run. Seeding a table
/// before the run (e.g. GPU=1) selects conditional branches; #define lines
/// in the sources are consumed into it.
class MacroTable {
public:
    void define(MacroDef def) { defs_[def.name] = std::move(def); }
    void define_flag(const std::string& name, const std::string& value = "1") {
        define({name, false, {}, value});
    }
    void undef(const std::string& name) { defs_.erase(name); }
    bool is_defined(const std::string& name) const { return defs_.count(name) != 0; }
    const MacroDef* lookup(const std::string& name) const {
        auto it = defs_.find(name);
        return it == defs_.end() ? nullptr : &it->second;
    }
    bool empty() const { return defs_.empty(); }
    std::size_t size() const { return defs_.size(); }

private:
    std::map<std::string, MacroDef> defs_;
};

/// Resolve conditionals, consume #define/#undef into `table`, and expand
/// macro invocations in the remaining lines. Directive lines are removed
/// from the output; all other lines keep their original line numbers and
/// are byte-preserved unless an expansion applies. Text inside character
/// literals and trailing comments is never expanded.
RawSource preprocess(const RawSource& source, MacroTable& table, Diagnostics& diags);

/// Expand macro invocations in one line of code (no directive handling).
std::string expand_text(const std::string& text, const MacroTable& table, Diagnostics& diags,
                        const SourceRef& where);

} // namespace hft
