//------------------------------------------------------------------------------
// interpreter.hpp
// Tree-walking execution of the Fortran subset. Three source shapes run on
// the same engine: original annotated sources (parallel regions execute as
// their CPU loop view), generated CPU sources (plain loops), and generated
// CUDA sources with chevron launches emulated block by block. Device
// attributes are ignored; mirrors are ordinary arrays.
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hft/ast.hpp"
#include "hft/diagnostics.hpp"

namespace hft {

/// Dense column-major array with per-dimension inclusive bounds.
struct ArrayObject {
    std::vector<std::pair<long long, long long>> bounds;
    std::vector<double> data;

    int rank() const { return static_cast<int>(bounds.size()); }
    long long extent(int d) const { return bounds[d].second - bounds[d].first + 1; }
    std::size_t size() const;

    /// Column-major flat offset; SIZE_MAX when any index is out of bounds.
    std::size_t offset(const std::vector<long long>& idx) const;
};

/// Block/thread iteration order for emulated launches. Kernels must be
/// order-independent, so flipping this must not change any result.
enum class LaunchOrder { Forward, Reverse };

struct InterpreterOptions {
    bool emulate_kernels = false; // execute chevron launches sequentially
    LaunchOrder launch_order = LaunchOrder::Forward;
};

/// One engine instance owns the module state of a parsed program. Typical
/// use: set the input globals, call the entry routine(s), read the output
/// arrays back. All runtime traps (out-of-bounds, unbound or unset symbols,
/// writes to intent(in) dummies, unsupported statements) are reported as
/// diagnostics carrying the source origin, and execution stops.
class Interpreter {
public:
    Interpreter(const ast::Program& prog, Diagnostics& diags, InterpreterOptions opts = {});
    ~Interpreter();

    /// Run `call name(real_args...)`. Returns false when a trap fired.
    bool call(const std::string& routine, const std::vector<double>& real_args = {});

    void set_global_int(const std::string& name, long long v);
    void set_global_real(const std::string& name, double v);

    /// Module-level array by name; null when absent or unassociated.
    const ArrayObject* find_array(const std::string& name) const;
    /// Module-level scalar read; traps (and returns 0) when unset.
    double get_global_real(const std::string& name);

    /// Called for the external `call write_data(object, tag, time)`.
    std::function<void(const std::string& tag, double time, const ArrayObject&)> on_write_data;
    /// Called after every array element store (instrumentation for tests).
    std::function<void(const std::string& name, const std::vector<long long>& idx, double value)>
        on_store;

    /// `print` output, one line per statement, reals at 17 significant digits.
    std::vector<std::string> transcript;

    /// False once any trap fired.
    bool ok() const;

private:
    struct Machine;
    std::unique_ptr<Machine> m;
};

} // namespace hft
