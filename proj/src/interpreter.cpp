//------------------------------------------------------------------------------
// interpreter.cpp
// Tree-walking interpreter for the Fortran subset
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/interpreter.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

namespace hft {

using namespace ast;

//------------------------------------------------------------------------------
// ArrayObject
//------------------------------------------------------------------------------

std::size_t ArrayObject::size() const {
    std::size_t n = 1;
    for (int d = 0; d < rank(); ++d) {
        long long e = extent(d);
        n *= e > 0 ? static_cast<std::size_t>(e) : 0;
    }
    return n;
}

std::size_t ArrayObject::offset(const std::vector<long long>& idx) const {
    if (idx.size() != bounds.size()) return SIZE_MAX;
    std::size_t off = 0, stride = 1;
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        if (idx[d] < bounds[d].first || idx[d] > bounds[d].second) return SIZE_MAX;
        off += static_cast<std::size_t>(idx[d] - bounds[d].first) * stride;
        stride *= static_cast<std::size_t>(extent(static_cast<int>(d)));
    }
    return off;
}

namespace {

//------------------------------------------------------------------------------
// Runtime values
//------------------------------------------------------------------------------

struct Value {
    enum class K { Int, Real, Logical, Str, Dim3 } k = K::Real;
    long long i = 0;
    double d = 0.0;
    bool b = false;
    std::string s;
    long long v3[3] = {1, 1, 1};
};

Value make_i(long long v) {
    Value x;
    x.k = Value::K::Int;
    x.i = v;
    return x;
}

Value make_r(double v) {
    Value x;
    x.k = Value::K::Real;
    x.d = v;
    return x;
}

Value make_l(bool v) {
    Value x;
    x.k = Value::K::Logical;
    x.b = v;
    return x;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bounds_text(const ArrayObject& a) {
    std::string out = "(";
    for (int d = 0; d < a.rank(); ++d) {
        if (d) out += ", ";
        out += std::to_string(a.bounds[d].first) + ":" + std::to_string(a.bounds[d].second);
    }
    return out + ")";
}

std::string index_text(const std::vector<long long>& idx) {
    std::string out = "(";
    for (std::size_t d = 0; d < idx.size(); ++d) {
        if (d) out += ", ";
        out += std::to_string(idx[d]);
    }
    return out + ")";
}

/// Fortran modulo: result has the sign of the divisor.
long long modulo_int(long long a, long long p) {
    long long r = a % p;
    if (r != 0 && ((r < 0) != (p < 0))) r += p;
    return r;
}

double modulo_real(double a, double p) { return a - std::floor(a / p) * p; }

} // namespace

//------------------------------------------------------------------------------
// Machine state
//------------------------------------------------------------------------------

struct Interpreter::Machine {
    const Program& prog;
    Diagnostics& diags;
    InterpreterOptions opts;
    Interpreter* owner = nullptr;

    bool failed = false;
    SourceRef cur{"<driver>", 0};

    struct Var {
        std::string name;
        BaseType type = BaseType::Real8;
        Intent intent = Intent::None;
        bool parameter = false;
        bool pointer = false;
        bool dummy = false;
        bool is_array = false;
        // scalar storage
        bool has_value = false;
        Value val;
        // scalar dummy bound to a caller scalar or array element
        Var* ref = nullptr;
        std::shared_ptr<ArrayObject> elem_arr;
        std::size_t elem_at = 0;
        // array binding; `shift` rebases declared dummy bounds onto the object
        std::shared_ptr<ArrayObject> arr;
        std::vector<long long> shift;
        // slice temporaries copy back into the caller's section on return
        bool write_back = false;
    };

    struct Frame {
        std::map<std::string, Var> vars;
        const RoutineDecl* routine = nullptr;
    };

    std::map<std::string, Var> globals;
    std::vector<std::unique_ptr<Frame>> stack;

    struct Launch {
        bool active = false;
        long long block[3] = {1, 1, 1};  // blockidx
        long long thread[3] = {1, 1, 1}; // threadidx
        long long bdim[3] = {1, 1, 1};   // blockdim
        long long gdim[3] = {1, 1, 1};   // griddim
    } launch;

    enum class Flow { Normal, Exited, Cycled, Returned };

    Machine(const Program& p, Diagnostics& d, InterpreterOptions o) : prog(p), diags(d), opts(o) {
        init_globals();
    }

    void fail(const std::string& msg) {
        if (failed) return;
        failed = true;
        diags.error(cur, msg);
    }

    //--------------------------------------------------------------------------
    // Name resolution
    //--------------------------------------------------------------------------

    Var* find_var(const std::string& n) {
        if (!stack.empty()) {
            auto it = stack.back()->vars.find(n);
            if (it != stack.back()->vars.end()) return &it->second;
        }
        auto ig = globals.find(n);
        if (ig != globals.end()) return &ig->second;
        return nullptr;
    }

    std::shared_ptr<ArrayObject> object_of(Var& v) {
        if (!v.is_array) {
            fail("'" + v.name + "' is not an array");
            return nullptr;
        }
        if (!v.arr) {
            fail(v.pointer ? "pointer '" + v.name + "' is not associated"
                           : "array '" + v.name + "' is used before it is allocated");
            return nullptr;
        }
        return v.arr;
    }

    //--------------------------------------------------------------------------
    // Scalar load/store
    //--------------------------------------------------------------------------

    bool load_scalar(Var& v, Value& out) {
        if (v.ref) return load_scalar(*v.ref, out);
        if (v.elem_arr) {
            out = make_r(v.elem_arr->data[v.elem_at]);
            return true;
        }
        if (v.is_array) {
            fail("array '" + v.name + "' is used as a scalar");
            return false;
        }
        if (!v.has_value) {
            fail("'" + v.name + "' is referenced before it is set");
            return false;
        }
        out = v.val;
        return true;
    }

    Value coerce(const Value& raw, BaseType t) {
        if (t == BaseType::Integer4) {
            if (raw.k == Value::K::Real) return make_i(static_cast<long long>(raw.d));
            if (raw.k == Value::K::Int) return raw;
        } else if (t == BaseType::Real8) {
            if (raw.k == Value::K::Int) return make_r(static_cast<double>(raw.i));
            if (raw.k == Value::K::Real) return raw;
        } else if (t == BaseType::Dim3 && raw.k == Value::K::Dim3) {
            return raw;
        }
        fail("value kind does not match the declared type");
        return raw;
    }

    void store_scalar(Var& v, const Value& raw) {
        if (v.parameter) {
            fail("assignment to parameter '" + v.name + "'");
            return;
        }
        if (v.dummy && v.intent == Intent::In) {
            fail("write to intent(in) dummy '" + v.name + "'");
            return;
        }
        if (v.ref) {
            store_scalar(*v.ref, raw);
            return;
        }
        if (v.elem_arr) {
            Value c = coerce(raw, BaseType::Real8);
            if (failed) return;
            v.elem_arr->data[v.elem_at] = c.d;
            return;
        }
        if (v.is_array) {
            fail("whole-array assignment to '" + v.name + "' needs explicit subscripts");
            return;
        }
        v.val = coerce(raw, v.type);
        v.has_value = !failed;
    }

    //--------------------------------------------------------------------------
    // Expression evaluation
    //--------------------------------------------------------------------------

    bool to_real(const Value& v, double& out) {
        if (v.k == Value::K::Real) {
            out = v.d;
            return true;
        }
        if (v.k == Value::K::Int) {
            out = static_cast<double>(v.i);
            return true;
        }
        fail("numeric value expected");
        return false;
    }

    bool to_int(const Value& v, long long& out) {
        if (v.k == Value::K::Int) {
            out = v.i;
            return true;
        }
        if (v.k == Value::K::Real) {
            out = static_cast<long long>(v.d);
            return true;
        }
        fail("integer value expected");
        return false;
    }

    bool eval_int(const ExprPtr& e, long long& out) {
        std::optional<Value> v = eval(e);
        return v && to_int(*v, out);
    }

    bool eval_real(const ExprPtr& e, double& out) {
        std::optional<Value> v = eval(e);
        return v && to_real(*v, out);
    }

    bool eval_logical(const ExprPtr& e, bool& out) {
        std::optional<Value> v = eval(e);
        if (!v) return false;
        if (v->k != Value::K::Logical) {
            fail("logical expression expected");
            return false;
        }
        out = v->b;
        return true;
    }

    std::optional<Value> numeric_binary(const std::string& op, const Value& a, const Value& b) {
        bool ints = a.k == Value::K::Int && b.k == Value::K::Int;
        if (op == "+" || op == "-" || op == "*" || op == "/" || op == "**") {
            if (ints) {
                long long x = a.i, y = b.i;
                if (op == "+") return make_i(x + y);
                if (op == "-") return make_i(x - y);
                if (op == "*") return make_i(x * y);
                if (op == "/") {
                    if (y == 0) {
                        fail("integer division by zero");
                        return std::nullopt;
                    }
                    return make_i(x / y);
                }
                long long r = 1;
                for (long long n = 0; n < y; ++n) r *= x;
                return make_i(r);
            }
            double x, y;
            if (!to_real(a, x) || !to_real(b, y)) return std::nullopt;
            if (op == "+") return make_r(x + y);
            if (op == "-") return make_r(x - y);
            if (op == "*") return make_r(x * y);
            if (op == "/") return make_r(x / y);
            return make_r(std::pow(x, y));
        }
        // comparisons; integer pairs compare exactly
        if (ints) {
            long long x = a.i, y = b.i;
            if (op == ".gt." || op == ">") return make_l(x > y);
            if (op == ".ge." || op == ">=") return make_l(x >= y);
            if (op == ".lt." || op == "<") return make_l(x < y);
            if (op == ".le." || op == "<=") return make_l(x <= y);
            if (op == ".eq." || op == "==") return make_l(x == y);
            if (op == ".ne." || op == "/=") return make_l(x != y);
        } else {
            double x, y;
            if (!to_real(a, x) || !to_real(b, y)) return std::nullopt;
            if (op == ".gt." || op == ">") return make_l(x > y);
            if (op == ".ge." || op == ">=") return make_l(x >= y);
            if (op == ".lt." || op == "<") return make_l(x < y);
            if (op == ".le." || op == "<=") return make_l(x <= y);
            if (op == ".eq." || op == "==") return make_l(x == y);
            if (op == ".ne." || op == "/=") return make_l(x != y);
        }
        fail("operator '" + op + "' is outside the accepted subset");
        return std::nullopt;
    }

    std::optional<Value> eval(const ExprPtr& e) {
        if (failed || !e) return std::nullopt;
        switch (e->kind) {
        case ExprKind::IntLit: return make_i(e->int_value);
        case ExprKind::RealLit: return make_r(e->real_value);
        case ExprKind::LogicalLit: return make_l(e->text == ".true.");
        case ExprKind::StringLit: {
            Value v;
            v.k = Value::K::Str;
            v.s = e->text;
            return v;
        }
        case ExprKind::Name: {
            Var* v = find_var(e->text);
            if (!v) {
                fail("'" + e->text + "' is not declared");
                return std::nullopt;
            }
            Value out;
            if (!load_scalar(*v, out)) return std::nullopt;
            return out;
        }
        case ExprKind::Ref: return eval_ref(*e);
        case ExprKind::Member: return eval_member(*e);
        case ExprKind::Unary: {
            std::optional<Value> a = eval(e->args[0]);
            if (!a) return std::nullopt;
            if (e->text == ".not.") {
                if (a->k != Value::K::Logical) {
                    fail(".not. needs a logical operand");
                    return std::nullopt;
                }
                return make_l(!a->b);
            }
            if (e->text == "+") return a;
            if (a->k == Value::K::Int) return make_i(-a->i);
            double x;
            if (!to_real(*a, x)) return std::nullopt;
            return make_r(-x);
        }
        case ExprKind::Binary: {
            if (e->text == ".and." || e->text == ".or.") {
                bool a, b;
                if (!eval_logical(e->args[0], a) || !eval_logical(e->args[1], b))
                    return std::nullopt;
                return make_l(e->text == ".and." ? (a && b) : (a || b));
            }
            std::optional<Value> a = eval(e->args[0]);
            std::optional<Value> b = eval(e->args[1]);
            if (!a || !b) return std::nullopt;
            return numeric_binary(e->text, *a, *b);
        }
        case ExprKind::Paren: return eval(e->args[0]);
        case ExprKind::Range:
            fail("':' is only valid inside subscripts of a section");
            return std::nullopt;
        }
        return std::nullopt;
    }

    std::optional<Value> eval_member(const Expr& e) {
        const ExprPtr& base = e.args[0];
        int axis = e.text == "x" ? 0 : e.text == "y" ? 1 : e.text == "z" ? 2 : -1;
        if (base->kind != ExprKind::Name || axis < 0) {
            fail("unsupported '%' reference");
            return std::nullopt;
        }
        const std::string& n = base->text;
        if (n == "blockidx" || n == "threadidx" || n == "blockdim" || n == "griddim") {
            if (!launch.active) {
                fail("'" + n + "' is only defined inside an emulated kernel");
                return std::nullopt;
            }
            if (n == "blockidx") return make_i(launch.block[axis]);
            if (n == "threadidx") return make_i(launch.thread[axis]);
            if (n == "blockdim") return make_i(launch.bdim[axis]);
            return make_i(launch.gdim[axis]);
        }
        Var* v = find_var(n);
        if (!v || v->type != BaseType::Dim3) {
            fail("'" + n + "' has no '%" + e.text + "' component");
            return std::nullopt;
        }
        Value whole;
        if (!load_scalar(*v, whole)) return std::nullopt;
        return make_i(whole.v3[axis]);
    }

    bool eval_indices(Var& v, const std::vector<ExprPtr>& args, std::vector<long long>& idx,
                      std::shared_ptr<ArrayObject>& obj) {
        obj = object_of(v);
        if (!obj) return false;
        if (static_cast<int>(args.size()) != obj->rank()) {
            fail("reference to '" + v.name + "' has the wrong number of subscripts");
            return false;
        }
        idx.clear();
        for (const auto& a : args) {
            long long n;
            if (!eval_int(a, n)) return false;
            idx.push_back(n);
        }
        if (!v.shift.empty())
            for (std::size_t d = 0; d < idx.size(); ++d) idx[d] += v.shift[d];
        return true;
    }

    std::optional<Value> eval_ref(const Expr& e) {
        Var* v = find_var(e.text);
        if (v) {
            if (!v->is_array) {
                fail("'" + e.text + "' is not an array");
                return std::nullopt;
            }
            for (const auto& a : e.args)
                if (a->kind == ExprKind::Range) {
                    fail("array section of '" + e.text + "' is used as a scalar value");
                    return std::nullopt;
                }
            std::vector<long long> idx;
            std::shared_ptr<ArrayObject> obj;
            if (!eval_indices(*v, e.args, idx, obj)) return std::nullopt;
            std::size_t off = obj->offset(idx);
            if (off == SIZE_MAX) {
                fail("index " + index_text(idx) + " is outside the bounds " + bounds_text(*obj) +
                     " of '" + e.text + "'");
                return std::nullopt;
            }
            return make_r(obj->data[off]);
        }
        return eval_intrinsic(e);
    }

    std::optional<Value> eval_intrinsic(const Expr& e) {
        const std::string& n = e.text;
        std::vector<Value> a;
        for (const auto& arg : e.args) {
            std::optional<Value> v = eval(arg);
            if (!v) return std::nullopt;
            a.push_back(*v);
        }
        auto need = [&](std::size_t k) {
            if (a.size() == k) return true;
            fail("'" + n + "' takes " + std::to_string(k) + " argument(s)");
            return false;
        };
        if (n == "modulo") {
            if (!need(2)) return std::nullopt;
            if (a[0].k == Value::K::Int && a[1].k == Value::K::Int) {
                if (a[1].i == 0) {
                    fail("modulo with a zero divisor");
                    return std::nullopt;
                }
                return make_i(modulo_int(a[0].i, a[1].i));
            }
            double x, p;
            if (!to_real(a[0], x) || !to_real(a[1], p)) return std::nullopt;
            return make_r(modulo_real(x, p));
        }
        if (n == "ceiling" || n == "floor") {
            if (!need(1)) return std::nullopt;
            double x;
            if (!to_real(a[0], x)) return std::nullopt;
            return make_i(static_cast<long long>(n == "ceiling" ? std::ceil(x) : std::floor(x)));
        }
        if (n == "real" || n == "dble") {
            if (!need(1)) return std::nullopt;
            double x;
            if (!to_real(a[0], x)) return std::nullopt;
            return make_r(x);
        }
        if (n == "int") {
            if (!need(1)) return std::nullopt;
            long long x;
            if (!to_int(a[0], x)) return std::nullopt;
            return make_i(x);
        }
        if (n == "abs") {
            if (!need(1)) return std::nullopt;
            if (a[0].k == Value::K::Int) return make_i(a[0].i < 0 ? -a[0].i : a[0].i);
            double x;
            if (!to_real(a[0], x)) return std::nullopt;
            return make_r(std::fabs(x));
        }
        if (n == "sqrt") {
            if (!need(1)) return std::nullopt;
            double x;
            if (!to_real(a[0], x)) return std::nullopt;
            return make_r(std::sqrt(x));
        }
        if (n == "min" || n == "max") {
            if (a.size() < 2) {
                fail("'" + n + "' takes at least two arguments");
                return std::nullopt;
            }
            bool ints = true;
            for (const auto& v : a) ints = ints && v.k == Value::K::Int;
            if (ints) {
                long long best = a[0].i;
                for (const auto& v : a)
                    best = n == "min" ? std::min(best, v.i) : std::max(best, v.i);
                return make_i(best);
            }
            double best;
            if (!to_real(a[0], best)) return std::nullopt;
            for (const auto& v : a) {
                double x;
                if (!to_real(v, x)) return std::nullopt;
                best = n == "min" ? std::min(best, x) : std::max(best, x);
            }
            return make_r(best);
        }
        if (n == "dim3") {
            if (!need(3)) return std::nullopt;
            Value v;
            v.k = Value::K::Dim3;
            for (int k = 0; k < 3; ++k)
                if (!to_int(a[static_cast<std::size_t>(k)], v.v3[k])) return std::nullopt;
            return v;
        }
        fail("'" + n + "' is neither an array nor a known function");
        return std::nullopt;
    }

    //--------------------------------------------------------------------------
    // Array element and section stores
    //--------------------------------------------------------------------------

    bool store_guard(Var& v) {
        if (v.parameter) {
            fail("assignment to parameter '" + v.name + "'");
            return false;
        }
        if (v.dummy && v.intent == Intent::In) {
            fail("write to intent(in) dummy '" + v.name + "'");
            return false;
        }
        return true;
    }

    void store_element(Var& v, const std::vector<long long>& idx,
                       const std::vector<long long>& raw_idx, double value) {
        std::shared_ptr<ArrayObject> obj = v.arr;
        std::size_t off = obj->offset(raw_idx);
        if (off == SIZE_MAX) {
            fail("index " + index_text(raw_idx) + " is outside the bounds " + bounds_text(*obj) +
                 " of '" + v.name + "'");
            return;
        }
        obj->data[off] = value;
        if (owner && owner->on_store) owner->on_store(v.name, idx, value);
    }

    /// One subscript of a section: either a fixed index or an iterated range.
    struct SectionDim {
        bool ranged = false;
        long long lo = 0, hi = -1; // inclusive; ranged only
        long long fixed = 0;
    };

    bool section_dims(Var& v, const std::vector<ExprPtr>& args, std::vector<SectionDim>& dims,
                      std::shared_ptr<ArrayObject>& obj) {
        obj = object_of(v);
        if (!obj) return false;
        if (static_cast<int>(args.size()) != obj->rank()) {
            fail("reference to '" + v.name + "' has the wrong number of subscripts");
            return false;
        }
        dims.clear();
        for (std::size_t d = 0; d < args.size(); ++d) {
            SectionDim s;
            long long shift = v.shift.empty() ? 0 : v.shift[d];
            if (args[d]->kind == ExprKind::Range) {
                s.ranged = true;
                if (args[d]->args[0]) {
                    if (!eval_int(args[d]->args[0], s.lo)) return false;
                    s.lo += shift;
                } else {
                    s.lo = obj->bounds[d].first;
                }
                if (args[d]->args[1]) {
                    if (!eval_int(args[d]->args[1], s.hi)) return false;
                    s.hi += shift;
                } else {
                    s.hi = obj->bounds[d].second;
                }
            } else {
                if (!eval_int(args[d], s.fixed)) return false;
                s.fixed += shift;
            }
            dims.push_back(s);
        }
        return true;
    }

    static std::vector<long long> section_extents(const std::vector<SectionDim>& dims) {
        std::vector<long long> out;
        for (const auto& s : dims)
            if (s.ranged) out.push_back(s.hi - s.lo + 1);
        return out;
    }

    /// Walk a section in column-major order; `fn(idx)` gets the full index.
    template <class Fn> bool for_section(const std::vector<SectionDim>& dims, Fn&& fn) {
        std::vector<long long> idx(dims.size());
        for (std::size_t d = 0; d < dims.size(); ++d)
            idx[d] = dims[d].ranged ? dims[d].lo : dims[d].fixed;
        for (const auto& s : dims)
            if (s.ranged && s.hi < s.lo) return true; // empty section
        while (true) {
            if (!fn(idx) || failed) return false;
            std::size_t d = 0;
            for (; d < dims.size(); ++d) {
                if (!dims[d].ranged) continue;
                if (idx[d] < dims[d].hi) {
                    ++idx[d];
                    break;
                }
                idx[d] = dims[d].lo;
            }
            if (d == dims.size()) return true;
        }
    }

    void assign_section(const Expr& lhs, const ExprPtr& rhs) {
        Var* lv = find_var(lhs.text);
        if (!lv) {
            fail("'" + lhs.text + "' is not declared");
            return;
        }
        if (!store_guard(*lv)) return;
        std::vector<SectionDim> ld;
        std::shared_ptr<ArrayObject> lo;
        if (!section_dims(*lv, lhs.args, ld, lo)) return;

        bool rhs_section = rhs->kind == ExprKind::Ref;
        if (rhs_section) {
            bool any_range = false;
            for (const auto& a : rhs->args) any_range = any_range || a->kind == ExprKind::Range;
            rhs_section = any_range && find_var(rhs->text) != nullptr;
        }
        if (rhs_section) {
            Var* rv = find_var(rhs->text);
            std::vector<SectionDim> rd;
            std::shared_ptr<ArrayObject> ro;
            if (!section_dims(*rv, rhs->args, rd, ro)) return;
            if (section_extents(ld) != section_extents(rd)) {
                fail("section shapes of '" + lhs.text + "' and '" + rhs->text + "' differ");
                return;
            }
            // gather then scatter, so overlapping self-copies stay well defined
            std::vector<double> tmp;
            tmp.reserve(64);
            bool ok = for_section(rd, [&](const std::vector<long long>& idx) {
                std::size_t off = ro->offset(idx);
                if (off == SIZE_MAX) {
                    fail("index " + index_text(idx) + " is outside the bounds " +
                         bounds_text(*ro) + " of '" + rhs->text + "'");
                    return false;
                }
                tmp.push_back(ro->data[off]);
                return true;
            });
            if (!ok || failed) return;
            std::size_t at = 0;
            for_section(ld, [&](const std::vector<long long>& idx) {
                store_element(*lv, idx, idx, tmp[at++]);
                return !failed;
            });
            return;
        }
        std::optional<Value> v = eval(rhs);
        if (!v) return;
        double x;
        if (!to_real(*v, x)) return;
        for_section(ld, [&](const std::vector<long long>& idx) {
            store_element(*lv, idx, idx, x);
            return !failed;
        });
    }

    //--------------------------------------------------------------------------
    // Statements
    //--------------------------------------------------------------------------

    Flow exec_block(const std::vector<Statement>& body) {
        for (const auto& st : body) {
            Flow f = exec_stmt(st);
            if (failed) return Flow::Returned;
            if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
    }

    Flow exec_stmt(const Statement& st) {
        cur = st.ref;
        switch (st.kind) {
        case StmtKind::Comment: return Flow::Normal;
        case StmtKind::Assign: exec_assign(st); return Flow::Normal;
        case StmtKind::PointerAssign: exec_pointer_assign(st); return Flow::Normal;
        case StmtKind::Do: return exec_do(st);
        case StmtKind::DoWhile: return exec_do_while(st);
        case StmtKind::If: return exec_if(st);
        case StmtKind::Call: exec_call_stmt(st); return Flow::Normal;
        case StmtKind::Return: return Flow::Returned;
        case StmtKind::Exit: return Flow::Exited;
        case StmtKind::Cycle: return Flow::Cycled;
        case StmtKind::Print: exec_print(st); return Flow::Normal;
        case StmtKind::Allocate: exec_allocate(st); return Flow::Normal;
        case StmtKind::Deallocate: exec_deallocate(st); return Flow::Normal;
        case StmtKind::Io:
            fail("'" + st.name + "' statements are outside the accepted subset");
            return Flow::Normal;
        case StmtKind::DataInit: {
            Var* v = find_var(st.name);
            if (!v) {
                fail("'" + st.name + "' is not declared");
                return Flow::Normal;
            }
            if (!st.exprs.empty()) {
                std::optional<Value> val = eval(st.exprs[0]);
                if (val) store_scalar(*v, *val);
            }
            return Flow::Normal;
        }
        case StmtKind::Region: return exec_region(st);
        }
        return Flow::Normal;
    }

    void exec_assign(const Statement& st) {
        if (st.e1->kind == ExprKind::Name) {
            Var* v = find_var(st.e1->text);
            if (!v) {
                fail("'" + st.e1->text + "' is not declared");
                return;
            }
            std::optional<Value> val = eval(st.e2);
            if (val) store_scalar(*v, *val);
            return;
        }
        if (st.e1->kind != ExprKind::Ref) {
            fail("left side of '=' is not assignable");
            return;
        }
        bool any_range = false;
        for (const auto& a : st.e1->args) any_range = any_range || a->kind == ExprKind::Range;
        if (any_range) {
            assign_section(*st.e1, st.e2);
            return;
        }
        Var* v = find_var(st.e1->text);
        if (!v) {
            fail("'" + st.e1->text + "' is not declared");
            return;
        }
        if (!store_guard(*v)) return;
        std::vector<long long> raw;
        std::shared_ptr<ArrayObject> obj;
        if (!eval_indices(*v, st.e1->args, raw, obj)) return;
        double x;
        if (!eval_real(st.e2, x)) return;
        std::vector<long long> logical = raw;
        if (!v->shift.empty())
            for (std::size_t d = 0; d < logical.size(); ++d) logical[d] -= v->shift[d];
        store_element(*v, logical, raw, x);
    }

    void exec_pointer_assign(const Statement& st) {
        if (st.e1->kind != ExprKind::Name || st.e2->kind != ExprKind::Name) {
            fail("'=>' needs plain names on both sides");
            return;
        }
        Var* l = find_var(st.e1->text);
        Var* r = find_var(st.e2->text);
        if (!l || !r) {
            fail("'" + (l ? st.e2->text : st.e1->text) + "' is not declared");
            return;
        }
        if (!l->pointer) {
            fail("left side '" + l->name + "' of '=>' is not a pointer");
            return;
        }
        if (!r->is_array) {
            fail("right side '" + r->name + "' of '=>' is not an array");
            return;
        }
        if (!r->arr) {
            fail("right side '" + r->name + "' of '=>' is not associated");
            return;
        }
        l->arr = r->arr;
    }

    Flow exec_do(const Statement& st) {
        Var* v = find_var(st.name);
        if (!v) v = &make_local_int(st.name);
        long long lo, hi, step = 1;
        if (!eval_int(st.e1, lo) || !eval_int(st.e2, hi)) return Flow::Normal;
        if (st.e3 && !eval_int(st.e3, step)) return Flow::Normal;
        if (step == 0) {
            fail("do step is zero");
            return Flow::Normal;
        }
        long long trips = (hi - lo + step) / step;
        if (trips < 0) trips = 0;
        for (long long t = 0; t < trips; ++t) {
            store_scalar(*v, make_i(lo + t * step));
            if (failed) return Flow::Normal;
            Flow f = exec_block(st.body);
            if (failed) return Flow::Normal;
            if (f == Flow::Exited) break;
            if (f == Flow::Returned) return f;
        }
        store_scalar(*v, make_i(lo + trips * step));
        return Flow::Normal;
    }

    Flow exec_do_while(const Statement& st) {
        while (true) {
            bool cond;
            if (!eval_logical(st.e1, cond) || !cond) return Flow::Normal;
            Flow f = exec_block(st.body);
            if (failed) return Flow::Normal;
            if (f == Flow::Exited) return Flow::Normal;
            if (f == Flow::Returned) return f;
        }
    }

    Flow exec_if(const Statement& st) {
        for (std::size_t i = 0; i < st.conditions.size(); ++i) {
            bool take = true;
            if (st.conditions[i] && !eval_logical(st.conditions[i], take)) return Flow::Normal;
            if (take) return exec_block(st.bodies[i]);
        }
        return Flow::Normal;
    }

    void exec_print(const Statement& st) {
        std::string line;
        for (std::size_t i = 0; i < st.exprs.size(); ++i) {
            std::optional<Value> v = eval(st.exprs[i]);
            if (!v) return;
            if (i) line += " ";
            switch (v->k) {
            case Value::K::Str: line += v->s; break;
            case Value::K::Int: line += std::to_string(v->i); break;
            case Value::K::Real: line += format_real(v->d); break;
            case Value::K::Logical: line += v->b ? "T" : "F"; break;
            case Value::K::Dim3:
                line += std::to_string(v->v3[0]) + " " + std::to_string(v->v3[1]) + " " +
                        std::to_string(v->v3[2]);
                break;
            }
        }
        if (owner) owner->transcript.push_back(line);
    }

    void exec_allocate(const Statement& st) {
        for (const auto& e : st.exprs) {
            if (e->kind != ExprKind::Ref) {
                fail("allocate needs explicit bounds");
                return;
            }
            Var* v = find_var(e->text);
            if (!v) {
                fail("'" + e->text + "' is not declared");
                return;
            }
            if (!v->pointer) {
                fail("allocating '" + e->text + "' which has no pointer attribute");
                return;
            }
            auto obj = std::make_shared<ArrayObject>();
            for (const auto& a : e->args) {
                long long lo = 1, hi;
                if (a->kind == ExprKind::Range) {
                    if (!a->args[0] || !a->args[1]) {
                        fail("allocate bounds must be explicit");
                        return;
                    }
                    if (!eval_int(a->args[0], lo) || !eval_int(a->args[1], hi)) return;
                } else {
                    if (!eval_int(a, hi)) return;
                }
                obj->bounds.push_back({lo, hi});
            }
            obj->data.assign(obj->size(), 0.0);
            v->is_array = true;
            v->arr = obj;
        }
    }

    void exec_deallocate(const Statement& st) {
        for (const auto& e : st.exprs) {
            const std::string& n = e->kind == ExprKind::Name || e->kind == ExprKind::Ref
                                       ? e->text
                                       : std::string();
            Var* v = n.empty() ? nullptr : find_var(n);
            if (!v) {
                fail("deallocate needs declared pointer names");
                return;
            }
            if (!v->pointer || !v->arr) {
                fail("deallocating '" + n + "' which is not associated");
                return;
            }
            v->arr.reset();
        }
    }

    Flow exec_region(const Statement& st) {
        const ParallelRegionSpec& spec = *st.region;
        // the sequential (original-program) view: regions that do not apply
        // to the CPU architecture contribute their body once, unlooped
        if (!spec.applies_to(Arch::Cpu)) return exec_block(st.body);
        return region_loops(st, spec, static_cast<int>(spec.domains.size()) - 1);
    }

    Flow region_loops(const Statement& st, const ParallelRegionSpec& spec, int d) {
        if (d < 0) {
            Flow f = exec_block(st.body);
            if (f == Flow::Exited || f == Flow::Cycled) {
                fail("exit/cycle may not escape a parallel region");
                return Flow::Returned;
            }
            return f;
        }
        const RegionDomain& dom = spec.domains[static_cast<std::size_t>(d)];
        Var* v = find_var(dom.name);
        if (!v) v = &make_local_int(dom.name);
        long long lo, hi;
        if (!eval_int(dom.start, lo) || !eval_int(dom.end, hi)) return Flow::Normal;
        for (long long i = lo; i <= hi; ++i) {
            store_scalar(*v, make_i(i));
            if (failed) return Flow::Returned;
            Flow f = region_loops(st, spec, d - 1);
            if (failed || f == Flow::Returned) return f;
        }
        return Flow::Normal;
    }

    Var& make_local_int(const std::string& name) {
        auto& vars = stack.empty() ? globals : stack.back()->vars;
        Var v;
        v.name = name;
        v.type = BaseType::Integer4;
        return vars[name] = v;
    }

    //--------------------------------------------------------------------------
    // Calls
    //--------------------------------------------------------------------------

    void exec_call_stmt(const Statement& st) {
        if (st.name == "write_data") {
            exec_write_data(st);
            return;
        }
        const RoutineDecl* r = prog.find_routine(st.name);
        if (!r) {
            fail("call to undefined routine '" + st.name + "'");
            return;
        }
        if (st.launch_grid) {
            exec_launch(*r, st);
            return;
        }
        exec_call(*r, st.exprs);
    }

    void exec_write_data(const Statement& st) {
        if (st.exprs.size() != 3 || st.exprs[0]->kind != ExprKind::Name) {
            fail("write_data expects (object, tag, time)");
            return;
        }
        Var* v = find_var(st.exprs[0]->text);
        if (!v) {
            fail("'" + st.exprs[0]->text + "' is not declared");
            return;
        }
        std::shared_ptr<ArrayObject> obj = object_of(*v);
        if (!obj) return;
        std::optional<Value> tag = eval(st.exprs[1]);
        if (!tag || tag->k != Value::K::Str) {
            fail("write_data expects a string tag");
            return;
        }
        double time;
        if (!eval_real(st.exprs[2], time)) return;
        if (owner && owner->on_write_data) owner->on_write_data(tag->s, time, *obj);
    }

    void exec_launch(const RoutineDecl& r, const Statement& st) {
        if (!opts.emulate_kernels) {
            fail("kernel launch of '" + r.name + "' requires emulate-kernels mode");
            return;
        }
        auto dims3 = [&](const ExprPtr& e, long long out[3]) {
            std::optional<Value> v = eval(e);
            if (!v) return false;
            if (v->k == Value::K::Dim3) {
                for (int k = 0; k < 3; ++k) out[k] = v->v3[k];
                return true;
            }
            long long n;
            if (!to_int(*v, n)) return false;
            out[0] = n;
            out[1] = out[2] = 1;
            return true;
        };
        long long grid[3], block[3];
        if (!dims3(st.launch_grid, grid) || !dims3(st.launch_block, block)) return;
        for (int k = 0; k < 3; ++k)
            if (grid[k] < 1 || block[k] < 1) {
                fail("launch of '" + r.name + "' with an empty grid or block");
                return;
            }

        bool rev = opts.launch_order == LaunchOrder::Reverse;
        auto axis_begin = [&](long long n) { return rev ? n : 1; };
        auto axis_done = [&](long long i, long long n) { return rev ? i < 1 : i > n; };
        long long step = rev ? -1 : 1;

        Launch saved = launch;
        SourceRef site = cur;
        launch.active = true;
        for (int k = 0; k < 3; ++k) {
            launch.gdim[k] = grid[k];
            launch.bdim[k] = block[k];
        }
        for (long long bz = axis_begin(grid[2]); !axis_done(bz, grid[2]); bz += step)
            for (long long by = axis_begin(grid[1]); !axis_done(by, grid[1]); by += step)
                for (long long bx = axis_begin(grid[0]); !axis_done(bx, grid[0]); bx += step)
                    for (long long tz = axis_begin(block[2]); !axis_done(tz, block[2]); tz += step)
                        for (long long ty = axis_begin(block[1]); !axis_done(ty, block[1]);
                             ty += step)
                            for (long long tx = axis_begin(block[0]); !axis_done(tx, block[0]);
                                 tx += step) {
                                if (failed) {
                                    launch = saved;
                                    return;
                                }
                                launch.block[0] = bx;
                                launch.block[1] = by;
                                launch.block[2] = bz;
                                launch.thread[0] = tx;
                                launch.thread[1] = ty;
                                launch.thread[2] = tz;
                                cur = site;
                                exec_call(r, st.exprs);
                            }
        launch = saved;
    }

    /// Pre-resolved actual argument, evaluated in the caller's frame.
    struct Actual {
        enum class K { ScalarRef, Element, Copy, Array, SliceTemp } k = K::Copy;
        Var* ref = nullptr;
        std::shared_ptr<ArrayObject> obj;
        std::size_t at = 0;
        Value val;
        // slice: source object and section layout for copy-in / copy-out
        std::vector<SectionDim> dims;
        std::string source_name;
    };

    void exec_call(const RoutineDecl& r, const std::vector<ExprPtr>& args) {
        if (args.size() != r.params.size()) {
            fail("call to '" + r.name + "' passes " + std::to_string(args.size()) +
                 " argument(s) for " + std::to_string(r.params.size()) + " dummy argument(s)");
            return;
        }
        if (stack.size() > 1000) {
            fail("call depth exceeded at '" + r.name + "' (unbounded recursion?)");
            return;
        }

        std::map<std::string, const SymbolSpec*> spec_of;
        for (const auto& s : r.specs) spec_of[s.name] = &s;

        // resolve actuals in the caller's frame
        std::vector<Actual> actuals;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const SymbolSpec* ds = spec_of.count(r.params[i]) ? spec_of[r.params[i]] : nullptr;
            if (!ds) {
                fail("dummy argument '" + r.params[i] + "' of '" + r.name +
                     "' has no declaration");
                return;
            }
            Actual a;
            const ExprPtr& e = args[i];
            bool array_dummy = !ds->dims.empty();
            if (array_dummy) {
                if (e->kind == ExprKind::Name) {
                    Var* v = find_var(e->text);
                    if (!v) {
                        fail("'" + e->text + "' is not declared");
                        return;
                    }
                    a.k = Actual::K::Array;
                    a.obj = object_of(*v);
                    a.source_name = e->text;
                    if (!a.obj) return;
                    if (v->dummy && v->intent == Intent::In &&
                        (ds->intent == Intent::Out || ds->intent == Intent::InOut)) {
                        fail("intent(in) dummy '" + e->text +
                             "' passed where it may be written");
                        return;
                    }
                } else if (e->kind == ExprKind::Ref) {
                    Var* v = find_var(e->text);
                    if (!v) {
                        fail("'" + e->text + "' is not declared");
                        return;
                    }
                    bool any_range = false;
                    for (const auto& s : e->args) any_range = any_range || s->kind == ExprKind::Range;
                    if (!any_range) {
                        fail("array argument '" + r.params[i] + "' of '" + r.name +
                             "' needs a whole array or a section");
                        return;
                    }
                    a.k = Actual::K::SliceTemp;
                    a.source_name = e->text;
                    if (!section_dims(*v, e->args, a.dims, a.obj)) return;
                    if (v->dummy && v->intent == Intent::In &&
                        (ds->intent == Intent::Out || ds->intent == Intent::InOut)) {
                        fail("section of intent(in) dummy '" + e->text +
                             "' passed where it may be written");
                        return;
                    }
                } else {
                    fail("array argument '" + r.params[i] + "' of '" + r.name +
                         "' needs a whole array or a section");
                    return;
                }
            } else if (ds->value) {
                std::optional<Value> v = eval(e);
                if (!v) return;
                a.k = Actual::K::Copy;
                a.val = *v;
            } else if (e->kind == ExprKind::Name) {
                Var* v = find_var(e->text);
                if (!v) {
                    fail("'" + e->text + "' is not declared");
                    return;
                }
                if (v->is_array) {
                    fail("array '" + e->text + "' passed to scalar dummy '" + r.params[i] + "'");
                    return;
                }
                a.k = Actual::K::ScalarRef;
                a.ref = v;
            } else if (e->kind == ExprKind::Ref && find_var(e->text) &&
                       find_var(e->text)->is_array) {
                Var* v = find_var(e->text);
                std::vector<long long> idx;
                if (!eval_indices(*v, e->args, idx, a.obj)) return;
                a.at = a.obj->offset(idx);
                if (a.at == SIZE_MAX) {
                    fail("index " + index_text(idx) + " is outside the bounds " +
                         bounds_text(*a.obj) + " of '" + e->text + "'");
                    return;
                }
                if (v->dummy && v->intent == Intent::In &&
                    (ds->intent == Intent::Out || ds->intent == Intent::InOut)) {
                    fail("element of intent(in) dummy '" + e->text +
                         "' passed where it may be written");
                    return;
                }
                a.k = Actual::K::Element;
            } else {
                std::optional<Value> v = eval(e);
                if (!v) return;
                a.k = Actual::K::Copy;
                a.val = *v;
            }
            actuals.push_back(std::move(a));
        }
        if (failed) return;

        // new frame: declare everything, bind scalars, then shape arrays
        stack.push_back(std::make_unique<Frame>());
        Frame& fr = *stack.back();
        fr.routine = &r;
        for (const auto& s : r.specs) {
            Var v;
            v.name = s.name;
            v.type = s.type;
            v.intent = s.intent;
            v.parameter = s.parameter;
            v.pointer = s.pointer;
            v.is_array = !s.dims.empty();
            for (const auto& p : r.params) v.dummy = v.dummy || p == s.name;
            fr.vars[s.name] = v;
        }

        for (std::size_t i = 0; i < actuals.size(); ++i) {
            Var& dv = fr.vars[r.params[i]];
            Actual& a = actuals[i];
            switch (a.k) {
            case Actual::K::ScalarRef: dv.ref = a.ref; break;
            case Actual::K::Element:
                dv.elem_arr = a.obj;
                dv.elem_at = a.at;
                break;
            case Actual::K::Copy:
                dv.val = coerce(a.val, dv.type);
                dv.has_value = true;
                break;
            case Actual::K::Array:
            case Actual::K::SliceTemp: break; // shaped below
            }
        }
        if (failed) {
            stack.pop_back();
            return;
        }

        // locals: parameters and initializers, static-shape arrays
        for (const auto& s : r.specs) {
            Var& v = fr.vars[s.name];
            if (v.dummy) continue;
            if (s.init) {
                std::optional<Value> val = eval(s.init);
                if (!val) break;
                v.parameter = false; // allow the defining store
                store_scalar(v, *val);
                v.parameter = s.parameter;
            }
            if (v.is_array && !v.pointer) {
                auto obj = std::make_shared<ArrayObject>();
                bool deferred = false;
                for (const auto& dim : s.dims) {
                    if (dim.deferred) {
                        deferred = true;
                        break;
                    }
                    long long lo = 1, hi;
                    if (dim.lower && !eval_int(dim.lower, lo)) break;
                    if (!eval_int(dim.upper, hi)) break;
                    obj->bounds.push_back({lo, hi});
                }
                if (failed) break;
                if (deferred) {
                    fail("local array '" + s.name + "' has a deferred shape but no pointer "
                         "attribute");
                    break;
                }
                obj->data.assign(obj->size(), 0.0);
                v.arr = obj;
            }
        }

        // array dummies take their declared bounds over the actual storage
        for (std::size_t i = 0; i < actuals.size() && !failed; ++i) {
            Var& dv = fr.vars[r.params[i]];
            Actual& a = actuals[i];
            if (a.k != Actual::K::Array && a.k != Actual::K::SliceTemp) continue;
            const SymbolSpec* ds = spec_of[r.params[i]];
            std::vector<std::pair<long long, long long>> declared;
            bool deferred = false;
            for (const auto& dim : ds->dims) {
                if (dim.deferred) {
                    deferred = true;
                    break;
                }
                long long lo = 1, hi;
                if (dim.lower && !eval_int(dim.lower, lo)) break;
                if (!eval_int(dim.upper, hi)) break;
                declared.push_back({lo, hi});
            }
            if (failed) break;

            if (a.k == Actual::K::Array) {
                if (deferred) {
                    dv.arr = a.obj; // adopt the object's own bounds
                    continue;
                }
                if (static_cast<int>(declared.size()) != a.obj->rank()) {
                    fail("rank of '" + a.source_name + "' does not match dummy '" +
                         dv.name + "' of '" + r.name + "'");
                    break;
                }
                dv.arr = a.obj;
                dv.shift.assign(declared.size(), 0);
                for (std::size_t d = 0; d < declared.size(); ++d) {
                    long long de = declared[d].second - declared[d].first + 1;
                    if (de != a.obj->extent(static_cast<int>(d))) {
                        fail("shape of '" + a.source_name + "' does not match dummy '" +
                             dv.name + "' of '" + r.name + "'");
                        break;
                    }
                    dv.shift[d] = a.obj->bounds[d].first - declared[d].first;
                }
            } else {
                std::vector<long long> ext = section_extents(a.dims);
                if (deferred) {
                    declared.clear();
                    for (long long n : ext) declared.push_back({1, n});
                }
                if (declared.size() != ext.size()) {
                    fail("rank of the section of '" + a.source_name +
                         "' does not match dummy '" + dv.name + "' of '" + r.name + "'");
                    break;
                }
                auto temp = std::make_shared<ArrayObject>();
                temp->bounds = declared;
                bool shape_ok = true;
                for (std::size_t d = 0; d < ext.size(); ++d)
                    shape_ok = shape_ok && ext[d] == temp->extent(static_cast<int>(d));
                if (!shape_ok) {
                    fail("shape of the section of '" + a.source_name +
                         "' does not match dummy '" + dv.name + "' of '" + r.name + "'");
                    break;
                }
                temp->data.reserve(temp->size());
                for_section(a.dims, [&](const std::vector<long long>& idx) {
                    std::size_t off = a.obj->offset(idx);
                    if (off == SIZE_MAX) {
                        fail("index " + index_text(idx) + " is outside the bounds " +
                             bounds_text(*a.obj) + " of '" + a.source_name + "'");
                        return false;
                    }
                    temp->data.push_back(a.obj->data[off]);
                    return true;
                });
                if (failed) break;
                dv.arr = temp;
                dv.write_back = ds->intent != Intent::In;
            }
        }

        if (!failed) {
            Flow f = exec_block(r.body);
            if (f == Flow::Exited || f == Flow::Cycled)
                fail("exit/cycle may not escape routine '" + r.name + "'");
        }

        // copy slice temporaries back into the caller's sections
        if (!failed) {
            for (std::size_t i = 0; i < actuals.size(); ++i) {
                Var& dv = fr.vars[r.params[i]];
                Actual& a = actuals[i];
                if (!dv.write_back || !dv.arr) continue;
                std::size_t at = 0;
                for_section(a.dims, [&](const std::vector<long long>& idx) {
                    std::size_t off = a.obj->offset(idx);
                    a.obj->data[off] = dv.arr->data[at++];
                    if (owner && owner->on_store) owner->on_store(a.source_name, idx,
                                                                  a.obj->data[off]);
                    return true;
                });
            }
        }
        stack.pop_back();
    }

    //--------------------------------------------------------------------------
    // Module state
    //--------------------------------------------------------------------------

    void init_globals() {
        for (const auto& mod : prog.modules) {
            for (const auto& s : mod.specs) {
                if (globals.count(s.name)) {
                    cur = s.ref;
                    fail("module symbol '" + s.name + "' is declared twice");
                    return;
                }
                Var v;
                v.name = s.name;
                v.type = s.type;
                v.parameter = s.parameter;
                v.pointer = s.pointer;
                v.is_array = !s.dims.empty();
                globals[s.name] = v;
                Var& gv = globals[s.name];
                if (s.init) {
                    cur = s.ref;
                    std::optional<Value> val = eval(s.init);
                    if (!val) return;
                    gv.parameter = false;
                    store_scalar(gv, *val);
                    gv.parameter = s.parameter;
                }
                if (gv.is_array && !gv.pointer) {
                    // only literal shapes can be sized this early; anything
                    // else traps on first access
                    auto obj = std::make_shared<ArrayObject>();
                    bool sized = true;
                    for (const auto& dim : s.dims) {
                        if (dim.deferred || (dim.lower && dim.lower->kind != ExprKind::IntLit) ||
                            !dim.upper || dim.upper->kind != ExprKind::IntLit) {
                            sized = false;
                            break;
                        }
                        long long lo = dim.lower ? dim.lower->int_value : 1;
                        obj->bounds.push_back({lo, dim.upper->int_value});
                    }
                    if (sized) {
                        obj->data.assign(obj->size(), 0.0);
                        gv.arr = obj;
                    }
                }
            }
        }
    }
};

//------------------------------------------------------------------------------
// Public surface
//------------------------------------------------------------------------------

Interpreter::Interpreter(const ast::Program& prog, Diagnostics& diags, InterpreterOptions opts)
    : m(std::make_unique<Machine>(prog, diags, opts)) {
    m->owner = this;
}

Interpreter::~Interpreter() = default;

bool Interpreter::call(const std::string& routine, const std::vector<double>& real_args) {
    if (m->failed) return false;
    m->cur = {"<driver>", 0};
    const ast::RoutineDecl* r = m->prog.find_routine(routine);
    if (!r) {
        m->fail("call to undefined routine '" + routine + "'");
        return false;
    }
    std::vector<ast::ExprPtr> args;
    for (double v : real_args) args.push_back(ast::make_real(v, format_real(v)));
    m->exec_call(*r, args);
    return !m->failed;
}

void Interpreter::set_global_int(const std::string& name, long long v) {
    m->cur = {"<driver>", 0};
    auto it = m->globals.find(name);
    if (it == m->globals.end()) {
        m->fail("'" + name + "' is not a module symbol");
        return;
    }
    m->store_scalar(it->second, make_i(v));
}

void Interpreter::set_global_real(const std::string& name, double v) {
    m->cur = {"<driver>", 0};
    auto it = m->globals.find(name);
    if (it == m->globals.end()) {
        m->fail("'" + name + "' is not a module symbol");
        return;
    }
    m->store_scalar(it->second, make_r(v));
}

const ArrayObject* Interpreter::find_array(const std::string& name) const {
    auto it = m->globals.find(name);
    if (it == m->globals.end() || !it->second.arr) return nullptr;
    return it->second.arr.get();
}

double Interpreter::get_global_real(const std::string& name) {
    m->cur = {"<driver>", 0};
    auto it = m->globals.find(name);
    if (it == m->globals.end()) {
        m->fail("'" + name + "' is not a module symbol");
        return 0.0;
    }
    Value v;
    if (!m->load_scalar(it->second, v)) return 0.0;
    double out = 0.0;
    m->to_real(v, out);
    return out;
}

bool Interpreter::ok() const { return !m->failed; }

} // namespace hft
