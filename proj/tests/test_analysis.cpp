//------------------------------------------------------------------------------
// test_analysis.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "doctest.h"
#include "hft/analysis.hpp"
#include "hft/parser.hpp"

#include <string>
#include <vector>

using namespace hft;

namespace {

ast::Program parse_text(const std::string& text, Diagnostics& d) {
    auto src = make_source("t.h90", text, SourceKind::Hybrid);
    auto lines = merge_continuations(src, d);
    return parse_program_source(lines, d);
}

ast::Program load_corpus(Diagnostics& d) {
    std::vector<std::vector<LogicalLine>> sources;
    for (const char* name : {"simple_weather.h90", "physics.h90", "diffusion.h90"}) {
        auto raw = load_source(std::string(HFT_FIXTURE_DIR) + "/corpus/" + name, d);
        sources.push_back(merge_continuations(raw, d));
    }
    return parse_program(sources, d);
}

RoutineColor color_of(const std::map<std::string, RoutineColor>& m, const std::string& name) {
    auto it = m.find(name);
    REQUIRE(it != m.end());
    return it->second;
}

std::set<std::string> colored_set(const std::map<std::string, RoutineColor>& m) {
    std::set<std::string> out;
    for (const auto& [name, c] : m)
        if (c != RoutineColor::Unaffected) out.insert(name);
    return out;
}

} // namespace

TEST_CASE("corpus parses and analyzes cleanly") {
    Diagnostics d;
    auto prog = load_corpus(d);
    INFO(d.render());
    REQUIRE(d.ok());

    auto info = analyze(prog, d);
    INFO(d.render());
    CHECK(d.ok());

    validate_kernel_bodies(prog, info, d);
    INFO(d.render());
    CHECK(d.ok());
}

TEST_CASE("call graph records callees, region context and externals") {
    Diagnostics d;
    auto prog = load_corpus(d);
    auto graph = build_callgraph(prog, d);
    REQUIRE(d.ok());

    CHECK(graph.routines.size() == 6); // initialize simulate run_physics radiate exchange diffuse
    CHECK(graph.externals == std::set<std::string>{"write_data"});

    auto find_site = [&](const std::string& caller, const std::string& callee) -> const CallSite* {
        for (const auto& s : graph.sites)
            if (s.caller == caller && s.callee == callee) return &s;
        return nullptr;
    };

    const CallSite* to_physics = find_site("simulate", "run_physics");
    REQUIRE(to_physics != nullptr);
    CHECK(to_physics->region == nullptr); // plain host call inside the loop

    const CallSite* to_radiate = find_site("run_physics", "radiate");
    REQUIRE(to_radiate != nullptr);
    REQUIRE(to_radiate->region != nullptr);
    CHECK(to_radiate->region->applies_cpu);
    CHECK_FALSE(to_radiate->region->applies_gpu);

    CHECK(find_site("run_physics", "exchange_heat_with_boundary") != nullptr);
    CHECK(find_site("simulate", "diffuse") != nullptr);
    CHECK(find_site("simulate", "write_data") != nullptr);
}

TEST_CASE("GPU coloring: physics columns become kernels, callers stay on host") {
    Diagnostics d;
    auto prog = load_corpus(d);
    auto graph = build_callgraph(prog, d);
    auto color = color_callgraph(graph, ast::Arch::Gpu, d);
    REQUIRE(d.ok());

    CHECK(color_of(color, "simulate") == RoutineColor::KernelCaller);
    CHECK(color_of(color, "run_physics") == RoutineColor::KernelCaller);
    CHECK(color_of(color, "diffuse") == RoutineColor::Kernel);
    CHECK(color_of(color, "radiate") == RoutineColor::Kernel);
    CHECK(color_of(color, "exchange_heat_with_boundary") == RoutineColor::Kernel);
    CHECK(color_of(color, "initialize") == RoutineColor::Unaffected);
}

TEST_CASE("CPU coloring: column physics runs inside the caller's region") {
    Diagnostics d;
    auto prog = load_corpus(d);
    auto graph = build_callgraph(prog, d);
    auto color = color_callgraph(graph, ast::Arch::Cpu, d);
    REQUIRE(d.ok());

    CHECK(color_of(color, "simulate") == RoutineColor::KernelCaller);
    CHECK(color_of(color, "run_physics") == RoutineColor::Kernel);
    CHECK(color_of(color, "diffuse") == RoutineColor::Kernel);
    CHECK(color_of(color, "radiate") == RoutineColor::InsideKernel);
    CHECK(color_of(color, "exchange_heat_with_boundary") == RoutineColor::InsideKernel);
    CHECK(color_of(color, "initialize") == RoutineColor::Unaffected);
}

TEST_CASE("inside-kernel closure is transitive") {
    Diagnostics d;
    auto prog = parse_text(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(CPU), domName(i), domSize(n)}
      call mid(a(i))
    @end parallelRegion
  end subroutine top

  subroutine mid(x)
    real(8), intent(inout) :: x
    call leaf(x)
  end subroutine mid

  subroutine leaf(x)
    real(8), intent(inout) :: x
    x = x + 1.0d0
  end subroutine leaf
end module m
)f90",
                           d);
    REQUIRE(d.ok());
    auto graph = build_callgraph(prog, d);
    auto color = color_callgraph(graph, ast::Arch::Cpu, d);
    REQUIRE(d.ok());
    CHECK(color_of(color, "top") == RoutineColor::Kernel);
    CHECK(color_of(color, "mid") == RoutineColor::InsideKernel);
    CHECK(color_of(color, "leaf") == RoutineColor::InsideKernel);

    // nothing applies on GPU: every routine is unaffected there
    auto gpu = color_callgraph(graph, ast::Arch::Gpu, d);
    CHECK(colored_set(gpu).empty());
}

TEST_CASE("a routine called both inside and outside regions is ambiguous") {
    Diagnostics d;
    auto prog = parse_text(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    call helper(a(1))
    @parallelRegion{appliesTo(CPU), domName(i), domSize(n)}
      call helper(a(i))
    @end parallelRegion
  end subroutine top

  subroutine helper(x)
    real(8), intent(inout) :: x
    x = x + 1.0d0
  end subroutine helper
end module m
)f90",
                           d);
    REQUIRE(d.ok());
    auto graph = build_callgraph(prog, d);
    color_callgraph(graph, ast::Arch::Cpu, d);
    CHECK(d.has_rule("ambiguous-positioning"));
    // the GPU side has no applicable regions, so no conflict there
    Diagnostics d2;
    color_callgraph(graph, ast::Arch::Gpu, d2);
    CHECK(d2.ok());
}

TEST_CASE("widening appliesTo never shrinks the colored set") {
    auto corpus_with = [](const std::string& diffuse_applies,
                          const std::string& physics_applies) {
        return R"f90(module m
  implicit none
  integer(4) :: n
  real(8), pointer :: a(:)
  real(8), pointer :: b(:)
contains
  subroutine simulate()
    call run_physics(a)
    call diffuse(a, b)
  end subroutine simulate

  subroutine run_physics(x)
    real(8), intent(inout) :: x(n)
    @parallelRegion{)f90" +
               physics_applies + R"f90(domName(i), domSize(n)}
      call column(x(i))
    @end parallelRegion
  end subroutine run_physics

  subroutine column(v)
    real(8), intent(inout) :: v
    v = v + 1.0d0
  end subroutine column

  subroutine diffuse(x, y)
    real(8), intent(in) :: x(n)
    real(8), intent(out) :: y(n)
    @parallelRegion{)f90" +
               diffuse_applies + R"f90(domName(i), domSize(n)}
      y(i) = x(i)
    @end parallelRegion
  end subroutine diffuse
end module m
)f90";
    };

    auto colored = [&](const std::string& text, ast::Arch arch) {
        Diagnostics d;
        auto prog = parse_text(text, d);
        REQUIRE(d.ok());
        auto graph = build_callgraph(prog, d);
        Diagnostics dc; // coloring diagnostics are not under test here
        return colored_set(color_callgraph(graph, arch, dc));
    };

    std::string narrow = corpus_with("appliesTo(GPU), ", "appliesTo(CPU), ");
    std::string wide = corpus_with("", ""); // both regions apply everywhere

    for (ast::Arch arch : {ast::Arch::Cpu, ast::Arch::Gpu}) {
        auto small = colored(narrow, arch);
        auto big = colored(wide, arch);
        for (const auto& name : small) CHECK(big.count(name) == 1);
        CHECK(big.size() >= small.size());
    }
    // and the widening actually adds routines on the CPU side
    CHECK(colored(wide, ast::Arch::Cpu).size() > colored(narrow, ast::Arch::Cpu).size());
}

TEST_CASE("duplicate definitions and undefined callees are reported") {
    Diagnostics d;
    auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine a()
    call missing_routine()
  end subroutine a

  subroutine a()
  end subroutine a
end module m
)f90",
                           d);
    REQUIRE(d.ok());
    build_callgraph(prog, d);
    REQUIRE_FALSE(d.ok());
    bool saw_dup = false, saw_missing = false;
    for (const auto& diag : d.all()) {
        if (diag.message.find("more than once") != std::string::npos) saw_dup = true;
        if (diag.message.find("missing_routine") != std::string::npos) saw_missing = true;
    }
    CHECK(saw_dup);
    CHECK(saw_missing);
}

TEST_CASE("symbol resolution: dummies, locals, module data and iterators") {
    Diagnostics d;
    auto prog = load_corpus(d);
    auto symbols = resolve_symbols(prog, d);
    INFO(d.render());
    REQUIRE(d.ok());

    const RoutineSymbols& radiate = symbols.at("radiate");
    const SymbolRecord* energy = radiate.find("energy");
    REQUIRE(energy != nullptr);
    CHECK(energy->is_param);
    CHECK(energy->is_array());
    REQUIRE(energy->dd != nullptr);
    CHECK(energy->dd->present);
    CHECK(energy->extension_rank() == 2); // domName(i, j) prepends two domains
    const SymbolRecord* k = radiate.find("k");
    REQUIRE(k != nullptr);
    CHECK(k->decl != nullptr); // do loop counters are user declared
    CHECK_FALSE(k->is_iterator);
    const SymbolRecord* i = radiate.find("i");
    REQUIRE(i != nullptr);
    CHECK(i->is_iterator); // region iterators are synthesized
    CHECK(i->decl == nullptr);
    const SymbolRecord* nz = radiate.find("nz");
    REQUIRE(nz != nullptr);
    CHECK(nz->is_module);
    CHECK(nz->home_module == "simulation_data");

    const RoutineSymbols& diffuse = symbols.at("diffuse");
    const SymbolRecord* energy_u = diffuse.find("energy_u");
    REQUIRE(energy_u != nullptr);
    REQUIRE(energy_u->dd != nullptr);
    CHECK(energy_u->extension_rank() == 0); // no domName: rank already complete
    CHECK(energy_u->decl->dims.size() == 3);

    const RoutineSymbols& simulate = symbols.at("simulate");
    const SymbolRecord* surf = simulate.find("energy_surf");
    REQUIRE(surf != nullptr);
    CHECK(surf->is_module);
    REQUIRE(surf->dd != nullptr);
    CHECK(surf->dd->transfer_here);
    CHECK(surf->dd->dom_names.size() == 2);
    // energy_temp participates in the pointer rotation but is not listed in
    // any @domainDependant: its device shadow is synthesized later
    const SymbolRecord* temp = simulate.find("energy_temp");
    REQUIRE(temp != nullptr);
    CHECK(temp->dd == nullptr);
}

TEST_CASE("unresolved names and bad directive lists are errors") {
    SUBCASE("undeclared name in the body") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s()
    real(8) :: x
    x = x + missing
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("'missing'") != std::string::npos);
    }
    SUBCASE("intrinsics and device builtins resolve without declarations") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s()
    real(8) :: x
    integer(4) :: i
    i = (blockidx%x - 1) * blockdim%x + threadidx%x
    x = modulo(real(i), 2.0d0) + sqrt(abs(x))
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        INFO(d.render());
        CHECK(d.ok());
    }
    SUBCASE("@domainDependant naming an unknown symbol") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s(a)
    real(8), intent(inout) :: a(8)
    @domainDependant{attribute(autoDom)}
      a, phantom
    @end domainDependant
    a(1) = 0.0d0
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("phantom") != std::string::npos);
    }
    SUBCASE("symbol claimed by two @domainDependant blocks") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s(a)
    real(8), intent(inout) :: a(8)
    @domainDependant{attribute(autoDom)}
      a
    @end domainDependant
    @domainDependant{attribute(present)}
      a
    @end domainDependant
    a(1) = 0.0d0
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("more than one") != std::string::npos);
    }
    SUBCASE("region iterator colliding with an array") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine s(i)
    real(8), intent(inout) :: i(n)
    @parallelRegion{domName(i), domSize(n)}
      i(1) = 0.0d0
    @end parallelRegion
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("conflicts with an array") != std::string::npos);
    }
    SUBCASE("use of an unknown module") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s()
    use nowhere
    real(8) :: x
    x = 0.0d0
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("nowhere") != std::string::npos);
    }
    SUBCASE("dummy argument without a declaration") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module m
  implicit none
contains
  subroutine s(a)
    implicit none
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("no declaration") != std::string::npos);
    }
    SUBCASE("use only-lists restrict visibility") {
        Diagnostics d;
        auto prog = parse_text(R"f90(module data
  implicit none
  integer(4) :: n
  integer(4) :: hidden
end module data

module m
  use data, only: n
  implicit none
contains
  subroutine s()
    integer(4) :: q
    q = n + hidden
  end subroutine s
end module m
)f90",
                               d);
        REQUIRE(d.ok());
        resolve_symbols(prog, d);
        REQUIRE_FALSE(d.ok());
        CHECK(d.render().find("hidden") != std::string::npos);
    }
}

TEST_CASE("segmentation splits routines at their parallel regions") {
    Diagnostics d;
    auto prog = load_corpus(d);
    REQUIRE(d.ok());

    const ast::RoutineDecl* diffuse = prog.find_routine("diffuse");
    REQUIRE(diffuse != nullptr);
    auto segs = segment_routine(*diffuse);
    REQUIRE(segs.size() == 5);
    CHECK(segs[0].kind == SegmentKind::Specification);
    for (int n = 1; n <= 4; ++n) {
        CHECK(segs[n].kind == SegmentKind::Parallel);
        REQUIRE(segs[n].region != nullptr);
        // each region in the corpus is introduced by one comment line
        REQUIRE(segs[n].stmts.size() == 1);
        CHECK(segs[n].stmts[0]->kind == ast::StmtKind::Comment);
    }
    CHECK(segs[1].region->region->domains.size() == 3);
    CHECK(segs[2].region->region->domains.size() == 2);

    const ast::RoutineDecl* simulate = prog.find_routine("simulate");
    REQUIRE(simulate != nullptr);
    auto ssegs = segment_routine(*simulate);
    REQUIRE(ssegs.size() == 2);
    CHECK(ssegs[0].kind == SegmentKind::Specification);
    CHECK(ssegs[1].kind == SegmentKind::Sequential);
    CHECK(ssegs[1].stmts.size() == 2); // time = 0 and the while loop
}

TEST_CASE("GPU region bodies are validated") {
    auto validate = [](const std::string& text, Diagnostics& d) {
        auto prog = parse_text(text, d);
        REQUIRE(d.ok());
        auto info = analyze(prog, d);
        validate_kernel_bodies(prog, info, d);
    };

    SUBCASE("recursion inside a kernel") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      call spin(a(i))
    @end parallelRegion
  end subroutine top

  subroutine spin(x)
    real(8), intent(inout) :: x
    call spin(x)
  end subroutine spin
end module m
)f90",
                 d);
        CHECK(d.has_rule("kernel-recursion"));
    }
    SUBCASE("kernel calling another kernel") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine outer(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      call inner(a)
    @end parallelRegion
  end subroutine outer

  subroutine inner(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      a(i) = 0.0d0
    @end parallelRegion
  end subroutine inner
end module m
)f90",
                 d);
        CHECK(d.has_rule("kernel-calls-kernel"));
    }
    SUBCASE("state kept across calls cannot move to the device") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      call acc(a(i))
    @end parallelRegion
  end subroutine top

  subroutine acc(x)
    real(8), intent(inout) :: x
    real(8), save :: total
    total = total + x
    x = total
  end subroutine acc
end module m
)f90",
                 d);
        CHECK(d.has_rule("kernel-save-data"));
    }
    SUBCASE("io statements cannot run on the device, print can") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      print *, a(i)
      write(6, *) a(i)
    @end parallelRegion
  end subroutine top
end module m
)f90",
                 d);
        CHECK(d.has_rule("kernel-io"));
        CHECK(d.count_rule("kernel-io") == 1);
    }
    SUBCASE("array expressions are rejected, element updates pass") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a, b)
    real(8), intent(inout) :: a(n)
    real(8), intent(in) :: b(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      a(i) = b(i)
      a = b
    @end parallelRegion
  end subroutine top
end module m
)f90",
                 d);
        CHECK(d.has_rule("kernel-array-expression"));
        CHECK(d.count_rule("kernel-array-expression") == 1);
    }
    SUBCASE("allocation inside a region is rejected outright") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
  real(8), pointer :: scratch(:)
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(GPU), domName(i), domSize(n)}
      allocate(scratch(n))
      a(i) = 0.0d0
    @end parallelRegion
  end subroutine top
end module m
)f90",
                 d);
        CHECK_FALSE(d.ok());
    }
    SUBCASE("CPU-only regions are exempt") {
        Diagnostics d;
        validate(R"f90(module m
  implicit none
  integer(4) :: n
contains
  subroutine top(a)
    real(8), intent(inout) :: a(n)
    @parallelRegion{appliesTo(CPU), domName(i), domSize(n)}
      write(6, *) a(i)
    @end parallelRegion
  end subroutine top
end module m
)f90",
                 d);
        CHECK(d.ok());
    }
}

TEST_CASE("dot rendering labels nodes with their color") {
    Diagnostics d;
    auto prog = load_corpus(d);
    auto graph = build_callgraph(prog, d);
    auto color = color_callgraph(graph, ast::Arch::Gpu, d);
    REQUIRE(d.ok());

    std::string dot = render_dot(graph, color);
    CHECK(dot.find("digraph calls") != std::string::npos);
    CHECK(dot.find("\"diffuse\" [label=\"diffuse [kernel]\"]") != std::string::npos);
    CHECK(dot.find("\"simulate\" [label=\"simulate [kernel-caller]\"]") != std::string::npos);
    CHECK(dot.find("\"initialize\" [label=\"initialize [unaffected]\"]") != std::string::npos);
    CHECK(dot.find("\"write_data\"") != std::string::npos);
    CHECK(dot.find("\"simulate\" -> \"diffuse\";") != std::string::npos);
    CHECK(dot.find("\"run_physics\" -> \"radiate\";") != std::string::npos);
}
