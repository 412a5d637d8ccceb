//------------------------------------------------------------------------------
// test_interpreter.cpp
// Execution semantics: arrays, argument binding, pointer rebinding, parallel
// regions as loops, emulated kernel launches, runtime traps
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "doctest.h"
#include "hft/interpreter.hpp"
#include "hft/parser.hpp"
#include "hft/pipeline.hpp"

#include <string>
#include <vector>

using namespace hft;

namespace {

ast::Program parse_texts(const std::vector<std::pair<std::string, std::string>>& files,
                         Diagnostics& d) {
    std::vector<std::vector<LogicalLine>> sets;
    for (const auto& [name, text] : files) {
        LoadedSource ls = prepare_source(name, text, d);
        sets.push_back(ls.logical);
    }
    return parse_program(sets, d);
}

bool diag_contains(const Diagnostics& d, const std::string& needle) {
    for (const auto& item : d.all())
        if (item.message.find(needle) != std::string::npos) return true;
    return false;
}

std::string load_corpus_file(const std::string& name) {
    return std::string(HFT_FIXTURE_DIR) + "/corpus/" + name;
}

} // namespace

TEST_CASE("array objects compute sizes and trap out-of-bounds offsets") {
    ArrayObject a;
    a.bounds = {{0, 3}, {1, 2}};
    CHECK(a.rank() == 2);
    CHECK(a.size() == 8);
    a.data.assign(a.size(), 0.0);
    CHECK(a.offset({0, 1}) == 0);
    CHECK(a.offset({3, 2}) == 7);
    CHECK(a.offset({1, 2}) == 5); // column major: first index fastest
    CHECK(a.offset({4, 1}) == SIZE_MAX);
    CHECK(a.offset({0, 0}) == SIZE_MAX);
    CHECK(a.offset({0}) == SIZE_MAX);
}

TEST_CASE("scalars, do loops, intrinsics and the print transcript") {
    const char* text = R"(module t
  implicit none
  real(8) :: acc
contains
  subroutine go()
    integer(4) :: i
    acc = 0.0d0
    do i = 1, 7, 2
      acc = acc + i
    end do
    print *, "acc", acc, modulo(7, 3), modulo(7.5d0, 2.0d0), ceiling(real(5) / real(2))
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    REQUIRE(it.call("go"));
    CHECK(it.get_global_real("acc") == 16.0); // 1 + 3 + 5 + 7
    REQUIRE(it.transcript.size() == 1);
    CHECK(it.transcript[0] == "acc 16 1 1.5 3");
}

TEST_CASE("pointer assignment rebinds names through a triple swap") {
    const char* text = R"(module t
  implicit none
  real(8), pointer :: a(:)
  real(8), pointer :: b(:)
  real(8), pointer :: tmp(:)
contains
  subroutine go()
    allocate(a(2))
    allocate(b(2))
    a(1) = 1.0d0
    b(1) = 2.0d0
    tmp => a
    a => b
    b => tmp
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    REQUIRE(it.call("go"));
    CHECK(it.find_array("a")->data[0] == 2.0);
    CHECK(it.find_array("b")->data[0] == 1.0);
    CHECK(it.find_array("tmp")->data[0] == 1.0); // still aliased to the old a
}

TEST_CASE("slice arguments copy in and out with rebased dummy bounds") {
    const char* text = R"(module t
  implicit none
  real(8), pointer :: grid(:, :, :)
contains
  subroutine fill(col)
    real(8), intent(out) :: col(4)
    integer(4) :: k
    do k = 1, 4
      col(k) = k * 10.0d0
    end do
  end subroutine fill

  subroutine go()
    allocate(grid(0:2, 2, 4))
    call fill(grid(1, 2, :))
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    REQUIRE(it.call("go"));
    const ArrayObject* g = it.find_array("grid");
    REQUIRE(g != nullptr);
    for (long long k = 1; k <= 4; ++k) {
        CHECK(g->data[g->offset({1, 2, k})] == 10.0 * static_cast<double>(k));
        CHECK(g->data[g->offset({0, 2, k})] == 0.0); // neighbours untouched
    }
}

TEST_CASE("writes to intent(in) dummies are trapped with their origin") {
    const char* text = R"(module t
  implicit none
contains
  subroutine poke(x)
    real(8), intent(in) :: x(3)
    x(1) = 2.0d0
  end subroutine poke

  subroutine go()
    real(8) :: v(3)
    integer(4) :: i
    do i = 1, 3
      v(i) = 1.0d0
    end do
    call poke(v)
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    CHECK_FALSE(it.call("go"));
    CHECK(diag_contains(d, "intent(in)"));
    bool located = false;
    for (const auto& item : d.all()) located = located || item.where.line == 6;
    CHECK(located);
}

TEST_CASE("out-of-bounds element access is a trapped runtime error") {
    const char* text = R"(module t
  implicit none
contains
  subroutine go()
    real(8) :: v(3)
    v(4) = 1.0d0
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    CHECK_FALSE(it.call("go"));
    CHECK(diag_contains(d, "outside the bounds"));
    CHECK(diag_contains(d, "(1:3)"));
}

TEST_CASE("reading a scalar before it is set is trapped") {
    const char* text = R"(module t
  implicit none
contains
  subroutine go()
    real(8) :: a
    real(8) :: b
    b = a + 1.0d0
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    CHECK_FALSE(it.call("go"));
    CHECK(diag_contains(d, "before it is set"));
}

TEST_CASE("file I/O statements are rejected as outside the subset") {
    const char* text = R"(module t
  implicit none
contains
  subroutine go()
    real(8) :: a
    a = 1.0d0
    write(6, *) a
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    CHECK_FALSE(it.call("go"));
    CHECK(diag_contains(d, "outside the accepted subset"));
}

TEST_CASE("parallel regions run as loops on the CPU view, once when GPU-only") {
    const char* text = R"(module t
  implicit none
  integer(4) :: nx
  integer(4) :: ny
  real(8), pointer :: field(:, :)
  real(8) :: counter
contains
  subroutine sweep()
    allocate(field(nx, ny))
    counter = 0.0d0
    @parallelRegion{domName(i, j), domSize(nx, ny)}
      field(i, j) = i * 10.0d0 + j
    @end parallelRegion
    @parallelRegion{appliesTo(GPU), domName(i, j), domSize(nx, ny)}
      counter = counter + 1.0d0
    @end parallelRegion
  end subroutine sweep
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    it.set_global_int("nx", 3);
    it.set_global_int("ny", 2);
    REQUIRE(it.call("sweep"));
    const ArrayObject* f = it.find_array("field");
    REQUIRE(f != nullptr);
    for (long long j = 1; j <= 2; ++j)
        for (long long i = 1; i <= 3; ++i)
            CHECK(f->data[f->offset({i, j})] ==
                  10.0 * static_cast<double>(i) + static_cast<double>(j));
    // the GPU-only region contributes its body exactly once in the
    // sequential view, mirroring the unlooped CPU emission
    CHECK(it.get_global_real("counter") == 1.0);
}

TEST_CASE("emulated launches guard out-of-domain threads; 5x5 means 25 stores") {
    const char* text = R"(module t
  implicit none
  integer(4) :: n
  real(8), pointer :: board(:, :)
contains
  attributes(global) subroutine hfk0_mark(a, m)
    implicit none
    integer(4), value :: m
    real(8), device :: a(m, m)
    integer(4) :: i
    integer(4) :: j
    i = (blockidx%x - 1) * blockdim%x + threadidx%x
    j = (blockidx%y - 1) * blockdim%y + threadidx%y
    if (i .gt. m .or. j .gt. m) then
      return
    end if
    a(i, j) = a(i, j) + 1.0d0
  end subroutine hfk0_mark

  subroutine go()
    type(dim3) :: cugrid
    type(dim3) :: cublock
    integer(4) :: gx
    integer(4) :: gy
    allocate(board(n, n))
    gx = ceiling(real(n) / real(32))
    gy = ceiling(real(n) / real(16))
    cugrid = dim3(gx, gy, 1)
    cublock = dim3(32, 16, 1)
    call hfk0_mark <<< cugrid, cublock >>> (board, n)
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());

    InterpreterOptions opts;
    opts.emulate_kernels = true;
    Interpreter it(p, d, opts);
    int stores = 0;
    it.on_store = [&](const std::string& name, const std::vector<long long>&, double) {
        if (name == "a") ++stores;
    };
    it.set_global_int("n", 5);
    REQUIRE(it.call("go"));
    CHECK(stores == 25);
    const ArrayObject* b = it.find_array("board");
    for (long long j = 1; j <= 5; ++j)
        for (long long i = 1; i <= 5; ++i)
            CHECK(b->data[b->offset({i, j})] == 1.0);

    // identical results when the block/thread iteration order is reversed
    Diagnostics d2;
    ast::Program p2 = parse_texts({{"t.h90", text}}, d2);
    InterpreterOptions rev = opts;
    rev.launch_order = LaunchOrder::Reverse;
    Interpreter it2(p2, d2, rev);
    it2.set_global_int("n", 5);
    REQUIRE(it2.call("go"));
    const ArrayObject* b2 = it2.find_array("board");
    REQUIRE(b->data.size() == b2->data.size());
    for (std::size_t at = 0; at < b->data.size(); ++at) CHECK(b->data[at] == b2->data[at]);

    // without emulation the launch is a trap, not a silent skip
    Diagnostics d3;
    ast::Program p3 = parse_texts({{"t.h90", text}}, d3);
    Interpreter it3(p3, d3);
    it3.set_global_int("n", 5);
    CHECK_FALSE(it3.call("go"));
    CHECK(diag_contains(d3, "emulate-kernels"));
}

TEST_CASE("corpus radiate adds the radiation intensity to every column cell") {
    Diagnostics d;
    LoadedSource weather = load_and_merge(load_corpus_file("simple_weather.h90"), d);
    LoadedSource physics = load_and_merge(load_corpus_file("physics.h90"), d);
    const char* probe = R"(module probe
  implicit none
contains
  subroutine poke_radiate()
    use simulation_data
    use physics
    allocate(energy(0:nx + 1, 0:ny + 1, nz))
    call radiate(energy(1, 1, :))
  end subroutine poke_radiate

  subroutine poke_exchange()
    use simulation_data
    use physics
    integer(4) :: k
    allocate(energy(0:nx + 1, 0:ny + 1, nz))
    allocate(energy_surf(0:nx + 1, 0:ny + 1))
    do k = 1, nz
      energy(1, 1, k) = 5.0d0
    end do
    energy_surf(1, 1) = 5.0d0
    call exchange_heat_with_boundary(energy(1, 1, :), energy_surf(1, 1), 1)
  end subroutine poke_exchange
end module probe
)";
    LoadedSource pr = prepare_source("probe.h90", probe, d);
    REQUIRE(d.ok());
    ast::Program p = parse_program({weather.logical, physics.logical, pr.logical}, d);
    REQUIRE(d.ok());

    SUBCASE("one radiate call turns a zero column into 0.1 everywhere") {
        Interpreter it(p, d);
        it.set_global_int("nx", 2);
        it.set_global_int("ny", 2);
        it.set_global_int("nz", 3);
        REQUIRE(it.call("poke_radiate"));
        const ArrayObject* e = it.find_array("energy");
        REQUIRE(e != nullptr);
        for (long long k = 1; k <= 3; ++k) {
            CHECK(e->data[e->offset({1, 1, k})] == 0.1);
            CHECK(e->data[e->offset({0, 1, k})] == 0.0);
        }
    }

    SUBCASE("exchange with an equal boundary energy moves nothing") {
        Interpreter it(p, d);
        it.set_global_int("nx", 2);
        it.set_global_int("ny", 2);
        it.set_global_int("nz", 3);
        REQUIRE(it.call("poke_exchange"));
        const ArrayObject* e = it.find_array("energy");
        for (long long k = 1; k <= 3; ++k) CHECK(e->data[e->offset({1, 1, k})] == 5.0);
    }
}

TEST_CASE("write_data reaches the dump hook with tag, time and the object") {
    const char* text = R"(module t
  implicit none
  real(8), pointer :: field(:, :)
contains
  subroutine go()
    allocate(field(2, 2))
    field(1, 1) = 4.0d0
    call write_data(field, "field", 2.5d0)
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    int calls = 0;
    it.on_write_data = [&](const std::string& tag, double time, const ArrayObject& a) {
        ++calls;
        CHECK(tag == "field");
        CHECK(time == 2.5);
        CHECK(a.data[0] == 4.0);
    };
    REQUIRE(it.call("go"));
    CHECK(calls == 1);
}

TEST_CASE("deallocate releases a binding and double deallocation is trapped") {
    const char* text = R"(module t
  implicit none
  real(8), pointer :: a(:)
contains
  subroutine go()
    allocate(a(2))
    deallocate(a)
    deallocate(a)
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    CHECK_FALSE(it.call("go"));
    CHECK(diag_contains(d, "not associated"));
}

TEST_CASE("do-while with exit and cycle") {
    const char* text = R"(module t
  implicit none
  real(8) :: total
contains
  subroutine go()
    integer(4) :: i
    total = 0.0d0
    i = 0
    do while (.true.)
      i = i + 1
      if (i .gt. 10) then
        exit
      end if
      if (modulo(i, 2) .eq. 0) then
        cycle
      end if
      total = total + i
    end do
  end subroutine go
end module t
)";
    Diagnostics d;
    ast::Program p = parse_texts({{"t.h90", text}}, d);
    REQUIRE(d.ok());
    Interpreter it(p, d);
    REQUIRE(it.call("go"));
    CHECK(it.get_global_real("total") == 25.0); // 1 + 3 + 5 + 7 + 9
}
