//------------------------------------------------------------------------------
// test_preprocessor.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "doctest.h"
#include "hft/preprocessor.hpp"

#include <string>
#include <vector>

using namespace hft;

namespace {

RawSource src(const std::string& text, SourceKind kind = SourceKind::HybridWithMacros) {
    return make_source("test.H90", text, kind);
}

std::vector<std::string> texts(const RawSource& s) {
    std::vector<std::string> out;
    for (const auto& l : s.lines) out.push_back(l.text);
    return out;
}

} // namespace

TEST_CASE("conditional selects the defined branch") {
    const char* text = "#if (GPU)\n"
                       "a = 1\n"
                       "#else\n"
                       "a = 2\n"
                       "#endif\n";
    SUBCASE("GPU defined") {
        MacroTable t;
        t.define_flag("GPU");
        Diagnostics d;
        RawSource out = preprocess(src(text), t, d);
        REQUIRE(d.ok());
        CHECK(texts(out) == std::vector<std::string>{"a = 1"});
    }
    SUBCASE("GPU undefined") {
        MacroTable t;
        Diagnostics d;
        RawSource out = preprocess(src(text), t, d);
        REQUIRE(d.ok());
        CHECK(texts(out) == std::vector<std::string>{"a = 2"});
        CHECK(out.lines[0].line == 4); // original numbering survives
    }
}

TEST_CASE("ifdef, ifndef, elif and nesting") {
    const char* text = "#ifdef A\n"
                       "x\n"
                       "#elif B\n"
                       "y\n"
                       "#else\n"
                       "#ifndef C\n"
                       "z\n"
                       "#endif\n"
                       "#endif\n";
    MacroTable t;
    t.define_flag("B");
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(texts(out) == std::vector<std::string>{"y"});
}

TEST_CASE("object and function macro expansion") {
    const char* text = "#define NX 128\n"
                       "#define AT(i, j, k) k, j, i\n"
                       "u(AT(ii, jj, kk)) = v(AT(ii - 1, jj, kk)) + NX\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    REQUIRE(out.lines.size() == 1);
    CHECK(out.lines[0].text == "u(kk, jj, ii) = v(kk, jj, ii - 1) + 128");
    CHECK(t.is_defined("NX"));
    CHECK(t.is_defined("AT"));
}

TEST_CASE("nested macro argument parentheses and ranges") {
    const char* text = "#define DOM(a, b, c) c, b, a\n"
                       "real(8) :: u(DOM(0:nx+1, 0:ny+1, 1:nz))\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "real(8) :: u(1:nz, 0:ny+1, 0:nx+1)");
}

TEST_CASE("macros chain through rescanning") {
    const char* text = "#define AT(i, j, k) k, j, i\n"
                       "#define MYORDER(i, j, k) AT(i, j, k)\n"
                       "u(MYORDER(a, b, c)) = 0\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "u(c, b, a) = 0");
}

TEST_CASE("self-referential macros stop at one expansion") {
    const char* text = "#define x x + 1\n"
                       "a = x\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "a = x + 1"); // the inner x is not re-expanded
}

TEST_CASE("strings and comments are opaque to expansion") {
    const char* text = "#define GPU 1\n"
                       "print *, \"GPU\" ! GPU here too\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "print *, \"GPU\" ! GPU here too");
}

TEST_CASE("function macro without call stays untouched") {
    const char* text = "#define AT(i, j, k) k, j, i\n"
                       "x = AT\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "x = AT");
}

TEST_CASE("argument count mismatch is diagnosed") {
    const char* text = "#define AT(i, j, k) k, j, i\n"
                       "x = AT(1, 2)\n";
    MacroTable t;
    Diagnostics d;
    preprocess(src(text), t, d);
    CHECK_FALSE(d.ok());
}

TEST_CASE("include and unknown directives are rejected") {
    MacroTable t;
    Diagnostics d;
    preprocess(src("#include 'storage_order.F90'\n"), t, d);
    CHECK_FALSE(d.ok());

    Diagnostics d2;
    MacroTable t2;
    preprocess(src("#pragma omp parallel\n"), t2, d2);
    CHECK_FALSE(d2.ok());
}

TEST_CASE("unterminated conditional is diagnosed") {
    MacroTable t;
    Diagnostics d;
    preprocess(src("#if 1\nx\n"), t, d);
    CHECK_FALSE(d.ok());
}

TEST_CASE("undef removes a definition") {
    const char* text = "#define N 4\n"
                       "#undef N\n"
                       "x = N\n";
    MacroTable t;
    Diagnostics d;
    RawSource out = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    CHECK(out.lines[0].text == "x = N");
    CHECK_FALSE(t.is_defined("N"));
}

TEST_CASE("preprocess is idempotent on its own output with an empty table") {
    const char* text = "#if defined(GPU)\n"
                       "a = 1\n"
                       "#else\n"
                       "a = 2, b = 'with # and ! marks'\n"
                       "#endif\n"
                       "c = 3\n";
    MacroTable t;
    Diagnostics d;
    RawSource once = preprocess(src(text), t, d);
    REQUIRE(d.ok());
    REQUIRE(t.empty());
    MacroTable t2;
    RawSource twice = preprocess(once, t2, d);
    REQUIRE(d.ok());
    CHECK(texts(twice) == texts(once));
}

TEST_CASE("kind advances after macro consumption") {
    MacroTable t;
    Diagnostics d;
    CHECK(preprocess(src("x\n", SourceKind::HybridWithMacros), t, d).kind == SourceKind::Hybrid);
    CHECK(preprocess(src("x\n", SourceKind::FortranWithMacros), t, d).kind ==
          SourceKind::PlainFortran);
}
