#include <doctest.h>

#include "sefeat/error.hpp"
#include "sefeat/pe_layout.hpp"
#include "sefeat/synth_pe.hpp"
#include "test_support.hpp"

using namespace sefeat;
using sefeat::testing::craft_pe;
using sefeat::testing::layout_violation;

TEST_CASE("synthetic .text then .data") {
    SynthSpec spec;
    spec.sections = {{".text", 8192, profile::Constant{0x90}}, {".data", 4096, profile::UniformRandom{}}};
    const auto img = build_synthetic_pe(spec);
    const auto placement = synthetic_placement(spec);
    const auto layout = parse_pe(img);

    REQUIRE(layout.spans.size() == 3);
    CHECK(layout.spans[0] == SectionSpan{"", SectionClass::Header, 0, placement.headers_size});
    CHECK(layout.spans[1] == SectionSpan{".text", SectionClass::Text, placement.section_offsets[0], 8192});
    CHECK(layout.spans[2] == SectionSpan{".data", SectionClass::Data, placement.section_offsets[1], 4096});
    CHECK(layout_violation(layout, img).empty());
}

TEST_CASE("overlay becomes a trailing Undefined span") {
    SynthSpec spec;
    spec.sections = {{".text", 4096, profile::UniformRandom{}}};
    spec.overlay_size = 512;
    const auto img = build_synthetic_pe(spec);
    const auto layout = parse_pe(img);
    REQUIRE(layout.spans.size() == 3);
    CHECK(layout.spans.back().cls == SectionClass::Undefined);
    CHECK(layout.spans.back().raw_size == 512);
    CHECK(layout.spans.back().file_offset == synthetic_placement(spec).overlay_offset);
}

TEST_CASE("malformed headers") {
    auto expect_malformed = [](std::vector<std::uint8_t> bytes, std::string_view structure) {
        try {
            (void)parse_pe(bytes);
            FAIL("expected MalformedPe");
        } catch (const MalformedPe& e) {
            CHECK(e.structure().find(structure) != std::string::npos);
        }
    };

    SUBCASE("MZ then garbage") {
        expect_malformed({'M', 'Z', 0x13, 0x37, 0xFF, 0x00, 0x42}, "DOS header");
    }
    SUBCASE("no MZ") {
        auto b = craft_pe({}, 512);
        b[0] = 'Z';
        expect_malformed(b, "DOS header");
    }
    SUBCASE("e_lfanew past end") {
        auto b = craft_pe({}, 512);
        b[0x3C] = 0xF0;
        b[0x3D] = 0x01;
        expect_malformed(b, "e_lfanew");
    }
    SUBCASE("e_lfanew far out of range") {
        auto b = craft_pe({}, 512);
        b[0x3F] = 0x80;
        expect_malformed(b, "e_lfanew");
    }
    SUBCASE("bad PE signature") {
        auto b = craft_pe({}, 512);
        b[testing::kCraftLfanew + 1] = 'X';
        expect_malformed(b, "NT signature");
    }
    SUBCASE("section table past end of file") {
        auto b = craft_pe({{".text", 0x100, 0x10}}, 512);
        b[testing::kCraftLfanew + 4 + 2] = 0xFF;  // 255 sections
        expect_malformed(b, "section table");
    }
    SUBCASE("raw pointer at end of file") {
        expect_malformed(craft_pe({{".text", 512, 16}}, 512), "section header 0");
    }
}

TEST_CASE("error carries offset") {
    auto b = craft_pe({{".text", 0x100, 0x10}, {".data", 0x1000, 0x10}}, 0x200);
    try {
        (void)parse_pe(b);
        FAIL("expected MalformedPe");
    } catch (const MalformedPe& e) {
        CHECK(e.offset() == testing::kCraftTable + 40 + 20);
    }
}

TEST_CASE("no sections: the whole file is Header") {
    const auto b = craft_pe({}, 300);
    const auto layout = parse_pe(b);
    REQUIRE(layout.spans.size() == 1);
    CHECK(layout.spans[0] == SectionSpan{"", SectionClass::Header, 0, 300});
}

TEST_CASE("zero-size sections are dropped, even with a bogus pointer") {
    const auto b = craft_pe({{".bss", 0xFFFFFF, 0}, {".text", 0x200, 0x100}}, 0x300);
    const auto layout = parse_pe(b);
    REQUIRE(layout.spans.size() == 2);
    CHECK(layout.spans[1].raw_name == ".text");
    CHECK(layout_violation(layout, b).empty());
}

TEST_CASE("raw size past end of file is clamped") {
    const auto b = craft_pe({{".rsrc", 0x200, 0x10000}}, 0x280);
    const auto layout = parse_pe(b);
    REQUIRE(layout.spans.size() == 2);
    CHECK(layout.spans[1] == SectionSpan{".rsrc", SectionClass::Rsrc, 0x200, 0x80});
}

TEST_CASE("gaps between sections and unsorted section table") {
    // Table order: .data first, but .text has the lower raw pointer.
    const auto b = craft_pe({{".data", 0x400, 0x100}, {".text", 0x200, 0x100}}, 0x600);
    const auto layout = parse_pe(b);
    REQUIRE(layout.spans.size() == 5);
    CHECK(layout.spans[0] == SectionSpan{"", SectionClass::Header, 0, 0x200});
    CHECK(layout.spans[1] == SectionSpan{".text", SectionClass::Text, 0x200, 0x100});
    CHECK(layout.spans[2] == SectionSpan{"", SectionClass::Undefined, 0x300, 0x100});
    CHECK(layout.spans[3] == SectionSpan{".data", SectionClass::Data, 0x400, 0x100});
    CHECK(layout.spans[4] == SectionSpan{"", SectionClass::Undefined, 0x500, 0x100});
}

TEST_CASE("overlapping raw ranges: first wins") {
    SUBCASE("partial overlap shrinks the later span") {
        const auto b = craft_pe({{".text", 0x200, 0x200}, {".rdata", 0x300, 0x200}}, 0x500);
        const auto layout = parse_pe(b);
        REQUIRE(layout.spans.size() == 3);
        CHECK(layout.spans[1] == SectionSpan{".text", SectionClass::Text, 0x200, 0x200});
        CHECK(layout.spans[2] == SectionSpan{".rdata", SectionClass::Rdata, 0x400, 0x100});
    }
    SUBCASE("contained range is dropped") {
        const auto b = craft_pe({{".text", 0x200, 0x200}, {".rdata", 0x280, 0x80}}, 0x400);
        const auto layout = parse_pe(b);
        REQUIRE(layout.spans.size() == 2);
        CHECK(layout.spans[1].raw_name == ".text");
    }
    SUBCASE("equal pointers keep section-table order") {
        const auto b = craft_pe({{".idata", 0x200, 0x100}, {".edata", 0x200, 0x180}}, 0x400);
        const auto layout = parse_pe(b);
        REQUIRE(layout.spans.size() == 4);
        CHECK(layout.spans[1] == SectionSpan{".idata", SectionClass::Idata, 0x200, 0x100});
        CHECK(layout.spans[2] == SectionSpan{".edata", SectionClass::Edata, 0x300, 0x80});
        CHECK(layout.spans[3].cls == SectionClass::Undefined);
    }
    SUBCASE("section data inside the headers is cut at the section table end") {
        const auto b = craft_pe({{".text", 0x10, 0x200}}, 0x300);
        const auto layout = parse_pe(b);
        const std::uint64_t table_end = testing::kCraftTable + 40;
        REQUIRE(layout.spans.size() == 3);
        CHECK(layout.spans[0] == SectionSpan{"", SectionClass::Header, 0, table_end});
        CHECK(layout.spans[1] == SectionSpan{".text", SectionClass::Text, table_end, 0x210 - table_end});
        CHECK(layout_violation(layout, b).empty());
    }
}

TEST_CASE("section names are stored without NUL padding and classified by exact name") {
    const auto b = craft_pe({{".TEXT", 0x200, 0x100}, {"UPX0", 0x300, 0x100}, {".tls", 0x400, 0x100}}, 0x500);
    const auto layout = parse_pe(b);
    REQUIRE(layout.spans.size() == 4);
    CHECK(layout.spans[1].raw_name == ".TEXT");
    CHECK(layout.spans[1].cls == SectionClass::Undefined);
    CHECK(layout.spans[2].cls == SectionClass::Undefined);
    CHECK(layout.spans[3].cls == SectionClass::Tls);
}

TEST_CASE("section_bytes") {
    std::vector<std::uint8_t> file(128);
    for (std::size_t i = 0; i < file.size(); ++i) file[i] = static_cast<std::uint8_t>(i);

    const auto head = section_bytes(file, {"", SectionClass::Header, 0, 64});
    CHECK(head.size() == 64);
    CHECK(head.data() == file.data());

    const auto all = section_bytes(file, {"", SectionClass::Header, 0, 128});
    CHECK(std::equal(all.begin(), all.end(), file.begin(), file.end()));

    CHECK_THROWS_AS(section_bytes(file, {"", SectionClass::Header, 100, 64}), OutOfBounds);
    CHECK_THROWS_AS(section_bytes(file, {"", SectionClass::Header, 129, 0}), OutOfBounds);
    CHECK_THROWS_AS(section_bytes(file, {"", SectionClass::Header, 1, ~std::uint64_t{0}}), OutOfBounds);
}

TEST_CASE("fuzz: random mutations never escape as anything but MalformedPe") {
    SplitMix64 rng(99);
    SynthSpec spec;
    spec.sections = {{".text", 1500, profile::UniformRandom{}},
                     {".rdata", 700, profile::Constant{1}},
                     {".rsrc", 2048, profile::TwoSymbol{0, 0xFF, 0.3}}};
    spec.overlay_size = 100;
    const auto base = build_synthetic_pe(spec);

    std::size_t parsed = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        auto b = base;
        const auto edits = 1 + rng.next_below(8);
        for (std::uint64_t k = 0; k < edits; ++k) {
            // Focus on the header region where the interesting fields live.
            const auto pos = rng.next_below(rng.next_below(4) == 0 ? b.size() : 0x300);
            b[pos] = static_cast<std::uint8_t>(rng.next());
        }
        if (rng.next_below(5) == 0) {
            b.resize(rng.next_below(b.size()) + 1);
        }
        try {
            const auto layout = parse_pe(b);
            ++parsed;
            CHECK(layout_violation(layout, b).empty());
        } catch (const MalformedPe&) {
        }
    }
    CHECK(parsed > 100);
}
