#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "sefeat/feature_io.hpp"
#include "sefeat/file_util.hpp"
#include "test_support.hpp"

using namespace sefeat;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SEFEAT_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

const std::filesystem::path kExampleSpec = std::filesystem::path(SEFEAT_SOURCE_DIR) / "docs/synth/example.synth";

}  // namespace

TEST_CASE("synth, inspect, extract end to end") {
    testing::TempDir dir("cli");
    const auto corpus = dir.path() / "corpus";

    auto r = run("synth " + q(kExampleSpec) + " --out " + q(corpus));
    REQUIRE(r.code == 0);
    const auto manifest = load_manifest_file(corpus / "manifest.csv");
    CHECK(manifest.entries.size() == 200);

    SUBCASE("rerun is byte identical") {
        const auto again = dir.path() / "again";
        REQUIRE(run("synth " + q(kExampleSpec) + " --out " + q(again)).code == 0);
        for (const auto& e : manifest.entries) {
            REQUIRE(read_file_bytes(corpus / e.path) == read_file_bytes(again / e.path));
        }
    }

    SUBCASE("inspect") {
        r = run("inspect " + q(corpus / manifest.entries[0].path));
        CHECK(r.code == 0);
        CHECK(r.out.find("Header") != std::string::npos);
        CHECK(r.out.find(".text") != std::string::npos);
        CHECK(r.out.find(".reloc") != std::string::npos);
    }

    SUBCASE("extract from manifest, serial vs parallel") {
        const auto s = dir.path() / "s";
        const auto p = dir.path() / "p";
        const auto a = run("extract --deterministic --manifest " + q(corpus / "manifest.csv") + " --out " + q(s));
        const auto b = run("extract --deterministic -j 4 --manifest " + q(corpus / "manifest.csv") + " --out " + q(p));
        CHECK(a.code == 0);
        CHECK(b.code == 0);
        CHECK(a.out.find("processed 200, skipped 0") != std::string::npos);
        CHECK(a.out.find("elapsed") == std::string::npos);
        const auto out_manifest = load_manifest_file(s / "manifest.csv");
        CHECK(out_manifest.entries.size() == 200);
        CHECK(read_file_text(s / "manifest.csv") == read_file_text(p / "manifest.csv"));
        for (const auto& e : out_manifest.entries) {
            REQUIRE(read_file_bytes(s / e.path) == read_file_bytes(p / e.path));
        }
    }

    SUBCASE("export-csv") {
        const auto out = dir.path() / "one";
        REQUIRE(run("extract --deterministic --out " + q(out) + " " + q(corpus / manifest.entries[0].path)).code == 0);
        const auto sefm = out / (std::filesystem::path(manifest.entries[0].path).stem().string() + ".sefm");
        r = run("export-csv " + q(sefm));
        CHECK(r.code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3600);
        CHECK(r.out.rfind(",1,0,0,0,0,0,0,0,0,0,0,0,0\n") != std::string::npos);  // header row
    }
}

TEST_CASE("extract with flags and failures") {
    testing::TempDir dir("cli2");
    const auto corpus = dir.path() / "corpus";
    REQUIRE(run("synth " + q(kExampleSpec) + " --out " + q(corpus)).code == 0);
    const auto manifest = load_manifest_file(corpus / "manifest.csv");

    std::string ten;
    for (std::size_t i = 0; i < 10; ++i) ten += " " + q(corpus / manifest.entries[i * 20].path);

    SUBCASE("10 valid files") {
        const auto out = dir.path() / "ten";
        const auto r = run("extract --deterministic --out " + q(out) + ten);
        CHECK(r.code == 0);
        std::size_t n = 0;
        for (const auto& e : std::filesystem::directory_iterator(out)) n += e.path().extension() == ".sefm";
        CHECK(n == 10);
        CHECK(r.out.find("used_rows=") != std::string::npos);
    }
    SUBCASE("one corrupt file is skipped") {
        const auto bad = dir.path() / "bad.exe";
        write_file_atomic(bad, std::string_view("MZ garbage"));
        std::string nine;
        for (std::size_t i = 0; i < 9; ++i) nine += " " + q(corpus / manifest.entries[i].path);
        const auto r = run("extract --deterministic --out " + q(dir.path() / "mixed") + nine + " " + q(bad));
        CHECK(r.code == 0);
        CHECK(r.out.find("processed 9, skipped 1") != std::string::npos);
    }
    SUBCASE("all inputs failing exits 2") {
        const auto bad = dir.path() / "bad.exe";
        write_file_atomic(bad, std::string_view("hello"));
        CHECK(run("extract --out " + q(dir.path() / "none") + " " + q(bad)).code == 2);
    }
    SUBCASE("--baseline, --chunk-size, --max-rows") {
        const auto out = dir.path() / "base";
        const auto one = corpus / manifest.entries[0].path;
        REQUIRE(run("extract --baseline --chunk-size 1024 --max-rows 100 --out " + q(out) + " " + q(one)).code == 0);
        const auto m = load_feature_file(out / (one.stem().string() + ".sefm"));
        CHECK(m.cols() == 1);
        CHECK(m.rows() == 100);
    }
}

TEST_CASE("exit codes") {
    testing::TempDir dir("cli3");
    const auto text = dir.path() / "notes.txt";
    write_file_atomic(text, std::string_view("just some text, definitely not a PE image\n"));
    CHECK(run("inspect " + q(text)).code == 2);
    CHECK(run("inspect " + q(dir.path() / "missing.exe")).code == 3);

    const auto spec = dir.path() / "bad.synth";
    write_file_atomic(spec, std::string_view("[recipe]\ncount = 1\nsection = .toolong1 512 random\n"));
    CHECK(run("synth " + q(spec) + " --out " + q(dir.path() / "c")).code == 4);
    CHECK(run("synth " + q(dir.path() / "absent.synth") + " --out " + q(dir.path() / "c")).code == 3);

    const auto bad_sefm = dir.path() / "x.sefm";
    write_file_atomic(bad_sefm, std::string_view("XXXXnope"));
    CHECK(run("export-csv " + q(bad_sefm)).code == 2);
}
