#include <catch_amalgamated.hpp>

#include <thread>

#include <unistd.h>

#include "support.hpp"
#include "texmath/cache.hpp"
#include "texmath/corpus.hpp"

using namespace texmath;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("texmath-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("corpus manifest parsing", "[corpus]") {
    auto cases = parse_corpus(R"([
        {"id": "a", "input": "x", "expect": {"mathml": "<math display=\"inline\"><mi>x</mi></math>"}},
        {"id": "b", "input": "\\badcmd", "expect": {"error_code": "E_UNKNOWN_COMMAND"}},
        {"id": "c", "input": "\\ce{H2O}", "expect": {"valid_only": true}, "options": {"chem": true, "display": "block"}}
    ])");
    REQUIRE(cases.size() == 3);
    CHECK(cases[1].expect == CorpusCase::Expect::error_code);
    CHECK(cases[2].options.chem);
    CHECK(cases[2].options.gen.display == Display::block);

    auto s = run_corpus(cases, default_registry());
    CHECK(s.passed == 3);
    CHECK(parse_corpus(dump_corpus(cases)).size() == 3);
    CHECK(dump_corpus(parse_corpus(dump_corpus(cases))) == dump_corpus(cases));
}

TEST_CASE("corpus manifests with two expectations or bad JSON are rejected", "[corpus]") {
    CHECK_THROWS_AS(parse_corpus(R"([{"id":"a","input":"x","expect":{"mathml":"m","valid_only":true}}])"), ManifestError);
    CHECK_THROWS_AS(parse_corpus("{"), ManifestError);
    CHECK_THROWS_AS(parse_corpus(R"({"id":"a"})"), ManifestError);
    CHECK_THROWS_AS(parse_corpus(R"([{"id":"a"}])"), ManifestError);
    CHECK(parse_corpus("[]").empty());
}

TEST_CASE("run_case statuses", "[corpus]") {
    CorpusCase c{"x", "x", CorpusCase::Expect::mathml, "<math/>", {}};
    CHECK(run_case(c, default_registry()).status == CaseStatus::fail);
    c.input = "\\badcmd";
    CHECK(run_case(c, default_registry()).status == CaseStatus::error);
    c.expect = CorpusCase::Expect::error_code;
    c.expected = "E_UNKNOWN_COMMAND";
    CHECK(run_case(c, default_registry()).status == CaseStatus::pass);
    c.input = "x";
    CHECK(run_case(c, default_registry()).status == CaseStatus::fail);
}

TEST_CASE("update_refs regenerates mathml expectations", "[corpus]") {
    std::vector<CorpusCase> cases{{"x", "x", CorpusCase::Expect::mathml, "stale", {}},
                                  {"bad", "\\badcmd", CorpusCase::Expect::mathml, "keep", {}}};
    CHECK(update_refs(cases, default_registry()) == 1);
    CHECK(cases[0].expected == "<math display=\"inline\"><mi>x</mi></math>");
    CHECK(cases[1].expected == "keep");
}

TEST_CASE("outcomes are ordered by case id", "[corpus]") {
    std::vector<CorpusCase> cases{{"b", "x", CorpusCase::Expect::valid_only, "", {}},
                                  {"a", "y", CorpusCase::Expect::valid_only, "", {}}};
    auto s = run_corpus(cases, default_registry());
    CHECK(s.outcomes[0].id == "a");
}

TEST_CASE("sha256 known answers", "[cache]") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cache keys are deterministic and separate their fields", "[cache]") {
    auto k = RenderCache::key("x", "display=inline", "1.0.0");
    CHECK(k == RenderCache::key("x", "display=inline", "1.0.0"));
    CHECK(k.size() == 64);
    CHECK(k != RenderCache::key("x", "display=block", "1.0.0"));
    CHECK(k != RenderCache::key("x", "display=inline", "1.0.1"));
    CHECK(RenderCache::key("ab", "c", "v") != RenderCache::key("a", "bc", "v"));
}

TEST_CASE("cache put, get, stats and purge", "[cache]") {
    auto dir = fresh_dir("cache");
    RenderCache c(dir);
    CHECK(c.stats().entries == 0);
    CHECK(c.purge() == 0);
    auto k = RenderCache::key("x", "f", "v");
    CHECK_FALSE(c.get(k));
    c.put(k, "<math/>");
    CHECK(c.get(k) == std::optional<std::string>("<math/>"));
    CHECK(c.entry_path(k).parent_path().parent_path().parent_path() == dir);
    CHECK(c.entry_path(k).parent_path().filename() == k.substr(2, 2));
    auto s = c.stats();
    CHECK(s.entries == 1);
    CHECK(s.bytes == 7);
    CHECK(c.purge() == 1);
    CHECK_FALSE(fs::exists(dir));
    CHECK_FALSE(c.get(k));
}

TEST_CASE("concurrent writers never leave a torn entry", "[cache]") {
    auto dir = fresh_dir("concurrent");
    RenderCache c(dir);
    auto k = RenderCache::key("y", "f", "v");
    const std::string value(100000, 'z');
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&] {
            for (int i = 0; i < 20; ++i) c.put(k, value);
        });
    for (int i = 0; i < 50; ++i) {
        auto got = c.get(k);
        if (got) CHECK(*got == value);
    }
    for (auto& t : ts) t.join();
    CHECK(c.get(k) == std::optional<std::string>(value));
    CHECK(c.stats().entries == 1);
    c.purge();
}
