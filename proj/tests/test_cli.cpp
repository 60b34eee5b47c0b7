#include <catch_amalgamated.hpp>

#include <unistd.h>

#include "support.hpp"
#include "texmath/cli.hpp"

using namespace texmath;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

struct Cli {
    fs::path cache;

    explicit Cli(const std::string& name)
        : cache(fs::temp_directory_path() / ("texmath-cli-" + name + "-" + std::to_string(::getpid()))) {
        fs::remove_all(cache);
    }
    ~Cli() { fs::remove_all(cache); }

    Run operator()(std::vector<std::string> args, const std::string& stdin_text = "") const {
        args.insert(args.begin(), {"--cache-dir", cache.string()});
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        int code = cli::run(args, in, out, err);
        return {code, out.str(), err.str()};
    }
};

fs::path write_temp(const std::string& name, const std::string& text) {
    auto p = fs::temp_directory_path() / ("texmath-" + std::to_string(::getpid()) + "-" + name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST_CASE("check", "[cli]") {
    Cli cli("check");
    auto ok = cli({"check", "x^2"});
    CHECK(ok.code == 0);
    CHECK(ok.out.empty());
    CHECK(ok.err.empty());

    auto bad = cli({"check", "\\badcmd"});
    CHECK(bad.code == 1);
    CHECK(bad.out.empty());
    CHECK(bad.err.rfind("error:E_UNKNOWN_COMMAND:0-7:", 0) == 0);

    CHECK(cli({"check", "--chem", "\\ce{H2O}"}).code == 0);
    CHECK(cli({"check", "\\ce{H2O}"}).code == 1);

    auto json = cli({"check", "--json", "\\badcmd"});
    CHECK(json.code == 1);
    auto j = nlohmann::json::parse(json.out);
    REQUIRE(j.size() == 1);
    CHECK(j[0]["code"] == "E_UNKNOWN_COMMAND");
    CHECK(j[0]["begin"] == 0);
    CHECK(j[0]["end"] == 7);

    CHECK(cli({"check"}, "x^2\n").code == 0);
    CHECK(cli({"check", "-"}, "{x\n").code == 1);
    auto missing = cli({"check", "--file", "/nonexistent/formula.tex"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("cannot read") != std::string::npos);
    CHECK(cli({"check", "--file", write_temp("f.tex", "\\frac{a}{b}\n").string()}).code == 0);
}

TEST_CASE("warnings do not fail check", "[cli]") {
    Cli cli("warn");
    auto r = cli({"check", "a \\over b"});
    CHECK(r.code == 0);
    CHECK(r.err.rfind("warning:W_DEPRECATED:", 0) == 0);
}

TEST_CASE("convert", "[cli]") {
    Cli cli("convert");
    auto r = cli({"convert", "--no-cache", "x"});
    CHECK(r.code == 0);
    CHECK(r.out == "<math display=\"inline\"><mi>x</mi></math>\n");

    auto fixture = nlohmann::json::parse(testsupport::slurp(testsupport::data_dir() / "corpus" / "figure2.json"));
    auto block = cli({"convert", "--display", "block", "\\sqrt{1-z^3}"});
    CHECK(block.out == fixture[0]["expect"]["mathml"].get<std::string>() + "\n");

    auto intent = cli({"convert", "\\intent{(x,y)}{intent='open-interval(\\$x,\\$y)'}"});
    CHECK(intent.out.find("intent=\"open-interval($x,$y)\"") != std::string::npos);

    auto bad = cli({"convert", "{x"});
    CHECK(bad.code == 1);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("E_UNBALANCED_BRACE") != std::string::npos);

    CHECK(cli({"convert", "--display", "sideways", "x"}).code == 2);
    CHECK(cli({"convert", "--semantics", "x"}).out ==
          "<math display=\"inline\"><semantics><mi>x</mi></semantics></math>\n");
}

TEST_CASE("cache subcommands and the miss/hit/miss pattern", "[cli]") {
    Cli cli("cache");
    auto empty = cli({"cache", "purge"});
    CHECK(empty.code == 0);
    CHECK(empty.out == "0 entries removed\n");

    auto first = cli({"-v", "convert", "x"});
    CHECK(first.err.find("cache miss") != std::string::npos);
    CHECK(cli({"cache", "stats"}).out.rfind("1 entry,", 0) == 0);
    auto second = cli({"-v", "convert", "x"});
    CHECK(second.err.find("cache hit") != std::string::npos);
    CHECK(second.out == first.out);

    CHECK(cli({"cache", "purge"}).out == "1 entry removed\n");
    auto third = cli({"-v", "convert", "x"});
    CHECK(third.err.find("cache miss") != std::string::npos);
    CHECK(third.out == first.out);

    // Display mode is part of the key.
    auto block = cli({"-v", "convert", "--display", "block", "x"});
    CHECK(block.err.find("cache miss") != std::string::npos);
    CHECK(cli({"cache", "stats"}).out.rfind("2 entries,", 0) == 0);
}

TEST_CASE("cache directory from the environment", "[cli]") {
    auto dir = fs::temp_directory_path() / ("texmath-env-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    ::setenv("TEXMATHC_CACHE_DIR", dir.c_str(), 1);
    std::istringstream in;
    std::ostringstream out, err;
    CHECK(cli::run({"convert", "x"}, in, out, err) == 0);
    ::unsetenv("TEXMATHC_CACHE_DIR");
    CHECK(RenderCache(dir).stats().entries == 1);
    fs::remove_all(dir);
}

TEST_CASE("unwritable cache is an environment failure for cache commands", "[cli]") {
    if (::geteuid() == 0) SKIP("root ignores directory permissions");
    auto dir = fs::temp_directory_path() / ("texmath-ro-" + std::to_string(::getpid()));
    fs::create_directories(dir / "ab");
    fs::permissions(dir, fs::perms::owner_read | fs::perms::owner_exec);
    std::istringstream in;
    std::ostringstream out, err;
    CHECK(cli::run({"--cache-dir", dir.string(), "cache", "purge"}, in, out, err) == 2);
    fs::permissions(dir, fs::perms::owner_all);
    fs::remove_all(dir);
}

TEST_CASE("corpus", "[cli]") {
    Cli cli("corpus");
    auto empty = write_temp("empty.json", "[]");
    auto r = cli({"corpus", empty.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 cases") != std::string::npos);

    auto one = write_temp("one.json", R"([{"id":"bad","input":"\\badcmd","expect":{"error_code":"E_UNKNOWN_COMMAND"}}])");
    CHECK(cli({"corpus", one.string()}).code == 0);

    auto broken = write_temp("broken.json", "[{");
    CHECK(cli({"corpus", broken.string()}).code == 2);
    CHECK(cli({"corpus", "/nonexistent/manifest.json"}).code == 2);

    auto stale = write_temp("stale.json", R"([{"id":"x","input":"x","expect":{"mathml":"old"}}])");
    auto fail = cli({"corpus", "--report", "json", stale.string()});
    CHECK(fail.code == 1);
    CHECK(nlohmann::json::parse(fail.out)["failed"] == 1);
    auto upd = cli({"corpus", "--update-refs", stale.string()});
    CHECK(upd.code == 0);
    CHECK(upd.err.find("updated 1 reference") != std::string::npos);
    CHECK(load_corpus(stale)[0].expected == "<math display=\"inline\"><mi>x</mi></math>");
}

TEST_CASE("compare", "[cli]") {
    Cli cli("compare");
    auto a = write_temp("a.mml", "<math><mrow><mi>x</mi><mo>+</mo></mrow></math>");
    auto b = write_temp("b.mml", "<math><mi>x</mi></math>");
    auto same = cli({"compare", "--report", "json", a.string(), a.string()});
    CHECK(same.code == 0);
    auto j = nlohmann::json::parse(same.out);
    CHECK(j["rows"][0]["ted"] == 0);
    CHECK(j["rows"][0]["f1"] == 1.0);

    auto diff = cli({"compare", a.string(), b.string()});
    CHECK(diff.code == 0);
    CHECK(diff.out.find("Overall TED") != std::string::npos);
    CHECK(diff.out.find("Average TED") != std::string::npos);

    auto wrapped = write_temp("w.mml",
                              "<math><semantics><mi>x</mi><annotation encoding=\"application/x-tex\">x</annotation>"
                              "</semantics></math>");
    auto stripped = cli({"compare", "--report", "json", "--strip", "annotation", "--strip", "semantics",
                         wrapped.string(), b.string()});
    CHECK(nlohmann::json::parse(stripped.out)["rows"][0]["ted"] == 0);

    auto broken = write_temp("broken.mml", "<math>");
    CHECK(cli({"compare", a.string(), broken.string()}).code == 1);
    CHECK(cli({"compare", a.string()}).code == 2);
    CHECK(cli({"compare", a.string(), "/nonexistent.mml"}).code == 2);

    auto manifest = testsupport::data_dir() / "fixtures" / "renderers" / "manifest.json";
    auto m = cli({"compare", "--manifest", manifest.string()});
    CHECK(m.code == 0);
    CHECK(m.out.find("Number of formulas") != std::string::npos);
}

TEST_CASE("usage errors exit 2, help exits 0", "[cli]") {
    Cli cli("usage");
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"--registry", "/nonexistent.registry", "check", "x"}).code == 2);
}

TEST_CASE("registry dump round-trips through --registry", "[cli]") {
    Cli cli("registry");
    auto dump = cli({"registry"});
    CHECK(dump.code == 0);
    auto p = write_temp("dump.registry", dump.out);
    CHECK(cli({"--registry", p.string(), "check", "\\frac{a}{b}"}).code == 0);
    auto tiny = write_temp("tiny.registry", "version t\n[commands]\nfrac 2 fraction literal\n");
    CHECK(cli({"--registry", tiny.string(), "check", "\\frac{a}{b}"}).code == 0);
    CHECK(cli({"--registry", tiny.string(), "check", "\\alpha"}).code == 1);
}
