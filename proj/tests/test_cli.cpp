#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CliResult {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

std::string cli_binary() {
    const char* bin = std::getenv("DECKLAB_BIN");
    REQUIRE_MESSAGE(bin != nullptr,
                    "DECKLAB_BIN must point at the built CLI (ctest sets it)");
    return bin;
}

std::string deck_path(const std::string& name) {
    const char* data = std::getenv("DECKLAB_DATA");
    REQUIRE_MESSAGE(data != nullptr,
                    "DECKLAB_DATA must point at the data directory (ctest sets it)");
    return std::string(data) + "/decks/" + name;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

CliResult run_cli(const std::string& args) {
    const std::string cmd = shell_quote(cli_binary()) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, got);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the reference deck and reports its marginals") {
    const auto res = run_cli("validate --deck " + shell_quote(deck_path("kqj.json")));
    CHECK(res.status == 0);
    CHECK(contains(res.output, "ok: 30 cards, 2 variable(s), 1 degenerate"));
    CHECK(contains(res.output, "Face: every value held by 10 cards"));
    CHECK(contains(res.output, "Suit: every value held by 10 cards"));
}

TEST_CASE("validate rejects unequal marginals with exit 2") {
    const std::string path = "/tmp/decklab_cli_lopsided.json";
    {
        std::ofstream out(path);
        out << R"({"variables":[{"name":"Face","values":["K","Q"]},)"
            << R"({"name":"Suit","values":["S","H"]}],)"
            << R"("cards":[{"values":{"Face":"K","Suit":"S"},"count":2},)"
            << R"({"values":{"Face":"Q","Suit":"H"},"count":1}]})";
    }
    const auto res = run_cli("validate --deck " + shell_quote(path));
    CHECK(res.status == 2);
    CHECK(contains(res.output, "invalid deck:"));
    std::remove(path.c_str());
}

TEST_CASE("file problems are deck errors, exit 2") {
    const auto missing = run_cli("validate --deck /tmp/no_such_deck_file.json");
    CHECK(missing.status == 2);
    CHECK(contains(missing.output, "deck error:"));
    CHECK(contains(missing.output, "no_such_deck_file.json"));

    const std::string path = "/tmp/decklab_cli_garbage.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    const auto garbage = run_cli("prob --deck " + shell_quote(path) + " 'Face=K; Suit=S'");
    CHECK(garbage.status == 2);
    CHECK(contains(garbage.output, "deck error:"));
    std::remove(path.c_str());
}

TEST_CASE("prob echoes the canonical sequence and its exact value") {
    const std::string kqj = shell_quote(deck_path("kqj.json"));
    const auto res = run_cli("prob --deck " + kqj + " 'Face=K; Suit=* & Face=Q'");
    CHECK(res.status == 0);
    CHECK(contains(res.output, "Face=K; Suit=* & Face=Q"));
    CHECK(contains(res.output, "= 29/100 (0.29)"));

    const auto direct = run_cli("prob --deck " + kqj + " 'Face=K; Suit=(S|H) & Face=K'");
    CHECK(direct.status == 0);
    CHECK(contains(direct.output, "= 17/100 (0.17)"));
}

TEST_CASE("sequence mistakes exit 3 with a byte offset") {
    const std::string kqj = shell_quote(deck_path("kqj.json"));
    const auto res = run_cli("prob --deck " + kqj + " 'Face=A; Suit=S'");
    CHECK(res.status == 3);
    CHECK(contains(res.output, "parse error:"));
    CHECK(contains(res.output, "at byte 5"));
}

TEST_CASE("a zero-probability interior condition exits 4") {
    const std::string kqj = shell_quote(deck_path("kqj.json"));
    const auto res = run_cli("prob --deck " + kqj + " 'Face=K; Face=Q & Suit=S'");
    CHECK(res.status == 4);
    CHECK(contains(res.output, "undefined:"));
}

TEST_CASE("the app requires a subcommand and offers help") {
    CHECK(run_cli("").status != 0);
    const auto help = run_cli("--help");
    CHECK(help.status == 0);
    for (const char* sub :
         {"validate", "tables", "prob", "simulate", "interfere", "exercises", "quantum"})
        CHECK(contains(help.output, sub));
}

TEST_CASE("tables text output prints exact grids and the reference note") {
    const auto res = run_cli("tables --deck " + shell_quote(deck_path("kqj.json")));
    CHECK(res.status == 0);
    CHECK(contains(res.output, "conditional probabilities: Pr{Suit | prepared Face}"));
    CHECK(contains(res.output, "1/10 (0.1)"));
    CHECK(contains(res.output, "2/5 (0.4)"));
    CHECK(contains(res.output, "order defect from prepared Face=K"));
    CHECK(contains(res.output, "interference of merged class Color=R"));
    CHECK(contains(res.output, "-2/25 (-0.08)"));
    CHECK(contains(res.output, "inconsistent with their defining formula"));
    CHECK(contains(res.output, "docs/grid-analysis.md"));
}

TEST_CASE("tables json carries the machine-readable discrepancy flag") {
    const auto res =
        run_cli("tables --deck " + shell_quote(deck_path("kqj.json")) + " --format json");
    CHECK(res.status == 0);
    for (const char* key : {"\"conditional\"", "\"order_defect\"", "\"ignored_marginal\"",
                            "\"interference\"", "\"paper_discrepancy\": true",
                            "\"see\": \"docs/grid-analysis.md\"", "\"value\": \"29/100\"",
                            "\"value\": \"-1/200\""})
        CHECK(contains(res.output, key));
    // The conditional grids are correct as published: no flag on them.
    const auto cond = res.output.find("\"conditional\"");
    const auto defect = res.output.find("\"order_defect\"");
    REQUIRE(cond != std::string::npos);
    REQUIRE(defect != std::string::npos);
    CHECK(res.output.substr(cond, defect - cond).find("paper_discrepancy") ==
          std::string::npos);
}

TEST_CASE("tables csv rows carry exact numerators and denominators") {
    const auto res =
        run_cli("tables --deck " + shell_quote(deck_path("kqj.json")) + " --format csv");
    CHECK(res.status == 0);
    CHECK(contains(res.output, "table,row,col,exact_num,exact_den,decimal"));
    CHECK(contains(res.output, "conditional,K,S,1,10,0.1"));
    CHECK(contains(res.output, ",Q,Q,-2,25,-0.08"));
}

TEST_CASE("simulate is reproducible for a fixed seed and thread-agnostic") {
    const std::string args = "simulate --deck " + shell_quote(deck_path("kqj.json")) +
                             " 'Face=K; Suit=* & Face=Q' --n 20000 --seed 7 --mode draw";
    const auto a = run_cli(args + " --threads 1");
    const auto b = run_cli(args + " --threads 3");
    CHECK(a.status == 0);
    CHECK(a.output == b.output);
    CHECK(contains(a.output, "sequence,empirical,exact_num,exact_den,stderr"));
    CHECK(contains(a.output, "Face=K; Suit=* & Face=Q,"));
    CHECK(contains(a.output, ",29,100,"));

    const auto other = run_cli(args + " --seed 8");
    CHECK(other.output != a.output);

    const auto js = run_cli(args + " --format json");
    CHECK(js.status == 0);
    CHECK(contains(js.output, "\"variant\": \"s\""));
    CHECK(contains(js.output, "\"exact_num\": \"29\""));
    CHECK(contains(js.output, "\"exact_den\": \"100\""));
}

TEST_CASE("simulate writes --out files verbatim") {
    const std::string out_path = "/tmp/decklab_cli_sim.csv";
    const std::string args = "simulate --deck " + shell_quote(deck_path("kqj.json")) +
                             " 'Face=K; Suit=H & Face=K' --n 5000 --seed 2 --mode draw";
    const auto piped = run_cli(args);
    const auto filed = run_cli(args + " --out " + out_path);
    CHECK(filed.status == 0);
    std::ifstream in(out_path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == piped.output);
    std::remove(out_path.c_str());
}

TEST_CASE("simulate argument errors exit 2, entropy trouble exits 4") {
    const std::string kqj = shell_quote(deck_path("kqj.json"));
    const std::string seq = " 'Face=K; Suit=H'";
    CHECK(run_cli("simulate --deck " + kqj + seq + " --n 0").status == 2);
    CHECK(run_cli("simulate --deck " + kqj + seq + " --variant bogus").status != 0);
    CHECK(run_cli("simulate --deck " + kqj + seq + " --mode bogus").status != 0);

    const auto dead = run_cli("simulate --deck " + kqj + seq +
                              " --variant svi --device /nope --n 10");
    CHECK(dead.status == 4);
    CHECK(contains(dead.output, "entropy device"));
}

TEST_CASE("interfere reports both computation routes in agreement") {
    const std::string kqj = shell_quote(deck_path("kqj.json"));
    const auto res = run_cli("interfere --deck " + kqj +
                             " --class Color=R --prep Face=K --q Face=K");
    CHECK(res.status == 0);
    CHECK(contains(res.output, "definition: -1/200 (-0.005)"));
    CHECK(contains(res.output, "product form: -1/200 (-0.005)"));
    CHECK(contains(res.output, "[agrees]"));
    CHECK(!contains(res.output, "[DISAGREES]"));

    // Singleton class: no merging, no interference, no two-member product.
    const auto single = run_cli("interfere --deck " + kqj +
                                " --class Color=B --prep Face=K --q Face=K");
    CHECK(single.status == 0);
    CHECK(contains(single.output, "definition: 0 (0)"));
    CHECK(!contains(single.output, "product form"));

    const auto no_deg = run_cli("interfere --deck " + shell_quote(deck_path("two_value.json")) +
                                " --class Color=R --prep Tone=low --q Tone=low");
    CHECK(no_deg.status == 2);
}

TEST_CASE("exercises emit the worked answers with the dispute marked") {
    const auto md = run_cli("exercises");
    CHECK(md.status == 0);
    CHECK(contains(md.output, "Pr{(S|H)[1] & K[2]} = 1/4"));
    CHECK(contains(md.output, "the source text states 0"));

    const auto js = run_cli("exercises --format json");
    CHECK(js.status == 0);
    CHECK(contains(js.output, "\"paper_discrepancy\": true"));
    CHECK(contains(js.output, "\"see\": \"docs/grid-analysis.md\""));
    CHECK(contains(js.output, "\"value\": \"3/4\""));
}

TEST_CASE("quantum fuzz runs clean and prints the worked example") {
    const auto res = run_cli("quantum --trials 8 --seed 3 --dim 2 --dim 3");
    CHECK(res.status == 0);
    CHECK(contains(res.output, "dim 2:"));
    CHECK(contains(res.output, "dim 3:"));
    CHECK(contains(res.output, "0 failures"));
    CHECK(contains(res.output, "branch sum 0.5, dephased 0.5, direct 1"));

    const auto js = run_cli("quantum --trials 8 --seed 3 --dim 2 --format json");
    CHECK(js.status == 0);
    CHECK(contains(js.output, "\"failures\": 0"));
    CHECK(contains(js.output, "\"direct\": 1.0"));
}

}  // TEST_SUITE
