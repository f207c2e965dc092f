// Drives the installed CLI binary through the documented subcommand
// surface: happy paths, flag spellings, exit codes, machine-readable
// errors. Usage: cli_smoke <path-to-sftkit>.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;
int g_failures = 0;

void report(bool ok, const std::string& label, const std::string& detail = "") {
    std::printf("%s %s%s%s\n", ok ? "ok  " : "FAIL", label.c_str(), detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& args, std::string* captured_stderr = nullptr) {
    const fs::path err = g_dir / "stderr.txt";
    const std::string cmd =
        "\"" + g_cli + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    if (captured_stderr) {
        std::ifstream in(err);
        std::ostringstream ss;
        ss << in.rdbuf();
        *captured_stderr = ss.str();
    }
    return status == 0 ? 0 : 1;
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    const std::string content = slurp(p);
    std::size_t n = 0;
    for (char c : content) n += (c == '\n');
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_smoke <sftkit binary>\n");
        return 2;
    }
    g_cli = argv[1];
    g_dir = fs::temp_directory_path() / ("sftkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(g_dir);
    const std::string d = g_dir.string();

    // chunk on a 110-line file with the documented flags.
    {
        std::string text;
        for (int i = 0; i < 110; ++i) text += "line " + std::to_string(i) + "\n";
        write(g_dir / "doc.txt", text);
        const int rc = run("chunk --window 50 --stride 30 --input " + d + "/doc.txt --output " +
                           d + "/chunks.jsonl");
        report(rc == 0 && line_count(g_dir / "chunks.jsonl") == 3,
               "chunk --window 50 --stride 30 on 110 lines -> 3 records, exit 0");
    }

    // generate --mock with --seed after the subcommand.
    {
        const int rc = run("generate --mock --seed 9 --chunks " + d + "/chunks.jsonl --output " +
                           d + "/gen.jsonl --n 4");
        report(rc == 0 && line_count(g_dir / "gen.jsonl") > 0,
               "generate --mock produces records offline");
        const int rc2 = run("generate --mock --seed 9 --chunks " + d +
                            "/chunks.jsonl --output " + d + "/gen2.jsonl --n 4");
        report(rc2 == 0 && slurp(g_dir / "gen.jsonl") == slurp(g_dir / "gen2.jsonl"),
               "generate --mock is reproducible per seed");
    }

    // validate-records on the generated output, with referential checks.
    {
        const int rc = run("validate-records --input " + d + "/gen.jsonl --strict --chunks " +
                           d + "/chunks.jsonl");
        report(rc == 0, "validate-records --strict passes on mock output with chunk refs");
        write(g_dir / "orphan.jsonl",
              "{\"instruction\":\"q?\",\"input\":\"\",\"output\":\"a\",\"origin\":\"llm\","
              "\"subject\":\"others\",\"source_chunk_id\":\"ghost#0-1\"}\n");
        const int rc2 = run("validate-records --input " + d + "/orphan.jsonl --strict --chunks " +
                            d + "/chunks.jsonl");
        report(rc2 != 0, "dangling source_chunk_id fails strict validation");
    }

    // qlinear-check per the documented example.
    {
        const int rc = run("qlinear-check --seed 7");
        report(rc == 0, "qlinear-check --seed 7 exits 0");
    }

    // quantize / dequantize round trip through raw f32 files.
    {
        std::vector<float> values(96);
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = static_cast<float>(i) * 0.37f - 17.0f;
        }
        std::string raw(values.size() * 4, '\0');
        std::memcpy(raw.data(), values.data(), raw.size());
        write(g_dir / "w.f32", raw);
        const int rc = run("quantize --input " + d + "/w.f32 --shape 12x8 --bits 8 --output " +
                           d + "/w.nfq");
        std::string err;
        const int rc2 = run("dequantize --input " + d + "/w.nfq --output " + d +
                            "/w_restored.f32 --reference " + d + "/w.f32", &err);
        report(rc == 0 && rc2 == 0 &&
                   fs::file_size(g_dir / "w_restored.f32") == fs::file_size(g_dir / "w.f32"),
               "quantize/dequantize round trip with matching sizes");
    }

    // stats with the documented spelling.
    {
        const int rc = run("stats --input " + d + "/gen.jsonl --field output --format csv "
                           "--output " + d + "/hist.csv");
        report(rc == 0 && slurp(g_dir / "hist.csv").rfind("word_count,frequency", 0) == 0,
               "stats --field output --format csv emits the table");
        const int rc2 = run("stats --input " + d + "/gen.jsonl --category-report --output " + d +
                            "/subjects.csv");
        report(rc2 == 0 && slurp(g_dir / "subjects.csv").rfind("subject,count,percent", 0) == 0,
               "stats --category-report emits subject,count,percent");
        write(g_dir / "docs_for_stats.jsonl",
              "{\"text\":\"abc\",\"category\":\"specialized\",\"subject\":\"accounting\"}\n"
              "{\"text\":\"defgh\",\"category\":\"specialized\",\"subject\":\"accounting\"}\n");
        const int rc3 = run("stats --corpus-input " + d + "/docs_for_stats.jsonl --output " + d +
                            "/corpus.csv");
        report(rc3 == 0 && slurp(g_dir / "corpus.csv").find("specialized,accounting,2,8") !=
                               std::string::npos,
               "stats --corpus-input emits per-bucket counts and byte totals");
    }

    // emit-config defaults and override validation.
    {
        const int rc = run("emit-config --output " + d + "/train.cfg");
        const std::string cfg = slurp(g_dir / "train.cfg");
        report(rc == 0 && cfg.find("learning_rate = 5e-05") != std::string::npos,
               "emit-config writes the default bundle");
        std::string err;
        const int rc2 = run("emit-config --set dropout=1.5 --output " + d + "/bad.cfg", &err);
        report(rc2 != 0 && err.find("dropout") != std::string::npos,
               "invalid override fails naming the key");
        const int rc3 = run("emit-config --check " + d + "/train.cfg");
        report(rc3 == 0, "emit-config --check accepts its own output");
    }

    // mix + split with seeds after the subcommand (documented spelling).
    {
        std::string a;
        std::string b;
        for (int i = 0; i < 70; ++i) a += "{\"x\":" + std::to_string(i) + "}\n";
        for (int i = 0; i < 30; ++i) b += "{\"y\":" + std::to_string(i) + "}\n";
        write(g_dir / "a.jsonl", a);
        write(g_dir / "b.jsonl", b);
        const int rc = run("mix-cpt --ratio 7:3 --seed 4 --a " + d + "/a.jsonl --b " + d +
                           "/b.jsonl --output " + d + "/mixed.jsonl");
        report(rc == 0 && line_count(g_dir / "mixed.jsonl") == 100,
               "mix-cpt --ratio 7:3 --seed 4 keeps the exact-ratio pools whole");
        const int rc2 = run("split --fraction 0.10 --seed 4 --input " + d +
                            "/mixed.jsonl --train " + d + "/train.jsonl --val " + d +
                            "/val.jsonl");
        report(rc2 == 0 && line_count(g_dir / "train.jsonl") == 90 &&
                   line_count(g_dir / "val.jsonl") == 10,
               "split --fraction 0.10 --seed 4 gives 90/10");
    }

    // Error paths: unknown subcommand, missing flags, machine-readable error.
    {
        report(run("frobnicate") != 0, "unknown subcommand exits nonzero");
        report(run("chunk") != 0, "missing required flags exit nonzero");
        std::string err;
        const int rc = run("dedup --input " + d + "/nope.jsonl --output " + d +
                           "/o.jsonl", &err);
        report(rc != 0 && err.find("{\"error\":") != std::string::npos,
               "failures print a machine-readable JSON error");
        std::string err2;
        const int rc2 = run("mix-cpt --ratio 7:3 --a " + d + "/a.jsonl --b " + d +
                            "/empty.jsonl --output " + d + "/m.jsonl", &err2);
        write(g_dir / "empty.jsonl", "");
        report(rc2 != 0, "mixing against a missing/empty pool fails");
    }

    fs::remove_all(g_dir);
    if (g_failures > 0) {
        std::printf("%d CLI smoke check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all CLI smoke checks passed\n");
    return 0;
}
