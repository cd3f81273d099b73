#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hgm/metrics.hpp"
#include "hgm/png_io.hpp"
#include "hgm/synthetic.hpp"
#include "hgm/tensor.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace hgm;
using hgm::testing::TempDir;

namespace {

const std::string kCli = HGM_CLI_PATH;  // injected by the build system

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
    cmd += kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) fields.push_back(cell);
        rows.push_back(std::move(fields));
    }
    return rows;
}

/// Replaces every value in a wall-clock column with "-" so that otherwise
/// deterministic CSV outputs can be compared across runs.
std::string mask_time_column(const std::string& csv) {
    auto rows = parse_csv(csv);
    if (rows.empty()) return csv;
    std::size_t column = rows[0].size();
    for (std::size_t i = 0; i < rows[0].size(); ++i)
        if (rows[0][i] == "wall_time_s") column = i;
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) out += ',';
            out += (r > 0 && c == column) ? "-" : rows[r][c];
        }
        out += '\n';
    }
    return out;
}

std::set<std::string> listing(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) names.insert(entry.path().filename().string());
    return names;
}

/// True when two output directories hold the same files with the same
/// bytes, ignoring the manifest (it embeds wall-clock times and therefore
/// output hashes of timed CSVs) and masking wall-clock CSV columns.
void check_outputs_identical(const fs::path& a, const fs::path& b) {
    std::set<std::string> names_a = listing(a);
    std::set<std::string> names_b = listing(b);
    names_a.erase("manifest.json");
    names_b.erase("manifest.json");
    REQUIRE(names_a == names_b);
    for (const std::string& name : names_a) {
        CAPTURE(name);
        std::string left = read_file((a / name).string());
        std::string right = read_file((b / name).string());
        if (fs::path(name).extension() == ".csv") {
            left = mask_time_column(left);
            right = mask_time_column(right);
        }
        CHECK(left == right);
    }
}

std::string quick_schedule() {
    return
        "[schedule]\n"
        "sigma_first = 0.5\n"
        "sigma_last = 0.02\n"
        "levels = 3\n"
        "steps_per_level = 8\n"
        "epsilon = 2e-5\n";
}

/// Writes `count` small correlated-Gaussian grayscale test images and
/// returns their paths.
std::vector<std::string> make_images(const TempDir& dir, int count, int size,
                                     std::uint64_t seed) {
    std::vector<std::string> paths;
    Rng rng = make_rng(seed);
    for (int i = 0; i < count; ++i) {
        const ImageTensor x =
            clamp01(sample_correlated_gaussian(size, size, 0.5, 0.1, 0.9, rng));
        char name[32];
        std::snprintf(name, sizeof(name), "img_%02d.png", i);
        const std::string path = dir.file(name);
        save_png(path, x);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace

TEST_CASE("argument and configuration errors exit nonzero") {
    TempDir tmp("cli_errors");
    CHECK(run_cli("") != 0);
    CHECK(run_cli("frobnicate --config missing.ini") != 0);
    CHECK(run_cli("restore") != 0);  // --config is required

    const std::vector<std::string> images = make_images(tmp, 1, 8, 1);
    const std::string cfg = tmp.file("bad_mask.ini");
    write_file(cfg, quick_schedule() +
                        "[restore]\ninputs = " + images[0] +
                        "\n[degradation]\nmask = hexagon\n[run]\nout_dir = " +
                        tmp.file("out") + "\n");
    CHECK(run_cli("restore --config " + cfg) == 1);

    const std::string cfg2 = tmp.file("no_inputs.ini");
    write_file(cfg2, "[run]\nout_dir = " + tmp.file("out2") + "\n");
    CHECK(run_cli("restore --config " + cfg2) == 1);
}

TEST_CASE("generate is deterministic and respects the sample count") {
    TempDir tmp("cli_generate");
    const std::string cfg = tmp.file("gen.ini");
    write_file(cfg, quick_schedule() +
                        "[model]\nkind = gaussian\nmean = 0.5\nstd = 0.05\n"
                        "[generate]\ncount = 3\nheight = 8\nwidth = 8\nchannels = 1\n"
                        "[run]\nseed = 11\n");

    REQUIRE(run_cli("generate --config " + cfg + " --out-dir " + tmp.file("a")) == 0);
    REQUIRE(run_cli("generate --config " + cfg + " --out-dir " + tmp.file("b")) == 0);
    for (const char* name : {"sample_000.png", "sample_001.png", "sample_002.png"}) {
        CAPTURE(name);
        CHECK(read_file(tmp.file("a/") + name) == read_file(tmp.file("b/") + name));
    }
    CHECK(fs::exists(tmp.file("a/manifest.json")));

    // A different seed must change the output.
    REQUIRE(run_cli("generate --config " + cfg + " --out-dir " + tmp.file("c") +
                    " --seed 12") == 0);
    CHECK(read_file(tmp.file("a/sample_000.png")) != read_file(tmp.file("c/sample_000.png")));

    const std::string empty_cfg = tmp.file("gen0.ini");
    write_file(empty_cfg, quick_schedule() +
                              "[model]\nkind = gaussian\n[generate]\ncount = 0\n"
                              "[run]\nout_dir = " + tmp.file("d") + "\n");
    REQUIRE(run_cli("generate --config " + empty_cfg) == 0);
    CHECK(listing(tmp.file("d")) == std::set<std::string>{"manifest.json"});
}

TEST_CASE("train writes a reproducible checkpoint and loss curve") {
    TempDir tmp("cli_train");
    make_images(tmp, 4, 6, 2);
    const std::string cfg = tmp.file("train.ini");
    write_file(cfg, quick_schedule() +
                        "[train]\ndataset_dir = " + tmp.path().string() +
                        "\narchitecture = linear\niterations = 40\nbatch_size = 4\n"
                        "learning_rate = 1e-3\n"
                        "[run]\nseed = 5\n");

    REQUIRE(run_cli("train --config " + cfg + " --out-dir " + tmp.file("t1")) == 0);
    REQUIRE(run_cli("train --config " + cfg + " --out-dir " + tmp.file("t2")) == 0);
    CHECK(read_file(tmp.file("t1/checkpoint.json")) == read_file(tmp.file("t2/checkpoint.json")));
    CHECK(read_file(tmp.file("t1/loss.csv")) == read_file(tmp.file("t2/loss.csv")));

    const auto rows = parse_csv(read_file(tmp.file("t1/loss.csv")));
    REQUIRE(rows.size() == 41);  // header + one row per iteration
    CHECK(rows[0][0] == "iteration");
    CHECK(rows[0][1] == "loss");
    for (std::size_t r = 1; r < rows.size(); ++r)
        CHECK(std::stod(rows[r][1]) >= 0.0);
}

TEST_CASE("restore pins fully observed images at the metric cap") {
    TempDir tmp("cli_restore_full");
    const std::vector<std::string> images = make_images(tmp, 1, 8, 3);
    const std::string cfg = tmp.file("restore.ini");
    write_file(cfg, quick_schedule() +
                        "[model]\nkind = gaussian\nmean = 0.5\nstd = 0.1\nrho = 0.9\n"
                        "[degradation]\nmask = random\nkeep_fraction = 1.0\n"
                        "[restore]\ninputs = " + images[0] +
                        "\nmode = basic\ntransform = identity\nlambda = 1e6\n"
                        "[run]\nseed = 3\nout_dir = " + tmp.file("out") + "\n");
    REQUIRE(run_cli("restore --config " + cfg) == 0);

    const auto rows = parse_csv(read_file(tmp.file("out/metrics.csv")));
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0][4] == "psnr_db");
    CHECK(rows[1][4] == "99");
    CHECK(fs::exists(tmp.file("out/restored_img_00.png")));
    CHECK(fs::exists(tmp.file("out/diff_img_00.png")));
}

TEST_CASE("command-line flags override configuration values") {
    TempDir tmp("cli_flags");
    const std::vector<std::string> images = make_images(tmp, 1, 8, 4);
    const std::string cfg = tmp.file("restore.ini");
    write_file(cfg, quick_schedule() +
                        "[model]\nkind = gaussian\nmean = 0.5\nstd = 0.1\nrho = 0.9\n"
                        "[degradation]\nmask = random\nkeep_fraction = 0.5\n"
                        "[restore]\ninputs = " + images[0] +
                        "\nmode = basic\ntransform = identity\nlambda = 1e6\n"
                        "[run]\nseed = 3\n");

    REQUIRE(run_cli("restore --config " + cfg + " --out-dir " + tmp.file("o1") +
                    " --mode progressive --transform pool") == 0);
    const auto rows = parse_csv(read_file(tmp.file("o1/metrics.csv")));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][2] == "pool");
    CHECK(rows[1][3] == "progressive");

    // Snapshots arrive only when requested.
    CHECK(!fs::exists(tmp.file("o1/snapshots.json")));
    REQUIRE(run_cli("restore --config " + cfg + " --out-dir " + tmp.file("o2") +
                    " --snapshots") == 0);
    CHECK(fs::exists(tmp.file("o2/snapshots.json")));
    CHECK(fs::exists(tmp.file("o2/snapshot_img_00_level01.png")));
    CHECK(fs::exists(tmp.file("o2/snapshot_img_00_level03.png")));
}

TEST_CASE("rerun replays commands byte for byte") {
    TempDir tmp("cli_rerun");
    const std::vector<std::string> images = make_images(tmp, 2, 8, 5);

    SUBCASE("restore") {
        const std::string cfg = tmp.file("restore.ini");
        write_file(cfg, quick_schedule() +
                            "[model]\nkind = gaussian\nmean = 0.5\nstd = 0.1\nrho = 0.9\n"
                            "[degradation]\nmask = random\nkeep_fraction = 0.4\n"
                            "[restore]\ninputs = " + images[0] + ", " + images[1] +
                            "\nmode = basic\ntransform = copy\nlambda = 1e6\n"
                            "snapshots = true\n"
                            "[run]\nseed = 9\nout_dir = " + tmp.file("r1") + "\n");
        REQUIRE(run_cli("restore --config " + cfg) == 0);
        REQUIRE(run_cli("rerun " + tmp.file("r1/manifest.json") + " --out-dir " +
                        tmp.file("r2")) == 0);
        check_outputs_identical(tmp.file("r1"), tmp.file("r2"));
    }
    SUBCASE("generate") {
        const std::string cfg = tmp.file("gen.ini");
        write_file(cfg, quick_schedule() +
                            "[model]\nkind = gaussian\nmean = 0.4\nstd = 0.05\n"
                            "[generate]\ncount = 2\nheight = 8\nwidth = 8\nchannels = 1\n"
                            "[run]\nseed = 13\nout_dir = " + tmp.file("g1") + "\n");
        REQUIRE(run_cli("generate --config " + cfg) == 0);
        REQUIRE(run_cli("rerun " + tmp.file("g1/manifest.json") + " --out-dir " +
                        tmp.file("g2")) == 0);
        check_outputs_identical(tmp.file("g1"), tmp.file("g2"));
    }
    SUBCASE("sweep") {
        const std::string cfg = tmp.file("sweep.ini");
        write_file(cfg, quick_schedule() +
                            "[sweep]\nkind = samples\nsample_counts = 20, 40\nseeds = 2\n"
                            "heldout = 100\niterations_coarse = 80\niterations_fine = 40\n"
                            "batch_size = 8\n"
                            "[run]\nseed = 17\nout_dir = " + tmp.file("s1") + "\n");
        REQUIRE(run_cli("sweep --config " + cfg) == 0);
        REQUIRE(run_cli("rerun " + tmp.file("s1/manifest.json") + " --out-dir " +
                        tmp.file("s2")) == 0);
        check_outputs_identical(tmp.file("s1"), tmp.file("s2"));
    }
}

TEST_CASE("worker count does not change results") {
    TempDir tmp("cli_threads");
    const std::vector<std::string> images = make_images(tmp, 3, 8, 6);
    const std::string cfg = tmp.file("restore.ini");
    write_file(cfg, quick_schedule() +
                        "[model]\nkind = gaussian\nmean = 0.5\nstd = 0.1\nrho = 0.9\n"
                        "[degradation]\nmask = random\nkeep_fraction = 0.4\n"
                        "[restore]\ninputs = " + images[0] + ", " + images[1] + ", " +
                        images[2] +
                        "\nmode = basic\ntransform = identity\nlambda = 1e6\n"
                        "[run]\nseed = 21\n");
    REQUIRE(run_cli("restore --config " + cfg + " --out-dir " + tmp.file("w1"),
                    "HGM_THREADS=1") == 0);
    REQUIRE(run_cli("restore --config " + cfg + " --out-dir " + tmp.file("w3"),
                    "HGM_THREADS=3") == 0);
    check_outputs_identical(tmp.file("w1"), tmp.file("w3"));
}

TEST_CASE("eval reproduces the library metrics") {
    TempDir tmp("cli_eval");
    fs::create_directories(tmp.file("cand"));
    fs::create_directories(tmp.file("ref"));

    Rng rng = make_rng(31);
    const ImageTensor reference =
        clamp01(sample_correlated_gaussian(16, 16, 0.5, 0.1, 0.9, rng));
    ImageTensor candidate = reference;
    for (double& v : candidate.data) v = 0.9 * v + 0.03;
    candidate = clamp01(candidate);
    save_png(tmp.file("cand/pair.png"), candidate);
    save_png(tmp.file("ref/pair.png"), reference);

    const std::string cfg = tmp.file("eval.ini");
    write_file(cfg, "[eval]\ncandidate_dir = " + tmp.file("cand") +
                        "\nreference_dir = " + tmp.file("ref") +
                        "\n[run]\nout_dir = " + tmp.file("out") + "\n");
    REQUIRE(run_cli("eval --config " + cfg) == 0);

    const auto rows = parse_csv(read_file(tmp.file("out/metrics.csv")));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "pair");

    // Quantization happens at save time, so compare against the decoded files.
    const ImageTensor cand_png = load_png(tmp.file("cand/pair.png"));
    const ImageTensor ref_png = load_png(tmp.file("ref/pair.png"));
    CHECK(std::stod(rows[1][4]) ==
          doctest::Approx(psnr(cand_png, ref_png)).epsilon(1e-9));
    CHECK(std::stod(rows[1][5]) ==
          doctest::Approx(ssim(cand_png, ref_png)).epsilon(1e-9));
}
