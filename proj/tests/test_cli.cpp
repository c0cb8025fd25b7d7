#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Drives the installed binary end to end through a shell, checking exit
// codes, report structure, and the config override chain.

#include "core/frame.hpp"
#include "helpers.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using json = nlohmann::json;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const fs::path& cwd, const std::string& args) {
    const fs::path out = cwd / "_stdout.txt";
    const fs::path err = cwd / "_stderr.txt";
    const std::string cmd = "cd '" + cwd.string() + "' && '" + SRM_CLI_PATH + "' " + args +
                            " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_frames(const fs::path& dir, const std::vector<srm::Frame>& frames) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "f%03zu.png", i);
        srm::save_frame(frames[i], dir / name);
    }
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_CASE("score produces a complete report on identical sequences") {
    TempDir dir;
    std::vector<srm::Frame> frames;
    for (int i = 0; i < 3; ++i) frames.push_back(testutil::value_noise(64, 48, 400 + i));
    write_frames(dir / "gt", frames);
    write_frames(dir / "dist", frames);

    const RunResult r = run_cli(dir.path(), "score gt dist");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "erqa 1\n");

    const json report = load_json(dir / "report.json");
    CHECK(report["command"] == "score");
    CHECK(report["metric"] == "erqa");
    CHECK(report["frame_count"] == 3);
    REQUIRE(report["per_frame"].size() == 3);
    CHECK(report["per_frame"][1]["gt"] == "f001.png");
    CHECK(report["config"].size() == 18);
    CHECK(report["config"]["erqa.shift_radius"] == "5");
    CHECK(report.count("timing") == 0);

    // The aggregate equals the mean of the per-frame values.
    double sum = 0.0;
    for (const auto& row : report["per_frame"]) sum += row["value"].get<double>();
    CHECK(report["aggregate"].get<double>() ==
          doctest::Approx(sum / 3.0).epsilon(1e-12));

    const std::string csv = slurp(dir / "scores.csv");
    CHECK(csv.substr(0, 20) == "index,gt,dist,value\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const RunResult timed = run_cli(dir.path(), "score gt dist --timing --out t.json");
    CHECK(timed.exit_code == 0);
    CHECK(load_json(dir / "t.json").count("timing") == 1);
}

TEST_CASE("psnr of identical frames serializes as the string inf") {
    TempDir dir;
    const std::vector<srm::Frame> frames = {testutil::value_noise(32, 32, 410)};
    write_frames(dir / "gt", frames);
    write_frames(dir / "dist", frames);

    const RunResult r = run_cli(dir.path(), "score gt dist --metric psnr");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "psnr inf\n");
    const json report = load_json(dir / "report.json");
    CHECK(report["aggregate"] == "inf");
    CHECK(slurp(dir / "scores.csv").find(",inf\n") != std::string::npos);
}

TEST_CASE("score reruns are byte-identical") {
    TempDir dir;
    std::vector<srm::Frame> gt, dist;
    for (int i = 0; i < 2; ++i) {
        gt.push_back(testutil::value_noise(48, 40, 420 + i));
        dist.push_back(testutil::value_noise(48, 40, 430 + i));
    }
    write_frames(dir / "gt", gt);
    write_frames(dir / "dist", dist);

    REQUIRE(run_cli(dir.path(), "score gt dist --out a.json --csv a.csv").exit_code == 0);
    REQUIRE(run_cli(dir.path(), "score gt dist --out b.json --csv b.csv").exit_code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("score failures use exit code 1 and leave no partial outputs") {
    TempDir dir;
    write_frames(dir / "gt", {testutil::value_noise(32, 32, 440)});

    RunResult r = run_cli(dir.path(), "score gt missing_dir");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(!fs::exists(dir / "report.json"));

    // Mismatched sequence lengths.
    write_frames(dir / "dist",
                 {testutil::value_noise(32, 32, 441), testutil::value_noise(32, 32, 442)});
    r = run_cli(dir.path(), "score gt dist");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("lengths differ") != std::string::npos);

    // Unknown metric is a usage error.
    r = run_cli(dir.path(), "score gt gt --metric vmaf");
    CHECK(r.exit_code == 1);
}

TEST_CASE("help exits zero, unknown subcommands exit nonzero") {
    TempDir dir;
    CHECK(run_cli(dir.path(), "--help").exit_code == 0);
    CHECK(run_cli(dir.path(), "frobnicate").exit_code == 1);
    CHECK(run_cli(dir.path(), "").exit_code == 1);
}

TEST_CASE("config file, --set, and flags override in that order") {
    TempDir dir;
    const std::vector<srm::Frame> frames = {testutil::value_noise(48, 40, 450)};
    write_frames(dir / "gt", frames);
    write_frames(dir / "dist", frames);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# comment line\n";
        cfg << "erqa.shift_radius = 3\n";
        cfg << "erqa.refine_iterations = 9\n"; // must fit the radius-2 override below
        cfg << "gradient.percentile_q = 0.9\n";
    }

    RunResult r = run_cli(dir.path(), "score gt dist --config run.cfg --out cfg.json");
    REQUIRE(r.exit_code == 0);
    json report = load_json(dir / "cfg.json");
    CHECK(report["config"]["erqa.shift_radius"] == "3");
    CHECK(report["config"]["gradient.percentile_q"] == "0.9");

    r = run_cli(dir.path(),
                "score gt dist --config run.cfg --set erqa.shift_radius=2 --out set.json");
    REQUIRE(r.exit_code == 0);
    report = load_json(dir / "set.json");
    CHECK(report["config"]["erqa.shift_radius"] == "2");
    CHECK(report["config"]["gradient.percentile_q"] == "0.9");

    r = run_cli(dir.path(), "score gt dist --config absent.cfg");
    CHECK(r.exit_code == 1);
    r = run_cli(dir.path(), "score gt dist --set no.such.key=1");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("no.such.key") != std::string::npos);
    r = run_cli(dir.path(), "score gt dist --set erqa.shift_radius");
    CHECK(r.exit_code == 1);
}

TEST_CASE("heatmap writes two overlays and a sidecar") {
    TempDir dir;
    const srm::Frame inner = testutil::random_noise(32, 24, 1, 460);
    const srm::Frame base = testutil::pad_border(inner, 8, 0.5f);
    srm::save_frame(base, dir / "gt.png");
    srm::save_frame(srm::translate_frame(base, 2, 1), dir / "dist.png");

    const RunResult r = run_cli(dir.path(), "heatmap gt.png dist.png --out maps/run");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "maps/run_gt_overlay.png"));
    CHECK(fs::exists(dir / "maps/run_dist_overlay.png"));
    const json sidecar = load_json(dir / "maps/run_counts.json");
    CHECK(sidecar["value"] == 1.0);
    CHECK(sidecar["fp"] == 0);
    CHECK(sidecar["fn"] == 0);
    REQUIRE(sidecar["trace"].size() > 0);
    CHECK(sidecar["trace"][0]["dx"] == 2);
    CHECK(sidecar["trace"][0]["dy"] == 1);

    const srm::Frame overlay = srm::load_frame(dir / "maps/run_gt_overlay.png");
    CHECK(overlay.channels == 3);
    CHECK(overlay.width == base.width);
}

TEST_CASE("degrade covers all four modes") {
    TempDir dir;
    std::vector<srm::Frame> frames;
    for (int i = 0; i < 2; ++i)
        frames.push_back(testutil::value_noise(32, 24, 470 + i));
    write_frames(dir / "in", frames);

    RunResult r = run_cli(dir.path(), "degrade in --mode bi --out bi --scale 4");
    CHECK(r.exit_code == 0);
    srm::Frame small = srm::load_frame(dir / "bi/f000.png");
    CHECK(small.width == 8);
    CHECK(small.height == 6);
    json manifest = load_json(dir / "bi/manifest.json");
    CHECK(manifest["mode"] == "bi");
    CHECK(manifest["params"]["scale"] == 4);
    REQUIRE(manifest["frames"].size() == 2);

    r = run_cli(dir.path(), "degrade in --mode bd --out bd --scale 2 --sigma 1.0 --offset 1");
    CHECK(r.exit_code == 0);
    small = srm::load_frame(dir / "bd/f001.png");
    CHECK(small.width == 16); // ceil((32-1)/2)
    CHECK(small.height == 12);
    manifest = load_json(dir / "bd/manifest.json");
    CHECK(manifest["params"]["bd_sigma"] == 1.0);
    CHECK(manifest["params"]["bd_offset"] == 1);

    r = run_cli(dir.path(), "degrade in --mode noise --out n1 --seed 9 --jobs 2");
    CHECK(r.exit_code == 0);
    r = run_cli(dir.path(), "degrade in --mode noise --out n2 --seed 9");
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir / "n1/f000.png") == slurp(dir / "n2/f000.png"));
    CHECK(slurp(dir / "n1/f001.png") == slurp(dir / "n2/f001.png"));
    manifest = load_json(dir / "n1/manifest.json");
    CHECK(manifest["params"]["seed"] == 9);
    // Per-frame seeds are derived, distinct, and recorded.
    CHECK(manifest["frames"][0]["seed"] != manifest["frames"][1]["seed"]);

    r = run_cli(dir.path(), "degrade in --mode noise --out n3 --seed 10");
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir / "n1/f000.png") != slurp(dir / "n3/f000.png"));

    // Pair mode needs a frame at least as large as the target resolution.
    r = run_cli(dir.path(), "degrade in --mode pair --out pair");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);

    r = run_cli(dir.path(), "degrade in --mode melt --out x");
    CHECK(r.exit_code == 1);
}

TEST_CASE("bt ranks items from a votes table") {
    TempDir dir;
    {
        std::ofstream votes(dir / "votes.csv");
        votes << "item_a,item_b,wins_a,wins_b\n";
        votes << "alpha,beta,8,2\n";
        votes << "beta,gamma,7,3\n";
        votes << "alpha,gamma,9,1\n";
    }
    const RunResult r = run_cli(dir.path(), "bt votes.csv");
    CHECK(r.exit_code == 0);
    const json report = load_json(dir / "abilities.json");
    REQUIRE(report["items"].size() == 3);
    CHECK(report["items"][0]["item"] == "alpha");
    CHECK(report["items"][2]["item"] == "gamma");
    CHECK(report["items"][2]["display_score"] == 0.0);
    CHECK(report["converged"] == true);

    {
        std::ofstream votes(dir / "bad.csv");
        votes << "winner,loser,count\n";
        votes << "a,b,3\n";
    }
    const RunResult bad = run_cli(dir.path(), "bt bad.csv");
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("header") != std::string::npos);

    {
        std::ofstream votes(dir / "solo.csv");
        votes << "item_a,item_b,wins_a,wins_b\n";
        votes << "a,b,3,0\n";
    }
    const RunResult solo = run_cli(dir.path(), "bt solo.csv");
    CHECK(solo.exit_code == 1);
    const RunResult smoothed = run_cli(dir.path(), "bt solo.csv --smoothing 0.5 --out s.json");
    CHECK(smoothed.exit_code == 0);
}

TEST_CASE("correlate ranks features by linear correlation") {
    TempDir dir;
    {
        std::ofstream f(dir / "features.csv");
        f << "id,good,noisy,anti\n";
        f << "a,1.0,5.0,4.0\n";
        f << "b,2.0,2.0,3.0\n";
        f << "c,3.0,4.0,2.0\n";
        f << "d,4.0,1.0,1.0\n";
    }
    {
        std::ofstream s(dir / "subjective.csv");
        s << "id,mos\n";
        s << "a,1.1\nb,2.0\nc,3.2\nd,3.9\n";
    }
    const RunResult r = run_cli(dir.path(), "correlate features.csv subjective.csv");
    CHECK(r.exit_code == 0);
    const json report = load_json(dir / "corr.json");
    CHECK(report["subjective"] == "mos");
    REQUIRE(report["rows"].size() == 3);
    CHECK(report["rows"][0]["feature"] == "good");
    CHECK(report["rows"][0]["plcc"].get<double>() > 0.99);
    CHECK(report["rows"][0]["srcc"] == 1.0);
    CHECK(report["rows"][2]["feature"] == "anti");
    CHECK(report["rows"][2]["srcc"] == -1.0);

    // Strict id matching both ways.
    {
        std::ofstream s(dir / "missing.csv");
        s << "id,mos\na,1\nb,2\nc,3\n";
    }
    RunResult bad = run_cli(dir.path(), "correlate features.csv missing.csv");
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("'d'") != std::string::npos);

    {
        std::ofstream s(dir / "extra.csv");
        s << "id,mos\na,1\nb,2\nc,3\nd,4\ne,5\n";
    }
    bad = run_cli(dir.path(), "correlate features.csv extra.csv");
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("'e'") != std::string::npos);
}

TEST_CASE("cluster groups rows around medoids") {
    TempDir dir;
    {
        std::ofstream f(dir / "features.csv");
        f << "id,x,y,flat\n";
        f << "a0,0.0,0.1,7\n";
        f << "a1,0.2,0.0,7\n";
        f << "a2,0.1,0.2,7\n";
        f << "b0,9.0,9.1,7\n";
        f << "b1,9.2,9.0,7\n";
        f << "b2,9.1,9.2,7\n";
    }
    const RunResult r = run_cli(dir.path(), "cluster features.csv --k 2 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("flat") != std::string::npos); // dropped-column warning
    const json report = load_json(dir / "clusters.json");
    CHECK(report["k"] == 2);
    CHECK(report["seed"] == 3);
    CHECK(report["dropped_columns"] == json::array({"flat"}));
    REQUIRE(report["clusters"].size() == 2);
    CHECK(report["clusters"][0]["members"].size() == 3);
    CHECK(report["clusters"][1]["members"].size() == 3);
    CHECK(report["cost"].get<double>() <= report["build_cost"].get<double>() + 1e-12);

    const RunResult bad = run_cli(dir.path(), "cluster features.csv --k 9");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("shift-diag histograms global shifts") {
    TempDir dir;
    const srm::Frame f = testutil::value_noise(40, 30, 480);
    write_frames(dir / "gt", {f, f, f});
    write_frames(dir / "dist",
                 {srm::translate_frame(f, 1, 0), srm::translate_frame(f, 1, 0),
                  srm::translate_frame(f, -2, 3)});

    const RunResult r = run_cli(dir.path(), "shift-diag gt dist --radius 4");
    CHECK(r.exit_code == 0);
    const json report = load_json(dir / "hist.json");
    CHECK(report["radius"] == 4);
    REQUIRE(report["counts"].size() == 9);
    REQUIRE(report["counts"][0].size() == 9);
    // counts[dy + r][dx + r]
    CHECK(report["counts"][4][5] == 2);
    CHECK(report["counts"][7][2] == 1);
    CHECK(report["per_frame"][2]["dx"] == -2);
    CHECK(report["per_frame"][2]["dy"] == 3);
    CHECK(report["per_frame"][0]["psnr_db"] == "inf");
}
