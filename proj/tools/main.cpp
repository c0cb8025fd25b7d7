#include "util.hpp"

#include "srmetrics/srmetrics.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using cli::check;
using cli::CliError;
using cli::OutputGuard;

namespace {

ojson json_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return cli::format_double(v);
}

ojson config_echo(const srm_config* config) {
    ojson echo = ojson::object();
    const size_t n = srm_config_count(config);
    for (size_t i = 0; i < n; ++i) {
        const char* key = srm_config_key(config, i);
        echo[key] = cli::config_value(config, key);
    }
    return echo;
}

void write_text(const fs::path& path, const std::string& content, OutputGuard& guard) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    guard.track(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw CliError("failed while writing '" + path.string() + "'", 2);
}

void save_frame_to(const srm_frame* frame, const fs::path& path) {
    check(srm_frame_save(frame, path.string().c_str()));
}

struct ConfigArgs {
    std::string file;
    std::vector<std::string> sets;
};

cli::ConfigPtr make_config(const ConfigArgs& args) {
    srm_config* raw = nullptr;
    check(srm_config_create(&raw));
    cli::ConfigPtr config(raw);
    if (!args.file.empty()) cli::apply_config_file(config.get(), args.file);
    cli::apply_overrides(config.get(), args.sets);
    return config;
}

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.file, "Config file with `key = value` lines");
    cmd->add_option("--set", args.sets, "Override a config key (key=value, repeatable)");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Dims {
    int w = 0, h = 0, c = 0;
    friend bool operator==(const Dims&, const Dims&) = default;
};

Dims dims_of(const srm_frame* f) {
    return {srm_frame_width(f), srm_frame_height(f), srm_frame_channels(f)};
}

/* ---- score -------------------------------------------------------------- */

struct ScoreArgs {
    std::string gt_dir, dist_dir;
    std::string metric = "erqa";
    std::string out_json = "report.json";
    std::string out_csv = "scores.csv";
    unsigned jobs = 0;
    bool timing = false;
    ConfigArgs config;
};

int cmd_score(const ScoreArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    cli::ConfigPtr config = make_config(args.config);

    const auto gt_files = cli::list_pngs(args.gt_dir);
    const auto dist_files = cli::list_pngs(args.dist_dir);
    if (gt_files.size() != dist_files.size())
        throw CliError("sequence lengths differ: " + std::to_string(gt_files.size()) + " vs " +
                       std::to_string(dist_files.size()));
    const std::size_t n = gt_files.size();

    std::cerr << "scoring " << n << " frame pair(s), metric " << args.metric << "\n";

    std::vector<double> values(n);
    std::vector<Dims> gt_dims(n), dist_dims(n);
    cli::run_indexed(n, args.jobs, [&](std::size_t i) {
        cli::FramePtr gt = cli::load_frame(gt_files[i].string());
        cli::FramePtr dist = cli::load_frame(dist_files[i].string());
        gt_dims[i] = dims_of(gt.get());
        dist_dims[i] = dims_of(dist.get());
        if (args.metric == "erqa") {
            srm_erqa_result* raw = nullptr;
            check(srm_erqa_compare(gt.get(), dist.get(), config.get(), &raw));
            cli::ErqaPtr result(raw);
            values[i] = srm_erqa_value(result.get());
        } else if (args.metric == "psnr") {
            check(srm_psnr(gt.get(), dist.get(), &values[i]));
        } else {
            check(srm_ssim(gt.get(), dist.get(), &values[i]));
        }
    });
    for (std::size_t i = 1; i < n; ++i) {
        if (!(gt_dims[i] == gt_dims[0]))
            throw CliError("'" + args.gt_dir + "' mixes frame sizes (frame " +
                           std::to_string(i) + ")");
        if (!(dist_dims[i] == dist_dims[0]))
            throw CliError("'" + args.dist_dir + "' mixes frame sizes (frame " +
                           std::to_string(i) + ")");
    }

    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    const double elapsed = seconds_since(start);

    OutputGuard guard;
    if (!args.out_csv.empty()) {
        std::string csv = "index,gt,dist,value\n";
        for (std::size_t i = 0; i < n; ++i)
            csv += std::to_string(i) + "," + gt_files[i].filename().string() + "," +
                   dist_files[i].filename().string() + "," + format_value(values[i]) + "\n";
        write_text(args.out_csv, csv, guard);
    }
    if (!args.out_json.empty()) {
        ojson report;
        report["tool_version"] = srm_version();
        report["command"] = "score";
        report["metric"] = args.metric;
        report["gt"] = args.gt_dir;
        report["dist"] = args.dist_dir;
        report["config"] = config_echo(config.get());
        report["frame_count"] = n;
        ojson per_frame = ojson::array();
        for (std::size_t i = 0; i < n; ++i)
            per_frame.push_back({{"index", i},
                                 {"gt", gt_files[i].filename().string()},
                                 {"dist", dist_files[i].filename().string()},
                                 {"value", json_value(values[i])}});
        report["per_frame"] = std::move(per_frame);
        report["aggregate"] = json_value(mean);
        if (args.timing)
            report["timing"] = {{"total_seconds", elapsed},
                                {"per_frame_seconds", elapsed / static_cast<double>(n)}};
        write_text(args.out_json, report.dump(2) + "\n", guard);
    }
    guard.commit();

    std::cerr << "done in " << elapsed << " s ("
              << (1000.0 * elapsed / static_cast<double>(n)) << " ms/frame)\n";
    std::cout << args.metric << " " << format_value(mean) << "\n";
    return 0;
}

/* ---- heatmap -------------------------------------------------------------- */

struct HeatmapArgs {
    std::string gt_png, dist_png;
    std::string out_prefix;
    ConfigArgs config;
};

int cmd_heatmap(const HeatmapArgs& args) {
    cli::ConfigPtr config = make_config(args.config);
    cli::FramePtr gt = cli::load_frame(args.gt_png);
    cli::FramePtr dist = cli::load_frame(args.dist_png);

    srm_erqa_result* raw = nullptr;
    check(srm_erqa_compare(gt.get(), dist.get(), config.get(), &raw));
    cli::ErqaPtr result(raw);

    srm_frame* overlay_raw = nullptr;
    check(srm_erqa_heatmap(result.get(), gt.get(), SRM_OVERLAY_REFERENCE, &overlay_raw));
    cli::FramePtr gt_overlay(overlay_raw);
    overlay_raw = nullptr;
    check(srm_erqa_heatmap(result.get(), dist.get(), SRM_OVERLAY_DISTORTED, &overlay_raw));
    cli::FramePtr dist_overlay(overlay_raw);

    uint64_t tp = 0, fp = 0, fn = 0;
    srm_erqa_counts(result.get(), &tp, &fp, &fn);

    OutputGuard guard;
    const fs::path gt_path = args.out_prefix + "_gt_overlay.png";
    const fs::path dist_path = args.out_prefix + "_dist_overlay.png";
    if (gt_path.has_parent_path()) fs::create_directories(gt_path.parent_path());
    guard.track(gt_path);
    save_frame_to(gt_overlay.get(), gt_path);
    guard.track(dist_path);
    save_frame_to(dist_overlay.get(), dist_path);

    ojson sidecar;
    sidecar["tool_version"] = srm_version();
    sidecar["command"] = "heatmap";
    sidecar["gt"] = args.gt_png;
    sidecar["dist"] = args.dist_png;
    sidecar["config"] = config_echo(config.get());
    sidecar["value"] = json_value(srm_erqa_value(result.get()));
    sidecar["tp"] = tp;
    sidecar["fp"] = fp;
    sidecar["fn"] = fn;
    ojson trace = ojson::array();
    const size_t entries = srm_erqa_trace_length(result.get());
    for (size_t i = 0; i < entries; ++i) {
        int dx = 0, dy = 0;
        uint64_t similarity = 0, added = 0;
        check(srm_erqa_trace_entry(result.get(), i, &dx, &dy, &similarity, &added));
        trace.push_back(
            {{"dx", dx}, {"dy", dy}, {"similarity", similarity}, {"matches_added", added}});
    }
    sidecar["trace"] = std::move(trace);
    write_text(args.out_prefix + "_counts.json", sidecar.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "value " << format_value(srm_erqa_value(result.get())) << ", tp " << tp
              << ", fp " << fp << ", fn " << fn << "\n";
    return 0;
}

/* ---- degrade -------------------------------------------------------------- */

struct DegradeArgs {
    std::string in_dir;
    std::string mode;
    std::string out_dir;
    int scale = -1;
    double sigma = -1.0;
    int offset = -1;
    std::int64_t seed = -1;
    unsigned jobs = 0;
    ConfigArgs config;
    bool scale_given = false, sigma_given = false, offset_given = false, seed_given = false;
};

int cmd_degrade(const DegradeArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    cli::ConfigPtr config = make_config(args.config);
    // Command-line flags override config-file values.
    if (args.scale_given)
        check(srm_config_set(config.get(), "degrade.scale", std::to_string(args.scale).c_str()));
    if (args.sigma_given)
        check(srm_config_set(config.get(), "degrade.bd_sigma",
                             cli::format_double(args.sigma).c_str()));
    if (args.offset_given)
        check(srm_config_set(config.get(), "degrade.bd_offset",
                             std::to_string(args.offset).c_str()));
    if (args.seed_given)
        check(srm_config_set(config.get(), "noise.seed", std::to_string(args.seed).c_str()));

    const int scale = static_cast<int>(cli::config_int(config.get(), "degrade.scale"));
    const double bd_sigma = cli::config_num(config.get(), "degrade.bd_sigma");
    const int bd_offset = static_cast<int>(cli::config_int(config.get(), "degrade.bd_offset"));
    const double sigma_s = cli::config_num(config.get(), "noise.sigma_s");
    const double sigma_c = cli::config_num(config.get(), "noise.sigma_c");
    const uint64_t seed =
        static_cast<uint64_t>(cli::parse_int(cli::config_value(config.get(), "noise.seed"),
                                             "noise.seed"));

    const auto files = cli::list_pngs(args.in_dir);
    const std::size_t n = files.size();
    std::cerr << "degrading " << n << " frame(s), mode " << args.mode << "\n";

    fs::create_directories(args.out_dir);
    if (args.mode == "pair") {
        fs::create_directories(fs::path(args.out_dir) / "hr");
        fs::create_directories(fs::path(args.out_dir) / "lr");
    }

    // Output paths are known up front; tracking them before the parallel run
    // keeps the guard single-threaded.
    OutputGuard guard;
    std::vector<fs::path> out_paths(n), lr_paths(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string name = files[i].filename().string();
        if (args.mode == "pair") {
            out_paths[i] = fs::path(args.out_dir) / "hr" / name;
            lr_paths[i] = fs::path(args.out_dir) / "lr" / name;
            guard.track(lr_paths[i]);
        } else {
            out_paths[i] = fs::path(args.out_dir) / name;
        }
        guard.track(out_paths[i]);
    }

    std::vector<uint64_t> frame_seeds(n, 0);
    cli::run_indexed(n, args.jobs, [&](std::size_t i) {
        cli::FramePtr in = cli::load_frame(files[i].string());
        srm_frame* out_raw = nullptr;
        if (args.mode == "bi") {
            const int out_w = std::max(1, srm_frame_width(in.get()) / scale);
            const int out_h = std::max(1, srm_frame_height(in.get()) / scale);
            check(srm_bicubic_resize(in.get(), out_w, out_h, &out_raw));
            cli::FramePtr out(out_raw);
            save_frame_to(out.get(), out_paths[i]);
        } else if (args.mode == "bd") {
            check(srm_bd_downsample(in.get(), scale, bd_sigma, bd_offset, &out_raw));
            cli::FramePtr out(out_raw);
            save_frame_to(out.get(), out_paths[i]);
        } else if (args.mode == "noise") {
            frame_seeds[i] = srm_derive_seed(seed, i);
            check(srm_add_noise(in.get(), sigma_s, sigma_c, frame_seeds[i], &out_raw));
            cli::FramePtr out(out_raw);
            save_frame_to(out.get(), out_paths[i]);
        } else { // pair
            srm_frame* hr_raw = nullptr;
            srm_frame* lr_raw = nullptr;
            check(srm_prepare_pair(in.get(), &hr_raw, &lr_raw));
            cli::FramePtr hr(hr_raw), lr(lr_raw);
            save_frame_to(hr.get(), out_paths[i]);
            save_frame_to(lr.get(), lr_paths[i]);
        }
    });

    ojson manifest;
    manifest["tool_version"] = srm_version();
    manifest["command"] = "degrade";
    manifest["mode"] = args.mode;
    ojson params = ojson::object();
    if (args.mode == "bi") {
        params["scale"] = scale;
    } else if (args.mode == "bd") {
        params["scale"] = scale;
        params["bd_sigma"] = bd_sigma;
        params["bd_offset"] = bd_offset;
    } else if (args.mode == "noise") {
        params["sigma_s"] = sigma_s;
        params["sigma_c"] = sigma_c;
        params["seed"] = seed;
    } else {
        params["hr"] = "1920x1080";
        params["lr"] = "480x270";
    }
    manifest["params"] = std::move(params);
    ojson frames = ojson::array();
    for (std::size_t i = 0; i < n; ++i) {
        ojson entry = {{"index", i}, {"file", files[i].filename().string()}};
        if (args.mode == "noise") entry["seed"] = frame_seeds[i];
        frames.push_back(std::move(entry));
    }
    manifest["frames"] = std::move(frames);
    write_text(fs::path(args.out_dir) / "manifest.json", manifest.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "done in " << seconds_since(start) << " s\n";
    return 0;
}

/* ---- bt -------------------------------------------------------------------- */

struct BtArgs {
    std::string votes_csv;
    std::string out_json = "abilities.json";
    double smoothing = 0.0;
};

int cmd_bt(const BtArgs& args) {
    const cli::CsvTable table = cli::read_csv(args.votes_csv);
    const std::vector<std::string> expected = {"item_a", "item_b", "wins_a", "wins_b"};
    if (table.header != expected)
        throw CliError(args.votes_csv + ": expected header item_a,item_b,wins_a,wins_b");

    std::vector<srm_bt_record> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows)
        records.push_back({row[0].c_str(), row[1].c_str(),
                           cli::parse_int(row[2], args.votes_csv + " wins_a"),
                           cli::parse_int(row[3], args.votes_csv + " wins_b")});

    srm_bt_result* raw = nullptr;
    check(srm_bt_fit(records.data(), records.size(), args.smoothing, &raw));
    cli::BtPtr result(raw);

    struct Row {
        std::string item;
        double ability;
        double display;
    };
    std::vector<Row> rows;
    const size_t count = srm_bt_item_count(result.get());
    rows.reserve(count);
    for (size_t i = 0; i < count; ++i)
        rows.push_back({srm_bt_item(result.get(), i), srm_bt_ability(result.get(), i),
                        srm_bt_display_score(result.get(), i)});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.ability != b.ability) return a.ability > b.ability;
        return a.item < b.item;
    });

    OutputGuard guard;
    ojson report;
    report["tool_version"] = srm_version();
    report["command"] = "bt";
    report["votes"] = args.votes_csv;
    report["smoothing"] = args.smoothing;
    report["converged"] = srm_bt_converged(result.get()) != 0;
    report["iterations"] = srm_bt_iterations(result.get());
    ojson items = ojson::array();
    for (const Row& r : rows)
        items.push_back(
            {{"item", r.item}, {"ability", r.ability}, {"display_score", r.display}});
    report["items"] = std::move(items);
    write_text(args.out_json, report.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "fitted " << count << " items from " << records.size() << " record(s)\n";
    return 0;
}

/* ---- correlate -------------------------------------------------------------- */

struct CorrelateArgs {
    std::string features_csv;
    std::string subjective_csv;
    std::string out_json = "corr.json";
};

int cmd_correlate(const CorrelateArgs& args) {
    const cli::CsvTable features = cli::read_csv(args.features_csv);
    const cli::CsvTable subjective = cli::read_csv(args.subjective_csv);
    if (features.header.size() < 2)
        throw CliError(args.features_csv + ": need an id column plus feature columns");
    if (subjective.header.size() < 2)
        throw CliError(args.subjective_csv + ": need an id column plus a score column");

    std::map<std::string, double> scores;
    for (const auto& row : subjective.rows)
        if (!scores.emplace(row[0], cli::parse_double(row[1], args.subjective_csv)).second)
            throw CliError(args.subjective_csv + ": duplicate id '" + row[0] + "'");

    std::vector<double> y;
    y.reserve(features.rows.size());
    std::map<std::string, bool> seen;
    for (const auto& row : features.rows) {
        if (!seen.emplace(row[0], true).second)
            throw CliError(args.features_csv + ": duplicate id '" + row[0] + "'");
        const auto it = scores.find(row[0]);
        if (it == scores.end())
            throw CliError(args.subjective_csv + ": no score for '" + row[0] + "'");
        y.push_back(it->second);
    }
    for (const auto& [id, value] : scores)
        if (!seen.count(id))
            throw CliError(args.features_csv + ": no features for '" + id + "'");

    struct Row {
        std::string feature;
        double plcc;
        double srcc;
    };
    std::vector<Row> rows;
    for (std::size_t c = 1; c < features.header.size(); ++c) {
        std::vector<double> x;
        x.reserve(features.rows.size());
        for (const auto& row : features.rows)
            x.push_back(cli::parse_double(row[c], args.features_csv));
        double p = 0.0, s = 0.0;
        check(srm_plcc(x.data(), y.data(), x.size(), &p));
        check(srm_srcc(x.data(), y.data(), x.size(), &s));
        rows.push_back({features.header[c], p, s});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.plcc != b.plcc) return a.plcc > b.plcc;
        return a.feature < b.feature;
    });

    OutputGuard guard;
    ojson report;
    report["tool_version"] = srm_version();
    report["command"] = "correlate";
    report["features"] = args.features_csv;
    report["subjective"] = subjective.header[1];
    ojson out_rows = ojson::array();
    for (const Row& r : rows)
        out_rows.push_back({{"feature", r.feature}, {"plcc", r.plcc}, {"srcc", r.srcc}});
    report["rows"] = std::move(out_rows);
    write_text(args.out_json, report.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "correlated " << rows.size() << " feature column(s) over "
              << features.rows.size() << " items\n";
    return 0;
}

/* ---- cluster ------------------------------------------------------------------- */

struct ClusterArgs {
    std::string features_csv;
    std::size_t k = 6;
    std::uint64_t seed = 0;
    std::string out_json = "clusters.json";
};

int cmd_cluster(const ClusterArgs& args) {
    const cli::CsvTable features = cli::read_csv(args.features_csv);
    if (features.header.size() < 2)
        throw CliError(args.features_csv + ": need an id column plus feature columns");
    const std::size_t rows = features.rows.size();
    const std::size_t cols = features.header.size() - 1;

    std::map<std::string, bool> seen;
    std::vector<double> values;
    values.reserve(rows * cols);
    for (const auto& row : features.rows) {
        if (!seen.emplace(row[0], true).second)
            throw CliError(args.features_csv + ": duplicate id '" + row[0] + "'");
        for (std::size_t c = 1; c < features.header.size(); ++c)
            values.push_back(cli::parse_double(row[c], args.features_csv));
    }

    srm_kmedoids_result* raw = nullptr;
    check(srm_kmedoids(values.data(), rows, cols, args.k, args.seed, &raw));
    cli::KmedoidsPtr result(raw);

    for (size_t i = 0; i < srm_kmedoids_dropped_count(result.get()); ++i)
        std::cerr << "warning: dropped constant feature column '"
                  << features.header[1 + srm_kmedoids_dropped_column(result.get(), i)] << "'\n";

    OutputGuard guard;
    ojson report;
    report["tool_version"] = srm_version();
    report["command"] = "cluster";
    report["features"] = args.features_csv;
    report["k"] = args.k;
    report["seed"] = args.seed;
    report["cost"] = srm_kmedoids_cost(result.get());
    report["build_cost"] = srm_kmedoids_build_cost(result.get());
    ojson dropped = ojson::array();
    for (size_t i = 0; i < srm_kmedoids_dropped_count(result.get()); ++i)
        dropped.push_back(features.header[1 + srm_kmedoids_dropped_column(result.get(), i)]);
    report["dropped_columns"] = std::move(dropped);

    std::vector<std::size_t> medoids(args.k);
    ojson medoid_ids = ojson::array();
    for (std::size_t i = 0; i < args.k; ++i) {
        medoids[i] = srm_kmedoids_medoid(result.get(), i);
        medoid_ids.push_back(features.rows[medoids[i]][0]);
    }
    report["medoids"] = std::move(medoid_ids);

    ojson clusters = ojson::array();
    for (std::size_t i = 0; i < args.k; ++i) {
        ojson members = ojson::array();
        for (std::size_t r = 0; r < rows; ++r)
            if (srm_kmedoids_assignment(result.get(), r) == medoids[i])
                members.push_back(features.rows[r][0]);
        clusters.push_back(
            {{"medoid", features.rows[medoids[i]][0]}, {"members", std::move(members)}});
    }
    report["clusters"] = std::move(clusters);
    write_text(args.out_json, report.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "clustered " << rows << " items into " << args.k << " group(s), cost "
              << srm_kmedoids_cost(result.get()) << "\n";
    return 0;
}

/* ---- shift-diag ------------------------------------------------------------------ */

struct ShiftDiagArgs {
    std::string gt_dir, dist_dir;
    int radius = 5;
    std::string out_json = "hist.json";
    unsigned jobs = 0;
};

int cmd_shift_diag(const ShiftDiagArgs& args) {
    const auto gt_files = cli::list_pngs(args.gt_dir);
    const auto dist_files = cli::list_pngs(args.dist_dir);
    if (gt_files.size() != dist_files.size())
        throw CliError("sequence lengths differ: " + std::to_string(gt_files.size()) + " vs " +
                       std::to_string(dist_files.size()));
    if (args.radius < 0) throw CliError("radius must be >= 0");
    const std::size_t n = gt_files.size();

    std::vector<int> dxs(n), dys(n);
    std::vector<double> psnrs(n);
    cli::run_indexed(n, args.jobs, [&](std::size_t i) {
        cli::FramePtr gt = cli::load_frame(gt_files[i].string());
        cli::FramePtr dist = cli::load_frame(dist_files[i].string());
        check(srm_global_shift(gt.get(), dist.get(), args.radius, &dxs[i], &dys[i], &psnrs[i]));
    });

    const int side = 2 * args.radius + 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(side) * side, 0);
    for (std::size_t i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(dys[i] + args.radius) * side + (dxs[i] + args.radius)];

    OutputGuard guard;
    ojson report;
    report["tool_version"] = srm_version();
    report["command"] = "shift-diag";
    report["gt"] = args.gt_dir;
    report["dist"] = args.dist_dir;
    report["radius"] = args.radius;
    ojson grid = ojson::array();
    for (int dy = -args.radius; dy <= args.radius; ++dy) {
        ojson row = ojson::array();
        for (int dx = -args.radius; dx <= args.radius; ++dx)
            row.push_back(counts[static_cast<std::size_t>(dy + args.radius) * side +
                                 (dx + args.radius)]);
        grid.push_back(std::move(row));
    }
    report["counts"] = std::move(grid);
    ojson per_frame = ojson::array();
    for (std::size_t i = 0; i < n; ++i)
        per_frame.push_back({{"index", i},
                             {"gt", gt_files[i].filename().string()},
                             {"dist", dist_files[i].filename().string()},
                             {"dx", dxs[i]},
                             {"dy", dys[i]},
                             {"psnr_db", json_value(psnrs[i])}});
    report["per_frame"] = std::move(per_frame);
    write_text(args.out_json, report.dump(2) + "\n", guard);
    guard.commit();

    std::cerr << "analyzed " << n << " frame pair(s)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-reference detail-restoration metrics and evaluation pipeline"};
    app.require_subcommand(1);
    const unsigned default_jobs = std::max(1u, std::thread::hardware_concurrency());

    ScoreArgs score;
    score.jobs = default_jobs;
    auto* score_cmd = app.add_subcommand("score", "Score a distorted sequence against a reference");
    score_cmd->add_option("gt", score.gt_dir, "Reference frame directory")->required();
    score_cmd->add_option("dist", score.dist_dir, "Distorted frame directory")->required();
    score_cmd->add_option("--metric", score.metric, "Metric: erqa, psnr, or ssim")
        ->check(CLI::IsMember({"erqa", "psnr", "ssim"}));
    score_cmd->add_option("--out", score.out_json, "Report JSON path (empty to skip)");
    score_cmd->add_option("--csv", score.out_csv, "Per-frame CSV path (empty to skip)");
    score_cmd->add_option("--jobs", score.jobs, "Worker threads");
    score_cmd->add_flag("--timing", score.timing,
                        "Embed wall-clock timing in the report (breaks byte-identical reruns)");
    add_config_options(score_cmd, score.config);

    HeatmapArgs heatmap;
    auto* heatmap_cmd = app.add_subcommand("heatmap", "Render matched/missing/hallucinated overlays");
    heatmap_cmd->add_option("gt", heatmap.gt_png, "Reference PNG")->required();
    heatmap_cmd->add_option("dist", heatmap.dist_png, "Distorted PNG")->required();
    heatmap_cmd->add_option("--out", heatmap.out_prefix, "Output path prefix")->required();
    add_config_options(heatmap_cmd, heatmap.config);

    DegradeArgs degrade;
    degrade.jobs = default_jobs;
    auto* degrade_cmd = app.add_subcommand("degrade", "Generate degraded frames");
    degrade_cmd->add_option("input", degrade.in_dir, "Input frame directory")->required();
    degrade_cmd->add_option("--mode", degrade.mode, "bi, bd, noise, or pair")
        ->required()
        ->check(CLI::IsMember({"bi", "bd", "noise", "pair"}));
    degrade_cmd->add_option("--out", degrade.out_dir, "Output directory")->required();
    auto* scale_opt = degrade_cmd->add_option("--scale", degrade.scale, "Downsampling factor");
    auto* sigma_opt =
        degrade_cmd->add_option("--sigma", degrade.sigma, "Gaussian sigma for bd mode");
    auto* offset_opt =
        degrade_cmd->add_option("--offset", degrade.offset, "Sampling offset for bd mode");
    auto* seed_opt = degrade_cmd->add_option("--seed", degrade.seed, "Noise seed");
    degrade_cmd->add_option("--jobs", degrade.jobs, "Worker threads");
    add_config_options(degrade_cmd, degrade.config);

    BtArgs bt;
    auto* bt_cmd = app.add_subcommand("bt", "Fit pairwise-comparison abilities");
    bt_cmd->add_option("votes", bt.votes_csv, "Votes CSV (item_a,item_b,wins_a,wins_b)")
        ->required();
    bt_cmd->add_option("--out", bt.out_json, "Output JSON path");
    bt_cmd->add_option("--smoothing", bt.smoothing,
                       "Add-alpha smoothing for items with zero wins or losses");

    CorrelateArgs correlate;
    auto* corr_cmd =
        app.add_subcommand("correlate", "Correlate feature columns with subjective scores");
    corr_cmd->add_option("features", correlate.features_csv, "Feature matrix CSV")->required();
    corr_cmd->add_option("subjective", correlate.subjective_csv, "Subjective score CSV")
        ->required();
    corr_cmd->add_option("--out", correlate.out_json, "Output JSON path");

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Pick representative items by k-medoids");
    cluster_cmd->add_option("features", cluster.features_csv, "Feature matrix CSV")->required();
    cluster_cmd->add_option("--k", cluster.k, "Cluster count");
    cluster_cmd->add_option("--seed", cluster.seed, "Run seed (echoed into the report)");
    cluster_cmd->add_option("--out", cluster.out_json, "Output JSON path");

    ShiftDiagArgs shift_diag;
    shift_diag.jobs = default_jobs;
    auto* shift_cmd = app.add_subcommand("shift-diag", "Histogram of best global shifts");
    shift_cmd->add_option("gt", shift_diag.gt_dir, "Reference frame directory")->required();
    shift_cmd->add_option("dist", shift_diag.dist_dir, "Distorted frame directory")->required();
    shift_cmd->add_option("--radius", shift_diag.radius, "Shift search radius");
    shift_cmd->add_option("--out", shift_diag.out_json, "Output JSON path");
    shift_cmd->add_option("--jobs", shift_diag.jobs, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        degrade.scale_given = scale_opt->count() > 0;
        degrade.sigma_given = sigma_opt->count() > 0;
        degrade.offset_given = offset_opt->count() > 0;
        degrade.seed_given = seed_opt->count() > 0;
        if (score_cmd->parsed()) return cmd_score(score);
        if (heatmap_cmd->parsed()) return cmd_heatmap(heatmap);
        if (degrade_cmd->parsed()) return cmd_degrade(degrade);
        if (bt_cmd->parsed()) return cmd_bt(bt);
        if (corr_cmd->parsed()) return cmd_correlate(correlate);
        if (cluster_cmd->parsed()) return cmd_cluster(cluster);
        if (shift_cmd->parsed()) return cmd_shift_diag(shift_diag);
        return 1;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
