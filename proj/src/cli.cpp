#include "infosal/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infosal/errors.hpp"
#include "infosal/eval.hpp"
#include "infosal/io.hpp"
#include "infosal/kdp_entropy.hpp"
#include "infosal/saliency.hpp"

namespace infosal::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
    return buf;
}

struct Settings {
    std::string method = "kld";
    std::size_t patch_size = 0;
    std::string denoise = "on";
    std::string pca = "off";
    std::size_t frames = kDefaultFrames;
    std::size_t nsv_radius = kDefaultNsvRadius;
    std::size_t random_count = kDefaultRandomCount;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "pgm8";
    std::string pattern = "*.p?m";
    std::string roles;
    std::string table;
    bool labels = false;
    std::size_t max_log2n = 20;
    std::vector<std::string> inputs;

    Method method_enum() const { return method == "con" ? Method::con : Method::kld; }
    std::size_t patch() const {
        return patch_size == 0 ? default_patch_size(method_enum()) : patch_size;
    }
    MapFormat map_format() const { return format == "raw64" ? MapFormat::raw64 : MapFormat::pgm8; }
};

void add_map_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--method", s.method, "con or kld")->check(CLI::IsMember({"con", "kld"}));
    cmd->add_option("--patch-size", s.patch_size, "patch side in pixels (default 7 kld, 8 con)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--denoise", s.denoise, "bivariate shrinkage on|off")
        ->check(CLI::IsMember({"on", "off"}));
}

void add_output_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--out", s.out_path, "output map path")->required();
    cmd->add_option("--format", s.format, "pgm8 or raw64")->check(CLI::IsMember({"pgm8", "raw64"}));
}

// Splits positional inputs into map files and exactly one fixation CSV.
struct MapsAndFixations {
    std::vector<fs::path> maps;
    fs::path fixations;
};

MapsAndFixations split_inputs(const std::vector<std::string>& inputs) {
    MapsAndFixations out;
    for (const auto& in : inputs) {
        if (fs::path(in).extension() == ".csv") {
            if (!out.fixations.empty()) throw InputError("more than one fixation CSV given");
            out.fixations = in;
        } else {
            out.maps.emplace_back(in);
        }
    }
    if (out.fixations.empty()) throw InputError("no fixation CSV given");
    if (out.maps.empty()) throw InputError("no saliency maps given");
    return out;
}

struct Summary {
    std::vector<double> values;

    void add(double v) { values.push_back(v); }
    double mean() const {
        double acc = 0.0;
        for (double v : values) acc += v;
        return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
    }
    // Population variance.
    double variance() const {
        if (values.empty()) return 0.0;
        const double m = mean();
        double acc = 0.0;
        for (double v : values) acc += (v - m) * (v - m);
        return acc / static_cast<double>(values.size());
    }
};

FrameStack load_frames(const Settings& s) {
    if (s.inputs.empty()) throw InputError("no frames given");
    std::vector<fs::path> paths;
    if (s.inputs.size() == 1 && fs::is_directory(s.inputs.front())) {
        const auto manifest = list_frame_sequence(s.inputs.front(), s.pattern);
        for (const auto& n : manifest.names) paths.push_back(manifest.directory / n);
    } else {
        for (const auto& in : s.inputs) paths.emplace_back(in);
    }
    if (paths.size() < s.frames) {
        throw InputError("need " + std::to_string(s.frames) + " frames, got " +
                         std::to_string(paths.size()));
    }
    FrameStack stack;
    for (std::size_t i = paths.size() - s.frames; i < paths.size(); ++i) {
        stack.frames.push_back(read_image(paths[i]));
    }
    return stack;
}

TemporalOptions temporal_options(const Settings& s) {
    TemporalOptions o;
    o.method = s.method_enum();
    o.patch_size = s.patch();
    o.denoise = s.denoise == "on";
    o.frames = s.frames;
    return o;
}

int cmd_spatial(const Settings& s) {
    if (s.inputs.size() != 1) throw InputError("spatial takes exactly one image");
    SpatialOptions o;
    o.method = s.method_enum();
    o.patch_size = s.patch();
    o.preprocess = s.denoise == "on" ? Preprocess::msf_denoised : Preprocess::msf;
    o.pca = s.pca == "on";
    const SaliencyMap map = spatial_saliency(read_image(s.inputs.front()), o);
    write_saliency(map.values, s.out_path, s.map_format());
    return kExitOk;
}

int cmd_temporal(const Settings& s, bool with_spatial) {
    const FrameStack stack = load_frames(s);
    const TemporalOptions o = temporal_options(s);
    const SaliencyMap map =
        with_spatial ? spatiotemporal_saliency(stack, o) : temporal_saliency(stack, o);
    write_saliency(map.values, s.out_path, s.map_format());
    return kExitOk;
}

int cmd_bias_ratio(const Settings& s, std::ostream& out) {
    if (s.inputs.size() != 1) throw InputError("bias-ratio takes exactly one image");
    const ImagePlane image = read_image(s.inputs.front());
    const Preprocess pre = s.denoise == "on" ? Preprocess::msf_denoised : Preprocess::msf;
    std::vector<std::size_t> sizes;
    if (s.patch_size != 0) {
        sizes.push_back(s.patch_size);
    } else {
        for (std::size_t p = 7; p <= 21; p += 2) sizes.push_back(p);
    }
    out << "patch_size,bias_ratio\n";
    for (std::size_t p : sizes) out << p << "," << num(bias_ratio(image, p, pre)) << "\n";
    return kExitOk;
}

void print_summary(std::ostream& out, const std::vector<Summary>& columns) {
    out << "mean";
    for (const auto& c : columns) out << "," << num(c.mean());
    out << "\nvariance";
    for (const auto& c : columns) out << "," << num(c.variance());
    out << "\n";
}

int cmd_eval_roc(const Settings& s, std::ostream& out) {
    const auto in = split_inputs(s.inputs);
    const FixationSet fix = read_fixations(in.fixations);
    Summary col;
    out << "frame,auc\n";
    for (std::size_t f = 0; f < in.maps.size(); ++f) {
        if (fix.for_frame(f).records.empty()) continue;
        const double a = auc(roc_curve(read_map(in.maps[f]), fix, f));
        col.add(a);
        out << f << "," << num(a) << "\n";
    }
    print_summary(out, {col});
    return kExitOk;
}

int cmd_eval_isroc(const Settings& s, std::ostream& out) {
    const auto in = split_inputs(s.inputs);
    const FixationSet fix = read_fixations(in.fixations);
    std::vector<FixationSet> subjects;
    for (const auto& name : fix.subjects()) subjects.push_back(fix.for_subject(name));
    if (subjects.size() < 2) throw InputError("eval-isroc needs a subject column with >= 2 subjects");
    Summary isroc_col;
    Summary auc_col;
    out << "frame,isroc,map_auc\n";
    for (std::size_t f = 0; f < in.maps.size(); ++f) {
        if (fix.for_frame(f).records.empty()) continue;
        const ImagePlane map = read_map(in.maps[f]);
        const double is = intersubject_roc(subjects, f, map.width(), map.height());
        const double a = auc(roc_curve(map, fix, f));
        isroc_col.add(is);
        auc_col.add(a);
        out << f << "," << num(is) << "," << num(a) << "\n";
    }
    print_summary(out, {isroc_col, auc_col});
    return kExitOk;
}

int cmd_eval_nsv(const Settings& s, std::ostream& out) {
    const auto in = split_inputs(s.inputs);
    const FixationSet fix = read_fixations(in.fixations);
    Summary per_frame;
    Summary pooled;
    out << "frame,nsv\n";
    for (std::size_t f = 0; f < in.maps.size(); ++f) {
        const auto here = fix.for_frame(f).records;
        if (here.empty()) continue;
        const ImagePlane map = read_map(in.maps[f]);
        Summary frame_values;
        for (const auto& r : here) {
            const double v = nsv(map, r, s.nsv_radius);
            frame_values.add(v);
            pooled.add(v);
        }
        per_frame.add(frame_values.mean());
        out << f << "," << num(frame_values.mean()) << "\n";
    }
    print_summary(out, {per_frame});
    out << "pooled_mean," << num(pooled.mean()) << "\n";
    return kExitOk;
}

int cmd_eval_cas(const Settings& s, std::ostream& out) {
    const auto in = split_inputs(s.inputs);
    const FixationSet fix = read_fixations(in.fixations);
    Summary col;
    out << "frame,cas\n";
    for (std::size_t f = 0; f < in.maps.size(); ++f) {
        if (fix.for_frame(f).records.empty()) continue;
        const double c =
            cas(read_map(in.maps[f]), fix, f, s.nsv_radius, s.random_count, s.seed + f);
        col.add(c);
        out << f << "," << num(c) << "\n";
    }
    print_summary(out, {col});
    return kExitOk;
}

int cmd_eval_xcorr(const Settings& s, std::ostream& out) {
    if (s.inputs.empty() || s.inputs.size() % 2 != 0) {
        throw InputError("eval-xcorr takes MAP IMPORTANCE pairs");
    }
    const ImportanceTable table =
        s.table.empty() ? default_importance_table() : read_importance_table(s.table);
    Summary col;
    out << "frame,normxcorr\n";
    for (std::size_t f = 0; f < s.inputs.size() / 2; ++f) {
        const ImagePlane map = read_map(s.inputs[2 * f]);
        const ImagePlane importance = s.labels
                                          ? importance_from_labels(read_label_map(s.inputs[2 * f + 1]), table)
                                          : read_map(s.inputs[2 * f + 1]);
        const double v = normxcorr(map, importance);
        col.add(v);
        out << f << "," << num(v) << "\n";
    }
    print_summary(out, {col});
    return kExitOk;
}

SampleMatrix read_sample_csv(const fs::path& path) {
    const std::string text = read_file(path);
    std::vector<double> values;
    std::size_t n_dims = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        bool numeric = true;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string field = line.substr(pos, comma - pos);
            char* end_ptr = nullptr;
            const double v = std::strtod(field.c_str(), &end_ptr);
            if (field.empty() || end_ptr == field.c_str() ||
                std::string(end_ptr).find_first_not_of(" \t") != std::string::npos) {
                numeric = false;
            }
            row.push_back(v);
            pos = comma + 1;
        }
        if (!numeric) {
            if (rows == 0 && values.empty()) continue;  // header
            throw FormatError("non-numeric sample on line " + std::to_string(line_no),
                              FormatError::Unit::line, line_no);
        }
        if (n_dims == 0) n_dims = row.size();
        if (row.size() != n_dims) {
            throw FormatError("expected " + std::to_string(n_dims) + " columns on line " +
                                  std::to_string(line_no),
                              FormatError::Unit::line, line_no);
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw InputError("sample file has no rows");
    return SampleMatrix::from_rows(values, rows, n_dims);
}

int cmd_entropy(const Settings& s, std::ostream& out) {
    if (s.inputs.size() != 1) throw InputError("entropy takes exactly one CSV file");
    SampleMatrix samples = read_sample_csv(s.inputs.front());
    double value = 0.0;
    if (s.roles.empty()) {
        value = estimate_joint_entropy(samples);
    } else {
        std::vector<DimRole> roles;
        for (char c : s.roles) {
            if (c == 's') {
                roles.push_back(DimRole::surround);
            } else if (c == 'c') {
                roles.push_back(DimRole::center);
            } else {
                throw InputError("roles must be a string of 's' and 'c'");
            }
        }
        samples.set_roles(std::move(roles));
        value = s.method == "con" ? estimate_conditional_entropy(samples)
                                  : estimate_kl_divergence(samples);
    }
    out << num(value) << "\n";
    return kExitOk;
}

// Band-limited random texture, deterministic for a seed.
ImagePlane synthetic_texture(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    ImagePlane noise(w, h);
    for (double& v : noise.values()) v = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    ImagePlane out(w, h);
    constexpr std::size_t r = 2;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            std::size_t n = 0;
            for (std::size_t yy = y >= r ? y - r : 0; yy <= std::min(h - 1, y + r); ++yy) {
                for (std::size_t xx = x >= r ? x - r : 0; xx <= std::min(w - 1, x + r); ++xx) {
                    acc += noise(xx, yy);
                    ++n;
                }
            }
            out(x, y) = acc / static_cast<double>(n);
        }
    }
    return out;
}

template <class F>
double median_seconds(F&& f, int runs) {
    std::vector<double> t;
    for (int i = 0; i < runs; ++i) {
        const auto start = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

int cmd_bench(const Settings& s, std::ostream& out) {
    const ImagePlane image =
        s.inputs.empty() ? synthetic_texture(720, 544, s.seed) : read_image(s.inputs.front());
    const std::size_t p = s.patch_size == 0 ? 8 : s.patch_size;
    SpatialOptions con_options;
    con_options.method = Method::con;
    con_options.patch_size = p;
    SpatialOptions kld_options = con_options;
    kld_options.method = Method::kld;
    // One warm-up, then alternate the methods so load drift hits both alike.
    (void)spatial_saliency(image, kld_options);
    std::vector<double> con_times;
    std::vector<double> kld_times;
    for (int i = 0; i < 5; ++i) {
        con_times.push_back(median_seconds([&] { (void)spatial_saliency(image, con_options); }, 1));
        kld_times.push_back(median_seconds([&] { (void)spatial_saliency(image, kld_options); }, 1));
    }
    std::sort(con_times.begin(), con_times.end());
    std::sort(kld_times.begin(), kld_times.end());
    const double con = con_times[2];
    const double kld = kld_times[2];
    out << "method,patch_size,median_seconds\n";
    out << "CON," << p << "," << num(con) << "\n";
    out << "KLD," << p << "," << num(kld) << "\n";
    out << "kld_over_con," << num(kld / con) << "\n";

    std::mt19937_64 engine(s.seed);
    std::vector<double> xs;
    std::vector<double> ys;
    out << "n,dims,seconds\n";
    for (std::size_t e = 10; e <= s.max_log2n; ++e) {
        const std::size_t n = std::size_t{1} << e;
        SampleMatrix m(n, 5);
        for (std::size_t d = 0; d < 5; ++d) {
            for (double& v : m.column(d)) v = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        }
        const double t = median_seconds([&] { (void)estimate_joint_entropy(m); }, 3);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(t));
        out << n << ",5," << num(t) << "\n";
    }
    if (xs.size() >= 2) {
        const double mx = Summary{xs}.mean();
        const double my = Summary{ys}.mean();
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        out << "loglog_slope," << num(sxy / sxx) << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information-theoretic visual saliency and its evaluation metrics", "infosal"};
    app.require_subcommand(1);
    Settings s;

    auto* spatial = app.add_subcommand("spatial", "spatial saliency map of one image");
    add_map_flags(spatial, s);
    spatial->add_option("--pca", s.pca, "eight-neighbour context with PCA on|off")
        ->check(CLI::IsMember({"on", "off"}));
    add_output_flags(spatial, s);
    spatial->add_option("image", s.inputs, "PGM/PPM image")->required();

    auto* temporal = app.add_subcommand("temporal", "temporal saliency of the last frames");
    auto* spatiotemporal =
        app.add_subcommand("spatiotemporal", "spatial plus temporal saliency of the last frame");
    for (auto* cmd : {temporal, spatiotemporal}) {
        add_map_flags(cmd, s);
        cmd->add_option("--frames", s.frames, "frames per stack")->check(CLI::Range(4, 1024));
        cmd->add_option("--pattern", s.pattern, "frame file glob when a directory is given");
        add_output_flags(cmd, s);
        cmd->add_option("inputs", s.inputs, "frame directory or frame files, oldest first")
            ->required();
    }

    auto* bias = app.add_subcommand("bias-ratio", "fraction of negative KL patches");
    bias->add_option("--patch-size", s.patch_size, "single patch size (default: sweep 7..21)")
        ->check(CLI::PositiveNumber);
    bias->add_option("--denoise", s.denoise, "bivariate shrinkage on|off")
        ->check(CLI::IsMember({"on", "off"}));
    bias->add_option("image", s.inputs, "PGM/PPM image")->required();

    auto* roc = app.add_subcommand("eval-roc", "ROC area of maps against fixations");
    auto* isroc = app.add_subcommand("eval-isroc", "inter-subject ROC and map AUC");
    auto* nsv_cmd = app.add_subcommand("eval-nsv", "normalized saliency value at fixations");
    auto* cas_cmd = app.add_subcommand("eval-cas", "chance-adjusted saliency");
    for (auto* cmd : {roc, isroc, nsv_cmd, cas_cmd}) {
        cmd->add_option("inputs", s.inputs, "maps in frame order, then FIXATIONS.csv")->required();
    }
    for (auto* cmd : {nsv_cmd, cas_cmd}) {
        cmd->add_option("--nsv-radius", s.nsv_radius, "half-width of the NSV window in pixels");
    }
    cas_cmd->add_option("--random-count", s.random_count, "random fixations per frame")
        ->check(CLI::PositiveNumber);
    cas_cmd->add_option("--seed", s.seed, "random seed (frame f uses seed + f)");

    auto* xcorr = app.add_subcommand("eval-xcorr", "normalized cross-correlation with importance");
    xcorr->add_option("inputs", s.inputs, "MAP IMPORTANCE pairs")->required();
    xcorr->add_flag("--labels", s.labels, "IMPORTANCE files are class-id label maps");
    xcorr->add_option("--table", s.table, "importance table CSV for --labels");

    auto* entropy = app.add_subcommand("entropy", "entropy or KL estimate of a CSV sample matrix");
    entropy->add_option("samples", s.inputs, "CSV, one sample per row")->required();
    entropy->add_option("--roles", s.roles, "per-column roles, e.g. ssssc");
    entropy->add_option("--method", s.method, "con or kld")->check(CLI::IsMember({"con", "kld"}));

    auto* bench = app.add_subcommand("bench", "CON vs KLD timing and estimator N-scaling");
    bench->add_option("image", s.inputs, "optional PGM/PPM image");
    bench->add_option("--patch-size", s.patch_size, "patch size for the timing run")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", s.seed, "seed for synthetic data");
    bench->add_option("--max-log2n", s.max_log2n, "largest N as a power of two")
        ->check(CLI::Range(10, 24));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInputError;
    }

    try {
        if (spatial->parsed()) return cmd_spatial(s);
        if (temporal->parsed()) return cmd_temporal(s, false);
        if (spatiotemporal->parsed()) return cmd_temporal(s, true);
        if (bias->parsed()) return cmd_bias_ratio(s, out);
        if (roc->parsed()) return cmd_eval_roc(s, out);
        if (isroc->parsed()) return cmd_eval_isroc(s, out);
        if (nsv_cmd->parsed()) return cmd_eval_nsv(s, out);
        if (cas_cmd->parsed()) return cmd_eval_cas(s, out);
        if (xcorr->parsed()) return cmd_eval_xcorr(s, out);
        if (entropy->parsed()) return cmd_entropy(s, out);
        if (bench->parsed()) return cmd_bench(s, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
    err << app.help();
    return kExitInputError;
}

}  // namespace infosal::cli
